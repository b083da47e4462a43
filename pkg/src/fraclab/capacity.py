"""Condenser and u-capacities as constrained quadratic minimizations.

Both capacities minimize the nonlocal quadratic form over nodal vectors
pinned on the mask of the compact set (to one, or to the supplied data)
and to zero outside the admissible free set. The minimizer solves the
Schur system A_ff x_f = -A_fc x_c by dense Cholesky, so the discrete
stationarity residual on free nodes is a direct optimality certificate.

Whole-line values are reached by solving on a growing family of boxes at
fixed spacing; the sequence is monotone nonincreasing and is reported
with its final Cauchy gap instead of assuming any extrapolation model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .angular import Profile
from .assembly import StiffnessOperator, assemble_stiffness
from .core import FracParams, NodeMask, build_grid, nodes_in_set
from .errors import ConsistencyError, NumericalError, ParameterError

__all__ = [
    "CapacityResult",
    "ExtrapolationResult",
    "condenser_capacity",
    "u_capacity",
    "whole_line_u_capacity",
]


@dataclass(frozen=True)
class CapacityResult:
    """Capacity value with its discrete potential and optimality residual.

    ``potential`` spans all interior nodes with the constraints embedded;
    ``residual`` is the max stationarity defect on free nodes, relative
    to the row-sum norm of A times the potential's sup norm.
    """

    value: float
    potential: np.ndarray = field(repr=False)
    residual: float
    warning: str | None = None


def _solve_constrained(
    A: StiffnessOperator, omega_free, k_nodes: np.ndarray, k_values: np.ndarray
) -> CapacityResult:
    n = A.grid.n_interior
    omega = np.asarray(sorted(set(int(i) for i in omega_free)), dtype=np.intp)
    if omega.size and (omega.min() < 1 or omega.max() > n):
        raise ParameterError("omega_free nodes must be interior (1..n_cells-1)")
    if not np.isin(k_nodes, omega).all():
        raise ParameterError("constrained nodes must lie inside omega_free")

    dense = A.dense()
    x = np.zeros(n)
    x[k_nodes - 1] = k_values
    free = np.setdiff1d(omega, k_nodes) - 1
    warning = None
    if free.size == 0:
        if k_nodes.size:
            warning = "set covers every node of omega: value is the pinned form"
    else:
        Aff = dense[np.ix_(free, free)]
        rhs = -dense[np.ix_(free, k_nodes - 1)] @ k_values
        try:
            cho = sla.cho_factor(Aff, check_finite=False)
        except sla.LinAlgError as exc:
            raise NumericalError(f"free-free block not SPD: {exc}") from exc
        x[free] = sla.cho_solve(cho, rhs, check_finite=False)

    value = A.quadratic_form(x)
    residual = 0.0
    if free.size:
        defect = float(np.max(np.abs((dense @ x)[free])))
        scale = float(np.abs(dense).sum(axis=1).max()) * max(
            1.0, float(np.max(np.abs(x)))
        )
        residual = defect / scale
    return CapacityResult(value=value, potential=x, residual=residual, warning=warning)


def condenser_capacity(
    A: StiffnessOperator, omega_free, k_mask: NodeMask
) -> CapacityResult:
    """Minimal form value among vectors equal to 1 on the mask, 0 outside
    ``omega_free``; the minimizer is the discrete capacitary potential."""
    if k_mask.is_empty:
        n = A.grid.n_interior
        return CapacityResult(value=0.0, potential=np.zeros(n), residual=0.0)
    k_nodes = k_mask.node_indices
    return _solve_constrained(A, omega_free, k_nodes, np.ones(k_nodes.size))


def u_capacity(
    A: StiffnessOperator, omega_free, k_mask: NodeMask, u: np.ndarray
) -> CapacityResult:
    """Same minimization with boundary data ``u`` on the mask nodes."""
    u = np.asarray(u, dtype=float)
    if u.shape != (A.grid.n_interior,):
        raise ParameterError(
            f"u must live on all interior nodes ({A.grid.n_interior},), got {u.shape}"
        )
    if k_mask.is_empty:
        return CapacityResult(
            value=0.0, potential=np.zeros(A.grid.n_interior), residual=0.0
        )
    k_nodes = k_mask.node_indices
    return _solve_constrained(A, omega_free, k_nodes, u[k_nodes - 1])


@dataclass(frozen=True)
class ExtrapolationResult:
    """Box-family capacities at fixed spacing: values per box half-width,
    final value, and the relative gap between the last two boxes."""

    r_values: tuple[float, ...]
    capacities: np.ndarray
    value: float
    cauchy_gap: float


def whole_line_u_capacity(
    params: FracParams,
    k_intervals,
    profile: Profile,
    r_list,
    cells_per_unit: int,
) -> ExtrapolationResult:
    """Capacity of a compact set with profile data, on boxes (-R, R).

    Spacing is pinned at 1/cells_per_unit for every box so the discrete
    feasible sets are nested and the sequence decreases monotonically;
    the last two boxes give the reported Cauchy gap. No extrapolation
    model in R is assumed.
    """
    r_list = [float(r) for r in r_list]
    if len(r_list) < 2 or any(b <= a for a, b in zip(r_list, r_list[1:])):
        raise ParameterError("r_list must be at least two increasing box sizes")
    if not (isinstance(cells_per_unit, int) and cells_per_unit >= 1):
        raise ParameterError("cells_per_unit must be a positive integer")
    k_edge = max(abs(float(e)) for iv in k_intervals for e in iv)
    if k_edge >= r_list[0]:
        raise ParameterError(
            f"set reaches {k_edge}, outside the smallest box R={r_list[0]}"
        )

    caps = []
    for r in r_list:
        n_cells = int(round(2.0 * r * cells_per_unit))
        if abs(n_cells - 2.0 * r * cells_per_unit) > 1e-9:
            raise ParameterError(f"R={r} is not a whole number of cells")
        grid = build_grid(-r, r, n_cells)
        A = assemble_stiffness(grid, params)
        mask = nodes_in_set(grid, k_intervals)
        u = profile(grid.interior_nodes)
        res = u_capacity(A, grid.interior_indices, mask, u)
        caps.append(res.value)

    caps = np.asarray(caps)
    scale = max(float(np.max(np.abs(caps))), 1e-300)
    if np.any(np.diff(caps) > 1e-10 * scale):
        raise ConsistencyError(
            f"box capacities increased along {r_list}: {caps.tolist()}"
        )
    gap = abs(caps[-1] - caps[-2]) / max(abs(caps[-1]), 1e-300)
    return ExtrapolationResult(
        r_values=tuple(r_list),
        capacities=caps,
        value=float(caps[-1]),
        cauchy_gap=float(gap),
    )
