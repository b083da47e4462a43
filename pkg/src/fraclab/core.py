"""Problem parameters, uniform grids, and node masks for compact subsets.

The parameter record carries the four explicit constants that every other
module consumes:

* ``c_ns``   -- normalization of the nonlocal quadratic form,
  ``C(N,s) = pi^{-N/2} 4^s Gamma((N+2s)/2) / Gamma(2-s) * s(1-s)``;
* ``kappa_s`` -- Dirichlet-to-Neumann constant of the weighted half-space
  extension, ``Gamma(1-s) / (2^{2s-1} Gamma(s))``;
* ``lambda_hardy`` -- sharp constant of the fractional Hardy inequality,
  ``4^s Gamma^2((N+2s)/4) / Gamma^2((N-2s)/4)``;
* ``two_star`` -- critical embedding exponent ``2N/(N-2s)``.

All evaluations funnel through ``math.gamma`` (a Lanczos-type
implementation accurate to < 1 ulp); the test corpus pins it against 20
high-precision reference values and checks every derived constant to
1e-12 relative against an arbitrary-precision oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, GridError, ParameterError, ResolutionError

__all__ = ["FracParams", "Grid", "NodeMask", "make_params", "build_grid", "nodes_in_set"]


@dataclass(frozen=True)
class FracParams:
    """Dimension, fractional order, and the derived explicit constants."""

    n_dim: int
    s: float
    c_ns: float
    kappa_s: float
    lambda_hardy: float
    two_star: float


def make_params(n_dim: int, s: float) -> FracParams:
    """Validate (n_dim, s) and populate the explicit constants.

    Requires ``0 < s < min(1, n_dim/2)`` strictly; the closed forms are
    evaluated with ``math.gamma`` and are deterministic (pure function of
    the inputs, bitwise reproducible).
    """
    if not (isinstance(n_dim, int) and n_dim >= 1):
        raise ParameterError(f"n_dim must be a positive integer, got {n_dim!r}")
    s = float(s)
    upper = min(1.0, n_dim / 2.0)
    if not (0.0 < s < upper):
        raise ParameterError(
            f"s={s} violates 0 < s < min(1, N/2) = {upper} for N={n_dim}"
        )
    n = n_dim
    c_ns = (
        math.pi ** (-n / 2.0)
        * 2.0 ** (2.0 * s)
        * math.gamma((n + 2.0 * s) / 2.0)
        / math.gamma(2.0 - s)
        * s
        * (1.0 - s)
    )
    kappa = math.gamma(1.0 - s) / (2.0 ** (2.0 * s - 1.0) * math.gamma(s))
    lam = (
        2.0 ** (2.0 * s)
        * math.gamma((n + 2.0 * s) / 4.0) ** 2
        / math.gamma((n - 2.0 * s) / 4.0) ** 2
    )
    two_star = 2.0 * n / (n - 2.0 * s)
    return FracParams(
        n_dim=n_dim,
        s=s,
        c_ns=c_ns,
        kappa_s=kappa,
        lambda_hardy=lam,
        two_star=two_star,
    )


@dataclass(frozen=True)
class Grid:
    """Uniform grid on an open interval; exterior-zero condition lives on
    the two boundary nodes, unknowns on the ``n_cells - 1`` interior ones."""

    x_min: float
    x_max: float
    n_cells: int
    h: float
    nodes: np.ndarray = field(repr=False)

    @property
    def n_interior(self) -> int:
        return self.n_cells - 1

    @property
    def interior_nodes(self) -> np.ndarray:
        """Coordinates of the interior nodes (indices 1 .. n_cells-1)."""
        return self.nodes[1:-1]

    @property
    def interior_indices(self) -> np.ndarray:
        return np.arange(1, self.n_cells)

    def diameter(self) -> float:
        return self.x_max - self.x_min


def build_grid(x_min: float, x_max: float, n_cells: int) -> Grid:
    """Uniform grid with ``n_cells`` cells; fails on degenerate input."""
    x_min, x_max = float(x_min), float(x_max)
    if not (x_min < x_max):
        raise GridError(f"need x_min < x_max, got [{x_min}, {x_max}]")
    if not (isinstance(n_cells, (int, np.integer)) and n_cells >= 2):
        raise GridError(f"n_cells must be an integer >= 2, got {n_cells!r}")
    n_cells = int(n_cells)
    h = (x_max - x_min) / n_cells
    nodes = x_min + h * np.arange(n_cells + 1)
    nodes.flags.writeable = False
    return Grid(x_min=x_min, x_max=x_max, n_cells=n_cells, h=h, nodes=nodes)


@dataclass(frozen=True)
class NodeMask:
    """Interior-node carrier of a compact union of closed intervals.

    ``node_indices`` are global node indices (values in 1..n_cells-1),
    sorted ascending. Masks never snap: an interval that covers no
    interior node raises instead of being silently widened.
    """

    intervals: tuple[tuple[float, float], ...]
    node_indices: np.ndarray = field(repr=False)

    @property
    def is_empty(self) -> bool:
        return self.node_indices.size == 0


def nodes_in_set(grid: Grid, intervals) -> NodeMask:
    """Mask of interior nodes covered by a disjoint family of closed intervals.

    Every interval must lie strictly inside (x_min, x_max) and cover at
    least one interior node. An empty family yields an empty mask.
    """
    ivs = []
    for iv in intervals:
        a, b = float(iv[0]), float(iv[1])
        if not (a <= b):
            raise GeometryError(f"interval [{a}, {b}] is reversed")
        if not (grid.x_min < a and b < grid.x_max):
            raise GeometryError(
                f"interval [{a}, {b}] must lie strictly inside "
                f"({grid.x_min}, {grid.x_max})"
            )
        ivs.append((a, b))
    ivs.sort()
    for (a1, b1), (a2, b2) in zip(ivs, ivs[1:]):
        if b1 >= a2:
            raise GeometryError(f"intervals [{a1},{b1}] and [{a2},{b2}] overlap")

    # tolerance guards against endpoints that are exact node multiples in
    # real arithmetic but differ in the last ulp after the affine map
    tol = 1e-9 * grid.h
    idx: list[int] = []
    for a, b in ivs:
        inside = np.nonzero(
            (grid.nodes >= a - tol) & (grid.nodes <= b + tol)
        )[0]
        inside = inside[(inside >= 1) & (inside <= grid.n_cells - 1)]
        if inside.size == 0:
            raise ResolutionError(
                f"interval [{a}, {b}] covers no interior node (h={grid.h}); "
                "refine the grid"
            )
        idx.extend(int(i) for i in inside)
    node_indices = np.array(sorted(set(idx)), dtype=np.intp)
    node_indices.flags.writeable = False
    return NodeMask(intervals=tuple(ivs), node_indices=node_indices)
