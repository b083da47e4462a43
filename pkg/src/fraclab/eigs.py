"""Generalized symmetric eigensolver for the exterior-zero nonlocal problem.

Dense Cholesky-reduced solves (LAPACK sygvd/sygvx) at desk scale; vectors
come back mass-orthonormal, ascending, sign-fixed so repeated runs agree
bitwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .assembly import MassOperator, StiffnessOperator
from .errors import NumericalError, ParameterError

__all__ = ["EigenPairs", "solve_eigs", "rayleigh"]

DEFAULT_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class EigenPairs:
    """Ascending eigenvalues with mass-orthonormal, sign-fixed vectors.

    ``vectors[:, j]`` lives on all interior nodes; entries outside the
    free set used in the solve are exactly zero. ``residuals[j]`` is
    ||A x - lambda M x|| / max(lambda ||M x||, tiny).
    """

    count: int
    values: np.ndarray
    vectors: np.ndarray = field(repr=False)
    residuals: np.ndarray = field(repr=False)
    free: np.ndarray = field(repr=False)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Largest-magnitude entry positive; ties broken by lowest row index."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        k = int(np.argmax(np.abs(col)))  # argmax takes the first maximizer
        if col[k] < 0:
            out[:, j] = -col
    return out


def solve_eigs(
    A: StiffnessOperator,
    M: MassOperator,
    free,
    count: int,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
) -> EigenPairs:
    """First ``count`` eigenpairs of (A, M) restricted to the free node set.

    ``free`` holds global node indices (subset of 1..n_cells-1); nodes
    outside it are pinned to zero, which is how a removed compact set
    enters the spectrum.
    """
    free = np.asarray(sorted(set(int(i) for i in free)), dtype=np.intp)
    if free.size == 0:
        raise ParameterError("free node set is empty")
    n_int = A.grid.n_interior
    if free.min() < 1 or free.max() > n_int:
        raise ParameterError("free nodes must be interior (1..n_cells-1)")
    if not (1 <= count <= free.size):
        raise ParameterError(f"count={count} not in 1..{free.size}")

    pos = free - 1  # interior positions
    Af = A.dense()[np.ix_(pos, pos)]
    Mf = M.dense()[np.ix_(pos, pos)]
    try:
        if count == free.size:
            vals, vecs = sla.eigh(Af, Mf)
        else:
            vals, vecs = sla.eigh(Af, Mf, subset_by_index=[0, count - 1])
    except sla.LinAlgError as exc:  # pragma: no cover - LAPACK breakdown
        raise NumericalError(f"generalized eigensolve failed: {exc}") from exc
    vals = vals[:count]
    vecs = vecs[:, :count]

    full = np.zeros((n_int, count))
    full[pos, :] = vecs
    full = _fix_signs(full)

    Ad, Md = A.dense(), M.dense()
    residuals = np.empty(count)
    for j in range(count):
        x = full[:, j]
        r = Ad @ x - vals[j] * (Md @ x)
        scale = max(abs(vals[j]) * float(np.linalg.norm(Md @ x)), 1e-300)
        residuals[j] = float(np.linalg.norm(r)) / scale
    if np.any(residuals > residual_tol * 1e3):
        worst = float(residuals.max())
        raise NumericalError(
            f"eigenpair residual {worst:.3e} exceeds {residual_tol*1e3:.1e}; "
            f"count={count}, free={free.size}"
        )
    return EigenPairs(
        count=count, values=vals, vectors=full, residuals=residuals, free=free
    )


def rayleigh(A: StiffnessOperator, M: MassOperator, x: np.ndarray) -> float:
    """Quotient (x^T A x) / (x^T M x); rejects vectors of zero mass norm."""
    x = np.asarray(x, dtype=float)
    mnorm = M.quadratic_form(x)
    if mnorm <= 0.0:
        raise ParameterError("rayleigh quotient needs x^T M x > 0")
    return A.quadratic_form(x) / mnorm
