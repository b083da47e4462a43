"""Second, independent discretization: the weighted half-plane problem.

Functions on a truncated half-plane box carry the degenerate weight
t^{1-2s}; eliminating everything above the trace line yields a dense
Schur complement S on the trace nodes that realizes the nonlocal operator
as a Dirichlet-to-Neumann map, S ~ kappa_s * (direct stiffness). The box
extends laterally beyond the domain interval: trace nodes outside it are
pinned to zero (that IS the exterior condition), the artificial walls and
top carry zero as truncation. Pinning the walls at the domain endpoints
instead would produce the spectral power of the Dirichlet Laplacian, a
different operator, so box width is a convergence parameter here.

Bilinear tensor elements; the t-weight is integrated in closed form per
layer (moments of t^{1-2s}), the x-direction uses exact hat integrals.
Strong grading of the t-layers (beta ~ 4) is needed so that trace
oscillations at the mesh scale h see resolved extensions: their decay
depth is of order h.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import MassOperator
from .core import FracParams, Grid
from .errors import NumericalError, ParameterError

__all__ = [
    "ExtMesh",
    "ExtOperator",
    "TraceOperator",
    "build_extension_mesh",
    "assemble_extension",
    "dtn_schur",
    "extension_eigs",
    "extension_capacity",
    "weighted_hardy_terms",
]


@dataclass(frozen=True)
class ExtMesh:
    """Tensor mesh: x-grid of the box times graded t-layers T*(j/m)^beta."""

    grid: Grid
    T: float
    m_t: int
    beta: float
    t_layers: np.ndarray = field(repr=False)


def build_extension_mesh(grid: Grid, T: float, m_t: int, beta: float) -> ExtMesh:
    if not (T > 0.0):
        raise ParameterError(f"T must be positive, got {T}")
    if not (isinstance(m_t, int) and m_t >= 4):
        raise ParameterError(f"m_t must be an integer >= 4, got {m_t!r}")
    beta = float(beta)
    if beta < 1.0:
        raise ParameterError(f"beta must be >= 1, got {beta}")
    t = T * (np.arange(m_t + 1) / m_t) ** beta
    t.flags.writeable = False
    return ExtMesh(grid=grid, T=float(T), m_t=m_t, beta=beta, t_layers=t)


def _t_blocks(mesh: ExtMesh, s: float):
    """Per-layer exact weight integrals assembled into tridiagonal t-mass
    and t-stiffness over the free layer nodes 0..m_t-1 (top eliminated)."""
    w = 1.0 - 2.0 * s
    m = mesh.m_t
    t = mesh.t_layers
    Mt = sp.lil_matrix((m, m))
    Kt = sp.lil_matrix((m, m))
    for j in range(m):
        a, b = float(t[j]), float(t[j + 1])
        ell = b - a
        mom = [(b ** (w + q + 1) - a ** (w + q + 1)) / (w + q + 1) for q in range(3)]
        m00 = (b * b * mom[0] - 2 * b * mom[1] + mom[2]) / ell**2
        m01 = (-a * b * mom[0] + (a + b) * mom[1] - mom[2]) / ell**2
        m11 = (a * a * mom[0] - 2 * a * mom[1] + mom[2]) / ell**2
        k_loc = mom[0] / ell**2
        Mt[j, j] += m00
        Kt[j, j] += k_loc
        if j + 1 < m:
            Mt[j, j + 1] += m01
            Mt[j + 1, j] += m01
            Mt[j + 1, j + 1] += m11
            Kt[j, j + 1] -= k_loc
            Kt[j + 1, j] -= k_loc
            Kt[j + 1, j + 1] += k_loc
    return Mt.tocsr(), Kt.tocsr()


@dataclass(frozen=True)
class ExtOperator:
    """Sparse weighted form over the free unknowns of the extension box.

    DOF layout: the domain-interval trace nodes come first (layer 0),
    then all interior x-nodes of layers 1..m_t-1. Exterior trace nodes,
    the walls, and the top are eliminated as zero constraints.
    """

    mesh: ExtMesh
    params: FracParams
    matrix: sp.csc_matrix = field(repr=False)
    trace_nodes: np.ndarray = field(repr=False)  # box-grid node indices
    n_trace: int
    n_inner: int

    def quadratic_form(self, x: np.ndarray) -> float:
        return float(x @ (self.matrix @ x))


def assemble_extension(
    mesh: ExtMesh, params: FracParams, omega_span: tuple[float, float] | None = None
) -> ExtOperator:
    """Assemble the weighted form; ``omega_span`` marks the trace interval
    whose nodes stay free (default: the whole box width)."""
    s = params.s
    if not (0.0 < s < 1.0):
        raise ParameterError(f"extension requires s in (0,1), got {s}")
    grid = mesh.grid
    if omega_span is None:
        omega_span = (grid.x_min, grid.x_max)
    a, b = float(omega_span[0]), float(omega_span[1])
    if not (grid.x_min <= a < b <= grid.x_max):
        raise ParameterError(f"omega span [{a}, {b}] must sit inside the box")

    ni = grid.n_interior
    h = grid.h
    Kx = sp.diags(
        [np.full(ni, 2.0 / h), np.full(ni - 1, -1.0 / h), np.full(ni - 1, -1.0 / h)],
        [0, 1, -1],
        format="csr",
    )
    Mx = sp.diags(
        [np.full(ni, 4.0 * h / 6.0), np.full(ni - 1, h / 6.0), np.full(ni - 1, h / 6.0)],
        [0, 1, -1],
        format="csr",
    )
    Mt, Kt = _t_blocks(mesh, s)
    A = (sp.kron(Mt, Kx) + sp.kron(Kt, Mx)).tocsc()

    xi = grid.interior_nodes
    tol = 1e-9 * h
    omega_pos = np.nonzero((xi > a + tol) & (xi < b - tol))[0]
    if omega_pos.size == 0:
        raise ParameterError("omega span contains no trace node")
    keep = np.concatenate([omega_pos, np.arange(ni, mesh.m_t * ni)])
    A2 = A[np.ix_(keep, keep)]
    trace_nodes = omega_pos + 1  # box-grid node indices
    trace_nodes.flags.writeable = False
    return ExtOperator(
        mesh=mesh,
        params=params,
        matrix=A2.tocsc(),
        trace_nodes=trace_nodes,
        n_trace=int(omega_pos.size),
        n_inner=int(keep.size - omega_pos.size),
    )


@dataclass(frozen=True)
class TraceOperator:
    """Dense Schur complement on the domain trace nodes."""

    matrix: np.ndarray = field(repr=False)
    trace_nodes: np.ndarray = field(repr=False)
    params: FracParams
    mesh: ExtMesh

    def quadratic_form(self, x: np.ndarray) -> float:
        return float(x @ (self.matrix @ x))


def dtn_schur(op: ExtOperator) -> TraceOperator:
    """Eliminate everything above the trace: S = A_tt - A_ti A_ii^{-1} A_it.

    For any trace vector x, x^T S x is the minimal weighted energy among
    discrete extensions of x into the box.
    """
    nt = op.n_trace
    A = op.matrix
    Att = A[:nt, :nt].toarray()
    Ati = A[:nt, nt:].tocsr()
    Aii = A[nt:, nt:].tocsc()
    try:
        solve = spla.factorized(Aii)
    except RuntimeError as exc:  # pragma: no cover
        raise NumericalError(f"interior factorization failed: {exc}") from exc
    B = Ati.T.tocsc()
    Z = np.empty((op.n_inner, nt))
    for c in range(nt):
        Z[:, c] = solve(np.asarray(B[:, c].todense()).ravel())
    S = Att - np.asarray(Ati @ Z)
    return TraceOperator(
        matrix=S, trace_nodes=op.trace_nodes, params=op.params, mesh=op.mesh
    )


def extension_eigs(
    S: TraceOperator, M: MassOperator, params: FracParams, count: int
) -> np.ndarray:
    """Ascending eigenvalues of S x = lambda kappa_s M x (kappa divided out)."""
    nt = S.matrix.shape[0]
    if M.dense().shape[0] != nt:
        raise ParameterError(
            f"mass operator has {M.dense().shape[0]} nodes, trace has {nt}"
        )
    if not (1 <= count <= nt):
        raise ParameterError(f"count={count} out of range 1..{nt}")
    try:
        vals = sla.eigh(
            S.matrix,
            params.kappa_s * M.dense(),
            subset_by_index=[0, count - 1],
            eigvals_only=True,
        )
    except sla.LinAlgError as exc:  # pragma: no cover
        raise NumericalError(f"extension eigensolve failed: {exc}") from exc
    return vals


def extension_capacity(op: ExtOperator, k_trace_nodes, data: np.ndarray) -> float:
    """(1/kappa_s) times the constrained minimum of the weighted energy
    with W = data on the set's trace nodes, zero on exterior/artificial
    boundary, natural elsewhere."""
    k_nodes = np.asarray(sorted(set(int(i) for i in k_trace_nodes)), dtype=np.intp)
    pos_of_node = {int(nd): p for p, nd in enumerate(op.trace_nodes)}
    try:
        k_pos = np.array([pos_of_node[int(nd)] for nd in k_nodes], dtype=np.intp)
    except KeyError as exc:
        raise ParameterError(f"node {exc} is not a free trace node") from exc
    data = np.asarray(data, dtype=float)
    if data.shape != (k_pos.size,):
        raise ParameterError(f"data must have shape ({k_pos.size},), got {data.shape}")
    if k_pos.size == 0 or not np.any(data):
        return 0.0

    ndof = op.matrix.shape[0]
    x = np.zeros(ndof)
    x[k_pos] = data
    free = np.setdiff1d(np.arange(ndof), k_pos)
    A = op.matrix
    rhs = -(A[np.ix_(free, k_pos)] @ data)
    try:
        x[free] = spla.spsolve(A[np.ix_(free, free)].tocsc(), rhs)
    except RuntimeError as exc:  # pragma: no cover
        raise NumericalError(f"capacity solve failed: {exc}") from exc
    return op.quadratic_form(x) / op.params.kappa_s


def weighted_hardy_terms(op: ExtOperator, x: np.ndarray) -> tuple[float, float]:
    """(weighted integral of U^2/|z|^2, weighted energy) for a free-DOF
    vector; the singular integrand is sampled by interior Gauss points so
    vectors vanishing on the origin column stay finite."""
    mesh = op.mesh
    grid = mesh.grid
    s = op.params.s
    w = 1.0 - 2.0 * s
    ni = grid.n_interior
    m = mesh.m_t

    U = np.zeros((m, ni))  # layer-major nodal values, constrained rows zero
    nt = op.n_trace
    U[0, op.trace_nodes - 1] = x[:nt]
    U[1:, :] = x[nt:].reshape(m - 1, ni)

    xg, wg = np.polynomial.legendre.leggauss(4)
    xs = grid.nodes
    total = 0.0
    for j in range(m):
        t0, t1 = float(mesh.t_layers[j]), float(mesh.t_layers[j + 1])
        tm = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * xg
        tw = 0.5 * (t1 - t0) * wg
        # nodal plane values at the two layer lines, zero on walls
        rows = np.zeros((2, ni + 2))
        rows[0, 1:-1] = U[j]
        if j + 1 < m:
            rows[1, 1:-1] = U[j + 1]
        l0t = (t1 - tm) / (t1 - t0)
        l1t = (tm - t0) / (t1 - t0)
        for e in range(ni + 1):
            x0, x1 = float(xs[e]), float(xs[e + 1])
            xm = 0.5 * (x0 + x1) + 0.5 * (x1 - x0) * xg
            xw = 0.5 * (x1 - x0) * wg
            l0x = (x1 - xm) / (x1 - x0)
            l1x = (xm - x0) / (x1 - x0)
            corn = np.array(
                [[rows[0, e], rows[0, e + 1]], [rows[1, e], rows[1, e + 1]]]
            )
            if not corn.any():
                continue
            # tensor evaluation: val[a,b] at (t_a, x_b)
            val = (
                np.outer(l0t, l0x) * corn[0, 0]
                + np.outer(l0t, l1x) * corn[0, 1]
                + np.outer(l1t, l0x) * corn[1, 0]
                + np.outer(l1t, l1x) * corn[1, 1]
            )
            r2 = np.add.outer(tm**2, xm**2)
            wt = np.outer(tw * tm**w, xw)
            total += float(np.sum(wt * val**2 / r2))
    return total, op.quadratic_form(x)
