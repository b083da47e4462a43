"""Weighted spherical eigenproblem, vanishing orders, and blow-up profiles.

For N = 1 the half-sphere problem reduces to a weighted Sturm-Liouville
equation on (-pi/2, pi/2),

    -(cos^{1-2s}(phi) psi')' = mu cos^{1-2s}(phi) psi,

with natural (weighted-Neumann) ends. For N >= 2 only the axisymmetric
reduction on (0, pi/2) with measure sin^{N-1} * cos^{1-2s} is computed;
non-axisymmetric modes may interleave, so that path is experimental.

Discretization is piecewise-linear FEM. The degenerate endpoint weight is
integrated with Gauss-Jacobi rules matched to the local endpoint exponent
(validated at s = 1/2, where the weight is 1 and the spectrum is the
harmonic one); interior elements use plain Gauss-Legendre. The constant
mode is annihilated exactly by the assembled stiffness regardless of
quadrature, which keeps the lowest eigenvalue pinned at zero.

The lowest admissible vanishing order attached to an angular eigenvalue is

    gamma = -(N-2s)/2 + sqrt( ((N-2s)/2)^2 + mu ),

and homogeneous blow-up profiles |x|^gamma psi(x/|x|) are represented by
``Profile`` objects built from the two equator trace values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi, sqrt
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla
from scipy.special import roots_jacobi

from .core import Grid
from .errors import InsufficientDataError, NumericalError, ParameterError

__all__ = [
    "AngularSpectrum",
    "Profile",
    "VanishingFit",
    "solve_angular",
    "gamma_exponent",
    "hat_psi",
    "vanishing_order_fit",
]

_QUAD_ORDER = 12


@dataclass(frozen=True)
class AngularSpectrum:
    """Ascending weighted eigenvalues with equator trace values.

    ``psi_minus[k]``/``psi_plus[k]`` are the k-th eigenfunction's values
    at the two equator ends (for N=1: phi = -pi/2 and +pi/2; for N >= 2
    both report the single equator end of the reduced domain).
    Eigenfunctions are normalized in the weighted L2 norm with the
    largest-magnitude nodal entry positive.
    """

    n_dim: int
    s: float
    mu: np.ndarray
    psi_minus: np.ndarray = field(repr=False)
    psi_plus: np.ndarray = field(repr=False)


def _endpoint_rule(x0: float, x1: float, side: str, exponent: float, weight_fn):
    """Quadrature nodes/weights for w(phi) on an element touching an
    endpoint where w ~ dist^exponent; Jacobi rule absorbs the exponent."""
    ell = x1 - x0
    if side == "left":
        xj, wj = roots_jacobi(_QUAD_ORDER, 0.0, exponent)
        phi = x0 + (xj + 1.0) / 2.0 * ell
        dist = phi - x0
    else:
        xj, wj = roots_jacobi(_QUAD_ORDER, exponent, 0.0)
        phi = x0 + (xj + 1.0) / 2.0 * ell
        dist = x1 - phi
    smooth = weight_fn(phi) / dist**exponent
    qw = wj * smooth * (ell / 2.0) ** (1.0 + exponent)
    return phi, qw


def _interior_rule(x0: float, x1: float, weight_fn):
    xg, wg = np.polynomial.legendre.leggauss(_QUAD_ORDER)
    ell = x1 - x0
    phi = x0 + (xg + 1.0) / 2.0 * ell
    return phi, wg * weight_fn(phi) * ell / 2.0


def solve_angular(n_dim: int, s: float, n_cells: int, count: int) -> AngularSpectrum:
    """First ``count`` eigenvalues of the weighted angular problem.

    Well-posed for any s in (0, 1); n_dim >= 2 triggers the axisymmetric
    polar reduction.
    """
    if not (isinstance(n_dim, int) and n_dim >= 1):
        raise ParameterError(f"n_dim must be a positive integer, got {n_dim!r}")
    s = float(s)
    if not (0.0 < s < 1.0):
        raise ParameterError(f"angular problem needs 0 < s < 1, got s={s}")
    if n_cells < 8:
        raise ParameterError("n_cells >= 8 required")
    if not (1 <= count <= n_cells - 1):
        raise ParameterError(f"count={count} out of range")

    w_exp = 1.0 - 2.0 * s
    if n_dim == 1:
        a, b = -pi / 2.0, pi / 2.0
        weight_fn = lambda phi: np.cos(phi) ** w_exp  # noqa: E731
        left_exp, right_exp = w_exp, w_exp
    else:
        a, b = 0.0, pi / 2.0
        weight_fn = (
            lambda th: np.sin(th) ** (n_dim - 1) * np.cos(th) ** w_exp
        )  # noqa: E731
        left_exp, right_exp = float(n_dim - 1), w_exp

    nodes = np.linspace(a, b, n_cells + 1)
    nn = n_cells + 1
    K = np.zeros((nn, nn))
    M = np.zeros((nn, nn))
    for e in range(n_cells):
        x0, x1 = float(nodes[e]), float(nodes[e + 1])
        ell = x1 - x0
        if e == 0:
            phi, qw = _endpoint_rule(x0, x1, "left", left_exp, weight_fn)
        elif e == n_cells - 1:
            phi, qw = _endpoint_rule(x0, x1, "right", right_exp, weight_fn)
        else:
            phi, qw = _interior_rule(x0, x1, weight_fn)
        l0 = (x1 - phi) / ell
        l1 = (phi - x0) / ell
        m00 = float(np.sum(qw * l0 * l0))
        m01 = float(np.sum(qw * l0 * l1))
        m11 = float(np.sum(qw * l1 * l1))
        k_loc = float(np.sum(qw)) / ell**2
        M[e, e] += m00
        M[e, e + 1] += m01
        M[e + 1, e] += m01
        M[e + 1, e + 1] += m11
        K[e, e] += k_loc
        K[e, e + 1] -= k_loc
        K[e + 1, e] -= k_loc
        K[e + 1, e + 1] += k_loc

    try:
        mu, vecs = sla.eigh(K, M, subset_by_index=[0, count - 1])
    except sla.LinAlgError as exc:  # pragma: no cover
        raise NumericalError(f"angular eigensolve failed: {exc}") from exc

    for j in range(count):
        col = vecs[:, j]
        k = int(np.argmax(np.abs(col)))
        if col[k] < 0:
            vecs[:, j] = -col
    psi_minus = vecs[0, :].copy()
    psi_plus = vecs[-1, :].copy()
    if n_dim >= 2:
        psi_minus = psi_plus.copy()
    return AngularSpectrum(
        n_dim=n_dim, s=s, mu=mu, psi_minus=psi_minus, psi_plus=psi_plus
    )


def gamma_exponent(n_dim: int, s: float, mu: float) -> float:
    """Vanishing order attached to an angular eigenvalue mu >= 0."""
    mu = float(mu)
    if mu < 0.0:
        raise ParameterError(f"mu must be nonnegative, got {mu}")
    half = (n_dim - 2.0 * s) / 2.0
    return -half + sqrt(half * half + mu)


@dataclass(frozen=True)
class Profile:
    """Homogeneous profile |x|^gamma * (psi_plus on x>0, psi_minus on x<0).

    At x = 0 the value is 0 for gamma > 0 and the two-sided average for
    gamma = 0.
    """

    gamma: float
    psi_plus: float
    psi_minus: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        side = np.where(x > 0.0, self.psi_plus, self.psi_minus)
        with np.errstate(divide="ignore"):
            mag = np.where(x == 0.0, 1.0 if self.gamma == 0.0 else 0.0,
                           np.abs(x) ** self.gamma)
        out = mag * side
        if self.gamma == 0.0:
            out = np.where(x == 0.0, 0.5 * (self.psi_plus + self.psi_minus), out)
        return out if out.ndim else float(out)


def hat_psi(gamma: float, psi_plus: float, psi_minus: float) -> Profile:
    """Blow-up profile from a vanishing order and two trace values;
    identically-zero trace data is rejected."""
    gamma = float(gamma)
    if gamma < 0.0:
        raise ParameterError(f"gamma must be nonnegative, got {gamma}")
    if psi_plus == 0.0 and psi_minus == 0.0:
        raise ParameterError("profile trace values cannot both vanish")
    return Profile(gamma=gamma, psi_plus=float(psi_plus), psi_minus=float(psi_minus))


class VanishingFit(NamedTuple):
    gamma_est: float
    amp_plus: float
    amp_minus: float
    r_squared: float


def vanishing_order_fit(u: np.ndarray, grid: Grid, window) -> VanishingFit:
    """Two-sided log-log fit of |u| against |x| near the origin.

    Fits each side separately on nodes with |x| inside ``window``;
    ``gamma_est`` is the average slope and the amplitudes carry the side
    signs. Needs at least 4 usable nodes per side.
    """
    r_lo, r_hi = float(window[0]), float(window[1])
    if not (grid.x_min < 0.0 < grid.x_max):
        raise ParameterError("origin must lie strictly inside the grid")
    dist = min(-grid.x_min, grid.x_max)
    if not (2.0 * grid.h < r_lo < r_hi < dist / 2.0):
        raise ParameterError(
            f"window [{r_lo}, {r_hi}] must sit inside (2h, dist(0, boundary)/2) "
            f"= ({2.0*grid.h}, {dist/2.0})"
        )
    u = np.asarray(u, dtype=float)
    if u.shape != (grid.n_interior,):
        raise ParameterError("u must be a full interior nodal vector")
    x = grid.interior_nodes

    slopes, amps, ss_res, ss_tot = [], [], 0.0, 0.0
    for sign in (+1.0, -1.0):
        m = (np.sign(x) == sign) & (np.abs(x) >= r_lo) & (np.abs(x) <= r_hi)
        m &= u != 0.0
        if int(m.sum()) < 4:
            raise InsufficientDataError(
                f"fewer than 4 usable nodes on side {'+' if sign > 0 else '-'} "
                f"of window [{r_lo}, {r_hi}]"
            )
        lx = np.log(np.abs(x[m]))
        lu = np.log(np.abs(u[m]))
        slope, intercept = np.polyfit(lx, lu, 1)
        side_sign = float(np.sign(np.median(u[m])))
        slopes.append(float(slope))
        amps.append(side_sign * float(np.exp(intercept)))
        pred = slope * lx + intercept
        ss_res += float(np.sum((lu - pred) ** 2))
        ss_tot += float(np.sum((lu - np.mean(lu)) ** 2))

    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return VanishingFit(
        gamma_est=0.5 * (slopes[0] + slopes[1]),
        amp_plus=amps[0],
        amp_minus=amps[1],
        r_squared=r2,
    )
