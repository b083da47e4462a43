"""Independent oracles used to freeze and guard expected test values.

Nothing here imports the closed forms under test: the gamma oracle is
arbitrary-precision, the pair-energy oracle integrates the defining
double integral with mpmath after an exact change of variables (the
singular diagonal x = y split out), the L2 oracle integrates piecewise
parabolas in closed form, and the angular oracle comes from the
polynomial reduction of the weighted equation.
"""

from __future__ import annotations

import mpmath as mp
import numpy as np


def mp_gamma(x: float, dps: int = 50) -> float:
    with mp.workdps(dps):
        return float(mp.gamma(x))


def c_ns_oracle(n: int, s: float) -> float:
    """Normalization constant via the arbitrary-precision gamma."""
    with mp.workdps(50):
        v = (
            mp.pi ** (-mp.mpf(n) / 2)
            * mp.mpf(2) ** (2 * mp.mpf(s))
            * mp.gamma((n + 2 * mp.mpf(s)) / 2)
            / mp.gamma(2 - mp.mpf(s))
            * mp.mpf(s)
            * (1 - mp.mpf(s))
        )
        return float(v)


def kappa_oracle(s: float) -> float:
    with mp.workdps(50):
        return float(
            mp.gamma(1 - mp.mpf(s)) / (mp.mpf(2) ** (2 * mp.mpf(s) - 1) * mp.gamma(mp.mpf(s)))
        )


def lambda_hardy_oracle(n: int, s: float) -> float:
    with mp.workdps(50):
        return float(
            mp.mpf(2) ** (2 * mp.mpf(s))
            * mp.gamma((n + 2 * mp.mpf(s)) / 4) ** 2
            / mp.gamma((n - 2 * mp.mpf(s)) / 4) ** 2
        )


# ---------------------------------------------------------------------------
# pair energy of two unit hats at distance k (h = 1), high precision


def _hat(x):
    ax = abs(x)
    return 1 - ax if ax < 1 else mp.mpf(0)


def _correlation(k: int, r) -> mp.mpf:
    """rho(r) = int hat(x) hat(x + r - k) dx, exact per smooth piece."""
    shift = k - r
    lo = max(mp.mpf(-1), shift - 1)
    hi = min(mp.mpf(1), shift + 1)
    if hi <= lo:
        return mp.mpf(0)
    cuts = sorted({lo, hi, *(c for c in (mp.mpf(0), shift) if lo < c < hi)})
    total = mp.mpf(0)
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        total += mp.quad(lambda x: _hat(x) * _hat(x - shift), [a, b])
    return total


def pair_energy_mp(k: int, s: float, dps: int = 30) -> float:
    """(C(1,s)/2) * double integral of the hat-pair difference quotients.

    Reduced exactly to one integral over the gap variable r = y - x with
    the diagonal r = 0 split out; mpmath supplies adaptive quadrature.
    """
    with mp.workdps(dps):
        ss = mp.mpf(s)
        c = (
            mp.pi ** mp.mpf(-0.5)
            * mp.mpf(2) ** (2 * ss)
            * mp.gamma((1 + 2 * ss) / 2)
            / mp.gamma(2 - ss)
            * ss
            * (1 - ss)
        )
        rho0 = _correlation(k, mp.mpf(0))

        def deficit_plain(r):
            return 2 * rho0 - _correlation(k, r) - _correlation(k, -r)

        # On (0, 1/2) the symmetrized deficit is exactly a2 r^2 + a3 r^3
        # (correlations are piecewise cubic, C^1, first break at gap 1);
        # integrating that piece in closed form avoids the catastrophic
        # cancellation that the kernel r^{-1-2s} would amplify near 0.
        r1, r2 = mp.mpf(1) / 8, mp.mpf(1) / 4
        d1, d2 = deficit_plain(r1), deficit_plain(r2)
        a3 = (d2 / r2**2 - d1 / r1**2) / (r2 - r1)
        a2 = d1 / r1**2 - a3 * r1
        sigma = mp.mpf(1) / 2
        d_mid = deficit_plain(sigma)
        assert abs(a2 * sigma**2 + a3 * sigma**3 - d_mid) < mp.mpf(10) ** (-dps + 6)
        head = a2 * sigma ** (2 - 2 * ss) / (2 - 2 * ss) + a3 * sigma ** (
            3 - 2 * ss
        ) / (3 - 2 * ss)

        # kinks sit at every integer gap: feed them all as subinterval ends
        edge = abs(k) + 3
        points = [sigma] + [mp.mpf(t) for t in range(1, edge + 1)]
        body = mp.quad(lambda r: deficit_plain(r) * r ** (-1 - 2 * ss), points)
        tail = 2 * rho0 * mp.mpf(edge) ** (-2 * ss) / (2 * ss)
        return float(c * (head + body + tail))


# ---------------------------------------------------------------------------
# exact piecewise integrals


def l2_norm_squared_oracle(grid, coeffs) -> float:
    """int (sum_i c_i hat_i)^2 by exact per-element parabola integration."""
    vals = np.zeros(grid.n_cells + 1)
    vals[1:-1] = np.asarray(coeffs, dtype=float)
    total = 0.0
    for e in range(grid.n_cells):
        va, vb = vals[e], vals[e + 1]
        total += grid.h * (va * va + va * vb + vb * vb) / 3.0
    return total


def hat_center_hardy_oracle(s: float) -> float:
    """int hat(x)^2 |x|^{-2s} dx = 2 [1/(1-2s) - 2/(2-2s) + 1/(3-2s)]."""
    return 2.0 * (1.0 / (1.0 - 2.0 * s) - 2.0 / (2.0 - 2.0 * s) + 1.0 / (3.0 - 2.0 * s))


# ---------------------------------------------------------------------------
# angular spectrum


def angular_mu_oracle(k: int, s: float) -> float:
    """Exact weighted angular eigenvalues in one dimension: (k-1)(k-2s).

    Substituting tau = sin(phi) turns the weighted equation into the
    ultraspherical (Gegenbauer) equation with parameter 1/2 - s, whose
    polynomial eigenfunctions give mu = n(n + 1 - 2s) for degree n; at
    s = 1/2 this reduces to the harmonic sequence (k-1)^2.
    """
    n = k - 1
    return n * (n + 1.0 - 2.0 * s)


def classical_lambda_oracle(j: int) -> float:
    """Dirichlet eigenvalues of -u'' on (-1, 1): (j pi / 2)^2."""
    return (j * np.pi / 2.0) ** 2
