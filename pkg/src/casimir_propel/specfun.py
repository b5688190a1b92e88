"""Special functions: spherical Bessel/Hankel, Wigner 3j, Legendre, Bose weights.

Conventions
-----------
Associated Legendre functions carry the Condon-Shortley phase,
P_1^1(x) = -sqrt(1 - x^2). All m-dependent signs in the package follow
from this choice.
"""
import math

import numpy as np

from .constants import HBAR, KB

L_MAX_SUPPORTED = 30
_IMAG_LIMIT = 700.0
_SERIES_RADIUS = 1.0

# log(n!) for n = 0..200, built once
_LOG_FACTORIAL = tuple(math.lgamma(n + 1) for n in range(201))


def _check_order(l):
    if l < 0 or l > L_MAX_SUPPORTED:
        raise ValueError(f"order l={l} outside supported range 0..{L_MAX_SUPPORTED}")


def _jn_series(l, x):
    # x^l/(2l+1)!! * sum_k (-x^2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1))
    lead = 1.0 + 0j
    for k in range(1, l + 1):
        lead *= x / (2 * k + 1)
    term = 1.0 + 0j
    total = term
    q = -x * x / 2.0
    for k in range(60):
        term *= q / ((k + 1) * (2 * l + 2 * k + 3))
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
    return lead * total


def spherical_jn_all(lmax, x):
    """Spherical Bessel functions j_0..j_lmax at complex ``x``.

    Upward recurrence is used for orders below |x| and Miller's downward
    recurrence above it; small arguments use the power series.

    Returns
    -------
    ndarray of complex, shape (lmax + 1,)
    """
    _check_order(lmax)
    x = complex(x)
    if abs(x.imag) > _IMAG_LIMIT:
        raise ValueError("argument out of supported range")
    out = np.zeros(lmax + 1, dtype=complex)
    ax = abs(x)
    if ax == 0.0:
        out[0] = 1.0
        return out
    if ax < _SERIES_RADIUS:
        for l in range(lmax + 1):
            out[l] = _jn_series(l, x)
        return out

    s, c = np.sin(x), np.cos(x)
    out[0] = s / x
    if lmax == 0:
        return out
    out[1] = s / x**2 - c / x
    n_up = min(lmax, int(ax))
    for l in range(1, n_up):
        out[l + 1] = (2 * l + 1) / x * out[l] - out[l - 1]
    if n_up >= lmax:
        return out

    # downward ratios r_l = j_l / j_{l-1} for l > n_up
    start = lmax + 20 + math.ceil(ax)
    ratio = 0j
    ratios = {}
    for l in range(start, n_up, -1):
        ratio = 1.0 / ((2 * l + 1) / x - ratio)
        if l <= lmax:
            ratios[l] = ratio
    for l in range(n_up + 1, lmax + 1):
        out[l] = out[l - 1] * ratios[l]
    return out


def spherical_bessel_j(l, x):
    """Spherical Bessel function of the first kind j_l(x), complex x."""
    return spherical_jn_all(l, x)[l]


def spherical_yn_all(lmax, x):
    """Spherical Bessel functions of the second kind y_0..y_lmax, real x > 0."""
    _check_order(lmax)
    x = float(x)
    if not x > 0:
        raise ValueError("spherical y_l requires a real argument x > 0")
    out = np.zeros(lmax + 1)
    out[0] = -math.cos(x) / x
    if lmax >= 1:
        out[1] = -math.cos(x) / x**2 - math.sin(x) / x
    for l in range(1, lmax):
        out[l + 1] = (2 * l + 1) / x * out[l] - out[l - 1]
    return out


def spherical_hn1_all(lmax, x):
    """Spherical Hankel functions h_l = j_l + i y_l for l = 0..lmax, real x > 0."""
    if not float(x) > 0:
        raise ValueError("spherical Hankel function requires a real argument x > 0")
    return spherical_jn_all(lmax, float(x)).real + 1j * spherical_yn_all(lmax, x)


def spherical_hankel1(l, x):
    """Spherical Hankel function of the first kind h_l(x) for real x > 0."""
    return spherical_hn1_all(l, x)[l]


def riccati_derivative(kind, l, x):
    """Return d/dx [x z_l(x)] = x z_{l-1}(x) - l z_l(x) for z = j or h."""
    if kind == "j":
        if l == 0:
            return np.cos(complex(x))
        z = spherical_jn_all(l, x)
    elif kind == "h":
        if l == 0:
            return np.exp(1j * float(x))
        z = spherical_hn1_all(l, x)
    else:
        raise ValueError(f"unknown kind {kind!r}, expected 'j' or 'h'")
    return x * z[l - 1] - l * z[l]


def _log_fact(n):
    return _LOG_FACTORIAL[n]


def wigner3j(l1, l2, l3, m1, m2, m3):
    """Wigner 3j symbol from the Racah single-sum formula.

    Terms are accumulated in log space with explicit signs. Inputs violating
    the selection rules give exactly 0.
    """
    if m1 + m2 + m3 != 0:
        return 0.0
    if abs(m1) > l1 or abs(m2) > l2 or abs(m3) > l3:
        return 0.0
    if l3 < abs(l1 - l2) or l3 > l1 + l2:
        return 0.0
    if m1 == m2 == m3 == 0 and (l1 + l2 + l3) % 2:
        return 0.0

    lf = _log_fact
    log_pref = 0.5 * (
        lf(l1 + l2 - l3) + lf(l1 - l2 + l3) + lf(-l1 + l2 + l3) - lf(l1 + l2 + l3 + 1)
        + lf(l1 + m1) + lf(l1 - m1) + lf(l2 + m2) + lf(l2 - m2) + lf(l3 + m3) + lf(l3 - m3)
    )
    kmin = max(0, l2 - l3 - m1, l1 - l3 + m2)
    kmax = min(l1 + l2 - l3, l1 - m1, l2 + m2)
    logs = []
    signs = []
    for k in range(kmin, kmax + 1):
        logs.append(-(
            lf(k) + lf(l3 - l2 + k + m1) + lf(l3 - l1 + k - m2)
            + lf(l1 + l2 - l3 - k) + lf(l1 - k - m1) + lf(l2 - k + m2)
        ))
        signs.append(-1.0 if k % 2 else 1.0)
    if not logs:
        return 0.0
    shift = max(logs)
    total = math.fsum(s * math.exp(v - shift) for s, v in zip(signs, logs))
    phase = -1.0 if (l1 - l2 - m3) % 2 else 1.0
    return phase * total * math.exp(shift + log_pref)


def assoc_legendre(l, m, x):
    """Associated Legendre function P_l^m(x) with Condon-Shortley phase."""
    if abs(x) > 1.0:
        raise ValueError("assoc_legendre requires |x| <= 1")
    if abs(m) > l:
        return 0.0
    if m < 0:
        mm = -m
        factor = (-1) ** mm * math.exp(_log_fact(l - mm) - _log_fact(l + mm))
        return factor * assoc_legendre(l, mm, x)
    somx2 = math.sqrt((1.0 - x) * (1.0 + x))
    pmm = 1.0
    fact = 1.0
    for _ in range(m):
        pmm *= -fact * somx2
        fact += 2.0
    if l == m:
        return pmm
    pmmp1 = x * (2 * m + 1) * pmm
    if l == m + 1:
        return pmmp1
    for ll in range(m + 2, l + 1):
        pll = ((2 * ll - 1) * x * pmmp1 - (ll + m - 1) * pmm) / (ll - m)
        pmm, pmmp1 = pmmp1, pll
    return pmmp1


def bose_weight(omega, temperature):
    """Bose-Einstein occupation 1 / (exp(hbar w / k_B T) - 1).

    Vectorized over ``omega``; T = 0 gives 0 and arguments beyond 700
    underflow to 0.
    """
    omega = np.asarray(omega, dtype=float)
    if temperature <= 0:
        return np.zeros_like(omega)
    x = HBAR * omega / (KB * temperature)
    with np.errstate(over="ignore"):
        return np.where(x > 700.0, 0.0, 1.0 / np.expm1(np.minimum(x, 700.0)))


def bose_weight_dT(omega, temperature):
    """Temperature derivative of :func:`bose_weight`, in 1/K."""
    omega = np.asarray(omega, dtype=float)
    if temperature <= 0:
        return np.zeros_like(omega)
    x = HBAR * omega / (KB * temperature)
    xc = np.minimum(x, 700.0)
    em1 = np.expm1(xc)
    # e^x / (e^x - 1)^2 = 1/em1 + 1/em1^2
    val = (1.0 / em1 + 1.0 / em1**2) * xc / temperature
    return np.where(x > 700.0, 0.0, val)
