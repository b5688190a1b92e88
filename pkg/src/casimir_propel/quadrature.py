"""Adaptive thermal frequency quadrature.

Integrals of the form int_0^inf dw f(w) W(w, T) are mapped to
x = hbar w / (k_B T) and evaluated with globally adaptive Gauss-Kronrod
(7/15) panels. Panel edges may be seeded at known spectral features so
narrow Lorentzian peaks are resolved from the start. The result is summed
in ascending panel order with compensated summation, so it does not depend
on the refinement history.
"""
import heapq
import math
from dataclasses import dataclass

import numpy as np

from .constants import HBAR, KB
from .scattering import QuadratureError

X_MIN = 1e-6
_ROUNDOFF = 100 * np.finfo(float).eps

# 15-point Kronrod abscissae (non-negative half) and weights, with the
# embedded 7-point Gauss weights at the odd-indexed abscissae
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG_FULL = np.zeros(15)
_WG_FULL[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerance and limits of the adaptive thermal quadrature."""

    rel_tol: float = 1e-8
    x_max: float = 60.0
    max_panels: int = 4000
    abs_floor: float = 0.0

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if not self.x_max > 40:
            raise ValueError("x_max must exceed 40 so the Bose weight is negligible at the cutoff")
        if self.max_panels < 1:
            raise ValueError("max_panels must be at least 1")


def _weight(x, kind, temperature):
    em1 = np.expm1(x)
    if kind == "bose":
        return 1.0 / em1
    if kind == "bose_dT":
        return (1.0 / em1 + 1.0 / em1**2) * x / temperature
    raise ValueError(f"unknown weight {kind!r}, expected 'bose' or 'bose_dT'")


def _initial_edges(x_max, feature_x):
    edges = {X_MIN, x_max}
    edges.update(10.0 ** np.arange(-5, 1))
    edges.update(np.linspace(1.0, x_max, 13)[1:-1])
    edges.update(x for x in feature_x if X_MIN < x < x_max)
    return sorted(edges)


def thermal_integral(f, temperature, weight="bose", spec=QuadratureSpec(), features=(),
                     vectorized=False):
    """Integrate ``f(w) * W(w, T)`` over w > 0.

    Parameters
    ----------
    f : callable
        Integrand factor in SI frequency (rad/s). With ``vectorized`` it is
        called on arrays, otherwise node by node.
    temperature : float
        Temperature in K; T <= 0 gives exactly zero.
    weight : {'bose', 'bose_dT'}
        Occupation number n(w, T) or its temperature derivative dn/dT.
    spec : QuadratureSpec
    features : iterable of float
        Angular frequencies used as initial panel edges.

    Returns
    -------
    (value, error_estimate)

    Raises
    ------
    QuadratureError
        If the tolerance is not met within ``spec.max_panels`` panels. The
        message names the frequency interval with the largest error.
    """
    if temperature <= 0:
        return 0.0, 0.0
    scale = KB * temperature / HBAR

    def panel(a, b):
        half = 0.5 * (b - a)
        x = 0.5 * (a + b) + half * _NODES
        w = x * scale
        vals = f(w) if vectorized else np.array([f(v) for v in w])
        vals = np.asarray(vals, dtype=float) * _weight(x, weight, temperature)
        if not np.all(np.isfinite(vals)):
            raise QuadratureError(
                f"non-finite integrand on omega in [{a * scale:.6e}, {b * scale:.6e}] rad/s"
            )
        kron = half * float(vals @ _WK)
        gauss = half * float(vals @ _WG_FULL)
        return kron, abs(kron - gauss), half * float(np.abs(vals) @ _WK)

    feature_x = [w / scale for w in features]
    edges = _initial_edges(spec.x_max, feature_x)
    panels = {}
    heap = []
    for a, b in zip(edges[:-1], edges[1:]):
        val, err, mag = panel(a, b)
        panels[(a, b)] = (val, err, mag)
        heapq.heappush(heap, (-err, a, b))

    total = math.fsum(p[0] for p in panels.values())
    err_total = math.fsum(p[1] for p in panels.values())
    mag_total = math.fsum(p[2] for p in panels.values())
    # below this the error estimate measures rounding, not truncation
    roundoff = _ROUNDOFF * mag_total
    while err_total > max(spec.rel_tol * abs(total), spec.abs_floor, roundoff):
        if len(panels) >= spec.max_panels:
            _, a, b = heap[0]
            raise QuadratureError(
                "integrand too sharp - narrow resonance detected near "
                f"omega in [{a * scale:.6e}, {b * scale:.6e}] rad/s "
                f"(x in [{a:.6g}, {b:.6g}])"
            )
        _, a, b = heapq.heappop(heap)
        val, err, _ = panels.pop((a, b))
        total -= val
        err_total -= err
        mid = 0.5 * (a + b)
        for lo, hi in ((a, mid), (mid, b)):
            val, err, mag = panel(lo, hi)
            panels[(lo, hi)] = (val, err, mag)
            total += val
            err_total += err
            heapq.heappush(heap, (-err, lo, hi))

    ordered = sorted(panels.items())
    value = math.fsum(p[0] for _, p in ordered) * scale
    error = math.fsum(p[1] for _, p in ordered) * scale
    return value, error
