"""Quasi-static polarizabilities of prolate spheroids and their lab-frame tensors."""
from dataclasses import dataclass

import numpy as np

from .materials import ResonanceError

_SERIES_LIMIT = 0.3


def _series_sum(e2, first_k):
    # sum_{k >= first_k} e2^(k - first_k) / (2k + 1)
    total, power, k = 0.0, 1.0, first_k
    while True:
        term = power / (2 * k + 1)
        total += term
        if term < 1e-18 * total:
            return total
        power *= e2
        k += 1


def geometric_factors(eta):
    """Depolarization factors (n_par, n_perp) of a prolate spheroid with eccentricity ``eta``.

    n_par = (1 - eta^2)/(2 eta^3) [ln((1+eta)/(1-eta)) - 2 eta] and
    n_perp = (1 - n_par)/2. Below eta = 0.3 the equivalent series
    (1 - eta^2) sum_k eta^(2k-2)/(2k+1) avoids the cancellation in the
    bracket.
    """
    eta = float(eta)
    if not 0.0 <= eta < 1.0:
        raise ValueError(f"eccentricity must satisfy 0 <= eta < 1, got {eta}")
    if eta < _SERIES_LIMIT:
        n_par = (1.0 - eta * eta) * _series_sum(eta * eta, 1)
    else:
        n_par = (1.0 - eta**2) / (2.0 * eta**3) * (np.log1p(eta) - np.log1p(-eta) - 2.0 * eta)
    return n_par, 0.5 * (1.0 - n_par)


def factor_splitting(eta):
    """n_perp - n_par without cancellation; 2 eta^2 / 5 to leading order."""
    eta = float(eta)
    if not 0.0 <= eta < 1.0:
        raise ValueError(f"eccentricity must satisfy 0 <= eta < 1, got {eta}")
    if eta < _SERIES_LIMIT:
        e2 = eta * eta
        return 0.5 * e2 * (1.0 - 3.0 * (1.0 - e2) * _series_sum(e2, 2))
    n_par, n_perp = geometric_factors(eta)
    return n_perp - n_par


@dataclass(frozen=True)
class SpheroidSpec:
    """Prolate spheroid: semi-axis ``R_par`` along the symmetry axis, ``R_perp`` across it."""

    R_par: float
    R_perp: float
    material: object

    def __post_init__(self):
        if self.R_par <= 0 or self.R_perp <= 0:
            raise ValueError("spheroid radii must be positive")
        if self.R_perp > self.R_par:
            raise ValueError("only prolate spheroids (R_perp <= R_par) are supported")

    @property
    def eccentricity(self):
        return float(np.sqrt(1.0 - (self.R_perp / self.R_par) ** 2))

    @property
    def volume(self):
        return 4.0 / 3.0 * np.pi * self.R_perp**2 * self.R_par


@dataclass(frozen=True)
class Orientation:
    """Symmetry axis direction (sin t cos p, sin t sin p, cos t) in the lab frame."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= np.pi:
            raise ValueError("theta must lie in [0, pi]")
        if not 0.0 <= self.phi < 2 * np.pi:
            raise ValueError("phi must lie in [0, 2 pi)")

    @property
    def axis(self):
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])


def spheroid_polarizability(spec, omega):
    """(alpha_par, alpha_perp) in m^3, alpha = (R_perp^2 R_par / 3)(eps - 1)/((eps - 1) n + 1).

    ``omega`` may be an array; the outputs then have its shape.
    """
    eps = np.asarray(spec.material(omega), dtype=complex)
    n_par, n_perp = geometric_factors(spec.eccentricity)
    vol = spec.R_perp**2 * spec.R_par / 3.0
    out = []
    for n in (n_par, n_perp):
        den = (eps - 1.0) * n + 1.0
        if np.any(den == 0):
            raise ResonanceError("resonant denominator in spheroid polarizability")
        out.append(vol * (eps - 1.0) / den)
    return tuple(a[()] for a in out)


def _rot_y(t):
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _rot_z(p):
    c, s = np.cos(p), np.sin(p)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def lab_frame_tensor(alpha_par, alpha_perp, orientation):
    """3x3 lab-frame tensor of a body tensor diag(a_perp, a_perp, a_par) tilted by ``orientation``."""
    body = np.diag([alpha_perp, alpha_perp, alpha_par]).astype(complex)
    rot = _rot_z(orientation.phi) @ _rot_y(orientation.theta)
    return rot @ body @ rot.T


def overlap_factor(spec, omega):
    """Im[alpha_par conj(alpha_perp)] at ``omega`` (m^6).

    Evaluated as V^2 |eps-1|^2 Im(eps) (n_perp - n_par) / |D_par D_perp|^2
    with D = (eps - 1) n + 1, which vanishes exactly for a sphere.
    """
    eps = np.asarray(spec.material(omega), dtype=complex)
    n_par, n_perp = geometric_factors(spec.eccentricity)
    vol = spec.R_perp**2 * spec.R_par / 3.0
    u = eps - 1.0
    dens = np.abs(u * n_par + 1.0) ** 2 * np.abs(u * n_perp + 1.0) ** 2
    if np.any(dens == 0):
        raise ResonanceError("resonant denominator in spheroid polarizability")
    return (vol**2 * np.abs(u) ** 2 * eps.imag * factor_splitting(spec.eccentricity) / dens)[()]
