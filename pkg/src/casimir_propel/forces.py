"""Non-equilibrium self-propulsion forces.

Isolated objects: the exact trace formula over a T-matrix, its lowest-order
small-object reduction and the closed form for a dilute janus sphere.
Near a plate (R << d << lambda_T): the lateral force from the dipole
T-matrix block, from a lab-frame polarizability tensor and from spheroid
polarizabilities. Every integral runs through :func:`thermal_integral`.
"""
from dataclasses import dataclass

import numpy as np

from .constants import C, G_STANDARD, HBAR, thermal_wavelength
from .materials import near_field_response
from .polarizability import geometric_factors, overlap_factor
from .quadrature import QuadratureSpec, thermal_integral
from .waves import coefficient_a, coefficient_b, p_z_matrix

NEAR_FIELD_THRESHOLD = 0.2
DEFAULT_DENSITY = 3210.0

# prefactors of the three equivalent near-field representations
TMATRIX_PREFACTOR = 27.0 / (128.0 * np.sqrt(2.0) * np.pi)
POLARIZABILITY_PREFACTOR = 3.0 / (32.0 * np.pi)
SPHEROID_PREFACTOR = -3.0 / (64.0 * np.pi)

# A_m weights for m = -1, 0, 1
_A_WEIGHTS = (1.0, 2.0, 1.0)
_CHOP = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class ThermalScene:
    """Particle near a plate: temperatures (K), center-to-surface distance d (m), plate model."""

    T_particle: float
    T_plate: float
    d: float
    plate: object

    def __post_init__(self):
        if self.T_particle < 0 or self.T_plate < 0:
            raise ValueError("temperatures must be non-negative")
        if not self.d > 0:
            raise ValueError("separation d must be positive")


@dataclass(frozen=True)
class Validity:
    """Near-field window ratios; both below 0.2 means R << d << lambda_T holds."""

    R_over_d: float
    d_over_lambdaT: float

    @property
    def near_field(self):
        return self.R_over_d < NEAR_FIELD_THRESHOLD and self.d_over_lambdaT < NEAR_FIELD_THRESHOLD


@dataclass(frozen=True)
class ForceResult:
    """Force in N with a quadrature error estimate and optional near-field validity."""

    value: float
    quadrature_error: float
    validity: Validity = None

    def __sub__(self, other):
        return ForceResult(
            self.value - other.value,
            self.quadrature_error + other.quadrature_error,
            self.validity or other.validity,
        )


def validity(size, scene):
    """Validity ratios for an object of largest dimension ``size`` (m) in ``scene``."""
    t_ref = max(scene.T_particle, scene.T_plate)
    d_over_lt = scene.d / thermal_wavelength(t_ref) if t_ref > 0 else 0.0
    r_over_d = size / scene.d if size is not None else float("nan")
    return Validity(r_over_d, d_over_lt)


def resonance_features(models, depolarization=(), width=5.0):
    """Frequencies worth a panel edge: w0 +- width*gamma for each oscillator, and the
    same around the shape poles w0 sqrt(1 + C n) for each depolarization factor n.
    """
    out = set()
    for model in models:
        for osc in model.oscillators():
            centres = [osc.omega0] + [osc.omega0 * np.sqrt(1.0 + osc.C * n) for n in depolarization]
            for w in centres:
                out.update((w, w - width * osc.gamma, w + width * osc.gamma))
    return tuple(sorted(w for w in out if w > 0))


# isolated objects

def isolated_force_z(provider, temperature, spec=QuadratureSpec(), features=()):
    """Self-propulsion force along z of an isolated object in a zero-temperature environment.

    F = (2 hbar / pi) int dw n(w, T) Im Tr{p_z T T^dagger}

    Parameters
    ----------
    provider : callable
        Maps an angular frequency to a :class:`TMatrixBlock`; the truncation
        must not change with frequency.
    """
    trunc = {}

    def integrand(omega):
        block = provider(omega)
        trunc.setdefault("value", block.trunc)
        if block.trunc != trunc["value"]:
            raise ValueError("T-matrix provider changed truncation between frequencies")
        t = block.entries
        h = t @ t.conj().T
        p = p_z_matrix(block.trunc, omega)
        scale = block.trunc.size * np.max(np.abs(p)) * np.max(np.abs(h))
        return _chop(np.einsum("ij,ji->", p, h).imag, scale)

    val, err = thermal_integral(integrand, temperature, "bose", spec, features)
    return ForceResult(2.0 * HBAR / np.pi * val, 2.0 * HBAR / np.pi * err)


def small_object_sum(block):
    """Lowest-order trace sum over the l <= 2 elements of ``block`` (units of k).

    sum_{m,m'} [a(1,m) Re(T^{MN}_{1m,1m'} T^{NN*}_{1m,1m'})
                - b(1,m) Im(T^{NN}_{2m,1m'} T^{NN*}_{1m,1m'})]
    """
    total = 0.0
    for m in (-1, 0, 1):
        for mp in (-1, 0, 1):
            t_nn = block.element("N", 1, m, "N", 1, mp)
            t_mn = block.element("M", 1, m, "N", 1, mp)
            t_2n = block.element("N", 2, m, "N", 1, mp)
            total += coefficient_a(1, m) * (t_mn * np.conj(t_nn)).real
            total -= coefficient_b(1, m) * (t_2n * np.conj(t_nn)).imag
    return total


def small_object_force_z(provider, temperature, spec=QuadratureSpec(), features=()):
    """Leading small-size force along z from the dipole-quadrupole elements.

    F = -(4 hbar / (pi c)) int dw w n(w, T) * :func:`small_object_sum`.
    The provider's truncation must include l = 2.
    """

    def integrand(omega):
        block = provider(omega)
        if block.trunc.l_max < 2:
            raise ValueError("small-object force needs a truncation with l_max >= 2")
        return omega * small_object_sum(block)

    val, err = thermal_integral(integrand, temperature, "bose", spec, features)
    pref = 4.0 * HBAR / (np.pi * C)
    return ForceResult(-pref * val, pref * err)


def janus_dilute_force(eps_lower, eps_upper, R, temperature, spec=QuadratureSpec(), features=()):
    """Closed-form leading-order force on a dilute janus sphere.

    F = (2 hbar / (pi c^10)) (R^9 / 2700) int dw w^10 n(w, T)
        [Im eps_2 (Re eps_1 - 1) - Im eps_1 (Re eps_2 - 1)]

    with eps_1 the lower (z < 0) and eps_2 the upper half. Each permittivity
    is a dielectric model (callable of omega).
    """
    if not R > 0:
        raise ValueError("janus radius must be positive")

    def integrand(omega):
        e1 = np.asarray(eps_lower(omega), dtype=complex)
        e2 = np.asarray(eps_upper(omega), dtype=complex)
        bracket = e2.imag * (e1.real - 1.0) - e1.imag * (e2.real - 1.0)
        return (omega * R / C) ** 10 * bracket

    val, err = thermal_integral(integrand, temperature, "bose", spec, features, vectorized=True)
    pref = 2.0 * HBAR / (np.pi * R) / 2700.0
    return ForceResult(pref * val, pref * err)


# near-field lateral force

def _chop(total, scale):
    # below the rounding level of the largest entry the combination is zero
    return 0.0 if abs(total) <= _CHOP * scale else total


def tmatrix_lateral_sum(dipole_block):
    """sum_m A_m Re[T_{0,m} T*_{1,m} - T_{-1,m} T*_{0,m}] over the l = 1 electric block."""
    t = np.asarray(dipole_block)
    total = 0.0
    for j, weight in enumerate(_A_WEIGHTS):
        total += weight * (t[1, j] * np.conj(t[2, j]) - t[0, j] * np.conj(t[1, j])).real
    return _chop(total, 8.0 * np.max(np.abs(t)) ** 2)


def polarizability_lateral_sum(alpha):
    """Im[a_zx a_xx* + a_zy a_xy* + 2 a_zz a_xz*] of a lab-frame tensor (m^6)."""
    a = np.asarray(alpha)
    total = np.imag(
        a[..., 2, 0] * np.conj(a[..., 0, 0])
        + a[..., 2, 1] * np.conj(a[..., 0, 1])
        + 2.0 * a[..., 2, 2] * np.conj(a[..., 0, 2])
    )
    scale = 4.0 * np.max(np.abs(a), axis=(-2, -1)) ** 2
    return np.where(np.abs(total) <= _CHOP * scale, 0.0, total)[()]


def _plate_factor(scene, omega):
    return near_field_response(scene.plate(omega))


def lateral_force_tmatrix(provider, scene, spec=QuadratureSpec(), features=(), size=None,
                          temperature=None):
    """Lateral self-force F_1x from the l = 1 electric T-matrix block.

    F = 27/(128 sqrt2 pi) hbar/d^7 int dw n (c/w)^6 (Im r)^2 sum_m A_m Re[...]

    ``temperature`` defaults to the particle temperature of ``scene``.
    """
    temp = scene.T_particle if temperature is None else temperature
    feats = tuple(features) + resonance_features([scene.plate], (0.5,))

    def integrand(omega):
        block = provider(omega).dipole_block()
        return (C / omega) ** 6 * _plate_factor(scene, omega) * tmatrix_lateral_sum(block)

    val, err = thermal_integral(integrand, temp, "bose", spec, feats)
    pref = TMATRIX_PREFACTOR * HBAR / scene.d**7
    return ForceResult(pref * val, pref * err, validity(size, scene))


def lateral_force_polarizability(alpha_provider, scene, spec=QuadratureSpec(), features=(),
                                 size=None, temperature=None):
    """Lateral self-force F_1x from a lab-frame polarizability tensor (m^3).

    F = 3/(32 pi) hbar/d^7 int dw n (Im r)^2 Im[a_zx a_xx* + a_zy a_xy* + 2 a_zz a_xz*]
    """
    temp = scene.T_particle if temperature is None else temperature
    feats = tuple(features) + resonance_features([scene.plate], (0.5,))

    def integrand(omega):
        return _plate_factor(scene, omega) * polarizability_lateral_sum(alpha_provider(omega))

    val, err = thermal_integral(integrand, temp, "bose", spec, feats)
    pref = POLARIZABILITY_PREFACTOR * HBAR / scene.d**7
    return ForceResult(pref * val, pref * err, validity(size, scene))


def spheroid_features(spheroid, scene):
    """Panel edges for spheroid-plate integrals: material, shape and surface-mode poles."""
    n_par, n_perp = geometric_factors(spheroid.eccentricity)
    return resonance_features([spheroid.material], (n_par, n_perp)) + resonance_features(
        [scene.plate], (0.5,)
    )


def spheroid_lateral_integral(spheroid, scene, temperature, spec=QuadratureSpec(), weight="bose"):
    """int dw W(w, T) (Im r)^2 Im[a_par a_perp*] (m^6/s) for weight 'bose' or 'bose_dT'."""

    def integrand(omega):
        return _plate_factor(scene, omega) * overlap_factor(spheroid, omega)

    return thermal_integral(
        integrand, temperature, weight, spec, spheroid_features(spheroid, scene), vectorized=True
    )


def lateral_force_spheroid(spheroid, orientation, scene, spec=QuadratureSpec(), temperature=None):
    """Lateral self-force F_1x of a prolate spheroid.

    F = -3/(64 pi) hbar/d^7 sin(2 theta) cos(phi) int dw n (Im r)^2 Im[a_par a_perp*]
    """
    temp = scene.T_particle if temperature is None else temperature
    angular = np.sin(2.0 * orientation.theta) * np.cos(orientation.phi)
    val, err = spheroid_lateral_integral(spheroid, scene, temp, spec)
    pref = SPHEROID_PREFACTOR * HBAR / scene.d**7 * angular
    return ForceResult(pref * val, abs(pref) * err, validity(spheroid.R_par, scene))


def two_temperature_force(force_fn, T_particle, T_plate):
    """Total lateral force F_x(T, T_p) = F_1x(T) - F_1x(T_p).

    ``force_fn(T)`` returns the self-part :class:`ForceResult` at temperature T.
    """
    if T_particle < 0 or T_plate < 0:
        raise ValueError("temperatures must be non-negative")
    if T_particle == T_plate:
        hot = force_fn(T_particle)
        return ForceResult(0.0, 0.0, hot.validity)
    return force_fn(T_particle) - force_fn(T_plate)


def gravity_ratio(force, spheroid, density=DEFAULT_DENSITY, g=G_STANDARD):
    """Force divided by the weight rho (4/3) pi R_perp^2 R_par g of the spheroid."""
    if not density > 0:
        raise ValueError("density must be positive")
    return force / (density * spheroid.volume * g)
