"""Onsager heating of a driven particle, the resulting extra friction and its time scales."""
from dataclasses import dataclass

import numpy as np

from .constants import C, HBAR
from .forces import (
    POLARIZABILITY_PREFACTOR,
    SPHEROID_PREFACTOR,
    TMATRIX_PREFACTOR,
    _plate_factor,
    polarizability_lateral_sum,
    resonance_features,
    spheroid_lateral_integral,
    tmatrix_lateral_sum,
)
from .polarizability import SpheroidSpec
from .quadrature import QuadratureSpec, thermal_integral

__all__ = [
    "FrictionModel",
    "QuadratureSpec",
    "additional_friction",
    "friction_curve",
    "heating_derivative",
    "heating_derivative_polarizability",
    "heating_derivative_spheroid",
    "heating_derivative_tmatrix",
    "thermal_integral",
]


def heating_derivative_tmatrix(provider, scene, spec=QuadratureSpec(), features=()):
    """dH/dv_x at v = 0 (W per m/s) from the l = 1 electric T-matrix block.

    dH/dv = 27/(128 sqrt2 pi) hbar/d^7 int dw x e^x/(e^x - 1)^2 (c/w)^6 (Im r)^2
            sum_m A_m Re[T_{-1,m} T*_{0,m} - T_{0,m} T*_{1,m}],  x = hbar w / k_B T,
    evaluated at the equilibrium temperature ``scene.T_particle``.
    """
    temp = scene.T_particle
    feats = tuple(features) + resonance_features([scene.plate], (0.5,))

    def integrand(omega):
        block = provider(omega).dipole_block()
        return -(C / omega) ** 6 * _plate_factor(scene, omega) * tmatrix_lateral_sum(block)

    val, _ = thermal_integral(integrand, temp, "bose_dT", spec, feats)
    return TMATRIX_PREFACTOR * HBAR / scene.d**7 * temp * val


def heating_derivative_polarizability(alpha_provider, scene, spec=QuadratureSpec(), features=()):
    """dH/dv_x at v = 0 from a lab-frame polarizability tensor provider."""
    temp = scene.T_particle
    feats = tuple(features) + resonance_features([scene.plate], (0.5,))

    def integrand(omega):
        return -_plate_factor(scene, omega) * polarizability_lateral_sum(alpha_provider(omega))

    val, _ = thermal_integral(integrand, temp, "bose_dT", spec, feats)
    return POLARIZABILITY_PREFACTOR * HBAR / scene.d**7 * temp * val


def heating_derivative_spheroid(spheroid, orientation, scene, spec=QuadratureSpec()):
    """dH/dv_x at v = 0 for a prolate spheroid at ``orientation``."""
    temp = scene.T_particle
    angular = np.sin(2.0 * orientation.theta) * np.cos(orientation.phi)
    val, _ = spheroid_lateral_integral(spheroid, scene, temp, spec, weight="bose_dT")
    return -SPHEROID_PREFACTOR * HBAR / scene.d**7 * angular * temp * val


def heating_derivative(source, scene, orientation=None, spec=QuadratureSpec(), features=()):
    """Dispatch: a :class:`SpheroidSpec` (needs ``orientation``) or a T-matrix provider."""
    if isinstance(source, SpheroidSpec):
        if orientation is None:
            raise ValueError("spheroid heating needs an orientation")
        return heating_derivative_spheroid(source, orientation, scene, spec)
    return heating_derivative_tmatrix(source, scene, spec, features)


def additional_friction(heating_deriv, k, temperature):
    """Extra friction coefficient (N s/m) from motion-induced heating.

    Steady state: dT = (dH/dv) v / k, and the force change dT dF/dT with
    dF/dT = -(dH/dv)/T gives a drag (dH/dv)^2 / (k T) >= 0.
    """
    if not k > 0 or not temperature > 0:
        raise ValueError("additional_friction needs k > 0 and T > 0")
    return heating_deriv**2 / (k * temperature)


@dataclass(frozen=True)
class FrictionModel:
    """Heat capacity C (J/K), heat transfer coefficient k (W/K), fast time scale tau1 (s)."""

    C: float
    k: float
    tau1: float = 1e-14

    def __post_init__(self):
        if not (self.C > 0 and self.k > 0 and self.tau1 > 0):
            raise ValueError("FrictionModel needs C > 0, k > 0, tau1 > 0")

    @property
    def tau2(self):
        return self.C / self.k


def friction_curve(gamma_std, delta_gamma, model, t_grid):
    """Schematic two-time-scale friction gamma(t) = g_std (1 - e^{-t/tau1}) + dg (1 - e^{-t/tau2})."""
    t = np.asarray(t_grid, dtype=float)
    if np.any(t < 0) or np.any(np.diff(t) < 0):
        raise ValueError("t_grid must be ascending and non-negative")
    gamma = gamma_std * -np.expm1(-t / model.tau1) + delta_gamma * -np.expm1(-t / model.tau2)
    return list(zip(t.tolist(), gamma.tolist()))
