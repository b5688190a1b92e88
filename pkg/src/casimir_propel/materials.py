"""Dielectric models, Fresnel reflection and the near-field plate response."""
from dataclasses import dataclass

import numpy as np

from .constants import C


class ResonanceError(ArithmeticError):
    """Raised when a response function is evaluated exactly on a pole."""


@dataclass(frozen=True)
class ConstantPermittivity:
    """Frequency-independent permittivity ``eps`` and permeability ``mu``."""

    eps: complex
    mu: complex = 1.0

    def __call__(self, omega):
        return np.full(np.shape(omega), complex(self.eps)) if np.ndim(omega) else complex(self.eps)

    def resonances(self):
        return ()

    def oscillators(self):
        return ()


@dataclass(frozen=True)
class LorentzOscillator:
    """eps(w) = 1 + C w0^2 / (w0^2 - w^2 - i gamma w)."""

    C: float
    omega0: float
    gamma: float
    mu = 1.0

    def __post_init__(self):
        if self.C < 0 or self.omega0 <= 0 or self.gamma < 0:
            raise ValueError("Lorentz oscillator needs C >= 0, omega0 > 0, gamma >= 0")

    def term(self, omega):
        w0sq = self.omega0**2
        return self.C * w0sq / (w0sq - np.square(omega) - 1j * self.gamma * np.asarray(omega))

    def __call__(self, omega):
        return 1.0 + self.term(omega)

    def resonances(self):
        return (self.omega0,)

    def oscillators(self):
        return (self,)


@dataclass(frozen=True)
class LorentzSum:
    """Sum of Lorentz oscillator terms on top of the vacuum value 1."""

    terms: tuple
    mu = 1.0

    def __call__(self, omega):
        return 1.0 + sum(t.term(omega) for t in self.terms)

    def resonances(self):
        return tuple(t.omega0 for t in self.terms)

    def oscillators(self):
        return tuple(self.terms)


# name: (C, omega0 [rad/s], gamma [rad/s])
PRESET_TABLE = {
    "spheroid": (3.0, 1e13, 1e11),
    "plate1": (3.0, 7e12, 7e10),
    "plate2": (3.0, 8.76e12, 8e10),
}


def preset(name):
    """Lorentz model registered under ``name`` in :data:`PRESET_TABLE`."""
    try:
        return LorentzOscillator(*PRESET_TABLE[name])
    except KeyError:
        raise ValueError(
            f"unknown material preset {name!r}; known: {', '.join(sorted(PRESET_TABLE))}"
        ) from None


def model_from_dict(spec):
    """Build a model from a preset name or a mapping.

    Accepted mappings: ``{"eps": [re, im], "mu": ...}``,
    ``{"C": .., "omega0": .., "gamma": ..}`` or ``{"oscillators": [...]}``.
    """
    if isinstance(spec, str):
        return preset(spec)
    if isinstance(spec, (int, float, complex)):
        return ConstantPermittivity(complex(spec))
    if not isinstance(spec, dict):
        raise ValueError(f"cannot build a dielectric model from {spec!r}")
    if "preset" in spec:
        return preset(spec["preset"])
    if "eps" in spec:
        return ConstantPermittivity(_as_complex(spec["eps"]), _as_complex(spec.get("mu", 1.0)))
    if "oscillators" in spec:
        return LorentzSum(tuple(LorentzOscillator(**o) for o in spec["oscillators"]))
    if {"C", "omega0", "gamma"} <= spec.keys():
        return LorentzOscillator(spec["C"], spec["omega0"], spec["gamma"])
    raise ValueError(f"cannot build a dielectric model from {spec!r}")


def _as_complex(value):
    if isinstance(value, (list, tuple)):
        re, im = value
        return complex(re, im)
    return complex(value)


def permittivity(model, omega):
    """Complex permittivity of ``model`` at angular frequency ``omega`` > 0."""
    if np.any(np.asarray(omega) <= 0):
        raise ValueError("permittivity needs omega > 0")
    return model(omega)


def shape_pole(model, n):
    """Frequencies where (eps - 1) n + 1 = 0 for the undamped oscillators of ``model``.

    For a single oscillator this is w0 sqrt(1 + C n); n = 1/2 gives the
    planar surface mode (eps = -1).
    """
    return tuple(o.omega0 * np.sqrt(1.0 + o.C * n) for o in model.oscillators())


def _sqrt_decaying(z):
    root = np.sqrt(complex(z))
    return -root if root.imag < 0 or (root.imag == 0 and root.real < 0) else root


def fresnel_reflection(P, k_perp, omega, eps, mu=1.0):
    """Reflection coefficient of a half-space for polarization ``P`` in {'M', 'N'}.

    r^N = (eps kz - kz') / (eps kz + kz'), kz = sqrt(w^2/c^2 - k^2),
    kz' = sqrt(eps mu w^2/c^2 - k^2); r^M swaps eps and mu. Both roots are
    taken with non-negative imaginary part.
    """
    if omega <= 0 or k_perp < 0:
        raise ValueError("fresnel_reflection needs omega > 0 and k_perp >= 0")
    if P == "M":
        eps, mu = mu, eps
    elif P != "N":
        raise ValueError(f"polarization must be 'M' or 'N', got {P!r}")
    k0sq = (omega / C) ** 2
    kz = _sqrt_decaying(k0sq - k_perp**2)
    kzm = _sqrt_decaying(complex(eps) * complex(mu) * k0sq - k_perp**2)
    return (eps * kz - kzm) / (eps * kz + kzm)


def near_field_reflection(eps_p):
    """Large-wavevector limit (eps - 1)/(eps + 1) of the electric Fresnel coefficient."""
    eps_p = np.asarray(eps_p, dtype=complex)
    if np.any(eps_p == -1):
        raise ResonanceError("resonant denominator: eps_p = -1 (surface mode pole)")
    return (eps_p - 1.0) / (eps_p + 1.0)


def near_field_response(eps_p):
    """Plate factor (Im[(eps - 1)/(eps + 1)])^2 of the near-field lateral force."""
    return np.square(near_field_reflection(eps_p).imag)
