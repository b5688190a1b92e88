"""Physical constants (SI) used throughout the package."""

HBAR = 1.054571817e-34  # J s
KB = 1.380649e-23  # J / K
C = 2.99792458e8  # m / s
G_STANDARD = 9.80665  # m / s^2


def thermal_wavelength(temperature):
    """Return hbar c / (k_B T) in metres."""
    return HBAR * C / (KB * temperature)


def as_dict():
    return {"hbar": HBAR, "k_B": KB, "c": C, "g": G_STANDARD}
