"""T-matrix constructors: Mie sphere, point dipole, first Born order for janus spheres."""
from dataclasses import dataclass, field

import numpy as np

from .constants import C
from .specfun import riccati_derivative, spherical_hn1_all, spherical_jn_all
from .waves import AngularBasis, Truncation, regular_wave_fields


class QuadratureError(RuntimeError):
    """Raised when a numerical integral fails to converge."""


@dataclass(frozen=True)
class TMatrixBlock:
    """Scattering amplitudes at one frequency in the canonical partial-wave order."""

    omega: float
    trunc: Truncation
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.entries.shape != (self.trunc.size, self.trunc.size):
            raise ValueError(
                f"entries shape {self.entries.shape} does not match truncation size {self.trunc.size}"
            )
        self.entries.setflags(write=False)

    def element(self, P, l, m, Pp, lp, mp):
        t = self.trunc
        return self.entries[t.index(P, l, m), t.index(Pp, lp, mp)]

    def dipole_block(self):
        """The 3x3 block T^{N,N}_{1m,1m'} with rows/columns m = -1, 0, 1."""
        rows = [self.trunc.index("N", 1, m) for m in (-1, 0, 1)]
        return self.entries[np.ix_(rows, rows)]


def mie_coefficients(l_max, R, eps, mu, omega):
    """Mie T-matrix elements (T^M_l, T^N_l) for l = 1..l_max.

    T^M_l = -[mu j(x~) (x j(x))' - j(x) (x~ j(x~))'] /
             [mu j(x~) (x h(x))' - h(x) (x~ j(x~))']
    with x = R w/c, x~ = sqrt(eps mu) x; T^N swaps eps and mu.
    """
    x = R * omega / C
    xt = np.sqrt(complex(eps) * complex(mu)) * x
    jx = spherical_jn_all(l_max, x).real
    hx = spherical_hn1_all(l_max, x)
    jxt = spherical_jn_all(l_max, xt)
    tm = np.zeros(l_max, dtype=complex)
    tn = np.zeros(l_max, dtype=complex)
    for l in range(1, l_max + 1):
        dj = riccati_derivative("j", l, x)
        dh = riccati_derivative("h", l, x)
        djt = riccati_derivative("j", l, xt)
        for out, w in ((tm, mu), (tn, eps)):
            num = w * jxt[l] * dj - jx[l] * djt
            den = w * jxt[l] * dh - hx[l] * djt
            out[l - 1] = -num / den
    return tm, tn


def mie_t_matrix(R, eps, mu, omega, trunc):
    """Diagonal, m-independent T-matrix of a homogeneous sphere."""
    if R <= 0 or omega <= 0:
        raise ValueError("mie_t_matrix needs R > 0 and omega > 0")
    tm, tn = mie_coefficients(trunc.l_max, R, eps, mu, omega)
    diag = np.array([(tm if P == "M" else tn)[l - 1] for P, l, _ in trunc.indices])
    return TMatrixBlock(omega, trunc, np.diag(diag))


# columns u_m = sqrt((-1)^m) e_m for m = -1, 0, 1, with the spherical unit
# vectors e_0 = z, e_{+-1} = -+(x +- i y)/sqrt(2); E^reg_{N,1,m}(0) is
# proportional to u_m
_U_DIPOLE = np.array(
    [[1j, 0, -1j], [1, 0, 1], [0, np.sqrt(2), 0]], dtype=complex
) / np.sqrt(2)


def dipole_t_from_polarizability(alpha, omega):
    """l = 1 electric T-matrix block of a point dipole with polarizability ``alpha`` (m^3).

    T^{NN}_{1m,1m'} = i (2/3) k^3 u_m^dagger alpha u_m'. The constant is the
    one for which an isotropic alpha = R^3 (eps-1)/(eps+2) reproduces the
    small-sphere Mie coefficient.
    """
    alpha = np.asarray(alpha, dtype=complex)
    k = omega / C
    block = 1j * (2.0 / 3.0) * k**3 * (_U_DIPOLE.conj().T @ alpha @ _U_DIPOLE)
    trunc = Truncation(1)
    entries = np.zeros((trunc.size, trunc.size), dtype=complex)
    rows = [trunc.index("N", 1, m) for m in (-1, 0, 1)]
    entries[np.ix_(rows, rows)] = block
    return TMatrixBlock(omega, trunc, entries)


@dataclass(frozen=True)
class JanusSphere:
    """Sphere of radius R: permittivity eps_lower for z < 0 and eps_upper for z > 0."""

    R: float
    eps_lower: complex
    eps_upper: complex


@dataclass(frozen=True)
class BornQuadrature:
    n_radial: int = 16
    n_polar: int = 32
    n_azimuthal: int = 64


class BornJanusTMatrix:
    """First-Born-order T-matrix of a janus sphere, T_{mu mu'} = i k^2 int E_sigma(mu) (eps-1) E_mu'.

    The angular part is built once; calling the object at a frequency only
    re-evaluates radial functions. The polar Gauss-Legendre rule is split
    at the equator so the permittivity jump lies on a panel boundary; the
    azimuthal rule is the periodic trapezoid.

    ``eps_lower``/``eps_upper`` may be callables of omega (dispersive halves).
    """

    def __init__(self, sphere, trunc, quad=BornQuadrature()):
        if quad.n_radial < 2 or quad.n_polar < 2 or quad.n_azimuthal < 2 * trunc.l_max + 1:
            raise ValueError("quadrature orders too small for the truncation")
        self.sphere = sphere
        self.trunc = trunc
        self.quad = quad
        xr, wr = np.polynomial.legendre.leggauss(quad.n_radial)
        self._r = 0.5 * sphere.R * (xr + 1.0)
        self._wr = 0.5 * sphere.R * wr * self._r**2
        half = quad.n_polar // 2
        xc, wc = np.polynomial.legendre.leggauss(half)
        # cos(theta) nodes: lower hemisphere [-1, 0], upper [0, 1]
        cos_t = np.concatenate([0.5 * (xc - 1.0), 0.5 * (xc + 1.0)])
        w_t = np.concatenate([0.5 * wc, 0.5 * wc])
        upper = np.concatenate([np.zeros(half, bool), np.ones(half, bool)])
        phi = 2 * np.pi * np.arange(quad.n_azimuthal) / quad.n_azimuthal
        w_phi = 2 * np.pi / quad.n_azimuthal
        ct, ph = np.meshgrid(cos_t, phi, indexing="ij")
        self._upper = np.repeat(upper, quad.n_azimuthal)
        self._w_ang = np.repeat(w_t, quad.n_azimuthal) * w_phi
        self._basis = AngularBasis(trunc, np.arccos(ct.ravel()), ph.ravel())

    def _eps(self, value, omega):
        return complex(value(omega)) if callable(value) else complex(value)

    def __call__(self, omega):
        trunc = self.trunc
        k = omega / C
        dl = self._eps(self.sphere.eps_lower, omega) - 1.0
        du = self._eps(self.sphere.eps_upper, omega) - 1.0
        w_contrast = self._w_ang * np.where(self._upper, du, dl)
        sigma = trunc.sigma_permutation
        total = np.zeros((trunc.size, trunc.size), dtype=complex)
        for r, wr in zip(self._r, self._wr):
            fields = regular_wave_fields(trunc, omega, r, self._basis)
            left = fields[sigma] * (wr * w_contrast)
            total += np.einsum("acn,bcn->ab", left, fields)
        return TMatrixBlock(omega, trunc, 1j * k**2 * total)


def born_t_matrix(sphere, omega, trunc, quad=BornQuadrature(), tol=1e-6):
    """Born T-matrix of a janus sphere with a convergence check.

    The result is compared against a run at roughly 3/4 of each quadrature
    order; a relative change above ``tol`` raises :class:`QuadratureError`.
    """
    fine = BornJanusTMatrix(sphere, trunc, quad)(omega)
    coarse_quad = BornQuadrature(
        max(2, 3 * quad.n_radial // 4),
        max(2, 2 * ((3 * quad.n_polar // 4) // 2)),
        max(2 * trunc.l_max + 1, 3 * quad.n_azimuthal // 4),
    )
    coarse = BornJanusTMatrix(sphere, trunc, coarse_quad)(omega)
    scale = np.max(np.abs(fine.entries))
    if scale > 0 and np.max(np.abs(fine.entries - coarse.entries)) > tol * scale:
        raise QuadratureError("Born quadrature not converged: increase quadrature order")
    return fine


def check_t_symmetry(block):
    """Worst relative violation of T_{mu mu'} = T_{sigma(mu') sigma(mu)}."""
    t = np.asarray(block.entries)
    s = block.trunc.sigma_permutation
    mirrored = t[np.ix_(s, s)].T
    scale = np.max(np.abs(t))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(t - mirrored)) / scale)
