"""Partial-wave bookkeeping, translation operators and regular vector spherical waves.

All matrices share one canonical index order: polarization-major (M before
N), then l ascending, then m ascending. Waves are normalized as

    E^reg_Mlm = sqrt((-1)^m k) / sqrt(l(l+1)) j_l(kr) curl(r Y_l^m),
    E^reg_Nlm = curl(E^reg_Mlm) / k,

with the principal square root, so sqrt((-1)^m) = i for odd m.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .constants import C
from .specfun import spherical_hn1_all, spherical_jn_all, wigner3j

POLARIZATIONS = ("M", "N")


class PartialWaveIndex(NamedTuple):
    P: str
    l: int
    m: int

    def sigma(self):
        """The involution {P, l, m} -> {P, l, -m}."""
        return PartialWaveIndex(self.P, self.l, -self.m)


@dataclass(frozen=True)
class Truncation:
    """Index set {P, l, m} with 1 <= l <= l_max in canonical order."""

    l_max: int

    def __post_init__(self):
        if self.l_max < 1:
            raise ValueError("l_max must be >= 1")

    @property
    def size(self):
        return 2 * self.l_max * (self.l_max + 2)

    @cached_property
    def indices(self):
        return tuple(
            PartialWaveIndex(P, l, m)
            for P in POLARIZATIONS
            for l in range(1, self.l_max + 1)
            for m in range(-l, l + 1)
        )

    @cached_property
    def _lookup(self):
        return {mu: i for i, mu in enumerate(self.indices)}

    def index(self, P, l, m):
        return self._lookup[PartialWaveIndex(P, l, m)]

    @cached_property
    def sigma_permutation(self):
        """Array s with s[i] = position of sigma(indices[i])."""
        return np.array([self._lookup[mu.sigma()] for mu in self.indices])


def coefficient_a(l, m):
    return m / (l * (l + 1))


def coefficient_b(l, m):
    return np.sqrt(l * (l + 2) * (l - m + 1) * (l + m + 1) / ((2 * l + 1) * (2 * l + 3))) / (l + 1)


def p_z_matrix(trunc, omega):
    """Infinitesimal translation operator along z in the spherical basis.

    Couples M and N at equal l through i a(l, m), and neighbouring l at
    equal polarization through b(l, m); diagonal in m; overall factor -w/c.
    """
    k = omega / C
    p = np.zeros((trunc.size, trunc.size), dtype=complex)
    for row, (P, l, m) in enumerate(trunc.indices):
        other = "N" if P == "M" else "M"
        p[row, trunc.index(other, l, m)] = -1j * k * coefficient_a(l, m)
        if l < trunc.l_max and abs(m) <= l + 1:
            p[row, trunc.index(P, l + 1, m)] = k * coefficient_b(l, m)
        if l > 1 and abs(m) <= l - 1:
            p[row, trunc.index(P, l - 1, m)] = -k * coefficient_b(l - 1, m)
    return p


def _translation_matrix(d, omega, trunc, radial):
    # addition theorem for the displacement -d z (polar angle pi: parity (-1)^nu),
    # transposed so that rows carry the translated wave
    kd = omega / C * d
    z = radial(2 * trunc.l_max, kd)
    out = np.zeros((trunc.size, trunc.size), dtype=complex)
    for row, (Pp, lp, mp) in enumerate(trunc.indices):
        for col, (P, l, m) in enumerate(trunc.indices):
            if m != mp:
                continue
            total = 0j
            for nu in range(abs(l - lp), l + lp + 1):
                w0 = wigner3j(l, lp, nu, 0, 0, 0)
                if w0 == 0.0:
                    continue
                wm = wigner3j(l, lp, nu, m, -m, 0)
                if wm == 0.0:
                    continue
                a = (
                    (-1) ** (m + nu) * 1j ** ((l - lp + nu) % 4) * (2 * nu + 1)
                    * np.sqrt((2 * l + 1) * (2 * lp + 1) / (l * (l + 1) * lp * (lp + 1)))
                    * w0 * wm * z[nu]
                )
                if P == Pp:
                    total += 0.5 * (l * (l + 1) + lp * (lp + 1) - nu * (nu + 1)) * a
                else:
                    total += 1j * m * kd * a
            out[col, row] = total
    return out


def regular_translation_matrix(d, omega, trunc):
    """Regular translation matrix V(d) along z (j_nu in the addition sum).

    E_mu(r + d z) = sum_nu V_{mu nu} E_nu(r) for regular waves, so
    V(0) is the identity and V(d) = I - d p_z + O(d^2).
    """
    if d < 0:
        raise ValueError("translation distance must be >= 0")
    return _translation_matrix(d, omega, trunc, lambda n, x: spherical_jn_all(n, x).real)


def outgoing_translation_matrix(d, omega, trunc):
    """Outgoing-to-regular translation matrix U(d) along z (h_nu in the sum).

    E^out_mu(r + d z) = sum_nu U_{mu nu} E_nu(r) for |r| < d.
    """
    if not d > 0:
        raise ValueError("outgoing translation needs d > 0 (Hankel functions are singular at 0)")
    return _translation_matrix(d, omega, trunc, spherical_hn1_all)


def _sqrt_sign(m):
    return 1j if m % 2 else 1.0


def normalized_legendre(lmax, cos_theta, sin_theta):
    """Normalized Legendre functions and angular derivatives for m >= 0.

    Returns arrays ``plm, pilm, taulm`` of shape (lmax+1, lmax+1, npts) with

        plm[l, m]  = N_lm P_l^m(cos t),  N_lm^2 = (2l+1)/(4 pi) (l-m)!/(l+m)!
        pilm[l, m] = m plm[l, m] / sin t
        taulm[l, m] = d plm[l, m] / dt

    All three are evaluated without dividing by sin t, so poles are safe.
    """
    ct = np.atleast_1d(np.asarray(cos_theta, dtype=float))
    st = np.atleast_1d(np.asarray(sin_theta, dtype=float))
    npts = ct.shape[0]
    plm = np.zeros((lmax + 2, lmax + 2, npts))
    qlm = np.zeros((lmax + 2, lmax + 2, npts))  # plm / sin t for m >= 1
    plm[0, 0] = 1.0 / np.sqrt(4 * np.pi)
    for m in range(0, lmax + 2):
        if m > 0:
            fac = -np.sqrt((2 * m + 1) / (2 * m))
            if m == 1:
                qlm[1, 1] = fac * plm[0, 0]
            else:
                qlm[m, m] = fac * st * qlm[m - 1, m - 1]
            plm[m, m] = qlm[m, m] * st
        if m + 1 <= lmax + 1:
            plm[m + 1, m] = np.sqrt(2 * m + 3) * ct * plm[m, m]
            qlm[m + 1, m] = np.sqrt(2 * m + 3) * ct * qlm[m, m]
        for l in range(m + 2, lmax + 2):
            a = np.sqrt((4 * l * l - 1) / (l * l - m * m))
            b = np.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
            plm[l, m] = a * (ct * plm[l - 1, m] - b * plm[l - 2, m])
            qlm[l, m] = a * (ct * qlm[l - 1, m] - b * qlm[l - 2, m])
    pilm = np.zeros((lmax + 1, lmax + 1, npts))
    taulm = np.zeros((lmax + 1, lmax + 1, npts))
    for l in range(lmax + 1):
        for m in range(l + 1):
            pilm[l, m] = m * qlm[l, m]
            up = np.sqrt((l - m) * (l + m + 1)) * plm[l, m + 1] if m < l else 0.0
            if m == 0:
                down = -plm[l, 1] * np.sqrt(l * (l + 1)) if l >= 1 else 0.0
            else:
                down = np.sqrt((l + m) * (l - m + 1)) * plm[l, m - 1]
            taulm[l, m] = 0.5 * (up - down)
    return plm[: lmax + 1, : lmax + 1], pilm, taulm


class AngularBasis:
    """Scalar and vector spherical harmonics on a fixed set of directions.

    Stores Y_lm r_hat, Psi_lm = r grad Y_lm and Phi_lm = r x grad Y_lm in
    Cartesian components for every index of ``trunc`` (polarization is
    ignored here), arrays of shape (n_lm, 3, npts).
    """

    def __init__(self, trunc, theta, phi):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        phi = np.atleast_1d(np.asarray(phi, dtype=float))
        self.trunc = trunc
        lmax = trunc.l_max
        ct, st = np.cos(theta), np.sin(theta)
        cp, sp = np.cos(phi), np.sin(phi)
        r_hat = np.stack([st * cp, st * sp, ct])
        t_hat = np.stack([ct * cp, ct * sp, -st])
        p_hat = np.stack([-sp, cp, np.zeros_like(phi)])
        plm, pilm, taulm = normalized_legendre(lmax, ct, st)

        self.lm = [(l, m) for l in range(1, lmax + 1) for m in range(-l, l + 1)]
        n = len(self.lm)
        self.Y = np.zeros((n, 3, theta.size), dtype=complex)
        self.Psi = np.zeros_like(self.Y)
        self.Phi = np.zeros_like(self.Y)
        for i, (l, m) in enumerate(self.lm):
            am = abs(m)
            e = np.exp(1j * am * phi)
            y = plm[l, am] * e
            psi = (t_hat * taulm[l, am] + p_hat * 1j * pilm[l, am]) * e
            phi_v = (p_hat * taulm[l, am] - t_hat * 1j * pilm[l, am]) * e
            if m < 0:
                sgn = (-1) ** am
                y, psi, phi_v = sgn * np.conj(y), sgn * np.conj(psi), sgn * np.conj(phi_v)
            self.Y[i] = r_hat * y
            self.Psi[i] = psi
            self.Phi[i] = phi_v
        self._pos = {lm: i for i, lm in enumerate(self.lm)}

    def position(self, l, m):
        return self._pos[(l, m)]


def regular_wave_fields(trunc, omega, radius, basis):
    """Regular waves for every index of ``trunc`` at points (radius, basis directions).

    ``radius`` is broadcast against the basis directions. Returns an array
    of shape (trunc.size, 3, npts) in canonical order.
    """
    k = omega / C
    r = np.broadcast_to(np.asarray(radius, dtype=float), (basis.Y.shape[2],))
    lmax = trunc.l_max
    rho = k * r
    jl = np.zeros((lmax + 1, r.size))
    jl_over_rho = np.zeros_like(jl)
    dpsi_over_rho = np.zeros_like(jl)
    for i, x in enumerate(rho):
        if x == 0.0:
            jl[0, i] = 1.0
            jl_over_rho[1, i] = 1.0 / 3.0
            dpsi_over_rho[1, i] = 2.0 / 3.0
            continue
        js = spherical_jn_all(lmax, x).real
        jl[:, i] = js
        jl_over_rho[:, i] = js / x
        for l in range(1, lmax + 1):
            dpsi_over_rho[l, i] = (x * js[l - 1] - l * js[l]) / x
    out = np.zeros((trunc.size, 3, r.size), dtype=complex)
    for row, (P, l, m) in enumerate(trunc.indices):
        pos = basis.position(l, m)
        coef = _sqrt_sign(m) * np.sqrt(k) / np.sqrt(l * (l + 1))
        if P == "M":
            out[row] = -coef * jl[l] * basis.Phi[pos]
        else:
            out[row] = coef * (
                l * (l + 1) * jl_over_rho[l] * basis.Y[pos] + dpsi_over_rho[l] * basis.Psi[pos]
            )
    return out


def evaluate_regular_wave(mu, omega, r):
    """Field of the regular wave ``mu`` = (P, l, m) at Cartesian point ``r``.

    The N wave uses the analytic curl of the M wave; at r = 0 only the
    l = 1 electric waves survive.
    """
    P, l, m = mu
    if P not in POLARIZATIONS or l < 1 or abs(m) > l:
        raise ValueError(f"invalid partial wave index {mu!r}")
    r = np.asarray(r, dtype=float)
    rad = float(np.linalg.norm(r))
    if rad == 0.0:
        theta, phi = 0.0, 0.0
    else:
        theta = float(np.arccos(np.clip(r[2] / rad, -1.0, 1.0)))
        phi = float(np.arctan2(r[1], r[0]))
    trunc = Truncation(l)
    basis = AngularBasis(trunc, theta, phi)
    if rad == 0.0:
        if P == "M" or l > 1:
            return np.zeros(3, dtype=complex)
        # grad(r Y_1m) is constant: rY_1m = sqrt(3/4pi) (z, -(x+iy)/sqrt2, (x-iy)/sqrt2)
        k = omega / C
        coef = _sqrt_sign(m) * np.sqrt(k) / np.sqrt(2.0)
        e = {0: np.array([0, 0, 1], dtype=complex),
             1: -np.array([1, 1j, 0]) / np.sqrt(2),
             -1: np.array([1, -1j, 0]) / np.sqrt(2)}[m]
        return (2.0 / 3.0) * coef * np.sqrt(3 / (4 * np.pi)) * e
    fields = regular_wave_fields(trunc, omega, rad, basis)
    return fields[trunc.index(P, l, m), :, 0]


__all__ = [
    "PartialWaveIndex", "Truncation", "coefficient_a", "coefficient_b", "p_z_matrix",
    "regular_translation_matrix", "outgoing_translation_matrix", "normalized_legendre",
    "AngularBasis", "regular_wave_fields", "evaluate_regular_wave",
]
