"""Acceptance criteria 1-9, one pass/fail line per criterion in the run summary."""
import math
import time

import numpy as np
import pytest
from scipy.special import zeta

from casimir_propel.cli import main
from casimir_propel.constants import C, HBAR, KB
from casimir_propel.forces import (
    ThermalScene,
    isolated_force_z,
    janus_dilute_force,
    lateral_force_polarizability,
    lateral_force_spheroid,
    lateral_force_tmatrix,
    two_temperature_force,
)
from casimir_propel.materials import ConstantPermittivity, preset
from casimir_propel.polarizability import (
    Orientation,
    SpheroidSpec,
    lab_frame_tensor,
    overlap_factor,
    spheroid_polarizability,
)
from casimir_propel.quadrature import QuadratureSpec
from casimir_propel.scattering import (
    BornJanusTMatrix,
    BornQuadrature,
    JanusSphere,
    check_t_symmetry,
    dipole_t_from_polarizability,
    mie_coefficients,
    mie_t_matrix,
)
from casimir_propel.specfun import wigner3j
from casimir_propel.thermo import heating_derivative
from casimir_propel.waves import Truncation, p_z_matrix, regular_translation_matrix

FINE = QuadratureSpec(rel_tol=1e-12)
THETAS = (math.pi / 8, math.pi / 4, 3 * math.pi / 8, 5 * math.pi / 8, 7 * math.pi / 8)
PHIS = (0.0, 0.4, 1.0, 2.0, 3.0)


def _alpha_provider(spheroid, orientation):
    return lambda w: lab_frame_tensor(*spheroid_polarizability(spheroid, w), orientation)


def _t_provider(spheroid, orientation):
    alpha = _alpha_provider(spheroid, orientation)
    return lambda w: dipole_t_from_polarizability(alpha(w), w)


def _figure(name, capsys, monkeypatch):
    monkeypatch.setenv("CASIMIR_PROPEL_THREADS", "1")
    start = time.perf_counter()
    assert main(["figure", name, "--rel-tol", "1e-6", "--points", "100"]) == 0
    elapsed = time.perf_counter() - start
    lines = [ln for ln in capsys.readouterr().out.splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    x = rows[:, header.index("r_perp_over_r_par")]
    y = rows[:, header.index("abs_force_over_weight")]
    return x, y, elapsed


def test_criterion_1_fig4(record, capsys, monkeypatch):
    x, y, elapsed = _figure("fig4", capsys, monkeypatch)
    i = int(np.argmax(y))
    ok = abs(x[i] - 0.25) <= 0.05 and 1e-4 <= y[i] <= 1e-2 and elapsed < 60
    record("1", ok, f"peak at R_perp/R_par = {x[i]:.3f}, |F|/F_G = {y[i]:.3e}, {elapsed:.1f} s")
    assert ok


def test_criterion_2_fig5(record, capsys, monkeypatch):
    x, y, _ = _figure("fig5", capsys, monkeypatch)
    i = int(np.argmax(y))
    ok = abs(x[i] - 0.9) <= 0.05 and 0.2 <= y[i] <= 5
    record("2", ok, f"peak at R_perp/R_par = {x[i]:.3f}, |F|/F_G = {y[i]:.3e}")
    assert ok


def _maxima(y):
    return [i for i in range(1, len(y) - 1) if y[i] > y[i - 1] and y[i] >= y[i + 1]]


def test_criterion_3_fig3(record):
    volume = 40e-9 * (10e-9) ** 2
    w = np.linspace(0.02, 0.06, 8001) * 1e6 * C
    ratios = (0.2, 0.5, 0.8, 0.95)
    counts, separations, heights = [], [], []
    for ratio in ratios:
        r_par = (volume / ratio**2) ** (1 / 3)
        y = overlap_factor(SpheroidSpec(r_par, ratio * r_par, preset("spheroid")), w)
        peaks = [i for i in _maxima(y) if y[i] > 0]
        counts.append(len(peaks))
        separations.append(w[peaks[-1]] - w[peaks[0]])
        heights.append(y.max())
    # heights rise with the ratio, then collapse towards the sphere
    limit = []
    for ratio in (0.99, 0.999, 0.9999, 0.99999):
        r_par = (volume / ratio**2) ** (1 / 3)
        limit.append(overlap_factor(SpheroidSpec(r_par, ratio * r_par, preset("spheroid")), w).max())
    r_sph = volume ** (1 / 3)
    sphere = overlap_factor(SpheroidSpec(r_sph, r_sph, preset("spheroid")), w).max()
    ok = (
        all(c == 2 for c in counts)
        and all(np.diff(separations) < 0)
        and all(np.diff(limit) < 0)
        and limit[-1] < 1e-2 * max(heights)
        and sphere == 0.0
    )
    sep_text = ", ".join(f"{s / C * 1e-6:.4f}" for s in separations)
    record("3", ok, f"peak counts {counts}, separations {sep_text} rad/um, "
                    f"max at ratio 0.99999 / overall max {limit[-1] / max(heights):.1e}, sphere {sphere}")
    assert ok


def _janus_closed(S, R, T):
    return (2 * HBAR / (math.pi * C**10) * R**9 / 2700 * S * math.gamma(11) * zeta(11)
            * (KB * T / HBAR) ** 11)


def test_criterion_4a_janus_closed_form(record):
    e1, e2, R, T = 1.1, 1.1 + 0.05j, 1e-6, 300.0
    got = janus_dilute_force(ConstantPermittivity(e1), ConstantPermittivity(e2), R, T, FINE).value
    ref = _janus_closed(0.05 * 0.1, R, T)
    rel = abs(got / ref - 1)
    record("4a", rel < 1e-6, f"quadrature vs Gamma(11) zeta(11) closed form: rel. error {rel:.1e}")
    assert rel < 1e-6


@pytest.mark.xfail(strict=True, reason="Born trace route exceeds the closed form by 5/3; see notes")
def test_criterion_4b_janus_born(record):
    e1, e2, R, T = 1.05, 1.05 + 0.02j, 20e-9, 300.0
    born = BornJanusTMatrix(JanusSphere(R, e1, e2), Truncation(2), BornQuadrature(8, 16, 8))
    got = isolated_force_z(born, T, QuadratureSpec(rel_tol=1e-6)).value
    ref = janus_dilute_force(ConstantPermittivity(e1), ConstantPermittivity(e2), R, T).value
    ratio = got / ref
    record("4b", abs(ratio - 1) <= 0.02, f"Born route / closed form = {ratio:.4f}")
    assert abs(ratio - 1) <= 0.02


def test_criterion_5_representations(record, spheroid, scene):
    worst = 0.0
    for theta in THETAS:
        for phi in PHIS:
            o = Orientation(theta, phi)
            f17 = lateral_force_tmatrix(_t_provider(spheroid, o), scene, FINE).value
            f20 = lateral_force_polarizability(_alpha_provider(spheroid, o), scene, FINE).value
            f22 = lateral_force_spheroid(spheroid, o, scene, FINE).value
            for a, b in ((f17, f20), (f17, f22), (f20, f22)):
                worst = max(worst, abs(a - b) / abs(b))
    record("5", worst <= 1e-10, f"worst pairwise relative difference {worst:.1e} on 5x5 grid")
    assert worst <= 1e-10


def test_criterion_6_scaling(record, spheroid, scene, tilted):
    ds = np.linspace(200e-9, 800e-9, 7)
    f_d = [abs(lateral_force_spheroid(spheroid, tilted,
                                      ThermalScene(550.0, 300.0, d, scene.plate), FINE).value)
           for d in ds]
    slope_d = np.polyfit(np.log(ds), np.log(f_d), 1)[0]

    ref = lateral_force_polarizability(_alpha_provider(spheroid, tilted), scene, FINE).value
    worst = 0.0
    for theta in THETAS:
        for phi in PHIS:
            o = Orientation(theta, phi)
            f = lateral_force_polarizability(_alpha_provider(spheroid, o), scene, FINE).value
            worst = max(worst, abs(f / ref - math.sin(2 * theta) * math.cos(phi)))

    scales = np.array([0.5, 0.75, 1.0, 1.5, 2.0])
    f_r = [abs(lateral_force_polarizability(
        _alpha_provider(SpheroidSpec(20e-9 * s, 5e-9 * s, preset("spheroid")), tilted), scene, FINE
    ).value) for s in scales]
    slope_r = np.polyfit(np.log(scales), np.log(f_r), 1)[0]

    ok = abs(slope_d + 7) <= 0.01 and worst <= 1e-10 and abs(slope_r - 6) <= 0.05
    record("6", ok, f"d slope {slope_d:.6f}, orientation law error {worst:.1e}, "
                    f"volume slope {slope_r:.6f}")
    assert ok


def test_criterion_7_zero_forces(record, spheroid, scene, tilted):
    spec = QuadratureSpec(rel_tol=1e-8)
    checks = {}

    # isotropic sphere in the exact trace formula vs a janus sphere of the same size
    R, T = 20e-9, 300.0
    mie = isolated_force_z(lambda w: mie_t_matrix(R, 1.05 + 0.02j, 1.0, w, Truncation(2)), T,
                           QuadratureSpec(rel_tol=1e-6)).value
    janus_scale = abs(janus_dilute_force(ConstantPermittivity(1.05), ConstantPermittivity(1.05 + 0.02j),
                                         R, T).value)
    checks["Mie trace"] = abs(mie) / janus_scale

    same = preset("spheroid")
    checks["janus closed form"] = abs(janus_dilute_force(same, same, R, T).value) / janus_scale
    born_same = BornJanusTMatrix(JanusSphere(R, 1.05 + 0.02j, 1.05 + 0.02j), Truncation(2),
                                 BornQuadrature(8, 16, 8))
    born_scale = BornJanusTMatrix(JanusSphere(R, 1.05, 1.05 + 0.02j), Truncation(2),
                                  BornQuadrature(8, 16, 8))
    f_same = isolated_force_z(born_same, T, QuadratureSpec(rel_tol=1e-6)).value
    f_scale = isolated_force_z(born_scale, T, QuadratureSpec(rel_tol=1e-6)).value
    checks["janus Born"] = abs(f_same) / abs(f_scale)

    generic = abs(lateral_force_spheroid(spheroid, tilted, scene, spec).value)
    sphere = SpheroidSpec(20e-9, 20e-9, preset("spheroid"))
    checks["diagonal tensor, polarizability route"] = abs(lateral_force_polarizability(
        _alpha_provider(spheroid, Orientation(0.0)), scene, spec).value) / generic
    checks["isotropic tensor, T-matrix route"] = abs(lateral_force_tmatrix(
        _t_provider(sphere, tilted), scene, spec).value) / generic
    checks["sphere, spheroid route"] = abs(lateral_force_spheroid(sphere, tilted, scene,
                                                                  spec).value) / generic

    def self_part(t):
        return lateral_force_spheroid(spheroid, tilted, scene, spec, temperature=t)

    checks["equal temperatures"] = abs(two_temperature_force(self_part, 420.0, 420.0).value) / generic

    worst = max(checks.values())
    record("7", worst <= 1e-12, f"{len(checks)} zero-force checks, worst |F|/scale {worst:.1e}")
    assert worst <= 1e-12, checks


def test_criterion_8_onsager(record, spheroid):
    rng = np.random.default_rng(2024)
    orientations = [Orientation(t, p) for t, p in zip(rng.uniform(0.05, math.pi - 0.05, 5),
                                                     rng.uniform(0, 2 * math.pi, 5))]
    worst = 0.0
    for T in (300.0, 400.0, 550.0):
        scene = ThermalScene(T, T, 400e-9, preset("plate1"))
        for o in orientations:
            h = heating_derivative(spheroid, scene, o, FINE)

            def F(t, o=o, scene=scene):
                return lateral_force_spheroid(spheroid, o, scene, FINE, temperature=t).value

            onsager = -T * (F(T + 0.1) - F(T - 0.1)) / 0.2
            worst = max(worst, abs(h / onsager - 1))
    record("8", worst <= 1e-4, f"worst relative deviation {worst:.1e} (3 temperatures x 5 orientations)")
    assert worst <= 1e-4


def test_criterion_9_machinery(record):
    omega = 1e14
    k = omega / C
    tr = Truncation(1)
    p = p_z_matrix(tr, omega)
    d = 1e-3 / k
    v1 = regular_translation_matrix(d, omega, tr)
    v2 = regular_translation_matrix(2 * d, omega, tr)
    deriv = (4 * v1 - v2 - 3 * np.eye(tr.size)) / (2 * d)
    pz_err = np.max(np.abs(deriv + p)) / np.max(np.abs(p))

    w3j_err = 0.0
    for l1 in range(6):
        for l2 in range(6):
            l3s = range(abs(l1 - l2), l1 + l2 + 1)
            for l3 in l3s:
                for l3p in l3s:
                    for m3 in range(-l3, l3 + 1):
                        for m3p in range(-l3p, l3p + 1):
                            s = sum(wigner3j(l1, l2, l3, m1, m2, m3) * wigner3j(l1, l2, l3p, m1, m2, m3p)
                                    for m1 in range(-l1, l1 + 1) for m2 in range(-l2, l2 + 1))
                            target = float(l3 == l3p and m3 == m3p)
                            w3j_err = max(w3j_err, abs((2 * l3 + 1) * s - target))

    R = 1e-3 / k
    _, tn = mie_coefficients(1, R, 4.0, 1.0, omega)
    dip = 1j * (2 / 3) * (k * R) ** 3 * 3 / 6
    mie_err = abs(tn[0] / dip - 1)

    born = BornJanusTMatrix(JanusSphere(0.05 / k, 1.1, 1.1 + 0.05j), Truncation(3),
                            BornQuadrature(12, 24, 16))(omega)
    sym = check_t_symmetry(born)

    ok = pz_err <= 1e-6 and w3j_err <= 1e-12 and mie_err <= 1e-4 and sym <= 1e-8
    record("9", ok, f"p_z {pz_err:.1e}, 3j orthogonality {w3j_err:.1e}, Mie dipole {mie_err:.1e}, "
                    f"Born symmetry {sym:.1e}")
    assert ok
