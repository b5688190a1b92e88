import math

import numpy as np
import pytest
from scipy.special import zeta

from casimir_propel.constants import C, G_STANDARD, HBAR, KB
from casimir_propel.forces import (
    ForceResult,
    ThermalScene,
    gravity_ratio,
    isolated_force_z,
    janus_dilute_force,
    lateral_force_polarizability,
    lateral_force_spheroid,
    lateral_force_tmatrix,
    small_object_force_z,
    small_object_sum,
    two_temperature_force,
    validity,
)
from casimir_propel.materials import ConstantPermittivity, preset
from casimir_propel.polarizability import (
    Orientation,
    SpheroidSpec,
    lab_frame_tensor,
    spheroid_polarizability,
)
from casimir_propel.quadrature import QuadratureSpec
from casimir_propel.scattering import TMatrixBlock, dipole_t_from_polarizability, mie_t_matrix
from casimir_propel.waves import Truncation

TR2 = Truncation(2)


def _synthetic_provider(seed, full=True):
    """l <= 2 block whose only non-zero entries are the dipole-quadrupole set."""
    rng = np.random.default_rng(seed)
    shape = (3, 3)
    c_nn = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    c_mn = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    c_2n = rng.normal(size=(5, 3)) + 1j * rng.normal(size=(5, 3))
    if not full:
        c_mn[:] = 0
        mask = np.zeros((5, 3))
        mask[2, 1] = 1
        c_2n *= mask
        c_nn *= np.eye(3) * [0, 1, 0]
    rows_n1 = [TR2.index("N", 1, m) for m in (-1, 0, 1)]
    rows_m1 = [TR2.index("M", 1, m) for m in (-1, 0, 1)]
    rows_n2 = [TR2.index("N", 2, m) for m in range(-2, 3)]

    def provider(omega):
        x = omega * 1e-8 / C
        t = np.zeros((TR2.size, TR2.size), complex)
        t[np.ix_(rows_n1, rows_n1)] = c_nn * x**3
        t[np.ix_(rows_m1, rows_n1)] = c_mn * x**4
        t[np.ix_(rows_n2, rows_n1)] = c_2n * x**4
        return TMatrixBlock(omega, TR2, t)

    return provider


@pytest.mark.parametrize("seed,full", [(0, False), (1, True), (2, True)])
def test_small_object_matches_trace(seed, full, fast_spec):
    provider = _synthetic_provider(seed, full)
    exact = isolated_force_z(provider, 300.0, fast_spec).value
    small = small_object_force_z(provider, 300.0, fast_spec).value
    assert small == pytest.approx(exact, rel=1e-12)


def test_small_object_zero_cross_terms():
    t = np.zeros((TR2.size, TR2.size), complex)
    t[TR2.index("N", 1, 0), TR2.index("N", 1, 0)] = 1j
    assert small_object_sum(TMatrixBlock(1e14, TR2, t)) == 0.0


def test_small_object_single_term_weight():
    t = np.zeros((TR2.size, TR2.size), complex)
    t[TR2.index("N", 1, 0), TR2.index("N", 1, 0)] = 1.0
    t[TR2.index("N", 2, 0), TR2.index("N", 1, 0)] = 1j
    assert small_object_sum(TMatrixBlock(1e14, TR2, t)) == pytest.approx(-1 / math.sqrt(5))


def test_small_object_needs_quadrupoles():
    provider = lambda w: mie_t_matrix(1e-7, 2.0, 1.0, w, Truncation(1))  # noqa: E731
    with pytest.raises(ValueError):
        small_object_force_z(provider, 300.0)


def test_isotropic_mie_gives_zero():
    provider = lambda w: mie_t_matrix(2e-7, 3 + 0.5j, 1.0, w, Truncation(3))  # noqa: E731
    assert isolated_force_z(provider, 300.0, QuadratureSpec(rel_tol=1e-4)).value == 0.0


def test_truncation_must_not_change():
    def provider(w):
        return mie_t_matrix(1e-7, 2.0, 1.0, w, Truncation(1 if w < 1e13 else 2))

    with pytest.raises(ValueError):
        isolated_force_z(provider, 300.0)


def _janus_oracle(S, R, T):
    return 2 * HBAR / (math.pi * C**10) * R**9 / 2700 * S * math.gamma(11) * zeta(11) * (
        KB * T / HBAR
    ) ** 11


def test_janus_closed_form_oracle(fine_spec):
    e1, e2 = ConstantPermittivity(1.1), ConstantPermittivity(1.1 + 0.05j)
    force = janus_dilute_force(e1, e2, 1e-6, 300.0, fine_spec)
    assert force.value == pytest.approx(_janus_oracle(0.05 * 0.1, 1e-6, 300.0), rel=1e-6)
    swapped = janus_dilute_force(e2, e1, 1e-6, 300.0, fine_spec)
    assert swapped.value == -force.value


def test_janus_homogeneous_is_zero():
    e = preset("spheroid")
    assert janus_dilute_force(e, e, 1e-6, 300.0).value == 0.0


def test_janus_dispersive_halves():
    f = janus_dilute_force(preset("plate1"), preset("plate2"), 50e-9, 300.0)
    assert f.value != 0 and f.quadrature_error < 1e-6 * abs(f.value)


def test_janus_rejects_bad_radius():
    with pytest.raises(ValueError):
        janus_dilute_force(ConstantPermittivity(1.1), ConstantPermittivity(1.2), 0.0, 300.0)


# near field

def _alpha_provider(spheroid, orientation):
    def provider(omega):
        return lab_frame_tensor(*spheroid_polarizability(spheroid, omega), orientation)

    return provider


def _t_provider(spheroid, orientation):
    alpha = _alpha_provider(spheroid, orientation)
    return lambda omega: dipole_t_from_polarizability(alpha(omega), omega)


def test_isotropic_dipole_gives_zero(scene, fast_spec):
    sphere = SpheroidSpec(20e-9, 20e-9, preset("spheroid"))
    o = Orientation(0.7, 0.3)
    assert lateral_force_tmatrix(_t_provider(sphere, o), scene, fast_spec).value == 0.0
    assert lateral_force_polarizability(_alpha_provider(sphere, o), scene, fast_spec).value == 0.0
    assert lateral_force_spheroid(sphere, o, scene, fast_spec).value == 0.0


def test_axis_aligned_tensor_gives_zero(spheroid, scene, fast_spec):
    for theta in (0.0, math.pi / 2):
        f = lateral_force_polarizability(
            _alpha_provider(spheroid, Orientation(theta)), scene, fast_spec
        )
        generic = lateral_force_spheroid(spheroid, Orientation(math.pi / 4), scene, fast_spec)
        assert abs(f.value) <= 1e-12 * abs(generic.value)


@pytest.mark.parametrize("o", [Orientation(0.0), Orientation(math.pi / 2), Orientation(0.6, math.pi / 2)])
def test_spheroid_zero_orientations(spheroid, scene, fast_spec, o):
    generic = lateral_force_spheroid(spheroid, Orientation(math.pi / 4), scene, fast_spec).value
    assert abs(lateral_force_spheroid(spheroid, o, scene, fast_spec).value) <= 1e-15 * abs(generic)


def test_d_minus_seven_exact(spheroid, scene, fast_spec, tilted):
    near = lateral_force_spheroid(spheroid, tilted, scene, fast_spec).value
    far_scene = ThermalScene(scene.T_particle, scene.T_plate, 2 * scene.d, scene.plate)
    far = lateral_force_spheroid(spheroid, tilted, far_scene, fast_spec).value
    assert near / far == pytest.approx(128.0, rel=1e-14)
    provider = _t_provider(spheroid, tilted)
    a = lateral_force_tmatrix(provider, scene, fast_spec).value
    b = lateral_force_tmatrix(provider, far_scene, fast_spec).value
    assert a / b == pytest.approx(128.0, rel=1e-14)


@pytest.mark.parametrize("theta", [0.3, math.pi / 4, 2.2])
def test_representations_agree(spheroid, scene, fine_spec, theta):
    o = Orientation(theta, 0.4)
    f17 = lateral_force_tmatrix(_t_provider(spheroid, o), scene, fine_spec).value
    f20 = lateral_force_polarizability(_alpha_provider(spheroid, o), scene, fine_spec).value
    f22 = lateral_force_spheroid(spheroid, o, scene, fine_spec).value
    assert f17 == pytest.approx(f22, rel=1e-10)
    assert f20 == pytest.approx(f22, rel=1e-10)


def test_random_symmetric_tensor_routes_agree(scene, fine_spec):
    rng = np.random.default_rng(11)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    base = 1e-24 * (a + a.T)
    material = preset("spheroid")

    def alpha(omega):
        return base * (material(omega) - 1.0)

    f20 = lateral_force_polarizability(alpha, scene, fine_spec).value
    f17 = lateral_force_tmatrix(
        lambda w: dipole_t_from_polarizability(alpha(w), w), scene, fine_spec
    ).value
    assert f17 == pytest.approx(f20, rel=1e-10)


def test_volume_scaling_slope(scene, fine_spec, tilted):
    scales = np.array([0.5, 1.0, 2.0])
    forces = []
    for s in scales:
        sph = SpheroidSpec(20e-9 * s, 5e-9 * s, preset("spheroid"))
        forces.append(abs(lateral_force_polarizability(_alpha_provider(sph, tilted), scene,
                                                       fine_spec).value))
    slope = np.polyfit(np.log(scales), np.log(forces), 1)[0]
    assert slope == pytest.approx(6.0, abs=1e-9)


def test_perfect_reflector_limit(spheroid, tilted, fast_spec):
    mirror = ThermalScene(550.0, 300.0, 400e-9, ConstantPermittivity(1e6 * (1 + 1e-3j)))
    lossy = ThermalScene(550.0, 300.0, 400e-9, ConstantPermittivity(3 + 1j))
    ratio = (lateral_force_spheroid(spheroid, tilted, mirror, fast_spec).value
             / lateral_force_spheroid(spheroid, tilted, lossy, fast_spec).value)
    assert abs(ratio) < 1e-12


def test_two_temperature_properties(spheroid, scene, fast_spec, tilted):
    def self_part(T):
        return lateral_force_spheroid(spheroid, tilted, scene, fast_spec, temperature=T)

    assert two_temperature_force(self_part, 400.0, 400.0).value == 0.0
    assert two_temperature_force(self_part, 550.0, 0.0).value == self_part(550.0).value
    hot = two_temperature_force(self_part, 550.0, 300.0).value
    cold = two_temperature_force(self_part, 300.0, 550.0).value
    assert hot == -cold and hot != 0
    with pytest.raises(ValueError):
        two_temperature_force(self_part, -1.0, 300.0)


def test_force_result_difference():
    a = ForceResult(3.0, 0.1)
    b = ForceResult(1.0, 0.2)
    d = a - b
    assert d.value == 2.0 and d.quadrature_error == pytest.approx(0.3)


def test_gravity_ratio(spheroid):
    weight = 3210 * spheroid.volume * G_STANDARD
    assert gravity_ratio(weight, spheroid) == pytest.approx(1.0, rel=1e-15)
    thin = SpheroidSpec(spheroid.R_par, spheroid.R_perp / 2, spheroid.material)
    assert gravity_ratio(1e-20, thin) == pytest.approx(4 * gravity_ratio(1e-20, spheroid), rel=1e-14)
    with pytest.raises(ValueError):
        gravity_ratio(1.0, spheroid, density=0.0)


def test_validity_flags(spheroid, scene, tilted, fast_spec):
    v = lateral_force_spheroid(spheroid, tilted, scene, fast_spec).validity
    assert v.R_over_d == pytest.approx(0.1)
    lam = HBAR * C / (KB * 550.0)
    assert v.d_over_lambdaT == pytest.approx(400e-9 / lam)
    assert v.near_field
    close = ThermalScene(550.0, 300.0, 100e-9, scene.plate)
    assert not validity(spheroid.R_par, close).near_field


def test_scene_validation():
    with pytest.raises(ValueError):
        ThermalScene(-1.0, 300.0, 1e-7, preset("plate1"))
    with pytest.raises(ValueError):
        ThermalScene(300.0, 300.0, 0.0, preset("plate1"))
