"""Shared fixtures: the standard spheroid-plate scene and a fast quadrature spec."""
import math

import pytest

from casimir_propel.forces import ThermalScene
from casimir_propel.materials import preset
from casimir_propel.polarizability import Orientation, SpheroidSpec
from casimir_propel.quadrature import QuadratureSpec


@pytest.fixture(scope="session")
def spheroid():
    return SpheroidSpec(40e-9, 10e-9, preset("spheroid"))


@pytest.fixture(scope="session")
def scene():
    return ThermalScene(550.0, 300.0, 400e-9, preset("plate1"))


@pytest.fixture(scope="session")
def tilted():
    return Orientation(math.pi / 4, 0.0)


@pytest.fixture(scope="session")
def fine_spec():
    return QuadratureSpec(rel_tol=1e-12)


@pytest.fixture(scope="session")
def fast_spec():
    return QuadratureSpec(rel_tol=1e-6)


ACCEPTANCE = {}


@pytest.fixture
def record():
    """Store a criterion outcome for the end-of-run summary."""

    def _record(key, ok, detail):
        ACCEPTANCE[key] = (ok, detail)
        print(f"criterion {key}: {'PASS' if ok else 'FAIL'} ({detail})")

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k.rstrip("ab")), k)):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'} ({detail})")
