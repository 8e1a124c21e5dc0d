import numpy as np
import pytest

from propertime.lattice import AxisSpec, Lattice4
from propertime.scenario import auto_spacing
from propertime.wavepackets import PacketSpec

#: lines recorded by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES = []


def fitted_lattice(spec: PacketSpec, n, hbars=None):
    """Lattice whose spacing resolves ``spec`` on every axis (for all ``hbars`` if given)."""
    ns = [n] * 4 if np.isscalar(n) else list(n)
    hbars = [spec.hbar] if hbars is None else sorted(hbars, reverse=True)
    scale = np.sqrt(hbars[0] / spec.hbar)
    axes = []
    for mu in range(4):
        dx = auto_spacing(ns[mu], spec.widths[mu] * scale, spec.p0_cov[mu], hbars)
        assert dx is not None, f"no admissible spacing on axis {mu}"
        axes.append(AxisSpec.centered(ns[mu], dx, spec.x0[mu]))
    return Lattice4(tuple(axes))


@pytest.fixture(scope="session")
def rest_spec():
    return PacketSpec((0, 0, 0, 0), (1, 0, 0, 0), (4.0, 30.0, 30.0, 30.0), 1.0)


@pytest.fixture(scope="session")
def rest_lattice(rest_spec):
    return fitted_lattice(rest_spec, (32, 16, 16, 16))


@pytest.fixture(scope="session")
def small_spec():
    """Rest packet with equal widths, resolved on 16^4 across an hbar sweep of ratio 0.8."""
    return PacketSpec((0, 0, 0, 0), (1, 0, 0, 0), (2.0, 2.0, 2.0, 2.0), 1.0)


@pytest.fixture(scope="session")
def small_lattice(small_spec):
    return fitted_lattice(small_spec, (32, 16, 16, 16), hbars=(1.0, 0.8, 0.64))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
