import numpy as np
import pytest

from propertime.clifford import DIRAC, METRIC, dirac_adjoint, spinor_boost, vector_boost
from propertime.errors import InvalidParameterError, RepresentationError, ResolutionError
from propertime.lattice import Lattice4, to_momentum
from propertime.lorentz import BoostSpec, boost_field, boost_field_report, frame_invariance_check
from propertime.observables import expect, factorization_defect
from propertime.wavepackets import PacketSpec, cooke_packet, rest_spinor

LAT = Lattice4.centered([32, 32, 16, 16], [0.2, 0.2, 0.35, 0.35])
#: rotations into axis 2 need the same momentum range there as on axis 1
WIDE = Lattice4.centered([32, 32, 32, 16], [0.2, 0.2, 0.2, 0.35])
REST = PacketSpec((0,) * 4, (1, 0, 0, 0), (0.4,) * 4, 1.0)
MOVING = PacketSpec((0.1, -0.2, 0.0, 0.1), (np.sqrt(2.0), 1.0, 0, 0), (0.4,) * 4, 1.0)


@pytest.fixture(scope="module")
def rest_field():
    return to_momentum(cooke_packet(REST, LAT))


@pytest.fixture(scope="module")
def moving_field():
    return to_momentum(cooke_packet(MOVING, LAT))


def analytic_boost(spec, eps, lat=LAT):
    """Exactly transformed packet ``S u G(Lambda^{-1} p)`` from the continuum momentum Gaussian."""
    f = to_momentum(cooke_packet(spec, lat))
    grids = np.meshgrid(*[a.momenta(spec.hbar) for a in lat.axes], indexing="ij")
    inv = np.linalg.inv(vector_boost(eps))
    m = METRIC[:, None] * inv * METRIC[None, :]

    def profile(mat):
        src = [sum(mat[a, b] * grids[b] for b in range(4)) for a in range(4)]
        expo = 0.0
        for a in range(4):
            dp = spec.momentum_widths[a]
            expo = expo - ((src[a] - spec.p0_cov[a]) / (2 * dp)) ** 2 + 1j * src[a] * spec.x0[a] / spec.hbar
        return np.exp(expo)

    # fix the overall constant from the untransformed field
    base = profile(np.eye(4))
    u = rest_spinor(spec.p0_cov)
    k = np.unravel_index(np.argmax(np.abs(base)), base.shape)
    c = f.amps[(0,) + k] / (u[0] * base[k])
    S = spinor_boost(eps)
    return f.with_amps(c * (S @ u)[:, None, None, None, None] * profile(m)[None]), c * u[:, None, None, None, None] * base


def rel(a, b):
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def test_analytic_oracle_reproduces_lattice_packet(rest_field):
    _, base = analytic_boost(REST, np.zeros((4, 4)))
    assert rel(rest_field.amps, base) < 1e-5


def test_boost_spec_validation():
    e = np.zeros((4, 4))
    e[0, 1] = 0.2
    with pytest.raises(InvalidParameterError):
        BoostSpec(e)
    with pytest.raises(InvalidParameterError):
        BoostSpec.from_components(e01=0.4)
    with pytest.raises(InvalidParameterError):
        BoostSpec(np.zeros((4, 4)), interpolation="cubic")
    b = BoostSpec.from_components(e01=0.3)
    assert b.eps[0, 1] == 0.3 and b.eps[1, 0] == -0.3
    np.testing.assert_array_equal(b.inverse().eps, -b.eps)
    assert BoostSpec(np.zeros((4, 4))).is_identity


def test_identity_boost(rest_field):
    g, rep = boost_field_report(rest_field, BoostSpec(np.zeros((4, 4))))
    np.testing.assert_array_equal(g.amps, rest_field.amps)
    assert rep.norm_drift == 0.0


def test_boost_needs_momentum_field():
    with pytest.raises(RepresentationError):
        boost_field(cooke_packet(REST, LAT), BoostSpec.from_components(e01=0.3))


@pytest.mark.parametrize("spec,comps,lat", [
    (REST, {"e01": 0.3}, LAT),
    (MOVING, {"e01": 0.3}, LAT),
    (MOVING, {"e12": 0.3}, WIDE),
    (MOVING, {"e02": 0.2, "e13": -0.15}, WIDE),
])
def test_boost_against_analytic_transform(spec, comps, lat):
    b = BoostSpec.from_components(**comps)
    f = to_momentum(cooke_packet(spec, lat))
    g, rep = boost_field_report(f, b, estimate_error=True)
    exact, _ = analytic_boost(spec, b.eps, lat)
    err = rel(g.amps, exact.amps)
    assert err <= rep.error_bound
    # the linear-versus-cubic estimate tracks the true error
    assert 0.5 * err <= rep.interpolation_error <= 2 * err
    # mean four-momentum transforms as a contravariant vector
    p_before = METRIC * np.array([expect(f, f"p{m}").value.real for m in range(4)])
    p_after = METRIC * np.array([expect(g, f"p{m}").value.real for m in range(4)])
    np.testing.assert_allclose(p_after, vector_boost(b.eps) @ p_before, atol=0.01 * np.abs(p_before).max())


def test_boost_of_rest_packet_energy(rest_field):
    g = boost_field(rest_field, BoostSpec.from_components(e01=0.3))
    np.testing.assert_allclose(expect(g, "p0").value.real, np.cosh(0.3), rtol=0.01)


def test_rotation_keeps_time_axis():
    moving_field = to_momentum(cooke_packet(MOVING, WIDE))
    g = boost_field(moving_field, BoostSpec.from_components(e12=0.3))
    np.testing.assert_allclose(expect(g, "p0").value.real, np.sqrt(2.0), rtol=1e-3)
    p1, p2 = expect(g, "p1").value.real, expect(g, "p2").value.real
    np.testing.assert_allclose(np.hypot(p1, p2), 1.0, rtol=0.01)
    np.testing.assert_allclose(abs(np.arctan2(p2, p1)), 0.3, atol=0.01)
    np.testing.assert_allclose(factorization_defect(g, "x0", "p0"),
                               factorization_defect(moving_field, "x0", "p0"), rtol=0.05)


def test_round_trip_within_twice_the_bound(moving_field):
    b = BoostSpec.from_components(e01=0.3)
    g, rep = boost_field_report(moving_field, b)
    h = boost_field(g, b.inverse())
    assert rel(h.amps, moving_field.amps) <= 2 * rep.error_bound


def test_spinor_factor_pseudo_unitary():
    for comps in ({"e01": 0.3}, {"e12": 0.35}, {"e03": -0.2, "e23": 0.25}):
        S = spinor_boost(BoostSpec.from_components(**comps).eps)
        np.testing.assert_allclose(dirac_adjoint(S, DIRAC) @ S, np.eye(4), atol=1e-10)


def test_support_leaving_lattice_is_rejected(rest_field):
    # shift the p_2 content next to the Nyquist edge
    f = rest_field.with_amps(np.roll(rest_field.amps, 6, axis=3))
    with pytest.raises(ResolutionError):
        boost_field(f, BoostSpec.from_components(e01=0.3))


def test_frame_invariance_identity():
    b = BoostSpec(np.zeros((4, 4)))
    spec = REST.at_hbar(1.0)
    rep = frame_invariance_check(spec, LAT, b, [("x1", "p1")], hbar_values=(1.0, 0.9, 0.81))
    pair = rep["pairs"][0]
    np.testing.assert_array_equal(pair["rest_defects"], pair["boosted_defects"])
    np.testing.assert_allclose(pair["rest_defects"], [0.5, 0.45, 0.405], rtol=1e-6)
