from pathlib import Path

import numpy as np
import pytest

from propertime import semiclassics as sc
from propertime.clifford import DIRAC
from propertime.errors import InvalidParameterError
from propertime.evolution import TrajectoryTable, prepare
from propertime.experiments import run_experiment
from propertime.fitting import PowerLawFit
from propertime.lattice import Lattice4
from propertime.observables import expect
from propertime.scenario import load, resolve
from propertime.wavepackets import ANTIPARTICLE, TACHYON, UNPROJECTED_MIX, PacketSpec, cooke_packet

from conftest import fitted_lattice

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"
HBARS = (1.0, 0.8, 0.64)


def synthetic_table(s, x0):
    n = len(s)
    x = np.zeros((n, 4))
    x[:, 0] = x0
    zeros = np.zeros(n)
    return TrajectoryTable(np.asarray(s), zeros + 1, zeros + 1, zeros + 1, x, x.copy(), zeros, zeros, False)


def test_verdict_layout():
    v = sc.verdict("name", "claim", 1.0, 1.0, 0.1, True)
    assert list(v) == ["name", "claim", "measured", "expected", "tolerance", "verdict"]
    assert v["verdict"] == "pass"
    assert sc.verdict("n", "c", 2.0, 1.0, 0.1, False)["verdict"] == "fail"


def test_exponent_verdicts():
    assert sc.exponent_verdict("a", "c", PowerLawFit(1.0, 1.0, 0.01, False))["verdict"] == "pass"
    assert sc.exponent_verdict("a", "c", PowerLawFit(0.5, 1.0, 0.01, False))["verdict"] == "fail"
    assert sc.exponent_verdict("a", "c", PowerLawFit(1.0, 1.0, 0.5, True))["verdict"] == "inconclusive"
    v = sc.exponent_verdict("a", "c", PowerLawFit(None, None, None, False, vanishing=True))
    assert v["verdict"] == "pass" and v["measured"] == "identically zero"


def test_sweep_result_validation():
    with pytest.raises(InvalidParameterError):
        sc.SweepResult([1.0, 0.5])
    with pytest.raises(InvalidParameterError):
        sc.SweepResult([0.25, 0.5, 1.0])
    with pytest.raises(InvalidParameterError):
        sc.SweepResult([1.0, 0.5, 0.4])
    res = sc.SweepResult([1.0, 0.5, 0.25])
    for h in res.hbar_values:
        res.add("d", 0.3 * h**2)
    fit = res.fit("d")
    np.testing.assert_allclose(fit.exponent, 2.0)
    np.testing.assert_allclose(fit.prefactor, 0.3)


def test_slope_span_limits_spreading():
    spec = PacketSpec((0,) * 4, (1, 0, 0, 0), (2.0, 3.0, 5.0, 7.0), 0.5)
    span = sc.slope_span(spec)
    growth = [np.hypot(w, span * dp) / w for w, dp in zip(spec.widths, spec.momentum_widths)]
    np.testing.assert_allclose(max(growth), 1.01)


@pytest.mark.parametrize("omega", [2.0, 4.0, 7.3])
def test_dominant_frequency_recovers_sinusoid(omega):
    s = np.linspace(0, 20, 201)
    y = 0.7 * s + 0.01 * np.sin(omega * s + 0.4)
    np.testing.assert_allclose(sc.dominant_frequency(s, y), omega, rtol=0.01)
    # the straight-line fit absorbs part of an incomplete period
    np.testing.assert_allclose(sc.oscillation_amplitude(s, y), 0.01, rtol=0.1)


@pytest.mark.parametrize("m,hbar,expected", [(1.0, 1.0, 2.0), (2.0, 1.0, 4.0), (1.0, 0.5, 4.0)])
def test_interference_spectrum_peak(m, hbar, expected):
    s = np.linspace(0, 30, 241)
    table = synthetic_table(s, s + 0.02 * np.cos(2 * m * s / hbar))
    rep = sc.zitterbewegung_spectrum(table, m, hbar)
    assert rep["expected_omega"] == expected
    assert rep["relative_error"] <= 0.05


def test_single_branch_has_no_oscillation():
    s = np.linspace(0, 30, 241)
    rep = sc.zitterbewegung_spectrum(synthetic_table(s, 1.0 * s), 1.0, 1.0)
    assert rep["amplitude"] < 1e-12


def test_spectrum_needs_uniform_samples():
    with pytest.raises(InvalidParameterError):
        sc.zitterbewegung_spectrum(synthetic_table([0, 1, 3, 4], np.zeros(4)), 1.0, 1.0)


def test_proper_time_rest_particle(rest_spec, rest_lattice):
    rep = sc.proper_time_report(rest_spec, rest_lattice)
    np.testing.assert_allclose(rep["x0_slope"], 1.0, atol=1e-3)
    assert rep["p0_sign"] == 1
    band = 4 * sum(dp**2 for dp in rest_spec.momentum_widths)
    assert abs(rep["arc_element"] - 1) <= band
    np.testing.assert_allclose(rep["slopes"], rep["reference"], atol=band)


def test_proper_time_antiparticle(rest_lattice):
    spec = PacketSpec((0,) * 4, (-1, 0, 0, 0), (4.0, 30.0, 30.0, 30.0), 1.0, ANTIPARTICLE)
    rep = sc.proper_time_report(spec, rest_lattice)
    np.testing.assert_allclose(rep["x0_slope"], -1.0, atol=1e-3)
    assert rep["p0_sign"] == -1


def test_proper_time_moving_packet_converges():
    """Slopes approach the contravariant velocity (sqrt 2, -1, 0, 0) as the momentum spread shrinks."""
    target = np.array([np.sqrt(2.0), -1.0, 0.0, 0.0])
    errors = []
    for widths, n in [((4.0, 3.0, 30.0, 30.0), (32, 32, 16, 16)), ((8.0, 6.0, 30.0, 30.0), (64, 64, 16, 16))]:
        spec = PacketSpec((0,) * 4, (np.sqrt(2.0), 1.0, 0, 0), widths, 1.0)
        rep = sc.proper_time_report(spec, fitted_lattice(spec, n))
        assert rep["p0_sign"] == 1
        errors.append(np.abs(np.asarray(rep["slopes"]) - target).max())
    assert errors[1] <= 0.05
    assert errors[1] <= errors[0] / 4


def test_proper_time_rejects_tachyon(rest_lattice):
    spec = PacketSpec((0,) * 4, (0, -1, 0, 0), (1.35,) * 4, 1.0, TACHYON)
    with pytest.raises(InvalidParameterError):
        sc.proper_time_report(spec, rest_lattice)


def test_velocity_cross_check(small_spec, small_lattice):
    rep = sc.velocity_cross_check(small_spec, small_lattice, HBARS)
    assert [v["verdict"] for v in rep["verdicts"]] == ["pass"]


def test_velocity_cross_check_unprojected_is_expected_failure(small_spec, small_lattice):
    mix = PacketSpec(small_spec.x0, small_spec.p0_cov, small_spec.widths, 1.0, UNPROJECTED_MIX)
    rep = sc.velocity_cross_check(mix, small_lattice, HBARS)
    by_name = {v["name"]: v for v in rep["verdicts"]}
    assert by_name["velocity_relation_unprojected"]["verdict"] == "expected-failure"
    assert by_name["velocity_relation_unprojected"]["measured"] >= 10


def test_factorization_sweep(small_spec, small_lattice):
    res = sc.factorization_sweep(small_spec, small_lattice, [("x1", "p1"), ("x1", "x2"), ("x1", "p2")], HBARS)
    np.testing.assert_allclose(res.records["x1,p1"], np.array(HBARS) / 2, rtol=1e-6)
    np.testing.assert_allclose(res.fits["x1,p1"].exponent, 1.0, atol=1e-3)
    assert res.fits["x1,x2"].vanishing and res.fits["x1,p2"].vanishing
    assert all(v["verdict"] == "pass" for v in sc.canonical_defect_verdicts(res))


def test_factorization_sweep_rejects_spin_tags(small_spec, small_lattice):
    with pytest.raises(InvalidParameterError):
        sc.factorization_sweep(small_spec, small_lattice, [("H", "p1")], HBARS)


@pytest.mark.parametrize("tag,kind,power,name", [
    ("x1", "psq_power", 2, "commutator_first_order_exact"),
    ("x0", "psq_power", 1, "commutator_first_order_exact"),
    ("p1", "sqrt_psq", 2, "commutator_commuting"),
])
def test_commutator_expansion(small_spec, small_lattice, tag, kind, power, name):
    rep = sc.commutator_expansion_check(small_spec, small_lattice, tag, kind, power, HBARS)
    assert [(v["name"], v["verdict"]) for v in rep["verdicts"]] == [(name, "pass")]


def test_commutator_sign():
    """<[p^2, x^1]> = 2 i hbar <p^1>: the direct term for f = p^2 is minus this."""
    spec = PacketSpec((0,) * 4, (np.sqrt(1.09), 0.3, 0, 0), (4.0, 3.0, 30.0, 30.0), 1.0)
    lat = fitted_lattice(spec, (32, 16, 16, 16))
    f, _ = prepare(cooke_packet(spec, lat), True)
    direct, first = sc._commutator_terms(f, "x1", "psq_power", 1, DIRAC)
    p_upper_1 = -expect(f, "p1").value
    np.testing.assert_allclose(direct, -2j * spec.hbar * p_upper_1, rtol=1e-3)
    np.testing.assert_allclose(direct, first, atol=1e-12)


def test_commutator_unknown_kind(small_spec, small_lattice):
    with pytest.raises(InvalidParameterError):
        sc.commutator_expansion_check(small_spec, small_lattice, "x1", "log", 1, HBARS)


@pytest.mark.slow
def test_commutator_exact_case_sqrt():
    raw = load(SCENARIOS / "full" / "commutator_check.json")
    report, _ = run_experiment(resolve(raw))
    assert report["verdicts"][0]["name"] == "commutator_first_order_exact"
    assert report["verdicts"][0]["measured"] <= 1e-10


@pytest.mark.parametrize("M,expected", [(0.5, 4.0), (1.0, 1.0), (2.0, 0.25)])
def test_fock_comparison(rest_spec, rest_lattice, M, expected):
    rep = sc.fock_comparison(rest_spec, rest_lattice, M)
    np.testing.assert_allclose(rep["expected"], expected, rtol=2e-3)
    assert rep["relative_error"] <= 0.05


def test_tachyon_norm_report():
    spec = PacketSpec((0,) * 4, (0, 1, 0, 0), (1.35,) * 4, 1.0, TACHYON)
    rep = sc.tachyon_norm_report(spec, Lattice4.centered(16, 1.0), np.linspace(0, 3, 31))
    assert all(v["verdict"] == "pass" for v in rep["verdicts"])
    with pytest.raises(InvalidParameterError):
        sc.tachyon_norm_report(PacketSpec((0,) * 4, (1, 0, 0, 0), (1.0,) * 4), Lattice4.centered(16, 1.0), [0, 1])
