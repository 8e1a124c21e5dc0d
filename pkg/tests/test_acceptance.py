"""Acceptance criteria, each checked at its stated tolerance.

Every test appends one pass/fail line to ``conftest.ACCEPTANCE_LINES``; the
lines are echoed in the pytest terminal summary and printed as they happen.
The heavier criteria run the ``full`` scenario files and carry the ``slow``
marker.
"""
import json
import time
from pathlib import Path

import numpy as np
import pytest

import conftest
from propertime import checks, cli
from propertime.evolution import trajectory
from propertime.experiments import run_experiment
from propertime.lattice import MOMENTUM, Lattice4, SpinorField
from propertime.scenario import load, resolve

FULL = Path(__file__).resolve().parents[1] / "scenarios" / "full"


def record(label, ok, detail):
    line = f"{label}: {'PASS' if ok else 'FAIL'} ({detail})"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def run_full(name):
    t0 = time.perf_counter()
    report, _ = run_experiment(resolve(load(FULL / f"{name}.json")))
    return report, time.perf_counter() - t0


def test_ac01_identity_suite():
    t0 = time.perf_counter()
    rows = checks.identity_rows()
    elapsed = time.perf_counter() - t0
    worst = max(r[1] for r in rows)
    branches = {name.rsplit("_", 1)[-1] for name, *_ in rows}
    assert {"tardyon", "tachyon", "null"} <= branches
    record("AC1 algebraic identities", worst <= 1e-10 and elapsed < 5,
           f"{len(rows)} rows, worst deviation {worst:.1e}, {elapsed:.2f} s")


def test_ac02_indefinite_norm_conservation():
    t0 = time.perf_counter()
    tachyon, _ = run_full("tachyon_norm")
    drift_t = tachyon["results"]["max_relative_drift"]
    growth = tachyon["results"]["l2_growth"]
    # a generic field on 16^4 mixing every branch; its fastest tachyonic modes
    # grow by ~3e3 over this range, which keeps roundoff well below the bound
    lat = Lattice4.centered(16, [0.6, 0.8, 0.7, 0.9])
    rng = np.random.default_rng(7)
    amps = rng.standard_normal((4,) + lat.shape) + 1j * rng.standard_normal((4,) + lat.shape)
    table = trajectory(SpinorField(lat, MOMENTUM, amps, 0.7), np.linspace(0, 1.0, 9), expectations=False)
    drift_r = float((np.abs(table.norm - table.norm[0]) / table.l2[0]).max())
    growth_r = float(table.l2.max() / table.l2[0])
    elapsed = time.perf_counter() - t0
    ok = max(drift_t, drift_r) <= 1e-10 and growth >= 10 and elapsed < 30
    record("AC2 indefinite-norm conservation", ok,
           f"drift {max(drift_t, drift_r):.1e} of the initial L2 norm, tachyon packet growth {growth:.1f}x, "
           f"generic field growth {growth_r:.0f}x, {elapsed:.1f} s")


def test_ac03_sign_rule():
    slopes, times = {}, []
    for name in ("proper_time_particle", "proper_time_antiparticle"):
        scn = resolve(load(FULL / f"{name}.json"))
        assert scn["packet"]["hbar"] == 0.25 and scn["lattice"]["n"] == [32] * 4
        rep, t = run_full(name)
        slopes[name] = rep["results"]["x0_slope"]
        times.append(t)
    ok = (abs(slopes["proper_time_particle"] - 1) <= 1e-3
          and abs(slopes["proper_time_antiparticle"] + 1) <= 1e-3 and max(times) < 60)
    record("AC3 sign rule", ok,
           f"particle {slopes['proper_time_particle']:+.5f}, antiparticle "
           f"{slopes['proper_time_antiparticle']:+.5f}, slowest {max(times):.1f} s")


@pytest.mark.slow
def test_ac04_arc_element_limit():
    rep, t = run_full("arc_element_sweep")
    fit = rep["results"]["sweep"]["fits"]["arc_defect"]
    defects = rep["results"]["sweep"]["records"]["arc_defect"]
    ok = fit["exponent"] is not None and fit["exponent"] >= 0.7 and fit["residual"] <= 0.2
    record("AC4 arc element", ok,
           f"defects {', '.join(f'{d:.2e}' for d in defects)}, exponent {fit['exponent']:.2f}, "
           f"residual {fit['residual']:.3f}, {t:.0f} s")


@pytest.mark.slow
def test_ac05_factorization():
    rep, t1 = run_full("factorization_sweep")
    res = rep["results"]
    hbars = np.array(res["hbar_values"])
    defects = np.array(res["records"]["x1,p1"])
    worst = float(np.max(np.abs(defects / (hbars / 2) - 1)))
    exponent = res["fits"]["x1,p1"]["exponent"]
    frame, t2 = run_full("frame_invariance")
    boosted = frame["results"]["pairs"][0]["boosted_fit"]["exponent"]
    ok = worst <= 0.01 and abs(exponent - 1) <= 0.3 and boosted is not None and boosted >= 0.7
    record("AC5 factorization", ok,
           f"worst deviation from hbar/2 {worst:.1e}, exponent {exponent:.3f}, "
           f"boosted-frame exponent {boosted:.3f}, {t1 + t2:.0f} s")


def test_ac06_tachyon_zero_norm():
    rep, t = run_full("tachyon_norm")
    ratio = rep["results"]["zero_norm_ratio"]
    record("AC6 tachyon zero norm", ratio < 1e-8, f"|<psi|psi>|/L2 = {ratio:.1e}, {t:.1f} s")


@pytest.mark.slow
def test_ac07_interference_removal():
    rep, t = run_full("zitterbewegung")
    mixed = rep["results"]["mixed"]
    ratio = rep["results"]["amplitude_ratio"]
    ok = mixed["relative_error"] <= 0.05 and ratio < 0.01
    record("AC7 interference removal", ok,
           f"peak {mixed['omega']:.4f} vs {mixed['expected_omega']:.4f}, amplitude ratio {ratio:.1e}, {t:.0f} s")


@pytest.mark.slow
def test_ac08_fock_comparator():
    rep, t = run_full("fock_compare")
    comps = rep["results"]["comparisons"]
    assert sorted(c["M"] for c in comps) == [0.5, 1.0, 2.0]
    worst = max(c["relative_error"] for c in comps)
    record("AC8 Fock comparator", worst <= 0.05,
           "; ".join(f"M={c['M']:g}: {c['arc_element']:.4f} vs {c['expected']:.4f}" for c in comps)
           + f"; {t:.0f} s")


def test_ac09_oracle_equivalence():
    rows = checks.oracle_rows()
    worst = max(r[1] for r in rows)
    record("AC9 oracle equivalence", all(r[3] for r in rows) and worst <= 1e-10,
           f"{len(rows)} rows on 8^4, worst deviation {worst:.1e}")


def test_ac10_determinism(tmp_path):
    scn = str(FULL / "proper_time_antiparticle.json")
    outs = [tmp_path / "a", tmp_path / "b"]
    codes = [cli.main(["run", scn, "--out", str(o), "--workers", "2"]) for o in outs]
    same = (outs[0] / "report.json").read_bytes() == (outs[1] / "report.json").read_bytes()
    overall = json.loads((outs[0] / "report.json").read_text())["overall"]
    record("AC10 determinism", codes == [0, 0] and same,
           f"report.json byte-identical across two runs: {same}, overall {overall}")
