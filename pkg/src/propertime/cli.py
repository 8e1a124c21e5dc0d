"""Command line entry point: ``propertime run <scenario.json>`` and ``propertime check <suite>``."""
from __future__ import annotations

import argparse
import json
import os
import shutil
import sys
import tempfile
from importlib import metadata
from pathlib import Path

import scipy.fft

from . import checks, scenario
from .clifford import DIRAC, GammaSet
from .errors import PropertimeError
from .evolution import TRAJECTORY_COLUMNS
from .experiments import jsonable, run_experiment

#: exit status for failures that are not one of the typed errors
INTERNAL_EXIT = 5
CHECK_FAILED_EXIT = 1


def _version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _report_error(payload, code):
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def _write_outputs(out_dir: Path, files: dict):
    """Write every file into a scratch directory, then move them into place together."""
    out_dir.mkdir(parents=True, exist_ok=True)
    scratch = Path(tempfile.mkdtemp(prefix=".partial-", dir=out_dir))
    try:
        for name, text in files.items():
            (scratch / name).write_text(text)
        for name in files:
            os.replace(scratch / name, out_dir / name)
    finally:
        shutil.rmtree(scratch, ignore_errors=True)


def run(path, out=None, workers=1, profile="full", G: GammaSet = DIRAC) -> int:
    try:
        raw = scenario.load(path)
        scn = scenario.resolve(raw, profile)
        if out is not None:
            scn["output_dir"] = str(out)
        lattice = scenario.build_lattice(scn)
        scenario.build_packet(scn)
        if scn["experiment"] == "frame_invariance":
            scenario.build_boost(scn)
        with scipy.fft.set_workers(workers):
            report, table = run_experiment(scn, G)
    except PropertimeError as exc:
        return _report_error(exc.to_dict(), exc.exit_code)
    except Exception as exc:  # noqa: BLE001 - every failure leaves a machine-readable record
        return _report_error(
            {"error": "internal", "message": str(exc), "exit_code": INTERNAL_EXIT,
             "details": {"type": type(exc).__name__}},
            INTERNAL_EXIT,
        )
    manifest = jsonable({
        "scenario": scn,
        "lattice": lattice.to_dict(),
        "workers": workers,
        "profile": profile,
        "version": _version(),
        "trajectory_columns": list(TRAJECTORY_COLUMNS),
    })
    csv_text = table.to_csv() if table is not None else ",".join(TRAJECTORY_COLUMNS) + "\n"
    _write_outputs(Path(scn["output_dir"]), {
        "manifest.json": _dump(manifest),
        "trajectory.csv": csv_text,
        "report.json": _dump(report),
    })
    print(f"{report['experiment']}: {report['overall']} -> {scn['output_dir']}")
    return 0


def check(suite, G: GammaSet = DIRAC) -> int:
    rows = checks.identity_rows(G) if suite == "identities" else checks.oracle_rows()
    print(checks.format_table(rows))
    failed = [r[0] for r in rows if not r[3]]
    if failed:
        return _report_error(
            {"error": "check-failed", "message": f"{len(failed)} check(s) failed",
             "exit_code": CHECK_FAILED_EXIT, "details": {"suite": suite, "failed": failed}},
            CHECK_FAILED_EXIT,
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workers", type=int, default=1, help="FFT worker threads (default: 1)")
    common.add_argument("--out", type=Path, default=None, help="output directory (overrides the scenario)")
    common.add_argument("--profile", choices=sorted(scenario.PROFILES), default="full",
                        help="lattice defaults: full = 32 sites per axis, ci = 16 (default: full)")
    parser = argparse.ArgumentParser(
        prog="propertime",
        description="Proper-time evolution of four-dimensional Dirac wave packets on a periodic lattice.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", parents=[common], help="run a scenario file")
    p_run.add_argument("scenario", type=Path)
    p_check = sub.add_parser("check", parents=[common], help="run a built-in invariant suite")
    p_check.add_argument("suite", choices=["identities", "oracle"])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.workers < 1:
        return _report_error(
            {"error": "schema", "message": "--workers must be at least 1", "exit_code": 2,
             "details": {"workers": args.workers}}, 2)
    if args.command == "run":
        return run(args.scenario, args.out, args.workers, args.profile)
    return check(args.suite)


if __name__ == "__main__":
    sys.exit(main())
