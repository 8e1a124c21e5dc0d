"""Scenario files: schema, defaults and resolution into compute objects.

A scenario is a JSON object validated against :data:`SCENARIO_SCHEMA` before
any array is allocated.  :func:`resolve` fills every default so the manifest
written next to the outputs records exactly what ran.
"""
from __future__ import annotations

import copy
import json
from pathlib import Path

import jsonschema
import numpy as np
from scipy.special import erfcinv

from .errors import ResolutionError, SchemaError
from .lattice import AxisSpec, Lattice4
from .lorentz import BoostSpec
from .observables import ORBITAL_TAGS
from .wavepackets import MIN_SITES_PER_WIDTH, SPECIES, TAIL_LIMIT, PacketSpec

EXPERIMENTS = (
    "trajectory", "proper_time", "factorization_sweep", "fock_compare",
    "zitterbewegung", "frame_invariance", "commutator_check", "tachyon_norm",
)

PROFILES = {"full": 32, "ci": 16}

_vec4 = {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4}
_pos4 = {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 4, "maxItems": 4}
_tag = {"type": "string", "enum": list(ORBITAL_TAGS)}

SCENARIO_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["experiment", "packet"],
    "properties": {
        "experiment": {"type": "string", "enum": list(EXPERIMENTS)},
        "output_dir": {"type": "string"},
        "lattice": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n": {"oneOf": [
                    {"type": "integer", "minimum": 8},
                    {"type": "array", "items": {"type": "integer", "minimum": 8}, "minItems": 4, "maxItems": 4},
                ]},
                "dx": {"oneOf": [
                    {"type": "number", "exclusiveMinimum": 0},
                    _pos4,
                    {"const": "auto"},
                ]},
                "x_min": _vec4,
            },
        },
        "packet": {
            "type": "object",
            "additionalProperties": False,
            "required": ["p0_cov", "widths"],
            "properties": {
                "x0": _vec4,
                "p0_cov": _vec4,
                "widths": _pos4,
                "hbar": {"type": "number", "exclusiveMinimum": 0},
                "species": {"type": "string", "enum": list(SPECIES)},
                "mix_weight": {"type": "number", "minimum": 0, "maximum": 1},
            },
        },
        "params": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "s_samples": {"oneOf": [
                    {"type": "array", "items": {"type": "number"}, "minItems": 1},
                    {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["stop", "num"],
                        "properties": {
                            "stop": {"type": "number", "exclusiveMinimum": 0},
                            "num": {"type": "integer", "minimum": 2},
                        },
                    },
                ]},
                "project": {"type": "boolean"},
                "hbar_values": {
                    "type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 3,
                },
                "M": {"oneOf": [
                    {"type": "number", "exclusiveMinimum": 0},
                    {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
                ]},
                "boost": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["eps"],
                    "properties": {
                        "eps": {
                            "type": "array", "minItems": 4, "maxItems": 4,
                            "items": _vec4,
                        },
                    },
                },
                "pairs": {
                    "type": "array", "minItems": 1,
                    "items": {"type": "array", "items": _tag, "minItems": 2, "maxItems": 2},
                },
                "commutator": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "tag": _tag,
                        "kind": {"type": "string", "enum": ["sqrt_psq", "psq_power"]},
                        "power": {"type": "integer"},
                    },
                },
                "span": {"type": "number", "exclusiveMinimum": 0},
                "sweep": {"type": "boolean"},
            },
        },
    },
}

DEFAULT_PARAMS = {
    "s_samples": {"stop": 1.0, "num": 11},
    "project": True,
    "hbar_values": [1.0, 0.5, 0.25],
    "M": [0.5, 1.0, 2.0],
    "boost": {"eps": np.zeros((4, 4)).tolist()},
    "pairs": [["x1", "p1"], ["x1", "x2"], ["psq", "p0"]],
    "commutator": {"tag": "x1", "kind": "sqrt_psq", "power": 2},
    "span": None,
    "sweep": False,
}

#: Gaussian half-width (in widths) holding all but TAIL_LIMIT of the mass
_TAIL_K = float(np.sqrt(2.0) * erfcinv(TAIL_LIMIT))


def load(path) -> dict:
    """Read and schema-validate a scenario file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemaError("scenario file unreadable", path=str(path), reason=str(exc)) from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("scenario is not valid JSON", path=str(path), line=exc.lineno, column=exc.colno) from exc
    validate(raw)
    return raw


def validate(raw):
    try:
        jsonschema.validate(raw, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(
            "scenario violates the schema",
            path="/".join(str(p) for p in exc.absolute_path), reason=exc.message,
        ) from exc


def auto_spacing(n, width, p_center, hbars):
    """Lattice spacing that keeps both Gaussian tails below the admissibility limit
    and at least the minimum sites per width, for every hbar in ``hbars``;
    widths scale as ``sqrt(hbar)``.

    ``width`` is the width at ``hbars[0]``.  Returns the geometric mean of the
    smallest spacing the position tail allows and the largest the momentum tail
    allows, or None when the window is empty.
    """
    k = _TAIL_K * 1.02
    h0 = hbars[0]
    lo, hi = 0.0, np.inf
    for h in hbars:
        w = width * np.sqrt(h / h0)
        lo = max(lo, 2.0 * k * w / n)
        hi = min(hi, np.pi * h / (abs(p_center) + k * h / (2.0 * w)), w / MIN_SITES_PER_WIDTH)
    if lo > hi:
        return None
    return float(np.sqrt(lo * hi))


def resolve(raw: dict, profile: str = "full") -> dict:
    """Scenario with every default filled in."""
    validate(raw)
    sc = copy.deepcopy(raw)
    pk = sc["packet"]
    pk.setdefault("x0", [0.0, 0.0, 0.0, 0.0])
    pk.setdefault("hbar", 1.0)
    pk.setdefault("species", "particle")
    pk.setdefault("mix_weight", 0.5)
    params = sc.setdefault("params", {})
    for key, val in DEFAULT_PARAMS.items():
        params.setdefault(key, copy.deepcopy(val))
    if isinstance(params["M"], (int, float)):
        params["M"] = [params["M"]]
    lat = sc.setdefault("lattice", {})
    n = lat.setdefault("n", PROFILES[profile])
    n = [n] * 4 if isinstance(n, int) else list(n)
    lat["n"] = n
    dx = lat.setdefault("dx", "auto")
    if dx == "auto":
        sweeping = sc["experiment"] in ("factorization_sweep", "frame_invariance", "commutator_check") or (
            sc["experiment"] == "proper_time" and params["sweep"])
        hbars = sorted(params["hbar_values"], reverse=True) if sweeping else [pk["hbar"]]
        widths = [w * np.sqrt(hbars[0] / pk["hbar"]) for w in pk["widths"]]
        dx = []
        for mu in range(4):
            d = auto_spacing(n[mu], widths[mu], pk["p0_cov"][mu], hbars)
            if d is None:
                raise ResolutionError(
                    "no lattice spacing resolves the packet on this axis", axis=mu, n=n[mu],
                    width=pk["widths"][mu], hbar_values=hbars,
                )
            dx.append(d)
    elif isinstance(dx, (int, float)):
        dx = [float(dx)] * 4
    lat["dx"] = [float(d) for d in dx]
    if "x_min" not in lat:
        lat["x_min"] = [pk["x0"][mu] - 0.5 * n[mu] * lat["dx"][mu] for mu in range(4)]
    sc.setdefault("output_dir", "out")
    sc["profile"] = profile
    return sc


def build_lattice(sc) -> Lattice4:
    lat = sc["lattice"]
    axes = tuple(AxisSpec(n, x, d) for n, x, d in zip(lat["n"], lat["x_min"], lat["dx"]))
    return Lattice4(axes)


def build_packet(sc) -> PacketSpec:
    pk = sc["packet"]
    return PacketSpec(
        tuple(pk["x0"]), tuple(pk["p0_cov"]), tuple(pk["widths"]),
        pk["hbar"], pk["species"], pk["mix_weight"],
    )


def build_boost(sc) -> BoostSpec:
    return BoostSpec(np.array(sc["params"]["boost"]["eps"], dtype=float))


def s_samples(sc):
    s = sc["params"]["s_samples"]
    if isinstance(s, dict):
        return np.linspace(0.0, s["stop"], s["num"])
    return np.asarray(s, dtype=float)
