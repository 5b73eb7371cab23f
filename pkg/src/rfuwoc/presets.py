"""Loading and validation of water-condition tables and figure presets.

A preset is a JSON document describing one scenario template (main RF link,
eavesdropper RF link, optical hop, secrecy rate), a sweep axis and grid, the
methods to evaluate and a list of series, each overriding part of the template.
SNRs in presets are in dB; they are converted to linear scale here.
"""

from __future__ import annotations

import copy
import json
import math
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema

from rfuwoc.channels import AlphaMuLink, EggLink, WaterScenario
from rfuwoc.mc import McConfig, Mode
from rfuwoc.secrecy import SecrecyScenario

PRESET_PATH_ENV = "RFUWOC_PRESET_PATH"
METHODS = ("exact", "asymptotic", "saturation", "oracle", "mc")
AXES = ("main_snr_db", "eve_snr_db")


class PresetError(ValueError):
    pass


def db_to_linear(x_db):
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x):
    return 10.0 * math.log10(x)


_POS = {"type": "number", "exclusiveMinimum": 0}


def _rf(required):
    return {
        "type": "object",
        "properties": {"alpha": _POS, "mu": _POS, "mean_snr_db": {"type": "number"}},
        "required": ["alpha", "mu", "mean_snr_db"] if required else [],
        "additionalProperties": False,
    }


def _uwoc(required):
    return {
        "type": "object",
        "properties": {"water": {"type": "string"}, "mean_snr_db": {"type": "number"}},
        "required": ["water", "mean_snr_db"] if required else [],
        "additionalProperties": False,
    }


PRESET_SCHEMA = {
    "type": "object",
    "required": ["name", "rate_s", "main", "eavesdropper", "uwoc", "sweep"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "notes": {"type": "string"},
        "rate_s": {"type": "number", "minimum": 0},
        "detection_r": {"enum": [1, 2]},
        "main": _rf(True),
        "eavesdropper": _rf(True),
        "uwoc": _uwoc(True),
        "sweep": {
            "type": "object",
            "required": ["axis", "start", "stop", "step"],
            "additionalProperties": False,
            "properties": {
                "axis": {"enum": list(AXES)},
                "start": {"type": "number"},
                "stop": {"type": "number"},
                "step": _POS,
            },
        },
        "methods": {"type": "array", "minItems": 1, "items": {"enum": list(METHODS)}},
        "mc": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "trials": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
                "chunk_size": {"type": "integer", "minimum": 1},
                "mode": {"enum": [m.value for m in Mode]},
            },
        },
        "series": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label"],
                "additionalProperties": False,
                "properties": {
                    "label": {"type": "string"},
                    "main": _rf(False),
                    "eavesdropper": _rf(False),
                    "uwoc": _uwoc(False),
                },
            },
        },
    },
}

WATER_SCHEMA = {
    "type": "object",
    "required": ["scenarios"],
    "properties": {
        "scenarios": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "omega", "lambda", "a", "b", "c"],
                "properties": {
                    "label": {"type": "string"},
                    "status": {"enum": ["transcribed", "recalled", "placeholder"]},
                    "omega": {"type": "number", "minimum": 0, "maximum": 1},
                    "lambda": _POS, "a": _POS, "b": _POS, "c": _POS,
                },
            },
        }
    },
}


def _validate(doc, schema, where):
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        key = exc.json_path if hasattr(exc, "json_path") else "/".join(map(str, exc.path))
        raise PresetError(f"{where}: invalid value at {key}: {exc.message}") from None


def load_water(path=None):
    """Map label -> WaterScenario (with unit optical SNR; the preset sets mu_r)."""
    if path is None:
        text = resources.files("rfuwoc.data").joinpath("water.json").read_text()
        where = "water.json"
    else:
        text = Path(path).read_text()
        where = str(path)
    doc = json.loads(text)
    _validate(doc, WATER_SCHEMA, where)
    out = {}
    for row in doc["scenarios"]:
        if row["label"] in out:
            raise PresetError(f"{where}: duplicate water label {row['label']!r}")
        egg = EggLink(row["omega"], row["lambda"], row["a"], row["b"], row["c"])
        out[row["label"]] = WaterScenario(row["label"], egg)
    return out


def _search_dirs():
    dirs = [Path(p) for p in os.environ.get(PRESET_PATH_ENV, "").split(os.pathsep) if p]
    return dirs


def builtin_presets():
    root = resources.files("rfuwoc.data").joinpath("presets")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def resolve_preset(name_or_path):
    """Return (text, origin) for a preset given by path, search-path name, or built-in name."""
    p = Path(name_or_path)
    if p.suffix == ".json" and p.is_file():
        return p.read_text(), str(p)
    for d in _search_dirs():
        cand = d / f"{name_or_path}.json"
        if cand.is_file():
            return cand.read_text(), str(cand)
    res = resources.files("rfuwoc.data").joinpath("presets").joinpath(f"{name_or_path}.json")
    if res.is_file():
        return res.read_text(), f"builtin:{name_or_path}"
    raise PresetError(f"preset {name_or_path!r} not found (searched ${PRESET_PATH_ENV} and built-ins)")


def _merge(base, over):
    out = copy.deepcopy(base)
    for k, v in over.items():
        out[k] = {**out.get(k, {}), **v} if isinstance(v, dict) else v
    return out


@dataclass(frozen=True)
class Preset:
    doc: dict
    origin: str
    water: dict

    @property
    def name(self):
        return self.doc["name"]

    def series(self):
        entries = self.doc.get("series") or [{"label": self.doc["name"]}]
        return [(e["label"], _merge(self.doc, {k: v for k, v in e.items() if k != "label"}))
                for e in entries]

    def scenario(self, doc):
        r = self.doc.get("detection_r", 2)
        m, e, u = doc["main"], doc["eavesdropper"], doc["uwoc"]
        egg = self.water[u["water"]].egg
        egg = EggLink(egg.omega, egg.lambda_exp, egg.a, egg.b, egg.c, r, db_to_linear(u["mean_snr_db"]))
        return SecrecyScenario(
            AlphaMuLink(m["alpha"], m["mu"], db_to_linear(m["mean_snr_db"])),
            AlphaMuLink(e["alpha"], e["mu"], db_to_linear(e["mean_snr_db"])),
            egg,
            doc["rate_s"],
        )

    def mc_config(self, trials=None, seed=None):
        mc = self.doc.get("mc", {})
        return McConfig(
            trials=trials if trials is not None else mc.get("trials", 10_000_000),
            master_seed=seed if seed is not None else mc.get("seed", 20240601),
            chunk_size=mc.get("chunk_size", 1_000_000),
            mode=Mode(mc.get("mode", "lower_bound")),
        )


def parse_preset(text, origin="<string>", water=None):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PresetError(f"{origin}: not valid JSON: {exc}") from None
    _validate(doc, PRESET_SCHEMA, origin)
    sw = doc["sweep"]
    if not sw["start"] < sw["stop"]:
        raise PresetError(f"{origin}: invalid value at $.sweep.start: start must be below stop")
    water = water if water is not None else load_water()
    labels = [e["label"] for e in doc.get("series", [])]
    if len(set(labels)) != len(labels):
        raise PresetError(f"{origin}: invalid value at $.series: series labels must be unique")
    for i, (_, d) in enumerate(Preset(doc, origin, water).series()):
        if d["uwoc"]["water"] not in water:
            raise PresetError(
                f"{origin}: invalid value at $.series[{i}].uwoc.water: unknown water label "
                f"{d['uwoc']['water']!r}")
    return Preset(doc, origin, water)


def load_preset(name_or_path, water=None):
    text, origin = resolve_preset(name_or_path)
    return parse_preset(text, origin, water)
