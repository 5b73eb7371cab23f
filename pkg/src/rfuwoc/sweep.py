"""SNR sweeps over one scenario template, evaluated by every requested method."""

from __future__ import annotations

import csv
import enum
import io
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from rfuwoc import mc as mc_mod
from rfuwoc.secrecy import (
    sop_asymptotic_eve,
    sop_asymptotic_main,
    sop_exact,
    sop_oracle,
    sop_saturation,
)
from rfuwoc.specfn import ContourInfeasible, NotConverged

COLUMNS = ("series", "axis", "axis_db", "sop_exact", "sop_asymptotic", "sop_saturation",
           "sop_oracle", "sop_mc", "mc_ci_low", "mc_ci_high", "flags")
_METHOD_COLUMNS = {"exact": "sop_exact", "asymptotic": "sop_asymptotic",
                   "saturation": "sop_saturation", "oracle": "sop_oracle", "mc": "sop_mc"}


class Axis(enum.Enum):
    MAIN_SNR_DB = "main_snr_db"
    EVE_SNR_DB = "eve_snr_db"


@dataclass(frozen=True)
class SweepSpec:
    scenario: object
    axis: Axis
    start: float
    stop: float
    step: float
    methods: frozenset
    mc: mc_mod.McConfig | None = None
    label: str = ""

    def __post_init__(self):
        methods = frozenset(self.methods)
        object.__setattr__(self, "methods", methods)
        object.__setattr__(self, "axis", Axis(self.axis))
        if not methods:
            raise ValueError("SweepSpec.methods must not be empty")
        unknown = methods - set(_METHOD_COLUMNS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")
        if not self.step > 0:
            raise ValueError(f"SweepSpec.step must be positive, got {self.step}")
        if not self.start <= self.stop:
            raise ValueError("SweepSpec.start must not exceed stop")
        if "mc" in methods and self.mc is None:
            raise ValueError("method 'mc' requested without an McConfig")

    def grid(self):
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [round(self.start + k * self.step, 10) for k in range(n)]

    def scenario_at(self, x_db):
        lin = 10.0 ** (x_db / 10.0)
        if self.axis is Axis.MAIN_SNR_DB:
            return self.scenario.with_main_snr(lin)
        return self.scenario.with_eve_snr(lin)


@dataclass
class SweepRow:
    axis_db: float
    values: dict = field(default_factory=dict)
    mc_ci_low: float | None = None
    mc_ci_high: float | None = None
    flags: tuple = ()


@dataclass
class SweepResult:
    label: str
    axis: Axis
    rows: list

    @property
    def failed(self):
        return any(r.flags for r in self.rows)


def _point(spec, index, x_db):
    s = spec.scenario_at(x_db)
    row = SweepRow(x_db)
    flags = []

    def attempt(name, fn):
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                row.values[name] = fn().value
        except NotConverged:
            flags.append(f"{name}:not_converged")
        except ContourInfeasible:
            flags.append(f"{name}:infeasible")

    if "exact" in spec.methods:
        attempt("exact", lambda: sop_exact(s))
    if "asymptotic" in spec.methods:
        fn = sop_asymptotic_main if spec.axis is Axis.MAIN_SNR_DB else sop_asymptotic_eve
        attempt("asymptotic", lambda: fn(s))
    if "saturation" in spec.methods:
        attempt("saturation", lambda: sop_saturation(s))
    if "oracle" in spec.methods:
        attempt("oracle", lambda: sop_oracle(s))
    if "mc" in spec.methods:
        cfg = replace(spec.mc, stream_key=(*spec.mc.stream_key, index))
        est = mc_mod.simulate_sop(s, cfg)
        row.values["mc"] = est.sop_hat
        row.mc_ci_low, row.mc_ci_high = est.ci_low, est.ci_high
    row.flags = tuple(flags)
    return row


def run_sweep(spec, workers=1):
    """Evaluate every requested method at every grid point; rows come back in grid order."""
    grid = spec.grid()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(lambda ix: _point(spec, *ix), enumerate(grid)))
    else:
        rows = [_point(spec, i, x) for i, x in enumerate(grid)]
    return SweepResult(spec.label, spec.axis, rows)


def _fmt(x):
    return "" if x is None else repr(float(x))


def format_csv(results):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for res in results:
        for r in res.rows:
            w.writerow([
                res.label, res.axis.value, _fmt(r.axis_db),
                *(_fmt(r.values.get(m)) for m in _METHOD_COLUMNS),
                _fmt(r.mc_ci_low), _fmt(r.mc_ci_high), ";".join(r.flags),
            ])
    return buf.getvalue()


def emit_csv(results, path):
    """Write sweep results to ``path``; identical inputs give identical bytes."""
    if isinstance(results, SweepResult):
        results = [results]
    text = format_csv(results)
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc.strerror}") from exc


def read_csv(path):
    """Parse a file written by :func:`emit_csv` back into SweepResult objects."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != COLUMNS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        out = []
        for rec in reader:
            if not out or out[-1].label != rec["series"]:
                out.append(SweepResult(rec["series"], Axis(rec["axis"]), []))
            num = lambda k: float(rec[k]) if rec[k] != "" else None  # noqa: E731
            values = {m: num(col) for m, col in _METHOD_COLUMNS.items() if rec[col] != ""}
            flags = tuple(rec["flags"].split(";")) if rec["flags"] else ()
            out[-1].rows.append(SweepRow(float(rec["axis_db"]), values, num("mc_ci_low"),
                                         num("mc_ci_high"), flags))
    return out


def total_variation(values):
    return float(np.sum(np.abs(np.diff(np.asarray(values, dtype=float)))))
