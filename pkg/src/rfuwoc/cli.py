"""Command-line front end: ``rfuwoc sweep | validate | optimal-power``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from rfuwoc.presets import PRESET_PATH_ENV, PresetError, load_preset, resolve_preset, parse_preset
from rfuwoc.secrecy import NoSaturationOnGrid, optimal_transmit_power, sop_exact
from rfuwoc.specfn import NotConverged
from rfuwoc.sweep import SweepSpec, emit_csv, format_csv, run_sweep


def _methods(text):
    items = [m.strip() for m in text.split(",") if m.strip()]
    if not items:
        raise argparse.ArgumentTypeError("--methods needs at least one method")
    return items


def build_parser():
    p = argparse.ArgumentParser(
        prog="rfuwoc",
        description="Secrecy outage of mixed RF / underwater-optical relay links.",
        epilog=f"Presets are looked up by path, then in ${PRESET_PATH_ENV} directories, then built-ins.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="run an SNR sweep and write CSV")
    sw.add_argument("--preset", required=True, help="preset name or path to a JSON preset")
    sw.add_argument("--methods", type=_methods, help="comma list from exact,asymptotic,saturation,oracle,mc")
    sw.add_argument("--trials", type=int, help="Monte Carlo trials per point")
    sw.add_argument("--seed", type=int, help="Monte Carlo master seed")
    sw.add_argument("--series", action="append", help="only run the named series (repeatable)")
    sw.add_argument("--workers", type=int, default=1, help="grid points evaluated concurrently")
    sw.add_argument("--out", help="CSV output path (default: stdout)")
    sw.add_argument("--strict", action="store_true",
                    help="exit with status 1 if any method failed to converge anywhere")

    va = sub.add_parser("validate", help="schema-check a preset file")
    va.add_argument("--preset", required=True)

    op = sub.add_parser("optimal-power", help="smallest main-link SNR within eps of the SOP floor")
    op.add_argument("--preset", required=True)
    op.add_argument("--eps", type=float, default=0.05)
    return p


def _sweep(args):
    preset = load_preset(args.preset)
    methods = args.methods or preset.doc.get("methods", ["exact"])
    # SweepSpec validation happens before any output file is opened.
    mc_cfg = preset.mc_config(args.trials, args.seed) if "mc" in methods else None
    specs = []
    for i, (label, doc) in enumerate(preset.series()):
        if args.series and label not in args.series:
            continue
        sw = doc["sweep"]
        cfg = replace(mc_cfg, stream_key=(i,)) if mc_cfg is not None else None
        specs.append(SweepSpec(preset.scenario(doc), sw["axis"], sw["start"], sw["stop"], sw["step"],
                               methods, cfg, label))
    if not specs:
        raise PresetError(f"{preset.origin}: no series matched {args.series}")
    results = [run_sweep(spec, workers=args.workers) for spec in specs]
    if args.out:
        emit_csv(results, args.out)
    else:
        sys.stdout.write(format_csv(results))
    failed = [(res.label, r.axis_db, f) for res in results for r in res.rows for f in r.flags]
    for label, x, flag in failed:
        print(f"warning: {label} @ {x} dB: {flag}", file=sys.stderr)
    return 1 if (failed and args.strict) else 0


def _validate(args):
    text, origin = resolve_preset(args.preset)
    preset = parse_preset(text, origin)
    print(f"{origin}: ok ({len(preset.series())} series)")
    return 0


def _optimal_power(args):
    preset = load_preset(args.preset)
    status = 0
    for label, doc in preset.series():
        s = preset.scenario(doc)
        try:
            g_db = optimal_transmit_power(s, rel_eps=args.eps)
        except NoSaturationOnGrid as exc:
            print(f"{label}: {exc}", file=sys.stderr)
            status = 1
            continue
        sop = sop_exact(s.with_main_snr(10.0 ** (g_db / 10.0))).value
        print(f"{label}\t{g_db:g} dB\tSOP={sop:.6g}")
    return status


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = {"sweep": _sweep, "validate": _validate, "optimal-power": _optimal_power}[args.command]
    try:
        return handler(args)
    except (PresetError, ValueError, NotConverged, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
