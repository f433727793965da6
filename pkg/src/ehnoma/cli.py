"""Command-line entry point.

    ehnoma run --preset fig3 --out results/
    ehnoma run --config my.ini --methods analytic --format csv

Exit status: 0 on success, 1 on invalid input, 2 when a closed form fails
its internal consistency check.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from .config import METHODS, PRESETS, family_label, load_config
from .errors import ConsistencyError, ValidationError
from .svgplot import emit_plot
from .sweep import emit_csv, run_sweep

log = logging.getLogger("ehnoma")


def _csv_list(text: str) -> list[str]:
    return [s.strip() for s in text.split(",") if s.strip()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ehnoma", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a sweep and write CSV/SVG output")
    run.add_argument("--config", type=Path, help="INI config file (overrides preset keys)")
    run.add_argument("--preset", choices=PRESETS, help="packaged figure preset")
    run.add_argument("--out", type=Path, default=Path("."), help="output directory")
    run.add_argument("--trials", type=int, help="Monte Carlo trials per grid point")
    run.add_argument("--seed", type=int, help="master RNG seed")
    run.add_argument("--methods", type=_csv_list, help="comma list from: analytic,mc")
    run.add_argument("--format", type=_csv_list, default=["csv", "svg"], help="comma list from: csv,svg")
    run.add_argument("--workers", type=int, default=1, help="processes for Monte Carlo chunks")
    run.add_argument("-v", "--verbose", action="store_true")
    return ap


def run(args) -> list[Path]:
    params, spec = load_config(args.config, args.preset)
    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.methods is not None:
        overrides["methods"] = tuple(m.lower() for m in args.methods)
    if overrides:
        spec = dataclasses.replace(spec, **overrides)
    formats = set(args.format)
    if not formats or not formats <= {"csv", "svg"}:
        raise ValidationError({"format": f"must be a subset of csv,svg; got {args.format}"})
    if set(spec.methods) - set(METHODS):
        raise ValidationError({"methods": f"must be a subset of {METHODS}"})

    name = args.preset or args.config.stem
    if args.config is not None and args.preset is not None:
        name = f"{args.preset}_{args.config.stem}"
    args.out.mkdir(parents=True, exist_ok=True)

    log.info("xi = %g (reported only)", params.xi)
    rows = run_sweep(spec, params, workers=args.workers)
    written = []
    if "csv" in formats:
        for member in spec.family:
            label = family_label(member)
            part = [r for r in rows if r.series == label]
            fname = f"{name}__{label}.csv" if label else f"{name}.csv"
            written.append(emit_csv(part, args.out / fname))
    if "svg" in formats:
        written.append(emit_plot(rows, args.out / f"{name}.svg", title=name))
    for p in written:
        log.info("wrote %s", p)
    return written


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if getattr(args, "verbose", False) else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        run(args)
    except ValidationError as exc:
        log.error("%s", exc)
        return 1
    except ConsistencyError as exc:
        log.error("numerical consistency check failed: %s", exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
