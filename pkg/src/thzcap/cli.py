"""Command-line front end.

Exit codes: 0 success, 1 validation/parse error, 2 numerical failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

from . import __version__
from .capacity import (
    DEFAULT_SAMPLES,
    capacity_quadrature,
    estimate_capacity_mc,
    snr_ceiling,
)
from .config import parse_config
from .errors import NumericalError, OutOfRangeError
from .linkbudget import STANDARD_ATMOSPHERE, absorption_amplitude, absorption_coefficient, load_absorption_table
from .output import FORMATS, emit_outputs
from .sweep import EVALUATORS, VARIABLES, SweepSpec, parse_grid, parse_values, replay, run_sweep

log = logging.getLogger("thzcap")

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3


def _cmd_capacity(args) -> int:
    sc = parse_config(args.scenario)
    print(f"ceiling_bps_hz\t{math.log2(1 + snr_ceiling(sc.impairments)):.6g}")
    if args.evaluator in ("mc", "both"):
        est = estimate_capacity_mc(sc, args.samples, args.seed, workers=args.workers)
        print(f"mc_bps_hz\t{est.mean:.10g}")
        print(f"std_error\t{est.std_error:.4g}")
        print(f"n_samples\t{est.n_samples}")
        print(f"seed\t{est.seed}")
    if args.evaluator in ("quadrature", "both"):
        q = capacity_quadrature(sc, args.rel_tol)
        print(f"quadrature_bps_hz\t{q:.10g}")
    if args.evaluator == "both" and est.std_error > 0:
        print(f"discrepancy_se\t{abs(est.mean - q) / est.std_error:.3f}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    sc = parse_config(args.scenario)
    est = estimate_capacity_mc(sc, args.samples, args.seed, workers=args.workers)
    q = capacity_quadrature(sc, args.rel_tol)
    diff = est.mean - q
    z = abs(diff) / est.std_error if est.std_error > 0 else (0.0 if diff == 0 else math.inf)
    ok = z <= args.max_se
    print(f"mc_bps_hz\t{est.mean:.10g}")
    print(f"std_error\t{est.std_error:.4g}")
    print(f"quadrature_bps_hz\t{q:.10g}")
    print(f"discrepancy\t{diff:.4g}")
    print(f"discrepancy_se\t{z:.3f}")
    print(f"status\t{'PASS' if ok else 'FAIL'} (threshold {args.max_se:g} SE)")
    return EXIT_OK if ok else EXIT_NUMERICAL


def _parse_series(text: str):
    name, sep, vals = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"series must look like name=v1,v2, got {text!r}")
    return name.strip(), parse_values(vals)


def _cmd_sweep(args) -> int:
    if args.manifest:
        with open(args.manifest, encoding="utf-8") as fh:
            manifest = json.load(fh)
        result = replay(manifest, workers=args.workers)
    else:
        if args.scenario is None or args.var is None or (args.grid is None) == (args.values is None):
            raise SystemExit(
                "sweep needs <scenario> --var NAME and exactly one of --grid/--values (or --manifest)"
            )
        sc = parse_config(args.scenario)
        values = parse_grid(args.grid) if args.grid else parse_values(args.values)
        series_var, series_vals = _parse_series(args.series) if args.series else (None, ())
        spec = SweepSpec(args.var, values, series_var, series_vals)
        result = run_sweep(sc, spec, args.samples, args.seed, args.evaluator, args.rel_tol, args.workers)

    formats = [f.strip() for f in args.formats.split(",") if f.strip()]
    for path in emit_outputs(result, args.out, formats):
        log.info("wrote %s", path)
    for r in result.rows:
        if r.failed:
            print(f"point {r.series_value} / {r.sweep_value} failed: {r.error}", file=sys.stderr)
    print(f"{len(result.rows)} points, {sum(r.failed for r in result.rows)} failed -> {args.out}")
    return result.exit_code


def _cmd_absorption(args) -> int:
    with open(args.table, "rb") as fh:
        provider = load_absorption_table(fh, source=args.table)
    status = EXIT_OK
    print("frequency_ghz\tkappa_per_m\ttransmittance")
    for f_ghz in parse_values(args.freq_ghz):
        try:
            kappa = absorption_coefficient(STANDARD_ATMOSPHERE, f_ghz * 1e9, provider)
        except OutOfRangeError as exc:
            print(f"{f_ghz:g}\tERROR\t{exc}")
            status = EXIT_VALIDATION
            continue
        # power transmittance exp(-kappa d) is the square of the amplitude factor
        trans = absorption_amplitude(kappa, args.distance_m) ** 2
        print(f"{f_ghz:g}\t{kappa:.6g}\t{trans:.4f}")
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="thzcap", description="Ergodic capacity of THz wireless links.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, evaluator=True):
        sp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--rel-tol", type=float, default=1e-6)
        sp.add_argument("--workers", type=int, default=1)
        if evaluator:
            sp.add_argument("--evaluator", choices=EVALUATORS, default="mc")

    sp = sub.add_parser("capacity", help="evaluate one scenario")
    sp.add_argument("scenario", help="scenario file or preset name (fig1, fig2)")
    common(sp)
    sp.set_defaults(func=_cmd_capacity)

    sp = sub.add_parser("sweep", help="sweep one variable, optionally per series value")
    sp.add_argument("scenario", nargs="?")
    sp.add_argument("--var", choices=sorted(VARIABLES))
    sp.add_argument("--grid", help="start:stop:count")
    sp.add_argument("--values", help="v1,v2,...")
    sp.add_argument("--series", help="name=v1,v2,...")
    sp.add_argument("--out", default="out")
    sp.add_argument("--formats", default=",".join(FORMATS))
    sp.add_argument("--manifest", help="replay a previous run from its manifest.json")
    common(sp)
    sp.set_defaults(func=_cmd_sweep)

    sp = sub.add_parser("absorption", help="query an absorption table")
    sp.add_argument("table")
    sp.add_argument("--freq-ghz", required=True, help="comma-separated frequencies in GHz")
    sp.add_argument("--distance-m", type=float, required=True)
    sp.set_defaults(func=_cmd_absorption)

    sp = sub.add_parser("validate", help="check Monte Carlo against the quadrature oracle")
    sp.add_argument("scenario")
    sp.add_argument("--max-se", type=float, default=3.0)
    common(sp, evaluator=False)
    sp.set_defaults(func=_cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, argparse.ArgumentTypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
