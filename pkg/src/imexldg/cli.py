"""Command line entry point: ``imexldg {run,region-map,ap-study,convergence,stability}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from pydantic import ValidationError

from . import experiments as ex
from .errors import ConfigurationError, DomainError, NumericalError, TheoryInapplicableError

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_ASSERT = 0, 1, 2, 3

log = logging.getLogger("imexldg")


def _floats(text: str) -> list[float]:
    return [ex.parse_real(t) for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="imexldg", description="IMEX1-LDG kinetic solver experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out=True):
        p.add_argument("--config", required=True, type=Path, help="TOML experiment file")
        p.add_argument("-v", "--verbose", action="store_true")
        if out:
            p.add_argument("--out", type=Path, default=None, help="output directory (default: config 'output')")
            p.add_argument("--workers", type=int, default=1)
            p.add_argument("--assert", dest="check", action="store_true", help="exit 3 if the built-in check fails")
        return p

    common(sub.add_parser("run", help="kinetic run with energy monitoring"))
    p = common(sub.add_parser("region-map", help="stability classification over an (eps, h) grid"))
    p.add_argument("--eps", type=_floats, default=None, help="comma-separated eps values")
    p.add_argument("--h", type=_floats, default=None, help="comma-separated h values")
    p = common(sub.add_parser("ap-study", help="kinetic vs limit discrepancy as eps decreases"))
    p.add_argument("--eps", type=_floats, default=None)
    p = common(sub.add_parser("convergence", help="observed order of accuracy"))
    p.add_argument("--levels", type=_floats, default=None)
    common(sub.add_parser("stability", help="print the stability constants and bounds"), out=False)
    return parser


def _dispatch(args) -> int:
    cfg = ex.load_config(args.config)
    if args.command == "stability":
        print(json.dumps(ex._json_safe(ex.stability_report(cfg)), indent=2, sort_keys=True))
        return EXIT_OK
    out = args.out if args.out is not None else Path(cfg.output)
    if args.workers < 1:
        raise ConfigurationError("--workers must be >= 1")

    if args.command == "run":
        summary = ex.cmd_run(cfg, out)
        log.info("classification=%s monotone=%s", summary["classification"], summary["monotone_E_h_mu"])
        ok = summary["monotone_E_h_mu"]
    elif args.command == "region-map":
        rows = ex.cmd_region_map(cfg, out, args.eps, args.h)
        log.info("%d grid points", len(rows))
        ok = True
    elif args.command == "ap-study":
        rows = ex.cmd_ap_study(cfg, out, args.eps, workers=args.workers)
        for r in rows:
            log.info("eps=%g rho_err=%.3e u_err=%.3e g_eq_err=%.3e", r["eps"], r["rho_err"], r["u_err"], r["g_eq_err"])
        ok = ex.ap_strictly_decreasing(rows)
    else:
        levels = None if args.levels is None else args.levels
        result = ex.cmd_convergence(cfg, out, levels, workers=args.workers)
        log.info("observed order %s", result["order"])
        ok = result.get("order_ok", True)
    print(f"{args.command}: wrote {out}")
    if args.check and not ok:
        print(f"{args.command}: check failed", file=sys.stderr)
        return EXIT_ASSERT
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; here 2 means a numerical failure
        return EXIT_OK if exc.code in (0, None) else EXIT_VALIDATION
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return _dispatch(args)
    except ValidationError as exc:
        print(f"invalid configuration:\n{exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ConfigurationError, DomainError, TheoryInapplicableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
