"""``horolab`` command line.

Exit codes: 0 success, 2 config error, 3 numeric failure (a check-type
experiment or acceptance criterion missed its tolerance), 4 I/O error.
``HOROLAB_SEED`` overrides the config seed; the seed used is recorded in
the report.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import COMMON, DEFAULT_SEED, ConfigError, load_config
from .report import write_report
from .runner import ExperimentError, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def _env_seed():
    raw = os.environ.get("HOROLAB_SEED")
    if raw is None or raw == "":
        return None
    try:
        value = int(raw, 0)
    except ValueError:
        raise ConfigError(f"not an integer: {raw!r}", "HOROLAB_SEED") from None
    return COMMON["seed"].check("HOROLAB_SEED", value)


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    seed = _env_seed()
    if seed is not None:
        cfg = cfg.with_seed(seed)
    fmt = args.format or cfg.format
    report = run_experiment(cfg, workers=args.threads, timing=args.timing)
    _emit(write_report(report, fmt), args.out or cfg.output)
    return EXIT_NUMERIC if report.passed is False else EXIT_OK


def cmd_check(args) -> int:
    from .acceptance import run_all

    seed = _env_seed()
    seed = DEFAULT_SEED if seed is None else seed
    results = run_all(seed, log=lambda line: print(line, file=sys.stderr))
    reports = [r.report(seed) for r in results]
    _emit(write_report(reports, args.format or "json"), args.out)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed" + (f"; failed: {failed}" if failed else ""), file=sys.stderr)
    return EXIT_NUMERIC if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="horolab", description="Numerical experiments on the modular surface.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one experiment from a JSON config")
    r.add_argument("--config", required=True, help="path to the JSON config")
    r.add_argument("--format", choices=("json", "csv"), help="report format (default: config's, else json)")
    r.add_argument("--out", help="report path (default: config 'output', else stdout)")
    r.add_argument("--threads", type=int, default=1, help="worker threads for Monte Carlo sampling")
    r.add_argument("--timing", action="store_true", help="record wall-clock time (makes the report non-reproducible)")
    r.set_defaults(func=cmd_run)
    c = sub.add_parser("check", help="run the built-in acceptance suite")
    c.add_argument("--format", choices=("json", "csv"))
    c.add_argument("--out", help="report path (default: stdout)")
    c.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        print("horolab: error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"horolab: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as e:
        print(f"horolab: file not found: {e.filename}", file=sys.stderr)
        return EXIT_IO
    except OSError as e:
        print(f"horolab: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except ExperimentError as e:
        print(f"horolab: numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
