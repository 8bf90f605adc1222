#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Command-line entry point.

    python -m dmimo run --preset desk --scheme lmmse --scheme idd --iters 2,3 \
        --snr-db 8,10,12 --blocks 500 --workers 8 --out results/desk.csv
    python -m dmimo conformance
    python -m dmimo codes list
    python -m dmimo codes export wifi648_r12 codes/r12.alist
    python -m dmimo constellation export --bits 4 --out tables/qam16.txt
    python -m dmimo bench --block-lengths 64,128,256,512,1024

Exit codes: 0 success, 1 conformance failure, 2 usage or configuration
error, 3 I/O error.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from loguru import logger

from dmimo.coding import BUILTIN_PROTOTYPES, builtin_code
from dmimo.configs import PRESETS, ExperimentSpec, load_mapping, spec_from_mapping
from dmimo.exceptions import (
    CodingException,
    ConfigValidationException,
    DimensionException,
    DmimoException,
    HarnessIOException,
)
from dmimo.harness.benchmark import benchmark_complexity
from dmimo.harness.conformance import run_conformance
from dmimo.harness.experiment import run_and_save
from dmimo.softmaps import get_constellation
from dmimo.types import Scheme

EXIT_OK = 0
EXIT_CONFORMANCE = 1
EXIT_USAGE = 2
EXIT_IO = 3

DEFAULT_DIAGNOSTICS = "results/diagnostics.jsonl"


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got '{text}'")


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got '{text}'")


def setup_logging(level: str = "INFO") -> None:
    logger.remove()
    logger.add(sys.stderr, level=level.upper(),
               format="<green>{time:HH:mm:ss}</green> | <level>{level: <7}</level> | {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", default="INFO",
                        choices=["TRACE", "DEBUG", "INFO", "WARNING", "ERROR"])

    parser = argparse.ArgumentParser(prog="dmimo", description="Distributed-MIMO uplink link-level simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="Monte Carlo sweep over schemes and SNR")
    run.add_argument("--config", type=str, help="YAML or JSON ExperimentSpec file")
    run.add_argument("--preset", choices=sorted(PRESETS), help="named system preset")
    run.add_argument("--scheme", action="append", choices=[s.value for s in Scheme],
                     help="receiver scheme, may be repeated")
    run.add_argument("--iters", type=_int_list, help="detector iterations, e.g. 3 or 2,3")
    run.add_argument("--snr-db", type=_float_list, help="comma-separated SNR grid in dB")
    run.add_argument("--blocks", type=int, help="trials per point")
    run.add_argument("--seed", type=int)
    run.add_argument("--out", type=str, help="CSV output path")
    run.add_argument("--workers", type=int)
    run.add_argument("--timing", action="store_true", help="record wall-clock time per block")
    run.add_argument("--verbose", action="store_true", help="write per-iteration JSON-lines diagnostics")
    run.add_argument("--diagnostics", type=str, help=f"diagnostics path (default {DEFAULT_DIAGNOSTICS})")
    run.add_argument("--no-progress", action="store_true")

    sub.add_parser("conformance", parents=[common], help="run the oracle suite").add_argument("--seed", type=int, default=0)

    codes = sub.add_parser("codes", parents=[common], help="built-in LDPC codes")
    codes_sub = codes.add_subparsers(dest="codes_command", required=True)
    codes_sub.add_parser("list")
    export = codes_sub.add_parser("export")
    export.add_argument("name", choices=sorted(BUILTIN_PROTOTYPES))
    export.add_argument("path")

    const = sub.add_parser("constellation", parents=[common], help="constellation labeling tables")
    const_sub = const.add_subparsers(dest="const_command", required=True)
    const_export = const_sub.add_parser("export")
    const_export.add_argument("--bits", type=int, choices=[2, 4, 6], required=True)
    const_export.add_argument("--out", required=True)

    bench = sub.add_parser("bench", parents=[common], help="detector complexity benchmark")
    bench.add_argument("--streams", type=int, default=8)
    bench.add_argument("--rx", type=int, default=8)
    bench.add_argument("--block-lengths", type=_int_list, default=[64, 128, 256, 512, 1024])
    bench.add_argument("--repeats", type=int, default=3)
    return parser


def _override_plans(file_plans, schemes: Optional[List[str]],
                    iters: Optional[List[int]]) -> List[Dict[str, Any]]:
    r"""Plans for ``--scheme`` / ``--iters``.

    Each plan starts from the first file plan of the same scheme, so fields
    such as ``bp_iters_per_pass`` or ``rho_mode`` survive; the result is
    validated with the rest of the spec.
    """
    templates: Dict[Scheme, Dict[str, Any]] = {}
    for plan in file_plans:
        entry = dict(plan) if isinstance(plan, dict) else {"scheme": plan}
        try:
            scheme = Scheme(entry.get("scheme", Scheme.IDD.value))
        except ValueError:
            raise ConfigValidationException(f"unknown scheme '{entry.get('scheme')}'",
                                            {"scheme": entry.get("scheme")})
        templates.setdefault(scheme, entry)

    names = [Scheme(s) for s in schemes] if schemes else list(templates) or [Scheme.IDD]
    plans, seen = [], set()
    for scheme in names:
        template = templates.get(scheme, {})
        counts = [1] if scheme is Scheme.LMMSE_BASELINE else iters or [template.get("num_iterations", 3)]
        for n in counts:
            if (scheme, n) not in seen:
                seen.add((scheme, n))
                plans.append({**template, "scheme": scheme.value, "num_iterations": n})
    return plans


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    r"""Merge a config file, a preset and command-line overrides into one spec.

    Command-line flags win over the file; ``--preset`` replaces the file's
    ``base`` while keeping an explicit ``--seed``.
    """
    data: Dict[str, Any] = dict(load_mapping(Path(args.config))) if args.config else {}
    overrides: Dict[str, Any] = {}
    if args.preset:
        data["base"] = args.preset
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        data["base_overrides"] = {**(data.get("base_overrides") or {}), **overrides}

    if args.scheme or args.iters:
        data["schemes"] = _override_plans(data.get("schemes") or [], args.scheme, args.iters)
    if args.snr_db:
        data["snr_grid_db"] = args.snr_db
    if args.blocks is not None:
        data["n_blocks"] = args.blocks
    if args.out:
        data["output_path"] = args.out
    if args.workers is not None:
        data["worker_count"] = args.workers
    if args.timing:
        data["record_timing"] = True
    if args.verbose or args.diagnostics:
        data["diagnostics_path"] = args.diagnostics or data.get("diagnostics_path") or DEFAULT_DIAGNOSTICS
    return spec_from_mapping(data)


def cmd_run(args) -> int:
    spec = spec_from_args(args)
    rows = run_and_save(spec, progress=not args.no_progress)
    logger.info(f"{len(rows)} rows written to {spec.output_path}")
    return EXIT_OK


def cmd_conformance(args) -> int:
    def emit(result):
        print(json.dumps(result.as_dict()), flush=True)

    report = run_conformance(seed=args.seed, emit=emit)
    print(json.dumps({"passed": report.passed, "failed": report.failed}), flush=True)
    return EXIT_OK if report.ok else EXIT_CONFORMANCE


def cmd_codes(args) -> int:
    if args.codes_command == "list":
        for name in BUILTIN_PROTOTYPES:
            code = builtin_code(name)
            print(f"{name}\tn={code.n}\tk={code.k}\trate={code.rate:.4f}\tedges={code.num_edges}")
        return EXIT_OK
    builtin_code(args.name).to_alist(args.path)
    logger.info(f"wrote {args.name} to {args.path}")
    return EXIT_OK


def cmd_constellation(args) -> int:
    get_constellation(args.bits).export_table(args.out)
    logger.info(f"wrote {1 << args.bits}-point table to {args.out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    result = benchmark_complexity(args.streams, args.rx, args.block_lengths, args.repeats)
    print(json.dumps(result.as_dict()))
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "conformance": cmd_conformance,
    "codes": cmd_codes,
    "constellation": cmd_constellation,
    "bench": cmd_bench,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    setup_logging(args.log_level)
    try:
        return COMMANDS[args.command](args)
    except HarnessIOException as e:
        logger.error(str(e))
        return EXIT_IO
    except (ConfigValidationException, CodingException, DimensionException) as e:
        logger.error(str(e))
        return EXIT_USAGE
    except DmimoException as e:
        logger.exception(f"simulation failed: {e}")
        return EXIT_USAGE
    except KeyboardInterrupt:
        logger.warning("interrupted")
        return 130


if __name__ == "__main__":
    sys.exit(main())
