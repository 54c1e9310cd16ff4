#!/usr/bin/env python3
"""
schattenlab - command-line front end.

Subcommands:
    spectrum   assemble one operator, write its spectrum and Schatten norms
    sweep      monomial or kernel-power growth tables with fitted exponents
    frontier   exploratory rows for the open region p(1-α) >= 4
    validate   run the registered property suites

Exit codes: 0 pass, 1 property failure, 2 invalid parameters, 3 numerical failure.
"""

import argparse
import json
import sys
import time
from concurrent.futures import Executor, ThreadPoolExecutor
from contextlib import nullcontext
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from .core.config import ConfigManager, parse_value, set_config
from .core.errors import ParameterError, SchattenLabError
from .core.export import spectrum_summary, write_csv, write_json, write_matrix, write_spectrum
from .core.manifest import ManifestStore, RunManifest
from .core.suite_system import SuiteContext, SuiteResult, default_registry
from .experiments import sweeps
from .experiments.spectrum import (
    COMPARISON_COLUMNS,
    NORM_ROW_COLUMNS,
    OperatorChoice,
    parse_orders,
    run_spectrum,
)
from .experiments.validation import failure_records, first_failure, run_suites, suite_names, summarize
from .logging import ModernLogger
from .numerics.hyperbolic import measure_from_json
from .numerics.spaces import InnerProductMode, Symbol

LOGGER_NAME = "schattenlab"
CONFIG_EXPORT_NAME = "config.json"


def parse_symbol(text: str) -> Symbol:
    """A compact form (``monomial:3``) or a path to a symbol JSON document."""
    path = Path(text)
    if text.endswith(".json") or path.is_file():
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ParameterError("symbol", f"cannot read symbol document {text}: {exc}") from exc
        return Symbol.from_dict(data)
    return Symbol.parse(text)


def parse_floats(text: Optional[str], name: str) -> Optional[List[float]]:
    if text is None:
        return None
    value = parse_value(text)
    values = value if isinstance(value, list) else [value]
    try:
        return [float(v) for v in values]
    except (TypeError, ValueError) as exc:
        raise ParameterError(name, f"expected a comma-separated list of numbers, got {text!r}") from exc


# -------------------- Configuration --------------------


def build_config(args: argparse.Namespace, environ: Optional[Dict[str, str]] = None) -> ConfigManager:
    """defaults < --config file < environment < flags."""
    config = ConfigManager()
    if getattr(args, "config", None):
        config.load_file(args.config)
    config.apply_env(environ)
    flags = {
        "grid.r_max": getattr(args, "clip", None),
        "grid.refine": getattr(args, "refine", None),
        "run.threads": getattr(args, "threads", None),
        "run.output_dir": getattr(args, "out", None),
        "run.log_level": getattr(args, "log_level", None),
        "run.log_file": getattr(args, "log_file", None),
    }
    config.update({k: v for k, v in flags.items() if v is not None})
    if getattr(args, "quiet", False):
        config.set("run.quiet", True)
    if config.get("run.threads") < 1:
        raise ParameterError("threads", f"must be >= 1, got {config.get('run.threads')}")
    return config


class RunContext:
    """Everything a subcommand handler needs: config, logger, grid, pool and output directory."""

    def __init__(self, command: str, argv: Sequence[str], config: ConfigManager, logger: ModernLogger):
        self.command = command
        self.config = config
        self.logger = logger
        self.grid = config.grid_spec()
        self.executor: Optional[Executor] = None
        self.manifest = RunManifest(
            command=command,
            argv=list(argv),
            config_hash=config.config_hash(),
            config=config.numeric_config(),
        )
        self.out_dir = Path(config.get("run.output_dir")) / f"{command}_{self.manifest.run_id}"

    @property
    def store(self) -> ManifestStore:
        return ManifestStore(self.out_dir)

    def output(self, name: str) -> Path:
        return self.out_dir / name

    def saved(self, path: Path, label: Optional[str] = None) -> None:
        self.manifest.add_output(path)
        self.logger.file_saved(str(path), label)


# -------------------- Subcommands --------------------


def cmd_spectrum(args: argparse.Namespace, run: RunContext) -> int:
    log = run.logger
    orders = parse_orders(args.p)
    operator = OperatorChoice(args.operator)
    if operator is OperatorChoice.TOEPLITZ:
        if not args.measure:
            raise ParameterError("measure", "the toeplitz operator needs --measure")
        symbol: Any = measure_from_json(args.measure)
    else:
        if not args.symbol:
            raise ParameterError("symbol", f"{operator.value} needs --symbol")
        symbol = parse_symbol(args.symbol)
    N = args.n if args.n is not None else int(run.config.get("truncation.N"))
    mode = InnerProductMode(args.mode or run.config.get("truncation.mode"))

    log.stage(f"Spectrum of {operator.value} with N = {N}")
    result = run_spectrum(
        symbol, args.alpha, N, orders,
        operator=operator, mode=mode, gamma=args.gamma, grid=run.grid,
        closed_form_check=bool(run.config.get("truncation.closed_form_check")),
        executor=run.executor,
    )
    for warning in result.warnings:
        log.warning(warning)

    log.result_table(f"Schatten norms of {result.matrix.spec.label}", NORM_ROW_COLUMNS, result.norm_rows())
    comparisons = result.comparison_rows()
    if comparisons:
        log.result_table("Comparable functionals", COMPARISON_COLUMNS, comparisons)

    run.saved(write_spectrum(run.output("spectrum.csv"), result.spectrum), "spectrum")
    run.saved(write_csv(run.output("schatten.csv"), NORM_ROW_COLUMNS, result.norm_rows()), "norms")
    if comparisons:
        run.saved(write_csv(run.output("comparison.csv"), COMPARISON_COLUMNS, comparisons), "comparison")
    summary = result.summary()
    summary["spectrum"] = spectrum_summary(result.spectrum, orders)
    run.saved(write_json(run.output("summary.json"), summary), "summary")
    if args.matrix:
        run.saved(write_matrix(run.output(f"matrix.{args.matrix}"), result.matrix, args.matrix), "matrix")
    run.manifest.summary = {"top": result.spectrum.top, "count": len(result.spectrum),
                            "warnings": result.warnings}
    return 0


def _report_sweep(run: RunContext, result: sweeps.SweepResult, stem: str) -> None:
    log = run.logger
    rows = [{"column": name, **fit.to_dict()} for name, fit in result.fits.items()]
    if rows:
        columns = ["column"] + [c for c in rows[0] if c != "column" and not isinstance(rows[0][c], (list, dict))]
        log.result_table(f"Fits ({result.regime.regime.value})", columns, rows)
    run.saved(write_csv(run.output(f"{stem}.csv"), result.columns, result.rows), stem)
    run.saved(write_json(run.output(f"{stem}_fits.json"), result.to_dict()), f"{stem} fits")


def cmd_sweep(args: argparse.Namespace, run: RunContext) -> int:
    config = run.config
    if args.family == "monomial":
        degrees = sweeps.monomial_degrees(
            args.k_min if args.k_min is not None else int(config.get("sweep.j_min_exp")),
            args.k_max if args.k_max is not None else int(config.get("sweep.j_max_exp")),
        )
        run.logger.stage(f"Monomial sweep alpha={args.alpha:g} p={args.p:g}, {len(degrees)} degrees")
        result = sweeps.monomial_sweep(
            args.alpha, args.p, degrees,
            padding=int(config.get("sweep.j_padding")),
            grid=run.grid,
            with_functional=not args.no_functional,
            executor=run.executor,
        )
    else:
        levels = sweeps.kernel_power_levels(
            args.k_min if args.k_min is not None else int(config.get("sweep.a_min_exp")),
            args.k_max if args.k_max is not None else int(config.get("sweep.a_max_exp")),
        )
        N = args.n if args.n is not None else int(config.get("truncation.N"))
        run.logger.stage(f"Kernel-power sweep alpha={args.alpha:g} p={args.p:g} gamma={args.gamma:g}")
        result = sweeps.kernel_power_sweep(
            args.alpha, args.p, args.gamma, levels, N=N, grid=run.grid, method=args.method,
            executor=run.executor,
        )
    regime = result.regime
    run.logger.info_panel(
        f"Regime at p(1-alpha) = {regime.product:g}",
        f"{regime.regime.value}: {regime.characterization}\nT_z^j growth: {regime.monomial_growth}",
    )
    _report_sweep(run, result, f"sweep_{args.family}")
    run.manifest.summary = {"regime": result.regime.regime.value,
                            "fits": {k: v.to_dict() for k, v in result.fits.items()}}
    return 0


def cmd_frontier(args: argparse.Namespace, run: RunContext) -> int:
    config = run.config
    alphas = parse_floats(args.alpha, "alpha") or list(config.get("sweep.alpha"))
    ps = parse_floats(args.p, "p") or list(config.get("sweep.p"))
    degrees = sweeps.monomial_degrees(
        args.k_min if args.k_min is not None else int(config.get("sweep.j_min_exp")),
        args.k_max if args.k_max is not None else int(config.get("sweep.j_max_exp")),
    )
    cells = sweeps.frontier_cells(alphas, ps)
    run.logger.stage(f"Frontier: {len(cells)} open cells (exploratory)")
    results = sweeps.frontier(
        alphas, ps, degrees, eps_fraction=args.eps, padding=int(config.get("sweep.j_padding")),
        grid=run.grid, executor=run.executor,
    )
    rows = [row for res in results for row in res.rows]
    run.saved(write_csv(run.output("frontier.csv"), sweeps.FRONTIER_COLUMNS, rows), "frontier")
    run.saved(write_json(run.output("frontier.json"), [res.to_dict() for res in results]), "frontier fits")
    run.logger.result_table("Open cells", ("alpha", "p", "eps", "tag"),
                            [{**res.rows[0], "eps": res.params["eps"]} for res in results])
    run.manifest.summary = {"cells": [[a, p] for a, p in cells], "exploratory": True}
    return 0


def cmd_validate(args: argparse.Namespace, run: RunContext) -> int:
    log = run.logger
    if args.list:
        default_registry.show_list(log.console, table_factory=lambda title: log.table(title=title))
        return 0
    names = args.suites or suite_names(include_slow=args.slow)
    params = {"c": args.c, "t": args.t, "s": args.s, "r": args.r, "n": args.n}
    ctx = SuiteContext(run.grid, run.executor, run.config, quick=args.quick, params=params)

    log.stage(f"Validating {len(names)} suite(s)")
    with log.progress_bar(len(names), "Suites", transient=True) as (progress, task):
        def done(res: SuiteResult) -> None:
            progress.advance(task)
            log.section(res.suite)
            for check in res.checks:
                log.check(check.name, check.passed, check.detail)

        results = run_suites(names, ctx, on_done=done)

    summary = summarize(results)
    log.result_table("Validation", ("suite", "checks", "failed", "passed"), summary)
    run.saved(write_json(run.output("validation.json"),
                         {"suites": [res.to_dict() for res in results.values()]}), "validation")
    failures = failure_records(results)
    if failures:
        run.saved(write_json(run.output("failures.json"), failures), "failures")
    run.manifest.summary = {"suites": summary}
    failed = first_failure(results)
    if failed is not None:
        failed.raise_for_failure()
    log.success("all checks passed")
    return 0


COMMANDS = {
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
    "frontier": cmd_frontier,
    "validate": cmd_validate,
}


# -------------------- Parser --------------------


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, help="flat key = value config file")
    common.add_argument("--out", type=str, help="output root (default: run.output_dir)")
    common.add_argument("--log-level", type=str, choices=["debug", "info", "warning", "error"],
                        help="log level (default: info)")
    common.add_argument("--log-file", type=str, help="also log to this rotating file")
    common.add_argument("--quiet", action="store_true", help="warnings and errors only")
    common.add_argument("--clip", type=float, help="outer clip radius r_max of disk integrals (1 = none)")
    common.add_argument("--refine", type=int, help="refine the quadrature grid this many times")
    common.add_argument("--threads", type=int, help="worker threads (never changes outputs)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="schattenlab",
        description="schattenlab - Schatten classes of integration operators on weighted Dirichlet spaces",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  schattenlab spectrum --symbol monomial:3 --alpha 0.5 --n 512 --p 1.5,2
  schattenlab spectrum --symbol kernelpow:0.9,1 --alpha 1 --n 1024 --p 2
  schattenlab sweep monomial --alpha 0 --p 1.5
  schattenlab sweep kernelpow --alpha 0 --p 2 --gamma 1
  schattenlab frontier --alpha 0,0.1 --p 4,5
  schattenlab validate lattice --r 1
  schattenlab validate --list
        """,
    )
    parser.add_argument("--version", action="version", version=f"schattenlab {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    spectrum = sub.add_parser("spectrum", parents=[common], help="spectrum and Schatten norms of one operator")
    spectrum.add_argument("--symbol", type=str, help="monomial:3, const:1, kernelpow:0.9,1, taylor:..., or a JSON file")
    spectrum.add_argument("--measure", type=str, help="measure JSON (file or inline) for --operator toeplitz")
    spectrum.add_argument("--operator", type=str, default="tg", choices=[c.value for c in OperatorChoice])
    spectrum.add_argument("--alpha", type=float, default=0.0, help="weight of D_alpha (domain)")
    spectrum.add_argument("--gamma", type=float, help="codomain weight of the Bergman multiplication")
    spectrum.add_argument("--n", type=int, help="truncation index N (default: truncation.N)")
    spectrum.add_argument("--p", type=str, default="2", help="comma-separated Schatten exponents")
    spectrum.add_argument("--mode", type=str, choices=[m.value for m in InnerProductMode])
    spectrum.add_argument("--matrix", type=str, choices=["npy", "csv"], help="also export the matrix")

    sweep = sub.add_parser("sweep", parents=[common], help="growth sweeps with fitted exponents")
    sweep.add_argument("family", choices=["monomial", "kernelpow"])
    sweep.add_argument("--alpha", type=float, default=0.0)
    sweep.add_argument("--p", type=float, default=2.0)
    sweep.add_argument("--gamma", type=float, default=1.0, help="kernel power exponent")
    sweep.add_argument("--k-min", type=int, help="smallest k (j = 2^k, or a = 1 - 2^-k)")
    sweep.add_argument("--k-max", type=int, help="largest k")
    sweep.add_argument("--n", type=int, help="SVD truncation of the kernel-power sweep")
    sweep.add_argument("--method", type=str, default="series", choices=["series", "nested", "both"])
    sweep.add_argument("--no-functional", action="store_true", help="monomial sweep: skip X^p_alpha")

    front = sub.add_parser("frontier", parents=[common], help="exploratory rows where p(1-alpha) >= 4")
    front.add_argument("--alpha", type=str, help="comma-separated alphas (default: sweep.alpha)")
    front.add_argument("--p", type=str, help="comma-separated exponents (default: sweep.p)")
    front.add_argument("--eps", type=float, default=0.5, help="eps as a fraction of alpha")
    front.add_argument("--k-min", type=int)
    front.add_argument("--k-max", type=int)

    validate = sub.add_parser("validate", parents=[common], help="run property suites")
    validate.add_argument("suites", nargs="*", help="suite names (default: all fast suites)")
    validate.add_argument("--list", action="store_true", help="list the registered suites")
    validate.add_argument("--slow", action="store_true", help="include slow suites in the default set")
    validate.add_argument("--quick", action="store_true", help="reduced parameter sets")
    validate.add_argument("--c", type=float, help="ict: exponent c")
    validate.add_argument("--t", type=float, help="ict / li2: exponent t")
    validate.add_argument("--s", type=float, help="li2: exponent s")
    validate.add_argument("--r", type=float, help="li2: exponent r; lattice: radius r")
    validate.add_argument("--n", type=int, help="truncation of matrix-based suites")
    return parser


# -------------------- Entry point --------------------


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point for the CLI application."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return 2

    try:
        config = build_config(args)
    except SchattenLabError as exc:
        ModernLogger(name=LOGGER_NAME).error_box(exc.message)
        return exc.exit_code
    set_config(config)

    log_file = config.get("run.log_file") or None
    logger = ModernLogger(
        name=LOGGER_NAME,
        level=config.get("run.log_level"),
        log_file=log_file,
        quiet=bool(config.get("run.quiet")),
    )
    if not (args.command == "validate" and args.list):
        subtitle = f"{args.command}: {' '.join(argv[1:]) or 'defaults'}"
        logger.banner("schattenlab", f"schattenlab {__version__}", subtitle)

    run = RunContext(args.command, argv, config, logger)
    threads = int(config.get("run.threads"))
    started = time.perf_counter()
    exit_code = 0
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else nullcontext()
    try:
        with pool as executor:
            run.executor = executor
            exit_code = COMMANDS[args.command](args, run)
    except SchattenLabError as exc:
        exit_code = exc.exit_code
        logger.error_box(f"{type(exc).__name__}: {exc.message}")
        if exc.details:
            logger.debug("details: %s", exc.to_dict())
        run.manifest.summary.setdefault("error", exc.to_dict())
    except KeyboardInterrupt:
        logger.warning("interrupted")
        exit_code = 130
    finally:
        logger.close()

    if not (args.command == "validate" and args.list):
        run.manifest.summary["wall_time"] = round(time.perf_counter() - started, 3)
        run.manifest.add_output(config.export_config(run.output(CONFIG_EXPORT_NAME)))
        run.manifest.finish(exit_code)
        logger.file_saved(str(run.store.save(run.manifest)), "manifest")
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
