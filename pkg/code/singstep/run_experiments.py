import argparse
import math
import os
import sys
from dataclasses import replace

import numpy as np
import pandas as pd

from .bounds import lemma_probe
from .errors import ConfigError, DomainError, SingstepError, UnknownPreset
from .experiments import dump_config, load_config, preset
from .metrics import build_table, kink_scan
from .schemes import doc_bound_check, doc_closed_form, doc_recursive_oracle, mittag_leffler
from .utils import ensure_dir, log, save_dir_name

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PARTIAL = 2

ERROR_COLUMNS = ("final_error", "exp_term", "alg_term")
ORDER_COLUMNS = ("order", "predicted_order", "local_order")
PARAM_COLUMNS = ("alpha", "kappa", "L", "lambda1", "T")
COUNT_COLUMNS = ("M", "N")


def get_parser():
    """argparse arguments"""
    parser = argparse.ArgumentParser(prog="singstep", description="convergence studies for weakly singular problems")
    commands = parser.add_subparsers(dest="command", required=True)

    def add_run_options(sub):
        sub.add_argument("--out", type=str, default="", help="output directory (default results/<name>)")
        sub.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
        sub.add_argument("--bounds", action="store_true", help="also evaluate the error bounds (bounds.csv)")
        sub.add_argument("--plot", action="store_true", help="save a figure of error-vs-N scans")
        sub.add_argument("--quiet", action="store_true")

    run = commands.add_parser("run", help="run an experiment from a config file")
    run.add_argument("--config", type=str, required=True)
    add_run_options(run)

    named = commands.add_parser("preset", help="run a named experiment grid")
    named.add_argument("name", type=str)
    named.add_argument("--M", type=int, default=None, help="spatial cells")
    named.add_argument("--conjecture-C", dest="conjecture_C", type=float, default=None)
    named.add_argument("--dump", action="store_true", help="print the preset config and exit")
    add_run_options(named)

    mlf = commands.add_parser("mlf", help="evaluate the Mittag-Leffler function and its derivative")
    mlf.add_argument("--alpha", type=float, required=True)
    mlf.add_argument("--z", type=float, required=True)

    doc = commands.add_parser("doc-check", help="compare closed-form and recursive DOC kernels")
    doc.add_argument("--n", type=int, required=True)
    doc.add_argument("--kappa-tau", dest="kappa_tau", type=float, required=True)

    probe = commands.add_parser("probe", help="check an auxiliary inequality on random samples")
    probe.add_argument("name", choices=["two-scale-sum", "ie-amplification", "cn-amplification"])
    probe.add_argument("--samples", type=int, default=10000)
    probe.add_argument("--seed", type=int, default=0)

    return parser


def _format_value(column, value):
    if isinstance(value, str):
        return value
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    if column in ERROR_COLUMNS:
        return f"{value:.5e}"
    if column in ORDER_COLUMNS:
        return f"{value:.2f}"
    if column in COUNT_COLUMNS:
        return str(int(value))
    if column in PARAM_COLUMNS or isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def format_frame(frame: pd.DataFrame) -> pd.DataFrame:
    """fixed text formatting: 6 significant digits for errors, 2 decimals for orders"""
    return pd.DataFrame({
        column: [_format_value(column, value) for value in frame[column]] for column in frame.columns
    }, columns=frame.columns)


def to_markdown(frame: pd.DataFrame) -> str:
    text = format_frame(frame)
    lines = ["| " + " | ".join(text.columns) + " |", "|" + "|".join("---" for _ in text.columns) + "|"]
    for row in text.itertuples(index=False):
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"


def write_csv(frame, path, raw=False):
    if raw:
        frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n", encoding="utf-8")
    else:
        format_frame(frame).to_csv(path, index=False, lineterminator="\n", encoding="utf-8")


def run(config, out_dir, jobs=1, plot=False, quiet=False):
    """run an experiment grid and write its artifacts; returns the exit status"""
    ensure_dir(out_dir)
    log_file = os.path.join(out_dir, "log.txt")
    log(dump_config(config).rstrip(), log_file, print_=False)

    if config.scan:
        scan = kink_scan(config, jobs=jobs, progress=not quiet)
        write_csv(scan, os.path.join(out_dir, "kinkscan.csv"))
        write_csv(scan, os.path.join(out_dir, "kinkscan_raw.csv"), raw=True)
        if plot:
            from .plot_utils import plot_kink_scan
            plot_kink_scan(scan, out_dir)
        failed = [status for status in scan["status"] if status != "ok"]
        for status in failed:
            log(f"failed cell: {status}", log_file, print_=not quiet)
        log(f"scan: {len(scan)} cells, {len(failed)} failed, written to {out_dir}", log_file, print_=not quiet)
        return EXIT_PARTIAL if failed else EXIT_OK

    table = build_table(config, jobs=jobs, progress=not quiet)
    write_csv(table.rows, os.path.join(out_dir, "table.csv"))
    write_csv(table.rows, os.path.join(out_dir, "table_raw.csv"), raw=True)
    if config.output_format == "markdown":
        with open(os.path.join(out_dir, "table.md"), "w", encoding="utf-8") as f:
            f.write(to_markdown(table.rows))
    if table.bounds is not None:
        write_csv(table.bounds, os.path.join(out_dir, "bounds.csv"))
        write_csv(table.bounds, os.path.join(out_dir, "bounds_raw.csv"), raw=True)

    for row in table.rows.itertuples(index=False):
        if row.status != "ok":
            length = "" if math.isnan(row.L) else f" L={row.L:g}"
            log(f"failed cell {row.scheme} kappa={row.kappa:g}{length} T={row.T:g} N={row.N}: {row.status}",
                log_file, print_=not quiet)
    summary = ", ".join(f"{key}={value}" for key, value in table.metadata.items())
    log(f"table: {summary}, written to {out_dir}", log_file, print_=not quiet)
    return EXIT_PARTIAL if table.failed else EXIT_OK


def _with_overrides(config, args):
    overrides = {}
    if getattr(args, "bounds", False):
        overrides["bounds"] = True
    if getattr(args, "M", None) is not None:
        overrides["M"] = args.M
    if getattr(args, "conjecture_C", None) is not None:
        overrides["conjecture_C"] = args.conjecture_C
    return replace(config, **overrides).validate() if overrides else config


def main(args):
    """dispatch a parsed command line; returns the exit status"""
    if args.command == "mlf":
        try:
            result = mittag_leffler(args.alpha, args.z)
        except DomainError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"E_alpha(z) = {result.value:.15g}")
        print(f"E_alpha'(z) = {result.derivative:.15g}")
        print(f"method = {result.method}, error estimate = {result.error_estimate:.1e}")
        return EXIT_OK

    if args.command == "doc-check":
        return doc_check(args.n, args.kappa_tau)

    if args.command == "probe":
        return probe(args.name, args.samples, args.seed)

    try:
        config = load_config(args.config) if args.command == "run" else preset(args.name)
        config = _with_overrides(config, args)
    except (ConfigError, UnknownPreset, OSError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    if getattr(args, "dump", False):
        print(dump_config(config), end="")
        return EXIT_OK

    out_dir = args.out or os.path.join("results", save_dir_name(config))
    return run(config, out_dir, jobs=args.jobs, plot=args.plot, quiet=args.quiet)


def doc_check(n, kappa_tau):
    try:
        oracle = doc_recursive_oracle(n, kappa_tau)
    except SingstepError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    print(f"oracle orthogonality residual = {oracle.orthogonality_residual():.3e}")
    passed = oracle.orthogonality_residual() <= 1e-11
    try:
        closed = doc_closed_form(n, kappa_tau)
    except DomainError as e:
        print(f"closed form: {e}")
    else:
        diff = float(np.max(np.abs(closed.theta - oracle.theta)))
        print(f"closed form vs oracle max |diff| = {diff:.3e}")
        print(f"closed form orthogonality residual = {closed.orthogonality_residual():.3e}")
        passed = passed and diff <= 1e-12

    report = doc_bound_check(oracle)
    if report.in_hypothesis:
        print(f"max theta (1 - kappa tau)^(n-k+1) = {report.max_ratio:.6f} (bound 2), positive = {report.all_positive}")
        passed = passed and report.passed
    else:
        print("decay bound not checked: needs 0 < -kappa tau < 1/4")
    print("PASS" if passed else "FAIL")
    return EXIT_OK if passed else EXIT_PARTIAL


def probe(name, samples, seed):
    """random in-hypothesis samples of one inequality"""
    rng = np.random.default_rng(seed)
    if name == "two-scale-sum":
        report = lemma_probe(
            name,
            rho=rng.uniform(1.01, 3.0, samples),
            beta=rng.uniform(-3.0, -1.05, samples),
            tau=rng.uniform(0.001, 0.5, samples),
            n=rng.integers(4, 201, samples),
        )
    else:
        kappa = -rng.uniform(0.01, 50.0, samples)
        tau = rng.uniform(0.0, 1.0, samples) * (-1.0 / kappa)
        tau = np.where(tau > 0, tau, -1.0 / kappa)
        report = lemma_probe(name, kappa=kappa, tau=tau, upsilon=rng.uniform(0.0, 20.0, samples))
    print(f"{name}: {report.samples} samples, {report.violations} violations, worst margin {report.worst_margin:.3e}")
    return EXIT_OK if report.passed else EXIT_PARTIAL


def cli(argv=None):
    args = get_parser().parse_args(argv)
    sys.exit(main(args))


if __name__ == "__main__":
    cli()
