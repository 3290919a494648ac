"""Command-line harness: run tests on one table, run studies, redraw figures.

Exit codes: 0 success, 1 validation failure, 2 usage error or unreadable
input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import Assoc2x2Error
from .measures import ContingencyTable
from .montecarlo import StudyConfig, run_study
from .report import (
    dominance_report,
    emit_correlation_panel,
    emit_measure_scatter,
    emit_rao_figure,
    emit_wald_figure,
    read_results_csv,
    render_dominance,
    rows_from_results,
    write_config_echo,
    write_results_csv,
)
from .validation import run_validation
from .ztests import TestKind, ZeroCellPolicy, run_all_tests

_TEST_NAMES = {
    TestKind.WALD_LOG_OR: "Wald log-odds",
    TestKind.SCORE_LOG_OR: "score log-odds",
    TestKind.WALD_PHI: "Wald phi",
    TestKind.SCORE_PHI: "score phi",
}

_CONFIG_KEYS = {
    "distributions": int,
    "replicates": int,
    "sample-size": int,
    "alpha": float,
    "seed": int,
    "zero-cell-policy": str,
    "null-calibration": None,  # boolean
    "out": str,
    "jobs": int,
}


def _parse_table(text: str) -> ContingencyTable:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"--table needs 4 comma-separated counts, got {text!r}")
    try:
        cells = [int(p.strip()) for p in parts]
        return ContingencyTable(*cells)
    except (ValueError, Assoc2x2Error) as exc:
        raise argparse.ArgumentTypeError(f"bad table {text!r}: {exc}") from exc


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _read_config_file(path: str) -> dict[str, object]:
    values: dict[str, object] = {}
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise Assoc2x2Error(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(raw.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise Assoc2x2Error(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_KEYS:
            raise Assoc2x2Error(f"{path}:{lineno}: unknown config key {key!r}")
        caster = _CONFIG_KEYS[key]
        try:
            values[key] = _parse_bool(value) if caster is None else caster(value)
        except ValueError as exc:
            raise Assoc2x2Error(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="assoc2x2",
        description="independence tests for 2x2 tables and Monte Carlo power studies",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_test = sub.add_parser("test", help="apply the four tests to one table")
    p_test.add_argument(
        "--table", type=_parse_table, required=True, metavar="a,b,c,d", help="cell counts"
    )
    p_test.add_argument("--alpha", type=float, default=0.05, help="significance level")
    p_test.add_argument(
        "--zero-cell-policy",
        choices=[p.value for p in ZeroCellPolicy],
        default=ZeroCellPolicy.HALDANE.value,
        help="log-odds pipeline treatment of zero cells",
    )

    p_study = sub.add_parser("study", help="run a power study and write outputs")
    p_study.add_argument("--distributions", type=int, default=None, help="alternatives to draw")
    p_study.add_argument("--replicates", type=int, default=None, help="tables per distribution")
    p_study.add_argument("--sample-size", type=int, default=None, help="observations per table")
    p_study.add_argument("--alpha", type=float, default=None, help="significance level")
    p_study.add_argument("--seed", type=int, default=None, help="master seed")
    p_study.add_argument(
        "--zero-cell-policy", choices=[p.value for p in ZeroCellPolicy], default=None
    )
    p_study.add_argument(
        "--null-calibration",
        action="store_true",
        default=None,
        help="also run a product-form (independence) batch for size checks",
    )
    p_study.add_argument("--out", type=str, default=None, metavar="DIR", help="output directory")
    p_study.add_argument(
        "--config", type=str, default=None, metavar="FILE", help="key=value file; flags override"
    )
    p_study.add_argument("--jobs", type=int, default=None, help="parallel workers")

    p_fig = sub.add_parser("figures", help="regenerate figures from a results CSV")
    p_fig.add_argument("--results", type=str, required=True, metavar="CSV")
    p_fig.add_argument("--out", type=str, default=None, metavar="DIR")

    p_val = sub.add_parser("validate", help="run the identity and calibration sweeps")
    p_val.add_argument("--seed", type=int, default=42)

    return parser


def _cmd_test(args) -> int:
    t: ContingencyTable = args.table
    policy = ZeroCellPolicy(args.zero_cell_policy)
    outcomes = run_all_tests(t, args.alpha, policy)
    print(f"table: {t.n11}, {t.n12}, {t.n21}, {t.n22}  (n={t.n})")
    print(
        f"alpha: {args.alpha}  critical value: {outcomes[0].critical_value:.4f}  "
        f"zero-cell policy: {policy.value}"
    )
    for o in outcomes:
        line = (
            f"{o.kind.label} {_TEST_NAMES[o.kind]:<15} statistic={o.statistic: .6f}  "
            f"reject={'yes' if o.reject else 'no'}"
        )
        if o.chi_squared is not None:
            line += f"  chi-squared={o.chi_squared:.6f}"
        if o.degeneracy.value != "none":
            line += f"  [{o.degeneracy.value}]"
        print(line)
    return 0


def _cmd_study(args) -> int:
    file_values = _read_config_file(args.config) if args.config else {}

    def pick(cli_value, key, fallback):
        if cli_value is not None:
            return cli_value
        return file_values.get(key, fallback)

    defaults = StudyConfig()
    cfg = StudyConfig(
        n_distributions=pick(args.distributions, "distributions", defaults.n_distributions),
        n_replicates=pick(args.replicates, "replicates", defaults.n_replicates),
        sample_size=pick(args.sample_size, "sample-size", defaults.sample_size),
        alpha=pick(args.alpha, "alpha", defaults.alpha),
        master_seed=pick(args.seed, "seed", defaults.master_seed),
        zero_cell_policy=ZeroCellPolicy(
            pick(args.zero_cell_policy, "zero-cell-policy", defaults.zero_cell_policy.value)
        ),
        include_null_calibration=bool(
            pick(args.null_calibration, "null-calibration", defaults.include_null_calibration)
        ),
    )
    out_dir = Path(pick(args.out, "out", "results"))
    n_jobs = int(pick(args.jobs, "jobs", 1))
    out_dir.mkdir(parents=True, exist_ok=True)

    result = run_study(cfg, n_jobs=n_jobs)
    rows = rows_from_results(result.alternatives)

    write_results_csv(rows, out_dir / "results.csv")
    write_config_echo(cfg, out_dir / "config_echo.txt")
    emit_wald_figure(rows, out_dir / "fig_wald.svg")
    emit_rao_figure(rows, out_dir / "fig_rao.svg")
    emit_correlation_panel(rows, out_dir / "fig_corr_panel.svg")
    emit_measure_scatter(rows, out_dir / "fig_measures.svg")
    (out_dir / "dominance.txt").write_text(render_dominance(dominance_report(rows)))
    if result.null_calibration:
        write_results_csv(rows_from_results(result.null_calibration), out_dir / "null_calibration.csv")

    print(
        f"study complete: {cfg.n_distributions} distributions x {cfg.n_replicates} replicates "
        f"(n={cfg.sample_size}, alpha={cfg.alpha}, seed={cfg.master_seed})"
    )
    print(f"outputs written to {out_dir}/")
    return 0


def _cmd_figures(args) -> int:
    rows = read_results_csv(args.results)
    out_dir = Path(args.out) if args.out else Path(args.results).parent
    out_dir.mkdir(parents=True, exist_ok=True)
    emit_wald_figure(rows, out_dir / "fig_wald.svg")
    emit_rao_figure(rows, out_dir / "fig_rao.svg")
    emit_correlation_panel(rows, out_dir / "fig_corr_panel.svg")
    emit_measure_scatter(rows, out_dir / "fig_measures.svg")
    print(f"figures written to {out_dir}/")
    return 0


def _cmd_validate(args) -> int:
    results = run_validation(seed=args.seed)
    failed = False
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
        failed = failed or not r.passed
    return 1 if failed else 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "test":
            return _cmd_test(args)
        if args.command == "study":
            return _cmd_study(args)
        if args.command == "figures":
            return _cmd_figures(args)
        if args.command == "validate":
            return _cmd_validate(args)
    except (Assoc2x2Error, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
