"""Persistent study outputs: results CSV, SVG figures, dominance summary.

The CSV is the canonical record: one row per distribution, floats written
with 17 significant digits so a re-read reproduces the in-memory values
exactly.  Figures are regenerated from rows (in-memory or re-read), so a
results file alone is enough to redraw everything.

Figure conventions: power-vs-measure scatters pair each test with its native
measure (Z1, Z2 with ln odds ratio; Z3, Z4 with phi), overlaid with a
GCV-selected cubic smoothing spline; non-finite ln odds values are excluded
from axes and counted in the caption.  Power histograms use 20 bins over
[0, 1].  SVG output carries no timestamp metadata, keeping files stable
across reruns.
"""

from __future__ import annotations

import csv
import enum
import math
from collections.abc import Sequence
from dataclasses import dataclass, fields
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from scipy.interpolate import make_smoothing_spline

from .montecarlo import DistributionResult, StudyConfig, StudyResult
from .ztests import TestKind

__all__ = [
    "FigureKind",
    "Smoothing",
    "FigureSpec",
    "ResultRow",
    "CSV_COLUMNS",
    "rows_from_results",
    "write_results_csv",
    "read_results_csv",
    "emit_power_vs_measure",
    "emit_wald_figure",
    "emit_rao_figure",
    "emit_correlation_panel",
    "emit_measure_scatter",
    "DominanceReport",
    "dominance_report",
    "render_dominance",
    "write_config_echo",
]

_SVG_METADATA = {"Date": None}  # keep emitted SVGs timestamp-free
_HIST_BINS = 20

_KIND_ORDER = tuple(TestKind)
_MEASURE_AXIS = {
    TestKind.WALD_LOG_OR: "log_odds",
    TestKind.SCORE_LOG_OR: "log_odds",
    TestKind.WALD_PHI: "phi",
    TestKind.SCORE_PHI: "phi",
}
_MEASURE_LABEL = {"log_odds": "true ln(odds ratio)", "phi": "true phi"}


class FigureKind(enum.Enum):
    POWER_VS_MEASURE_SCATTER = "power-vs-measure"
    POWER_HISTOGRAM_MATRIX = "power-histograms"
    PAIRWISE_CORRELATION_PANEL = "correlation-panel"
    MEASURE_SCATTER = "measure-scatter"


class Smoothing(enum.Enum):
    NONE = "none"
    CUBIC_SMOOTHING_SPLINE = "cubic-smoothing-spline"


@dataclass(frozen=True)
class FigureSpec:
    kind: FigureKind
    smoothing: Smoothing = Smoothing.CUBIC_SMOOTHING_SPLINE


@dataclass(frozen=True)
class ResultRow:
    """One CSV row: a distribution's truth and per-test power estimates."""

    distribution_id: int
    p11: float
    p12: float
    p21: float
    p22: float
    true_log_odds: float
    true_phi: float
    power_z1: float
    power_z2: float
    power_z3: float
    power_z4: float
    se_z1: float
    se_z2: float
    se_z3: float
    se_z4: float
    degenerate_z1: int
    degenerate_z2: int
    degenerate_z3: int
    degenerate_z4: int
    cochran_violation_rate: float

    def power(self, kind: TestKind) -> float:
        return getattr(self, f"power_{kind.label.lower()}")


CSV_COLUMNS = tuple(f.name for f in fields(ResultRow))
_INT_COLUMNS = {f.name for f in fields(ResultRow) if f.type == "int"}


def _row_from_distribution(dr: DistributionResult) -> ResultRow:
    by_kind = {e.test: e for e in dr.estimates}
    q = dr.distribution
    return ResultRow(
        distribution_id=dr.distribution_id,
        p11=q.p11,
        p12=q.p12,
        p21=q.p21,
        p22=q.p22,
        true_log_odds=dr.true_log_odds.as_float(),
        true_phi=dr.true_phi,
        power_z1=by_kind[TestKind.WALD_LOG_OR].power,
        power_z2=by_kind[TestKind.SCORE_LOG_OR].power,
        power_z3=by_kind[TestKind.WALD_PHI].power,
        power_z4=by_kind[TestKind.SCORE_PHI].power,
        se_z1=by_kind[TestKind.WALD_LOG_OR].mc_std_error,
        se_z2=by_kind[TestKind.SCORE_LOG_OR].mc_std_error,
        se_z3=by_kind[TestKind.WALD_PHI].mc_std_error,
        se_z4=by_kind[TestKind.SCORE_PHI].mc_std_error,
        degenerate_z1=by_kind[TestKind.WALD_LOG_OR].n_degenerate,
        degenerate_z2=by_kind[TestKind.SCORE_LOG_OR].n_degenerate,
        degenerate_z3=by_kind[TestKind.WALD_PHI].n_degenerate,
        degenerate_z4=by_kind[TestKind.SCORE_PHI].n_degenerate,
        cochran_violation_rate=dr.cochran_violation_rate,
    )


def rows_from_results(results: Sequence[DistributionResult]) -> list[ResultRow]:
    return [_row_from_distribution(dr) for dr in results]


def _as_rows(source: StudyResult | Sequence[ResultRow]) -> list[ResultRow]:
    if isinstance(source, StudyResult):
        return rows_from_results(source.alternatives)
    return list(source)


def _format_cell(name: str, value) -> str:
    if name in _INT_COLUMNS:
        return str(int(value))
    return format(float(value), ".17g")


def write_results_csv(source: StudyResult | Sequence[ResultRow], path: str | Path) -> Path:
    """Write the per-distribution result table; returns the path written."""
    rows = _as_rows(source)
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for row in rows:
                writer.writerow(
                    [_format_cell(name, getattr(row, name)) for name in CSV_COLUMNS]
                )
    except OSError as exc:
        raise OSError(f"cannot write results CSV at {path}: {exc}") from exc
    return path


def read_results_csv(path: str | Path) -> list[ResultRow]:
    """Re-read a results CSV; exact inverse of :func:`write_results_csv`."""
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(header) != CSV_COLUMNS:
                raise ValueError(f"unexpected results header in {path}: {header}")
            rows = []
            for raw in reader:
                values = {
                    name: (int(cell) if name in _INT_COLUMNS else float(cell))
                    for name, cell in zip(CSV_COLUMNS, raw, strict=True)
                }
                rows.append(ResultRow(**values))
    except OSError as exc:
        raise OSError(f"cannot read results CSV at {path}: {exc}") from exc
    return rows


# ---------------------------------------------------------------------------
# figures
# ---------------------------------------------------------------------------


def _measure_values(rows: Sequence[ResultRow], axis: str) -> np.ndarray:
    if axis == "log_odds":
        return np.array([r.true_log_odds for r in rows])
    return np.array([r.true_phi for r in rows])


def _power_values(rows: Sequence[ResultRow], kind: TestKind) -> np.ndarray:
    return np.array([r.power(kind) for r in rows])


def fit_power_spline(x: np.ndarray, y: np.ndarray):
    """GCV-selected cubic smoothing spline; None when too few distinct x."""
    order = np.argsort(x)
    xs, ys = x[order], y[order]
    ux, inverse = np.unique(xs, return_inverse=True)
    if ux.size < 5:  # scipy's minimum for a smoothing spline fit
        return None
    uy = np.bincount(inverse, weights=ys) / np.bincount(inverse)
    return make_smoothing_spline(ux, uy)


def _draw_power_panel(ax, rows: Sequence[ResultRow], kind: TestKind, spec: FigureSpec) -> None:
    axis = _MEASURE_AXIS[kind]
    x = _measure_values(rows, axis)
    y = _power_values(rows, kind)
    finite = np.isfinite(x)
    n_excluded = int((~finite).sum())
    x, y = x[finite], y[finite]
    ax.scatter(x, y, s=14, color="tab:blue", alpha=0.75, zorder=2)
    if spec.smoothing is Smoothing.CUBIC_SMOOTHING_SPLINE:
        spline = fit_power_spline(x, y)
        if spline is not None:
            grid = np.linspace(x.min(), x.max(), 200)
            ax.plot(grid, np.clip(spline(grid), 0.0, 1.0), color="tab:red", lw=1.5, zorder=3)
    if axis == "phi":
        ax.set_xlim(-1.0, 1.0)
    ax.set_ylim(-0.02, 1.02)
    ax.set_xlabel(_MEASURE_LABEL[axis])
    ax.set_ylabel("estimated power")
    title = f"{kind.label} power"
    if n_excluded:
        title += f" ({n_excluded} non-finite excluded)"
    ax.set_title(title)
    ax.grid(alpha=0.25)


def _save(fig, path: str | Path, description: str | None = None) -> Path:
    path = Path(path)
    metadata = dict(_SVG_METADATA)
    if description:
        metadata["Description"] = description
    try:
        with matplotlib.rc_context({"svg.hashsalt": "assoc2x2"}):
            fig.savefig(path, format="svg", metadata=metadata)
    except OSError as exc:
        raise OSError(f"cannot write figure at {path}: {exc}") from exc
    finally:
        plt.close(fig)
    return path


def _smoothing_note(spec: FigureSpec) -> str | None:
    if spec.smoothing is Smoothing.CUBIC_SMOOTHING_SPLINE:
        return "smoothing: cubic smoothing spline, parameter GCV-selected"
    return None


def emit_power_vs_measure(
    source: StudyResult | Sequence[ResultRow],
    kind: TestKind,
    path: str | Path,
    spec: FigureSpec = FigureSpec(FigureKind.POWER_VS_MEASURE_SCATTER),
) -> Path:
    """Scatter of power against the test's native measure, spline overlaid."""
    rows = _as_rows(source)
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    _draw_power_panel(ax, rows, kind, spec)
    fig.tight_layout()
    return _save(fig, path, description=_smoothing_note(spec))


def _emit_pair_figure(rows: Sequence[ResultRow], kinds, suptitle: str, path) -> Path:
    fig, axes = plt.subplots(1, 2, figsize=(10.5, 4.2))
    spec = FigureSpec(FigureKind.POWER_VS_MEASURE_SCATTER)
    for ax, kind in zip(axes, kinds):
        _draw_power_panel(ax, rows, kind, spec)
    fig.suptitle(suptitle)
    fig.tight_layout()
    return _save(fig, path, description=_smoothing_note(spec))


def emit_wald_figure(source: StudyResult | Sequence[ResultRow], path: str | Path) -> Path:
    """Z1 and Z3 power against their native measures."""
    return _emit_pair_figure(
        _as_rows(source), (TestKind.WALD_LOG_OR, TestKind.WALD_PHI), "Wald tests", path
    )


def emit_rao_figure(source: StudyResult | Sequence[ResultRow], path: str | Path) -> Path:
    """Z2 and Z4 power against their native measures."""
    return _emit_pair_figure(
        _as_rows(source), (TestKind.SCORE_LOG_OR, TestKind.SCORE_PHI), "Score tests", path
    )


def power_correlations(source: StudyResult | Sequence[ResultRow]) -> dict[tuple[TestKind, TestKind], float]:
    """Pearson correlation of every unordered pair of power series."""
    rows = _as_rows(source)
    series = {kind: _power_values(rows, kind) for kind in _KIND_ORDER}
    out = {}
    for i, a in enumerate(_KIND_ORDER):
        for b in _KIND_ORDER[i + 1 :]:
            xa, xb = series[a], series[b]
            if xa.std() == 0.0 or xb.std() == 0.0:
                out[(a, b)] = math.nan
            else:
                out[(a, b)] = float(np.corrcoef(xa, xb)[0, 1])
    return out


def emit_correlation_panel(source: StudyResult | Sequence[ResultRow], path: str | Path) -> Path:
    """4x4 panel: power histograms on the diagonal, scatters below, r above."""
    rows = _as_rows(source)
    series = [_power_values(rows, kind) for kind in _KIND_ORDER]
    corr = power_correlations(rows)
    fig, axes = plt.subplots(4, 4, figsize=(10.0, 10.0))
    for i in range(4):
        for j in range(4):
            ax = axes[i][j]
            if i == j:
                ax.hist(series[i], bins=_HIST_BINS, range=(0.0, 1.0), density=True, color="tab:gray")
                ax.set_title(f"{_KIND_ORDER[i].label} power", fontsize=9)
            elif i > j:
                x, y = series[j], series[i]
                ax.scatter(x, y, s=8, alpha=0.7)
                if x.std() > 0.0:
                    slope, intercept = np.polyfit(x, y, 1)
                    grid = np.linspace(x.min(), x.max(), 50)
                    ax.plot(grid, slope * grid + intercept, color="tab:red", lw=1.0)
                ax.set_xlim(-0.05, 1.05)
                ax.set_ylim(-0.05, 1.05)
            else:
                key = (_KIND_ORDER[i], _KIND_ORDER[j])
                r = corr.get(key, corr.get((key[1], key[0]), math.nan))
                ax.text(0.5, 0.5, f"r = {r:.3f}", ha="center", va="center", fontsize=11)
                ax.set_axis_off()
            if i == 3 and i != j:
                ax.set_xlabel(f"{_KIND_ORDER[j].label} power", fontsize=8)
            if j == 0 and i != j:
                ax.set_ylabel(f"{_KIND_ORDER[i].label} power", fontsize=8)
            ax.tick_params(labelsize=7)
    fig.tight_layout()
    return _save(fig, path)


def emit_measure_scatter(source: StudyResult | Sequence[ResultRow], path: str | Path) -> Path:
    """Scatter of the two true measures over the sampled distributions."""
    rows = _as_rows(source)
    lo = np.array([r.true_log_odds for r in rows])
    ph = np.array([r.true_phi for r in rows])
    finite = np.isfinite(lo)
    n_excluded = int((~finite).sum())
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.scatter(lo[finite], ph[finite], s=14, alpha=0.75)
    ax.set_xlabel("true ln(odds ratio)")
    ax.set_ylabel("true phi")
    ax.set_ylim(-1.0, 1.0)
    title = "measure scatter"
    if n_excluded:
        title += f" ({n_excluded} non-finite excluded)"
    ax.set_title(title)
    ax.grid(alpha=0.25)
    fig.tight_layout()
    return _save(fig, path)


# ---------------------------------------------------------------------------
# dominance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DominanceReport:
    """Win/tie counts for every ordered test pair over the study."""

    n_distributions: int
    wins: dict[tuple[TestKind, TestKind], int]
    ties: dict[tuple[TestKind, TestKind], int]
    weak_dominators: tuple[TestKind, ...]

    def losses(self, first: TestKind, second: TestKind) -> int:
        return self.wins[(second, first)]


def dominance_report(source: StudyResult | Sequence[ResultRow]) -> DominanceReport:
    """Count, per ordered pair, where the first test beats the second."""
    rows = _as_rows(source)
    powers = {kind: _power_values(rows, kind) for kind in _KIND_ORDER}
    wins: dict[tuple[TestKind, TestKind], int] = {}
    ties: dict[tuple[TestKind, TestKind], int] = {}
    for a in _KIND_ORDER:
        for b in _KIND_ORDER:
            if a is b:
                continue
            wins[(a, b)] = int(np.sum(powers[a] > powers[b]))
            ties[(a, b)] = int(np.sum(powers[a] == powers[b]))
    dominators = tuple(
        a
        for a in _KIND_ORDER
        if all(wins[(b, a)] == 0 for b in _KIND_ORDER if b is not a)
    )
    return DominanceReport(
        n_distributions=len(rows), wins=wins, ties=ties, weak_dominators=dominators
    )


def render_dominance(report: DominanceReport) -> str:
    lines = []
    if report.weak_dominators:
        names = ", ".join(k.label for k in report.weak_dominators)
        lines.append(f"Weakly dominating test(s) across all {report.n_distributions} distributions: {names}")
    else:
        lines.append(
            f"No test dominates the others across the {report.n_distributions} distributions: "
            "each test is strictly beaten somewhere."
        )
    lines.append("")
    lines.append("pair        wins  losses  ties")
    for a in _KIND_ORDER:
        for b in _KIND_ORDER:
            if a is b:
                continue
            w = report.wins[(a, b)]
            l = report.wins[(b, a)]
            t = report.ties[(a, b)]
            lines.append(f"{a.label} vs {b.label}    {w:4d}    {l:4d}  {t:4d}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# config echo
# ---------------------------------------------------------------------------


def config_echo_lines(cfg: StudyConfig) -> list[str]:
    """Flat key=value lines, reusable as a --config file."""
    return [
        f"distributions={cfg.n_distributions}",
        f"replicates={cfg.n_replicates}",
        f"sample-size={cfg.sample_size}",
        f"alpha={cfg.alpha!r}",
        f"seed={cfg.master_seed}",
        f"zero-cell-policy={cfg.zero_cell_policy.value}",
        f"null-calibration={'true' if cfg.include_null_calibration else 'false'}",
    ]


def write_config_echo(cfg: StudyConfig, path: str | Path) -> Path:
    path = Path(path)
    path.write_text("\n".join(config_echo_lines(cfg)) + "\n")
    return path
