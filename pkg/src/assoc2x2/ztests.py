"""The four Z statistics for independence in a 2x2 table.

- Z1: log odds ratio over its plug-in (Wald) standard error.
- Z2: log odds ratio over its null-hypothesis (score) standard error.
- Z3: sample phi over its plug-in delta-method standard error.
- Z4: sample phi over its null standard error sqrt(1/n), i.e. sqrt(n)*phi_hat;
  its square is the classical Pearson chi-squared statistic.

Each statistic is two-sided: reject when |Z| exceeds the standard normal
quantile for the chosen level (1.96 at 5%).

Degenerate tables are resolved by explicit policy, never by exceptions, so a
Monte Carlo loop over sampled tables is total:

- A table with an empty row or column defines none of the statistics.  The
  outcome records NaN, never rejects, and is annotated MARGIN_DEGENERATE.
- A zero cell breaks the log-odds pipeline (Z1, Z2) only.  Under the HALDANE
  policy 0.5 is added to every cell of that pipeline; under NEVER_REJECT the
  statistic is left undefined and the null is retained.  Either way the
  outcome is annotated ZERO_CELL_ADJUSTED.  Z3 and Z4 need only positive
  margins: phi_hat and the delta-method form stay finite at a zero cell, so
  they are computed from the raw counts.
- A sample phi of +-1 (perfect association) gives Z3 a zero denominator; the
  statistic is recorded as signed infinity and rejects.
"""

from __future__ import annotations

import enum
import math
import statistics
from dataclasses import dataclass
from functools import lru_cache

from .errors import InvalidTableError
from .measures import ContingencyTable, phi_hat
from .variances import _delta_var_cells, _score_var_cells, _wald_var_cells

__all__ = [
    "TestKind",
    "Degeneracy",
    "ZeroCellPolicy",
    "TestOutcome",
    "critical_value",
    "z1_wald_log_or",
    "z2_score_log_or",
    "z3_wald_phi",
    "z4_score_phi",
    "run_all_tests",
]


class TestKind(enum.Enum):
    """The four statistics, in their fixed reporting order."""

    __test__ = False  # not a pytest collection target

    WALD_LOG_OR = "Z1"
    SCORE_LOG_OR = "Z2"
    WALD_PHI = "Z3"
    SCORE_PHI = "Z4"

    @property
    def label(self) -> str:
        return self.value


class Degeneracy(enum.Enum):
    NONE = "none"
    ZERO_CELL_ADJUSTED = "zero-cell"
    MARGIN_DEGENERATE = "margin-degenerate"


class ZeroCellPolicy(enum.Enum):
    """How the log-odds pipeline treats a table with a zero cell."""

    HALDANE = "haldane"
    NEVER_REJECT = "never-reject"


@dataclass(frozen=True)
class TestOutcome:
    """One statistic's value and decision for one table.

    ``statistic`` may be +-inf (unbounded evidence) or NaN (undefined under
    the active policy); ``reject`` is |statistic| > critical_value for finite
    statistics, True for infinite ones, False for NaN.  ``chi_squared`` is
    filled by Z4 only (n * phi_hat**2).
    """

    __test__ = False

    kind: TestKind
    statistic: float
    reject: bool
    degeneracy: Degeneracy
    critical_value: float
    chi_squared: float | None = None


@lru_cache(maxsize=None)
def critical_value(alpha: float) -> float:
    """Two-sided standard normal critical value for level ``alpha``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    return statistics.NormalDist().inv_cdf(1.0 - alpha / 2.0)


def _decide(statistic: float, crit: float) -> bool:
    if math.isnan(statistic):
        return False
    if math.isinf(statistic):
        return True
    return abs(statistic) > crit


def _log_or_cells(a: float, b: float, c: float, d: float) -> float:
    return math.log(a) + math.log(d) - math.log(b) - math.log(c)


def _require_nonempty(t: ContingencyTable) -> None:
    if t.n < 1:
        raise InvalidTableError("table must contain at least one observation")


def _log_or_pipeline(
    t: ContingencyTable, policy: ZeroCellPolicy
) -> tuple[tuple[float, float, float, float] | None, Degeneracy]:
    """Resolve zero cells for Z1/Z2; None means the statistic stays undefined."""
    if t.min_cell > 0:
        return tuple(float(v) for v in t.cells()), Degeneracy.NONE
    if policy is ZeroCellPolicy.HALDANE:
        return tuple(v + 0.5 for v in t.cells()), Degeneracy.ZERO_CELL_ADJUSTED
    return None, Degeneracy.ZERO_CELL_ADJUSTED


def z1_wald_log_or(
    t: ContingencyTable,
    alpha: float = 0.05,
    policy: ZeroCellPolicy = ZeroCellPolicy.HALDANE,
) -> TestOutcome:
    """Log odds ratio over its plug-in standard error."""
    _require_nonempty(t)
    crit = critical_value(alpha)
    if t.min_margin == 0:
        return TestOutcome(TestKind.WALD_LOG_OR, math.nan, False, Degeneracy.MARGIN_DEGENERATE, crit)
    cells, deg = _log_or_pipeline(t, policy)
    if cells is None:
        return TestOutcome(TestKind.WALD_LOG_OR, math.nan, False, deg, crit)
    stat = _log_or_cells(*cells) / math.sqrt(_wald_var_cells(*cells))
    return TestOutcome(TestKind.WALD_LOG_OR, stat, _decide(stat, crit), deg, crit)


def z2_score_log_or(
    t: ContingencyTable,
    alpha: float = 0.05,
    policy: ZeroCellPolicy = ZeroCellPolicy.HALDANE,
) -> TestOutcome:
    """Log odds ratio over its null-hypothesis standard error."""
    _require_nonempty(t)
    crit = critical_value(alpha)
    if t.min_margin == 0:
        return TestOutcome(TestKind.SCORE_LOG_OR, math.nan, False, Degeneracy.MARGIN_DEGENERATE, crit)
    cells, deg = _log_or_pipeline(t, policy)
    if cells is None:
        return TestOutcome(TestKind.SCORE_LOG_OR, math.nan, False, deg, crit)
    stat = _log_or_cells(*cells) / math.sqrt(_score_var_cells(*cells))
    return TestOutcome(TestKind.SCORE_LOG_OR, stat, _decide(stat, crit), deg, crit)


def z3_wald_phi(
    t: ContingencyTable,
    alpha: float = 0.05,
    policy: ZeroCellPolicy = ZeroCellPolicy.HALDANE,
) -> TestOutcome:
    """Sample phi over its plug-in delta-method standard error."""
    _require_nonempty(t)
    crit = critical_value(alpha)
    if t.min_margin == 0:
        return TestOutcome(TestKind.WALD_PHI, math.nan, False, Degeneracy.MARGIN_DEGENERATE, crit)
    n = t.n
    a, b, c, d = (v / n for v in t.cells())
    ph = phi_hat(t)
    var = _delta_var_cells(a, b, c, d, n)
    if var > 0.0:
        stat = ph / math.sqrt(var)
    elif ph != 0.0:
        stat = math.copysign(math.inf, ph)  # perfect association, zero variance
    else:
        stat = math.nan
    return TestOutcome(TestKind.WALD_PHI, stat, _decide(stat, crit), Degeneracy.NONE, crit)


def z4_score_phi(
    t: ContingencyTable,
    alpha: float = 0.05,
    policy: ZeroCellPolicy = ZeroCellPolicy.HALDANE,
) -> TestOutcome:
    """sqrt(n) * phi_hat; its square is the Pearson chi-squared statistic."""
    _require_nonempty(t)
    crit = critical_value(alpha)
    if t.min_margin == 0:
        return TestOutcome(TestKind.SCORE_PHI, math.nan, False, Degeneracy.MARGIN_DEGENERATE, crit)
    ph = phi_hat(t)
    stat = math.sqrt(t.n) * ph
    return TestOutcome(
        TestKind.SCORE_PHI,
        stat,
        _decide(stat, crit),
        Degeneracy.NONE,
        crit,
        chi_squared=t.n * ph * ph,
    )


def run_all_tests(
    t: ContingencyTable,
    alpha: float = 0.05,
    policy: ZeroCellPolicy = ZeroCellPolicy.HALDANE,
) -> tuple[TestOutcome, TestOutcome, TestOutcome, TestOutcome]:
    """All four outcomes for one table, in Z1..Z4 order."""
    return (
        z1_wald_log_or(t, alpha, policy),
        z2_score_log_or(t, alpha, policy),
        z3_wald_phi(t, alpha, policy),
        z4_score_phi(t, alpha, policy),
    )
