"""Association measures for 2x2 joint distributions and count tables.

Conventions
-----------
A joint distribution of two binary variables is the cell matrix

    (p11  p12)
    (p21  p22)

with margins row1 = p11+p12, row2 = p21+p22, col1 = p11+p21, col2 = p12+p22.
A contingency table holds the observed counts (n11, n12, n21, n22) with the
analogous margins and total n.

Measures provided:

- ``odds_ratio``: p11*p22 / (p12*p21), an extended non-negative real.  It is
  +inf when the anti-diagonal product vanishes while the diagonal product is
  positive, and *undefined* when both products vanish; the tagged
  :class:`ExtendedReal` makes those cases explicit instead of leaking NaN.
- ``phi`` / ``phi_hat``: the correlation of the two binary variables,
  (p11*p22 - p12*p21) / sqrt(row1*row2*col1*col2), in [-1, 1].
- ``rho_signed``: the signed second canonical correlation written through the
  cell-over-margin ratios; numerically identical to ``phi``.
- ``pillars``: the four cell-over-margin ratios A, B, C, D together with their
  geometric means (g1, g2) and arithmetic means (a1, a2).  They tie the two
  measures together: odds_ratio = (g1/g2)**2 and
  rho = 2*sqrt(row1*col1*row2*col2)*(a1 - a2).
- ``b_matrix`` / ``canonical_singular_values``: the margin-normalised cell
  matrix with entries p_ij / sqrt(row_i * col_j); its singular values are
  (1, |phi|).

Degenerate margins (an entire row or column with zero mass) make every one of
these measures meaningless, so all operations raise
:class:`~assoc2x2.errors.DegenerateMarginError` rather than return NaN.

All types are immutable values and all operations are pure functions; they are
safe for unrestricted concurrent use.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateMarginError,
    InvalidDistributionError,
    InvalidTableError,
)

__all__ = [
    "ExtendedReal",
    "JointDistribution",
    "ContingencyTable",
    "Pillars",
    "MeasurePair",
    "odds_ratio",
    "log_odds_ratio",
    "phi",
    "phi_hat",
    "pillars",
    "rho_signed",
    "rho_squared",
    "b_matrix",
    "canonical_singular_values",
    "measures",
]

_SIMPLEX_TOL = 1e-12


class _ExtKind(enum.Enum):
    FINITE = "finite"
    POS_INF = "+inf"
    NEG_INF = "-inf"
    UNDEFINED = "undefined"


@dataclass(frozen=True)
class ExtendedReal:
    """Tagged extended-real value: finite, +inf, -inf, or undefined.

    ``undefined`` marks quantities that carry no information (for the odds
    ratio: both diagonal products zero), which is distinct from either
    infinity.  Use :meth:`as_float` at plotting/serialisation boundaries,
    where undefined maps to NaN.
    """

    kind: _ExtKind
    _value: float = 0.0

    @staticmethod
    def finite(value: float) -> "ExtendedReal":
        if not math.isfinite(value):
            raise ValueError(f"finite() requires a finite float, got {value!r}")
        return ExtendedReal(_ExtKind.FINITE, float(value))

    @property
    def is_finite(self) -> bool:
        return self.kind is _ExtKind.FINITE

    @property
    def is_undefined(self) -> bool:
        return self.kind is _ExtKind.UNDEFINED

    @property
    def value(self) -> float:
        """The finite payload; raises unless ``is_finite``."""
        if self.kind is not _ExtKind.FINITE:
            raise ValueError(f"no finite value for {self.kind.value} result")
        return self._value

    def as_float(self) -> float:
        """Collapse onto IEEE floats: +-inf for infinities, NaN for undefined."""
        if self.kind is _ExtKind.FINITE:
            return self._value
        if self.kind is _ExtKind.POS_INF:
            return math.inf
        if self.kind is _ExtKind.NEG_INF:
            return -math.inf
        return math.nan

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        if self.kind is _ExtKind.FINITE:
            return f"ExtendedReal({self._value!r})"
        return f"ExtendedReal({self.kind.value!r})"


ExtendedReal.POS_INF = ExtendedReal(_ExtKind.POS_INF)
ExtendedReal.NEG_INF = ExtendedReal(_ExtKind.NEG_INF)
ExtendedReal.UNDEFINED = ExtendedReal(_ExtKind.UNDEFINED)


@dataclass(frozen=True)
class JointDistribution:
    """Point (p11, p12, p21, p22) on the probability 3-simplex."""

    p11: float
    p12: float
    p21: float
    p22: float

    def __post_init__(self) -> None:
        cells = (self.p11, self.p12, self.p21, self.p22)
        for name, p in zip(("p11", "p12", "p21", "p22"), cells):
            if not (isinstance(p, (int, float)) and math.isfinite(p)):
                raise InvalidDistributionError(f"{name} must be a finite number, got {p!r}")
            if p < 0.0:
                raise InvalidDistributionError(f"{name} must be >= 0, got {p}")
        total = math.fsum(cells)
        if abs(total - 1.0) > _SIMPLEX_TOL:
            raise InvalidDistributionError(f"cells must sum to 1 within {_SIMPLEX_TOL}, got {total!r}")

    @property
    def row1(self) -> float:
        return self.p11 + self.p12

    @property
    def row2(self) -> float:
        return self.p21 + self.p22

    @property
    def col1(self) -> float:
        return self.p11 + self.p21

    @property
    def col2(self) -> float:
        return self.p12 + self.p22

    @property
    def min_margin(self) -> float:
        return min(self.row1, self.row2, self.col1, self.col2)

    @property
    def min_cell(self) -> float:
        return min(self.p11, self.p12, self.p21, self.p22)

    def cells(self) -> tuple[float, float, float, float]:
        return (self.p11, self.p12, self.p21, self.p22)

    def transpose(self) -> "JointDistribution":
        """Swap the roles of the two variables (X <-> Y)."""
        return JointDistribution(self.p11, self.p21, self.p12, self.p22)

    def swap_rows(self) -> "JointDistribution":
        """Relabel the first variable's categories."""
        return JointDistribution(self.p21, self.p22, self.p11, self.p12)

    def swap_cols(self) -> "JointDistribution":
        """Relabel the second variable's categories."""
        return JointDistribution(self.p12, self.p11, self.p22, self.p21)


@dataclass(frozen=True)
class ContingencyTable:
    """Observed counts (n11, n12, n21, n22) of a 2x2 cross-classification."""

    n11: int
    n12: int
    n21: int
    n22: int

    def __post_init__(self) -> None:
        for name, v in zip(("n11", "n12", "n21", "n22"), self.cells()):
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise InvalidTableError(f"{name} must be an integer count, got {v!r}")
            if v < 0:
                raise InvalidTableError(f"{name} must be >= 0, got {v}")

    @property
    def n(self) -> int:
        return self.n11 + self.n12 + self.n21 + self.n22

    @property
    def row1(self) -> int:
        return self.n11 + self.n12

    @property
    def row2(self) -> int:
        return self.n21 + self.n22

    @property
    def col1(self) -> int:
        return self.n11 + self.n21

    @property
    def col2(self) -> int:
        return self.n12 + self.n22

    @property
    def min_margin(self) -> int:
        return min(self.row1, self.row2, self.col1, self.col2)

    @property
    def min_cell(self) -> int:
        return min(self.cells())

    def cells(self) -> tuple[int, int, int, int]:
        return (self.n11, self.n12, self.n21, self.n22)

    def transpose(self) -> "ContingencyTable":
        return ContingencyTable(self.n11, self.n21, self.n12, self.n22)

    def to_distribution(self) -> JointDistribution:
        """Observed cell proportions n_ij / n."""
        n = self.n
        if n == 0:
            raise InvalidTableError("cannot normalise an empty table")
        return JointDistribution(self.n11 / n, self.n12 / n, self.n21 / n, self.n22 / n)


@dataclass(frozen=True)
class Pillars:
    """Cell-over-margin ratios A, B, C, D and their means.

    a = p11/(row1*col1), b = p12/(row1*col2), c = p21/(row2*col1),
    d = p22/(row2*col2); g1/g2 are the geometric means of the diagonal and
    anti-diagonal pair, a1/a2 the arithmetic means.  All four ratios equal 1
    exactly under independence.
    """

    a: float
    b: float
    c: float
    d: float
    g1: float
    g2: float
    a1: float
    a2: float


@dataclass(frozen=True)
class MeasurePair:
    """Log odds ratio and phi of the same distribution.

    Whenever both are finite and nonzero they share the same sign.
    """

    log_odds: ExtendedReal
    phi: float


def _require_positive_margins(q: JointDistribution | ContingencyTable, op: str) -> None:
    if q.min_margin <= 0:
        raise DegenerateMarginError(
            f"{op} is undefined when a whole row or column is empty "
            f"(margins {q.row1}, {q.row2}, {q.col1}, {q.col2})"
        )


def odds_ratio(q: JointDistribution) -> ExtendedReal:
    """Odds ratio p11*p22 / (p12*p21) as a tagged extended real.

    Returns +inf when the anti-diagonal product is zero and the diagonal one
    is positive, and UNDEFINED when both products are zero (a distribution so
    degenerate the ratio carries no information).
    """
    diag = q.p11 * q.p22
    anti = q.p12 * q.p21
    if anti > 0.0:
        return ExtendedReal.finite(diag / anti)
    if diag > 0.0:
        return ExtendedReal.POS_INF
    return ExtendedReal.UNDEFINED


def log_odds_ratio(q: JointDistribution) -> ExtendedReal:
    """Natural log of the odds ratio; -inf when the ratio is 0."""
    theta = odds_ratio(q)
    if theta.is_finite:
        if theta.value == 0.0:
            return ExtendedReal.NEG_INF
        return ExtendedReal.finite(math.log(theta.value))
    return theta


def _phi_from_cells(a: float, b: float, c: float, d: float) -> float:
    r1, r2, c1, c2 = a + b, c + d, a + c, b + d
    value = (a * d - b * c) / math.sqrt(r1 * r2 * c1 * c2)
    # rounding can push |value| a hair past 1 on perfect tables
    return max(-1.0, min(1.0, value))


def phi(q: JointDistribution) -> float:
    """Correlation of the two binary variables, in [-1, 1]."""
    _require_positive_margins(q, "phi")
    return _phi_from_cells(*q.cells())


def phi_hat(t: ContingencyTable) -> float:
    """Sample correlation (n11*n22 - n12*n21) / sqrt of the margin product."""
    _require_positive_margins(t, "phi_hat")
    return _phi_from_cells(*(float(v) for v in t.cells()))


def pillars(q: JointDistribution) -> Pillars:
    """The four cell-over-margin ratios with their geometric/arithmetic means."""
    _require_positive_margins(q, "pillars")
    a = q.p11 / (q.row1 * q.col1)
    b = q.p12 / (q.row1 * q.col2)
    c = q.p21 / (q.row2 * q.col1)
    d = q.p22 / (q.row2 * q.col2)
    return Pillars(
        a=a,
        b=b,
        c=c,
        d=d,
        g1=math.sqrt(a * d),
        g2=math.sqrt(b * c),
        a1=(a + d) / 2.0,
        a2=(b + c) / 2.0,
    )


def rho_signed(q: JointDistribution) -> float:
    """Signed canonical correlation via the cell-over-margin ratios.

    Computed as sqrt(row1*col1*row2*col2) * (A - B - C + D); algebraically and
    numerically this equals ``phi``.
    """
    _require_positive_margins(q, "rho_signed")
    p = pillars(q)
    scale = math.sqrt(q.row1 * q.col1 * q.row2 * q.col2)
    value = scale * (p.a - p.b - p.c + p.d)
    return max(-1.0, min(1.0, value))


def rho_squared(q: JointDistribution) -> float:
    """Squared canonical correlation, sum of p_ij**2/(row_i*col_j) minus 1.

    Equals trace(B @ B.T) - 1 for the margin-normalised matrix B, whose
    eigenvalues are 1 and rho**2.
    """
    _require_positive_margins(q, "rho_squared")
    return (
        q.p11**2 / (q.row1 * q.col1)
        + q.p12**2 / (q.row1 * q.col2)
        + q.p21**2 / (q.row2 * q.col1)
        + q.p22**2 / (q.row2 * q.col2)
        - 1.0
    )


def b_matrix(q: JointDistribution) -> np.ndarray:
    """Margin-normalised cell matrix with entries p_ij / sqrt(row_i * col_j)."""
    _require_positive_margins(q, "b_matrix")
    return np.array(
        [
            [q.p11 / math.sqrt(q.row1 * q.col1), q.p12 / math.sqrt(q.row1 * q.col2)],
            [q.p21 / math.sqrt(q.row2 * q.col1), q.p22 / math.sqrt(q.row2 * q.col2)],
        ]
    )


def canonical_singular_values(q: JointDistribution) -> tuple[float, float]:
    """Singular values (s1, s2) of ``b_matrix``, s1 >= s2 >= 0.

    s1 is identically 1 and s2 equals |phi(q)|.
    """
    s = np.linalg.svd(b_matrix(q), compute_uv=False)
    return (float(s[0]), float(s[1]))


def measures(q: JointDistribution) -> MeasurePair:
    """Log odds ratio and phi of ``q`` as one record."""
    _require_positive_margins(q, "measures")
    return MeasurePair(log_odds=log_odds_ratio(q), phi=phi(q))
