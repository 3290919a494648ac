"""Asymptotic variances for the log odds ratio and the phi coefficient.

Log odds ratio
--------------
Two first-order variances are used, one per test construction:

- plug-in (Wald): 1/n11 + 1/n12 + 1/n21 + 1/n22, needing positive cells;
- null-hypothesis (score): n/(row1*col1) + n/(row1*col2) + n/(row2*col1)
  + n/(row2*col2), needing positive margins only.

The population form 1/(n*p11) + ... + 1/(n*p22) is exposed for studies that
know the generating distribution.

Phi coefficient
---------------
``delta_var_phi`` propagates the multinomial covariance of the cell
proportions through the gradient of

    f(j, k, l, m) = (j*m - k*l) / sqrt((j+k)(j+l)(l+m)(k+m))

evaluated at the cell probabilities (j, k, l, m) = (a, b, c, d).  Writing
u = a*d - b*c, v = (a+b)(a+c)(c+d)(b+d), rho = u/sqrt(v), the partials are

    df/dj = -(1/2) rho v^-1 (2a+b+c)(c+d)(b+d) + v^-1/2 d
    df/dk = -(1/2) rho v^-1 (2b+a+d)(a+c)(c+d) - v^-1/2 c
    df/dl = -(1/2) rho v^-1 (2c+a+d)(a+b)(b+d) - v^-1/2 b
    df/dm = -(1/2) rho v^-1 (2d+b+c)(a+b)(a+c) + v^-1/2 a

and the variance is the full quadratic form against var(j) = a(1-a)/n,
cov(j,k) = -a*b/n, and companions.  At any independence point the result
collapses to exactly 1/n.

The same closed forms serve the population variance (evaluated at true cell
probabilities) and the plug-in variance (evaluated at observed proportions);
one shared kernel prevents the two uses from drifting apart.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DegenerateMarginError, ZeroCellError
from .measures import ContingencyTable, JointDistribution

__all__ = [
    "VarianceBasis",
    "VarianceEstimate",
    "PhiGradient",
    "wald_var_log_or",
    "score_var_log_or",
    "population_var_log_or",
    "phi_gradient",
    "delta_var_phi",
    "delta_var_phi_plugin",
]


class VarianceBasis(enum.Enum):
    """Which construction produced a variance value."""

    WALD_PLUGIN = "wald-plugin"
    SCORE_NULL = "score-null"
    DELTA_POPULATION = "delta-population"
    DELTA_PLUGIN = "delta-plugin"


@dataclass(frozen=True)
class VarianceEstimate:
    value: float
    basis: VarianceBasis


@dataclass(frozen=True)
class PhiGradient:
    """Partials of f(j,k,l,m) = phi at an evaluation distribution."""

    df_dj: float
    df_dk: float
    df_dl: float
    df_dm: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.df_dj, self.df_dk, self.df_dl, self.df_dm)


def _wald_var_cells(a: float, b: float, c: float, d: float) -> float:
    return 1.0 / a + 1.0 / b + 1.0 / c + 1.0 / d


def _score_var_cells(a: float, b: float, c: float, d: float) -> float:
    n = a + b + c + d
    r1, r2, c1, c2 = a + b, c + d, a + c, b + d
    return n / (r1 * c1) + n / (r1 * c2) + n / (r2 * c1) + n / (r2 * c2)


def wald_var_log_or(t: ContingencyTable) -> VarianceEstimate:
    """Plug-in variance of the log odds ratio, 1/n11 + 1/n12 + 1/n21 + 1/n22."""
    if t.min_cell <= 0:
        raise ZeroCellError(f"wald_var_log_or needs positive cells, got {t.cells()}")
    return VarianceEstimate(_wald_var_cells(*(float(v) for v in t.cells())), VarianceBasis.WALD_PLUGIN)


def score_var_log_or(t: ContingencyTable) -> VarianceEstimate:
    """Null-hypothesis variance of the log odds ratio from the margins."""
    if t.min_margin <= 0:
        raise DegenerateMarginError(f"score_var_log_or needs positive margins, got {t.cells()}")
    return VarianceEstimate(_score_var_cells(*(float(v) for v in t.cells())), VarianceBasis.SCORE_NULL)


def population_var_log_or(q: JointDistribution, n: int) -> VarianceEstimate:
    """Population variance of the log odds ratio at sample size n."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if q.min_cell <= 0:
        raise ZeroCellError(f"population_var_log_or needs positive cells, got {q.cells()}")
    value = _wald_var_cells(*q.cells()) / n
    return VarianceEstimate(value, VarianceBasis.WALD_PLUGIN)


def _phi_gradient_cells(a: float, b: float, c: float, d: float) -> tuple[float, float, float, float]:
    """Gradient kernel; needs positive margins, tolerates zero cells."""
    v = (a + b) * (a + c) * (c + d) * (b + d)
    u = a * d - b * c
    inv_v = 1.0 / v
    inv_sqrt_v = 1.0 / math.sqrt(v)
    half_rho_inv_v = 0.5 * (u * inv_sqrt_v) * inv_v
    gj = -half_rho_inv_v * (2 * a + b + c) * (c + d) * (b + d) + inv_sqrt_v * d
    gk = -half_rho_inv_v * (2 * b + a + d) * (a + c) * (c + d) - inv_sqrt_v * c
    gl = -half_rho_inv_v * (2 * c + a + d) * (a + b) * (b + d) - inv_sqrt_v * b
    gm = -half_rho_inv_v * (2 * d + b + c) * (a + b) * (a + c) + inv_sqrt_v * a
    return (gj, gk, gl, gm)


def _delta_var_cells(a: float, b: float, c: float, d: float, n: int) -> float:
    """Quadratic form of the gradient against the multinomial covariance."""
    gj, gk, gl, gm = _phi_gradient_cells(a, b, c, d)
    return (
        gj * gj * a * (1.0 - a) / n
        + gk * gk * b * (1.0 - b) / n
        + gl * gl * c * (1.0 - c) / n
        + gm * gm * d * (1.0 - d) / n
        + 2.0 * gj * gk * (-a * b / n)
        + 2.0 * gj * gl * (-a * c / n)
        + 2.0 * gj * gm * (-a * d / n)
        + 2.0 * gk * gl * (-b * c / n)
        + 2.0 * gk * gm * (-b * d / n)
        + 2.0 * gl * gm * (-c * d / n)
    )


def phi_gradient(q: JointDistribution) -> PhiGradient:
    """Gradient of phi in the four cell probabilities, evaluated at q."""
    if q.min_cell <= 0.0:
        raise ZeroCellError(f"phi_gradient needs positive cells, got {q.cells()}")
    return PhiGradient(*_phi_gradient_cells(*q.cells()))


def delta_var_phi(q: JointDistribution, n: int) -> VarianceEstimate:
    """First-order variance of the sample phi under multinomial sampling."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if q.min_cell <= 0.0:
        raise ZeroCellError(f"delta_var_phi needs positive cells, got {q.cells()}")
    return VarianceEstimate(_delta_var_cells(*q.cells(), n), VarianceBasis.DELTA_POPULATION)


def delta_var_phi_plugin(t: ContingencyTable) -> VarianceEstimate:
    """Delta-method variance evaluated at the observed proportions n_ij/n."""
    if t.min_cell <= 0:
        raise ZeroCellError(f"delta_var_phi_plugin needs positive cells, got {t.cells()}")
    n = t.n
    a, b, c, d = (v / n for v in t.cells())
    return VarianceEstimate(_delta_var_cells(a, b, c, d, n), VarianceBasis.DELTA_PLUGIN)
