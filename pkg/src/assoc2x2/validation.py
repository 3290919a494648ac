"""Self-check sweeps behind the ``validate`` subcommand.

Each check recomputes a claimed identity through an independent route
(finite differences, the classical chi-squared formula, closed-form 2x2
singular values, sampling moments) and compares at a fixed tolerance, so a
formula and its oracle cannot share a bug.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import ks_2samp

from .measures import (
    ContingencyTable,
    JointDistribution,
    b_matrix,
    canonical_singular_values,
    odds_ratio,
    phi,
    pillars,
    rho_signed,
)
from .montecarlo import StudyConfig, run_null_calibration, sample_uniform_dirichlet
from .rng import substream_generator
from .variances import phi_gradient
from .ztests import TestKind, z4_score_phi

__all__ = [
    "CheckResult",
    "classical_chi_squared",
    "finite_difference_phi_gradient",
    "check_measure_identities",
    "check_chi_squared_identity",
    "check_gradient_finite_difference",
    "check_dirichlet_moments",
    "check_size_calibration",
    "run_validation",
]

_DOMAIN_VALIDATE = 0x7E  # reserved stream domain for validation sweeps


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def classical_chi_squared(t: ContingencyTable) -> float:
    """Pearson chi-squared, sum of (observed - expected)^2 / expected."""
    n = t.n
    rows = (t.row1, t.row2)
    cols = (t.col1, t.col2)
    observed = ((t.n11, t.n12), (t.n21, t.n22))
    total = 0.0
    for i in range(2):
        for j in range(2):
            expected = rows[i] * cols[j] / n
            total += (observed[i][j] - expected) ** 2 / expected
    return total


def finite_difference_phi_gradient(q: JointDistribution, step: float = 1e-7) -> tuple[float, ...]:
    """Central differences of phi, renormalising each perturbation onto the simplex."""
    cells = np.array(q.cells())
    grad = []
    for i in range(4):
        up = cells.copy()
        up[i] += step
        down = cells.copy()
        down[i] -= step
        f_up = phi(JointDistribution(*(up / up.sum())))
        f_down = phi(JointDistribution(*(down / down.sum())))
        grad.append((f_up - f_down) / (2.0 * step))
    return tuple(grad)


def _interior_dirichlet(rng: np.random.Generator, min_cell: float = 1e-4) -> JointDistribution:
    while True:
        q = sample_uniform_dirichlet(rng)
        if q.min_cell >= min_cell:
            return q


def _closed_form_singular_values(m: np.ndarray) -> tuple[float, float]:
    frob2 = float(np.sum(m * m))
    det = float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    disc = math.sqrt(max(frob2 * frob2 - 4.0 * det * det, 0.0))
    s1 = math.sqrt((frob2 + disc) / 2.0)
    s2 = math.sqrt(max((frob2 - disc) / 2.0, 0.0))
    return s1, s2


def check_measure_identities(n_draws: int = 10_000, seed: int = 42) -> CheckResult:
    """phi = rho, theta = (g1/g2)^2, singular values (1, |phi|), trace identity."""
    rng = substream_generator(seed, _DOMAIN_VALIDATE, 1)
    worst_phi_rho = 0.0
    worst_theta = 0.0
    worst_s1 = 0.0
    worst_s2 = 0.0
    worst_svd_route = 0.0
    worst_trace = 0.0
    for _ in range(n_draws):
        q = sample_uniform_dirichlet(rng)
        ph = phi(q)
        worst_phi_rho = max(worst_phi_rho, abs(rho_signed(q) - ph))
        p = pillars(q)
        theta = odds_ratio(q).value
        worst_theta = max(worst_theta, abs((p.g1 / p.g2) ** 2 - theta) / theta)
        b = b_matrix(q)
        s1, s2 = canonical_singular_values(q)
        o1, o2 = _closed_form_singular_values(b)
        worst_svd_route = max(worst_svd_route, abs(s1 - o1), abs(s2 - o2))
        worst_s1 = max(worst_s1, abs(s1 - 1.0))
        worst_s2 = max(worst_s2, abs(s2 - abs(ph)))
        worst_trace = max(worst_trace, abs(float(np.trace(b @ b.T)) - 1.0 - ph * ph))
    passed = (
        worst_phi_rho < 1e-12
        and worst_theta < 1e-10
        and worst_s1 < 1e-10
        and worst_s2 < 1e-10
        and worst_svd_route < 1e-10
        and worst_trace < 1e-10
    )
    detail = (
        f"max |phi-rho|={worst_phi_rho:.2e}, rel theta={worst_theta:.2e}, "
        f"|s1-1|={worst_s1:.2e}, |s2-|phi||={worst_s2:.2e}, "
        f"svd-vs-closed-form={worst_svd_route:.2e}, trace={worst_trace:.2e} over {n_draws} draws"
    )
    return CheckResult("measure-identities", passed, detail)


def check_chi_squared_identity(n_tables: int = 1_000, seed: int = 42) -> CheckResult:
    """(sqrt(n)*phi_hat)^2 equals the classical chi-squared statistic."""
    rng = substream_generator(seed, _DOMAIN_VALIDATE, 2)
    worst = 0.0
    produced = 0
    while produced < n_tables:
        q = sample_uniform_dirichlet(rng)
        counts = rng.multinomial(int(rng.integers(20, 400)), q.cells())
        t = ContingencyTable(*(int(v) for v in counts))
        if t.min_margin == 0:
            continue
        produced += 1
        stat = z4_score_phi(t).statistic
        worst = max(worst, abs(stat * stat - classical_chi_squared(t)))
    return CheckResult(
        "chi-squared-identity", worst < 1e-10, f"max |z4^2 - chi2|={worst:.2e} over {n_tables} tables"
    )


def check_gradient_finite_difference(n_draws: int = 1_000, seed: int = 42) -> CheckResult:
    """Closed-form gradient of phi against central finite differences."""
    rng = substream_generator(seed, _DOMAIN_VALIDATE, 3)
    worst = 0.0
    for _ in range(n_draws):
        q = _interior_dirichlet(rng)
        exact = phi_gradient(q).as_tuple()
        approx = finite_difference_phi_gradient(q)
        for e, a in zip(exact, approx):
            worst = max(worst, abs(e - a) / max(abs(e), 1e-12))
    return CheckResult(
        "gradient-finite-difference", worst < 1e-6, f"max componentwise rel err={worst:.2e} over {n_draws} draws"
    )


def check_dirichlet_moments(n_draws: int = 100_000, seed: int = 42) -> CheckResult:
    """First-cell mean 1/4 and variance 3/80; coordinates exchangeable (KS)."""
    rng = substream_generator(seed, _DOMAIN_VALIDATE, 4)
    draws = np.empty((n_draws, 4))
    for i in range(n_draws):
        draws[i] = sample_uniform_dirichlet(rng).cells()
    mean_err = abs(draws[:, 0].mean() - 0.25)
    var_err = abs(draws[:, 0].var(ddof=1) - 3.0 / 80.0)
    min_ks_p = 1.0
    for i in range(4):
        for j in range(i + 1, 4):
            min_ks_p = min(min_ks_p, float(ks_2samp(draws[:, i], draws[:, j]).pvalue))
    passed = mean_err < 0.01 and var_err < 0.003 and min_ks_p > 0.01
    detail = (
        f"|mean-0.25|={mean_err:.4f}, |var-0.0375|={var_err:.5f}, "
        f"min pairwise KS p={min_ks_p:.3f} over {n_draws} draws"
    )
    return CheckResult("dirichlet-moments", passed, detail)


def check_size_calibration(
    n_nulls: int = 20,
    n_replicates: int = 1_000,
    sample_size: int = 100,
    alpha: float = 0.05,
    seed: int = 42,
) -> CheckResult:
    """Empirical size of every test within [0.02, 0.09] under product nulls."""
    cfg = StudyConfig(
        n_distributions=1,
        n_replicates=n_replicates,
        sample_size=sample_size,
        alpha=alpha,
        master_seed=seed,
        n_null_distributions=n_nulls,
        null_margin_low=0.2,
        null_margin_high=0.8,
    )
    lo, hi = 1.0, 0.0
    for dr in run_null_calibration(cfg):
        for e in dr.estimates:
            lo = min(lo, e.power)
            hi = max(hi, e.power)
    passed = 0.02 <= lo and hi <= 0.09
    detail = f"empirical sizes in [{lo:.3f}, {hi:.3f}] over {n_nulls} nulls x {len(TestKind)} tests"
    return CheckResult("size-calibration", passed, detail)


def run_validation(seed: int = 42) -> list[CheckResult]:
    """All checks at their reference scales, in a fixed order."""
    return [
        check_measure_identities(seed=seed),
        check_chi_squared_identity(seed=seed),
        check_gradient_finite_difference(seed=seed),
        check_dirichlet_moments(seed=seed),
        check_size_calibration(seed=seed),
    ]
