"""Monte Carlo power study over Dirichlet-sampled alternative distributions.

Protocol: draw alternative joint distributions uniformly from the probability
3-simplex (four unit-exponential draws normalised by their sum); under each,
draw ``n_replicates`` multinomial tables of ``sample_size`` observations;
apply all four Z tests to every table; the estimated power of a test is its
rejection proportion.  All four tests see the same tables.

An optional calibration batch runs the same machinery under product-form
(independent) distributions, where the rejection proportion estimates the
size of each test rather than its power.

Reproducibility: the mapping master_seed -> StudyResult is a pure function.
Distribution d draws from stream (seed, DIRICHLET, d) and its replicate r
from (seed, TABLE, d, r), so results are independent of evaluation order and
of ``n_jobs``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .measures import ContingencyTable, ExtendedReal, JointDistribution, log_odds_ratio, phi
from .rng import (
    DOMAIN_DIRICHLET,
    DOMAIN_NULL_MARGINS,
    DOMAIN_NULL_TABLE,
    DOMAIN_TABLE,
    substream_generator,
)
from .ztests import Degeneracy, TestKind, ZeroCellPolicy, run_all_tests

__all__ = [
    "StudyConfig",
    "PowerEstimate",
    "DistributionResult",
    "StudyResult",
    "ReplicateStreams",
    "sample_uniform_dirichlet",
    "sample_product_null",
    "sample_multinomial",
    "estimate_power",
    "run_null_calibration",
    "run_study",
]

COCHRAN_MIN_EXPECTED = 5.0


@dataclass(frozen=True)
class StudyConfig:
    """All knobs of the simulation protocol."""

    n_distributions: int = 100
    n_replicates: int = 1000
    sample_size: int = 100
    alpha: float = 0.05
    master_seed: int = 42
    zero_cell_policy: ZeroCellPolicy = ZeroCellPolicy.HALDANE
    include_null_calibration: bool = False
    n_null_distributions: int = 20
    null_margin_low: float = 0.1
    null_margin_high: float = 0.9

    def __post_init__(self) -> None:
        for name in ("n_distributions", "n_replicates", "sample_size", "n_null_distributions"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if not 0.0 < self.null_margin_low <= self.null_margin_high < 1.0:
            raise ValueError("null margins must satisfy 0 < low <= high < 1")


@dataclass(frozen=True)
class PowerEstimate:
    """Rejection proportion of one test under one distribution."""

    distribution_id: int
    test: TestKind
    power: float
    mc_std_error: float
    n_degenerate: int
    true_log_odds: ExtendedReal
    true_phi: float


@dataclass(frozen=True)
class DistributionResult:
    """One distribution's truth, per-test power estimates, and audit counters."""

    distribution_id: int
    distribution: JointDistribution
    true_log_odds: ExtendedReal
    true_phi: float
    estimates: tuple[PowerEstimate, PowerEstimate, PowerEstimate, PowerEstimate]
    cochran_violation_rate: float

    def estimate_for(self, kind: TestKind) -> PowerEstimate:
        for e in self.estimates:
            if e.test is kind:
                return e
        raise KeyError(kind)


@dataclass(frozen=True)
class StudyResult:
    """Everything needed to regenerate every table and figure of a study."""

    config: StudyConfig
    alternatives: tuple[DistributionResult, ...]
    null_calibration: tuple[DistributionResult, ...] = field(default=())


@dataclass(frozen=True)
class ReplicateStreams:
    """Per-replicate stream handle for one distribution of one study."""

    master_seed: int
    domain: int
    distribution_index: int

    def generator(self, replicate_index: int) -> np.random.Generator:
        return substream_generator(
            self.master_seed, self.domain, self.distribution_index, replicate_index
        )


def sample_uniform_dirichlet(rng: np.random.Generator) -> JointDistribution:
    """Uniform draw from the probability 3-simplex.

    Four independent unit-exponential draws normalised by their sum; redrawn
    in the (measure-zero) event a coordinate underflows to exactly 0.
    """
    while True:
        e = rng.standard_exponential(4)
        cells = e / e.sum()
        if cells.min() > 0.0:
            return JointDistribution(*(float(p) for p in cells))


def sample_product_null(
    rng: np.random.Generator, margin_low: float = 0.1, margin_high: float = 0.9
) -> JointDistribution:
    """Independence distribution with both first margins uniform in [low, high]."""
    u = rng.uniform(margin_low, margin_high)
    v = rng.uniform(margin_low, margin_high)
    return JointDistribution(u * v, u * (1.0 - v), (1.0 - u) * v, (1.0 - u) * (1.0 - v))


def sample_multinomial(q: JointDistribution, n: int, rng: np.random.Generator) -> ContingencyTable:
    """One multinomial table of ``n`` observations from ``q``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    counts = rng.multinomial(n, q.cells())
    return ContingencyTable(int(counts[0]), int(counts[1]), int(counts[2]), int(counts[3]))


def _min_expected_cell(t: ContingencyTable) -> float:
    return min(t.row1, t.row2) * min(t.col1, t.col2) / t.n


def _power_loop(
    q: JointDistribution, cfg: StudyConfig, streams: ReplicateStreams
) -> tuple[tuple[PowerEstimate, ...], float]:
    rejections = [0, 0, 0, 0]
    degenerate = [0, 0, 0, 0]
    cochran_violations = 0
    for r in range(cfg.n_replicates):
        t = sample_multinomial(q, cfg.sample_size, streams.generator(r))
        outcomes = run_all_tests(t, cfg.alpha, cfg.zero_cell_policy)
        for i, outcome in enumerate(outcomes):
            if outcome.reject:
                rejections[i] += 1
            if outcome.degeneracy is not Degeneracy.NONE:
                degenerate[i] += 1
        if _min_expected_cell(t) < COCHRAN_MIN_EXPECTED:
            cochran_violations += 1
    true_lo = log_odds_ratio(q)
    true_ph = phi(q)
    estimates = tuple(
        PowerEstimate(
            distribution_id=streams.distribution_index,
            test=kind,
            power=rejections[i] / cfg.n_replicates,
            mc_std_error=math.sqrt(
                (rejections[i] / cfg.n_replicates)
                * (1.0 - rejections[i] / cfg.n_replicates)
                / cfg.n_replicates
            ),
            n_degenerate=degenerate[i],
            true_log_odds=true_lo,
            true_phi=true_ph,
        )
        for i, kind in enumerate(TestKind)
    )
    return estimates, cochran_violations / cfg.n_replicates


def estimate_power(
    q: JointDistribution, cfg: StudyConfig, streams: ReplicateStreams
) -> tuple[PowerEstimate, ...]:
    """Power of each test under ``q``: one estimate per TestKind, Z1..Z4 order."""
    return _power_loop(q, cfg, streams)[0]


def _alternative_result(cfg: StudyConfig, index: int) -> DistributionResult:
    q = sample_uniform_dirichlet(substream_generator(cfg.master_seed, DOMAIN_DIRICHLET, index))
    streams = ReplicateStreams(cfg.master_seed, DOMAIN_TABLE, index)
    estimates, cochran = _power_loop(q, cfg, streams)
    return DistributionResult(
        distribution_id=index,
        distribution=q,
        true_log_odds=log_odds_ratio(q),
        true_phi=phi(q),
        estimates=estimates,
        cochran_violation_rate=cochran,
    )


def _null_result(cfg: StudyConfig, index: int) -> DistributionResult:
    rng = substream_generator(cfg.master_seed, DOMAIN_NULL_MARGINS, index)
    q = sample_product_null(rng, cfg.null_margin_low, cfg.null_margin_high)
    streams = ReplicateStreams(cfg.master_seed, DOMAIN_NULL_TABLE, index)
    estimates, cochran = _power_loop(q, cfg, streams)
    return DistributionResult(
        distribution_id=index,
        distribution=q,
        true_log_odds=log_odds_ratio(q),
        true_phi=phi(q),
        estimates=estimates,
        cochran_violation_rate=cochran,
    )


def run_null_calibration(cfg: StudyConfig, n_jobs: int = 1) -> tuple[DistributionResult, ...]:
    """Size estimates under product-form null distributions."""
    if n_jobs == 1:
        return tuple(_null_result(cfg, k) for k in range(cfg.n_null_distributions))
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return tuple(pool.map(partial(_null_result, cfg), range(cfg.n_null_distributions)))


def run_study(cfg: StudyConfig, n_jobs: int = 1) -> StudyResult:
    """Full power study; bitwise identical for a given config at any n_jobs."""
    if n_jobs < 1:
        raise ValueError(f"n_jobs must be >= 1, got {n_jobs}")
    if n_jobs == 1:
        alternatives = [_alternative_result(cfg, d) for d in range(cfg.n_distributions)]
    else:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            alternatives = list(pool.map(partial(_alternative_result, cfg), range(cfg.n_distributions)))
    nulls = run_null_calibration(cfg, n_jobs) if cfg.include_null_calibration else ()
    return StudyResult(config=cfg, alternatives=tuple(alternatives), null_calibration=tuple(nulls))
