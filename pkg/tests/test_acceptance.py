"""Acceptance suite: every criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL line
per criterion.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from assoc2x2 import (
    ContingencyTable,
    JointDistribution,
    StudyConfig,
    TestKind,
    delta_var_phi,
    odds_ratio,
    phi,
    phi_gradient,
    pillars,
    rho_signed,
    run_null_calibration,
    run_study,
    sample_multinomial,
    sample_uniform_dirichlet,
)
from assoc2x2.cli import main
from assoc2x2.measures import b_matrix, canonical_singular_values
from assoc2x2.report import dominance_report, rows_from_results, write_results_csv
from assoc2x2.rng import substream_generator
from conftest import interior_distribution, product_distribution, random_table

SEED = 42
_ACCEPT_DOMAIN = 0x7D  # stream domain reserved for this suite


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {name}: FAIL")
        raise
    print(f"ACCEPTANCE {name}: PASS")


@pytest.fixture(scope="module")
def reference_study():
    """Default-scale study: 100 distributions x 1000 replicates, n=100."""
    start = time.perf_counter()
    result = run_study(StudyConfig(master_seed=SEED))
    return result, time.perf_counter() - start


def classical_chi_squared(t):
    rows, cols = (t.row1, t.row2), (t.col1, t.col2)
    observed = ((t.n11, t.n12), (t.n21, t.n22))
    return sum(
        (observed[i][j] - rows[i] * cols[j] / t.n) ** 2 / (rows[i] * cols[j] / t.n)
        for i in range(2)
        for j in range(2)
    )


def fd_phi_gradient(q, step=1e-7):
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


def test_criterion_1_identity_suite():
    """Structural identities over 10,000 simplex draws in under 5 seconds."""
    with criterion("1 identity-suite"):
        rng = substream_generator(SEED, _ACCEPT_DOMAIN, 1)
        start = time.perf_counter()
        for _ in range(10_000):
            q = sample_uniform_dirichlet(rng)
            ph = phi(q)
            assert abs(rho_signed(q) - ph) < 1e-12
            p = pillars(q)
            theta = odds_ratio(q).value
            assert abs((p.g1 / p.g2) ** 2 - theta) / theta < 1e-10
            s1, s2 = canonical_singular_values(q)
            assert abs(s1 - 1.0) < 1e-10
            assert abs(s2 - abs(ph)) < 1e-10
            b = b_matrix(q)
            assert abs(float(np.trace(b @ b.T)) - 1.0 - ph * ph) < 1e-10
        elapsed = time.perf_counter() - start
        assert elapsed < 5.0, f"identity suite took {elapsed:.2f}s"


def test_criterion_2_chi_squared_identity():
    """(sqrt(n) phi_hat)^2 equals the classical chi-squared on 1,000 tables."""
    with criterion("2 chi-squared-identity"):
        rng = np.random.default_rng(SEED)
        for _ in range(1_000):
            t = random_table(rng)
            stat = math.sqrt(t.n) * (t.n11 * t.n22 - t.n12 * t.n21) / math.sqrt(
                t.row1 * t.row2 * t.col1 * t.col2
            )
            assert abs(stat * stat - classical_chi_squared(t)) < 1e-10


def test_criterion_3_delta_method():
    """Gradient vs finite differences; null value 1/n; simulation oracle."""
    with criterion("3 delta-method"):
        start = time.perf_counter()

        # closed-form gradient matches central finite differences
        rng = np.random.default_rng(777)
        for _ in range(1_000):
            q = interior_distribution(rng, min_cell=1e-3)  # FD step needs room inside cells
            exact = phi_gradient(q).as_tuple()
            approx = fd_phi_gradient(q)
            for e, a in zip(exact, approx):
                assert abs(a - e) / abs(e) < 1e-6

        # variance collapses to 1/n at independence
        rng = np.random.default_rng(778)
        for _ in range(200):
            u, v = rng.uniform(0.05, 0.95, size=2)
            q = product_distribution(float(u), float(v))
            assert abs(delta_var_phi(q, 100).value - 0.01) < 1e-10

        # variance matches brute-force simulation at non-null distributions
        rng = np.random.default_rng(2024)
        checked = 0
        while checked < 20:
            cells = rng.dirichlet([1.0, 1.0, 1.0, 1.0])
            if cells.min() < 0.05:
                continue
            q = JointDistribution(*(float(c) for c in cells))
            checked += 1
            counts = rng.multinomial(100, q.cells(), size=1_000_000).astype(float)
            r1 = counts[:, 0] + counts[:, 1]
            r2 = counts[:, 2] + counts[:, 3]
            c1 = counts[:, 0] + counts[:, 2]
            c2 = counts[:, 1] + counts[:, 3]
            ok = (r1 > 0) & (r2 > 0) & (c1 > 0) & (c2 > 0)
            num = counts[:, 0] * counts[:, 3] - counts[:, 1] * counts[:, 2]
            ph = num[ok] / np.sqrt((r1 * r2 * c1 * c2)[ok])
            empirical = float(ph.var(ddof=1))
            value = delta_var_phi(q, 100).value
            assert abs(value - empirical) / empirical < 0.10

        elapsed = time.perf_counter() - start
        assert elapsed < 120.0, f"delta-method suite took {elapsed:.1f}s"


def test_criterion_4_sampler_fidelity():
    """Dirichlet first-cell moments; multinomial means/covariances vs theory."""
    with criterion("4 sampler-fidelity"):
        rng = substream_generator(SEED, _ACCEPT_DOMAIN, 4)
        n_draws = 100_000
        draws = np.empty(n_draws)
        for i in range(n_draws):
            draws[i] = sample_uniform_dirichlet(rng).p11
        assert abs(draws.mean() - 0.25) < 0.01
        assert abs(draws.var(ddof=1) - 0.0375) < 0.003

        q = JointDistribution(0.4, 0.1, 0.2, 0.3)
        n, n_tables = 100, 100_000
        rng = substream_generator(SEED, _ACCEPT_DOMAIN, 5)
        counts = np.empty((n_tables, 4))
        for i in range(n_tables):
            counts[i] = sample_multinomial(q, n, rng).cells()
        p = np.array(q.cells())
        centered = counts - counts.mean(axis=0)
        for i in range(4):
            se_mean = math.sqrt(n * p[i] * (1 - p[i]) / n_tables)
            assert abs(counts[:, i].mean() - n * p[i]) < 3 * se_mean
        for i in range(4):
            for j in range(i + 1, 4):
                products = centered[:, i] * centered[:, j]
                emp_cov = products.mean()
                se_cov = products.std(ddof=1) / math.sqrt(n_tables)
                assert abs(emp_cov - (-n * p[i] * p[j])) < 3 * se_cov


def test_criterion_5_size_calibration():
    """Empirical size in [0.02, 0.09] for 20 product nulls, margins [0.2, 0.8]."""
    with criterion("5 size-calibration"):
        start = time.perf_counter()
        cfg = StudyConfig(
            n_distributions=1,
            n_replicates=1000,
            sample_size=100,
            alpha=0.05,
            master_seed=SEED,
            n_null_distributions=20,
            null_margin_low=0.2,
            null_margin_high=0.8,
        )
        for dr in run_null_calibration(cfg):
            for e in dr.estimates:
                assert 0.02 <= e.power <= 0.09, (
                    f"size {e.power} for {e.test} at {dr.distribution}"
                )
        elapsed = time.perf_counter() - start
        assert elapsed < 120.0, f"size calibration took {elapsed:.1f}s"


def test_criterion_6_power_curve_shape(reference_study):
    """Strong alternatives near power 1; median power rises with |phi|."""
    with criterion("6 power-curve-shape"):
        result, study_elapsed = reference_study
        assert study_elapsed < 600.0, f"study took {study_elapsed:.1f}s"
        absphi = np.array([abs(dr.true_phi) for dr in result.alternatives])
        assert (absphi > 0.0).all()  # Dirichlet alternatives are associated
        powers = {
            kind: np.array([dr.estimate_for(kind).power for dr in result.alternatives])
            for kind in TestKind
        }
        strong = absphi > 0.5
        assert strong.any()
        for kind, series in powers.items():
            assert series[strong].min() > 0.95, f"{kind} weak on a strong alternative"
        edges = np.quantile(absphi, np.linspace(0.1, 0.9, 9))
        bucket = np.searchsorted(edges, absphi, side="right")
        for kind, series in powers.items():
            medians = [float(np.median(series[bucket == i])) for i in range(10)]
            assert all(b >= a for a, b in zip(medians, medians[1:])), (
                f"{kind} decile medians not monotone: {medians}"
            )


def test_criterion_7_no_test_dominates(reference_study):
    """Every test is strictly beaten by some other test somewhere."""
    with criterion("7 no-dominator"):
        result, _ = reference_study
        report = dominance_report(result)
        assert report.weak_dominators == ()
        for a in TestKind:
            assert any(report.wins[(b, a)] > 0 for b in TestKind if b is not a)


def test_criterion_8_study_determinism(reference_study, tmp_path):
    """Byte-identical results.csv across runs and parallelism levels."""
    with criterion("8 determinism"):
        result, _ = reference_study
        reference = write_results_csv(
            rows_from_results(result.alternatives), tmp_path / "reference.csv"
        ).read_bytes()
        out_dir = tmp_path / "cli"
        assert main(["study", "--seed", str(SEED), "--jobs", "2", "--out", str(out_dir)]) == 0
        assert (out_dir / "results.csv").read_bytes() == reference


def test_default_study_report_shape(reference_study):
    """Report-level shape claims at default scale: correlations and spline."""
    from assoc2x2.report import (
        _MEASURE_AXIS,
        _measure_values,
        _power_values,
        fit_power_spline,
        power_correlations,
    )

    result, _ = reference_study
    rows = rows_from_results(result.alternatives)
    corr = power_correlations(rows)
    assert all(value > 0.0 for value in corr.values())
    assert corr[(TestKind.SCORE_LOG_OR, TestKind.SCORE_PHI)] > 0.8
    for kind in TestKind:
        x = _measure_values(rows, _MEASURE_AXIS[kind])
        y = _power_values(rows, kind)
        finite = np.isfinite(x)
        spline = fit_power_spline(x[finite], y[finite])
        assert float(spline(0.0)) < 0.2, f"{kind} spline at the null too high"
