"""Tests for the four Z statistics, decisions, and degeneracy policies."""

import math

import numpy as np
import pytest

from assoc2x2 import (
    ContingencyTable,
    Degeneracy,
    TestKind,
    ZeroCellPolicy,
    critical_value,
    delta_var_phi_plugin,
    phi_hat,
    run_all_tests,
    z1_wald_log_or,
    z2_score_log_or,
    z3_wald_phi,
    z4_score_phi,
)
from conftest import random_table

BALANCED = ContingencyTable(25, 25, 25, 25)
REFERENCE = ContingencyTable(10, 20, 30, 40)
PERFECT = ContingencyTable(50, 0, 0, 50)
STRONG = ContingencyTable(40, 10, 10, 40)


def classical_chi_squared(t):
    """Pearson chi-squared via expected counts from the observed margins."""
    rows, cols = (t.row1, t.row2), (t.col1, t.col2)
    observed = ((t.n11, t.n12), (t.n21, t.n22))
    return sum(
        (observed[i][j] - rows[i] * cols[j] / t.n) ** 2 / (rows[i] * cols[j] / t.n)
        for i in range(2)
        for j in range(2)
    )


class TestCriticalValue:
    def test_five_percent_matches_1_96(self):
        assert round(critical_value(0.05), 2) == 1.96

    def test_one_percent(self):
        assert critical_value(0.01) == pytest.approx(2.5758, abs=1e-4)

    def test_rejects_bad_alpha(self):
        with pytest.raises(ValueError):
            critical_value(1.5)


class TestZ1WaldLogOdds:
    def test_balanced_table(self):
        out = z1_wald_log_or(BALANCED)
        assert out.statistic == 0.0
        assert not out.reject
        assert out.degeneracy is Degeneracy.NONE

    def test_reference_table(self):
        expected = math.log((10 * 40) / (20 * 30)) / math.sqrt(0.1 + 0.05 + 1 / 30 + 0.025)
        out = z1_wald_log_or(REFERENCE)
        assert out.statistic == pytest.approx(expected, rel=1e-14)
        assert not out.reject

    def test_perfect_table_with_haldane(self):
        out = z1_wald_log_or(PERFECT)
        expected = math.log((50.5 * 50.5) / (0.5 * 0.5)) / math.sqrt(2 / 50.5 + 2 / 0.5)
        assert out.statistic == pytest.approx(expected, rel=1e-14)
        assert out.reject
        assert out.degeneracy is Degeneracy.ZERO_CELL_ADJUSTED

    def test_perfect_table_with_never_reject(self):
        out = z1_wald_log_or(PERFECT, policy=ZeroCellPolicy.NEVER_REJECT)
        assert math.isnan(out.statistic)
        assert not out.reject
        assert out.degeneracy is Degeneracy.ZERO_CELL_ADJUSTED


class TestZ2ScoreLogOdds:
    def test_balanced_table(self):
        assert z2_score_log_or(BALANCED).statistic == 0.0

    def test_reference_table(self):
        expected = math.log(2 / 3) / math.sqrt(100 / 1200 + 100 / 1800 + 100 / 2800 + 100 / 4200)
        out = z2_score_log_or(REFERENCE)
        assert out.statistic == pytest.approx(expected, rel=1e-14)
        assert not out.reject

    def test_score_exceeds_wald_on_reference_table(self):
        assert abs(z2_score_log_or(REFERENCE).statistic) > abs(z1_wald_log_or(REFERENCE).statistic)

    def test_equals_wald_on_independence_structured_table(self):
        t = ContingencyTable(20, 30, 20, 30)
        assert z1_wald_log_or(t).statistic == pytest.approx(z2_score_log_or(t).statistic, abs=1e-12)


class TestZ3WaldPhi:
    def test_balanced_table(self):
        out = z3_wald_phi(BALANCED)
        assert out.statistic == 0.0
        assert not out.reject

    def test_reference_table(self):
        expected = phi_hat(REFERENCE) / math.sqrt(delta_var_phi_plugin(REFERENCE).value)
        out = z3_wald_phi(REFERENCE)
        assert out.statistic == pytest.approx(expected, rel=1e-14)
        assert not out.reject

    def test_transpose_invariance(self):
        assert z3_wald_phi(REFERENCE).statistic == pytest.approx(
            z3_wald_phi(REFERENCE.transpose()).statistic, rel=1e-14
        )

    def test_perfect_association_rejects_at_infinity(self):
        out = z3_wald_phi(PERFECT)
        assert out.statistic == math.inf
        assert out.reject
        out = z3_wald_phi(ContingencyTable(0, 30, 70, 0))
        assert out.statistic == -math.inf
        assert out.reject

    def test_zero_cell_with_positive_margins_is_computed(self):
        out = z3_wald_phi(ContingencyTable(0, 20, 30, 50))
        assert math.isfinite(out.statistic)
        assert out.degeneracy is Degeneracy.NONE


class TestZ4ScorePhi:
    def test_balanced_table(self):
        out = z4_score_phi(BALANCED)
        assert out.statistic == 0.0
        assert out.chi_squared == 0.0

    def test_reference_table(self):
        out = z4_score_phi(REFERENCE)
        assert out.statistic == pytest.approx(10 * phi_hat(REFERENCE), rel=1e-14)
        assert out.chi_squared == pytest.approx(classical_chi_squared(REFERENCE), abs=1e-12)

    def test_chi_squared_identity_over_random_tables(self):
        rng = np.random.default_rng(52)
        for _ in range(300):
            t = random_table(rng)
            stat = z4_score_phi(t).statistic
            assert abs(stat * stat - classical_chi_squared(t)) < 1e-10


class TestDegenerateMargins:
    @pytest.mark.parametrize(
        "t",
        [
            ContingencyTable(0, 0, 30, 70),
            ContingencyTable(30, 70, 0, 0),
            ContingencyTable(0, 30, 0, 70),
            ContingencyTable(30, 0, 70, 0),
        ],
    )
    def test_all_four_undefined_and_retained(self, t):
        for out in run_all_tests(t):
            assert math.isnan(out.statistic)
            assert not out.reject
            assert out.degeneracy is Degeneracy.MARGIN_DEGENERATE


class TestRunAllTests:
    def test_fixed_order(self):
        kinds = [o.kind for o in run_all_tests(BALANCED)]
        assert kinds == [TestKind.WALD_LOG_OR, TestKind.SCORE_LOG_OR, TestKind.WALD_PHI, TestKind.SCORE_PHI]

    def test_balanced_table_never_rejects(self):
        assert not any(o.reject for o in run_all_tests(BALANCED, 0.05))

    def test_strong_table_always_rejects(self):
        outcomes = run_all_tests(STRONG, 0.05)
        assert all(o.reject for o in outcomes)
        assert outcomes[3].statistic == pytest.approx(6.0, rel=1e-14)  # sqrt(100) * 0.6

    def test_decision_matches_critical_value(self):
        rng = np.random.default_rng(53)
        for _ in range(200):
            t = random_table(rng)
            for o in run_all_tests(t, 0.05):
                if math.isfinite(o.statistic):
                    assert o.reject == (abs(o.statistic) > o.critical_value)

    def test_sign_agreement_on_positive_cell_tables(self):
        rng = np.random.default_rng(54)
        checked = 0
        while checked < 200:
            t = random_table(rng)
            if t.min_cell == 0:
                continue
            stats = [o.statistic for o in run_all_tests(t)]
            if any(s == 0.0 for s in stats):
                continue
            signs = {math.copysign(1, s) for s in stats}
            assert len(signs) == 1, f"sign disagreement on {t}: {stats}"
            checked += 1

    def test_zero_cell_affects_only_log_odds_pipeline(self):
        t = ContingencyTable(0, 20, 30, 50)
        z1, z2, z3, z4 = run_all_tests(t)
        assert z1.degeneracy is Degeneracy.ZERO_CELL_ADJUSTED
        assert z2.degeneracy is Degeneracy.ZERO_CELL_ADJUSTED
        assert z3.degeneracy is Degeneracy.NONE
        assert z4.degeneracy is Degeneracy.NONE
        assert z4.statistic == pytest.approx(math.sqrt(100) * phi_hat(t), rel=1e-14)

    def test_monotone_decisions_along_association_paths(self):
        """Moving mass from the anti-diagonal to the diagonal (margins fixed)
        never flips any test from reject back to non-reject."""
        rng = np.random.default_rng(55)
        for _ in range(100):
            t = random_table(rng, n_low=40, n_high=200)
            if t.n11 * t.n22 < t.n12 * t.n21:
                t = ContingencyTable(t.n12, t.n11, t.n22, t.n21)
            rejected = [False] * 4
            for k in range(min(t.n12, t.n21) + 1):
                walked = ContingencyTable(t.n11 + k, t.n12 - k, t.n21 - k, t.n22 + k)
                for i, o in enumerate(run_all_tests(walked)):
                    assert not (rejected[i] and not o.reject), (
                        f"reject flipped off for {o.kind} at step {k} of {t}"
                    )
                    rejected[i] = o.reject
