"""Tests for the exponent inequalities behind the diameter bounds."""

import math

import pytest

from linkcert import (
    PreconditionError,
    alpha_sup,
    check_ineq_2,
    check_ineq_avg,
    sample_ineq_2,
    sample_ineq_avg,
)
from linkcert.inequality_lab import (
    ALPHA_CAP,
    P_AVG,
    InapplicableSample,
    ineq2_threshold,
)


class TestIneqAvg:
    def test_frozen_sample(self):
        # a=2, b=1, x=2, y=1: lhs = 2*2^p + 2*1 = 2*(3/2) + 2 = 5 exactly,
        # rhs = 3 * 3^p ~ 5.70452
        s = check_ineq_avg(2.0, 1.0, 2.0, 1.0)
        assert s.lhs == 5.0
        assert s.rhs == pytest.approx(3.0 * 3.0 ** P_AVG, rel=0)
        assert s.rhs == pytest.approx(5.704522494691118, rel=1e-12)
        assert s.holds

    def test_equality_case(self):
        """a=b, x=y collapses both sides to 3*a*x^p up to final rounding."""
        s = check_ineq_avg(3.0, 3.0, 7.0, 7.0)
        assert s.holds
        assert abs(s.slack) <= 1e-12 * max(abs(s.lhs), abs(s.rhs))

    def test_hypothesis_gate(self):
        with pytest.raises(InapplicableSample):
            check_ineq_avg(1.0, 2.0, 1.0, 2.0)  # a*x^p < b*y^p

    def test_preconditions(self):
        with pytest.raises(PreconditionError):
            check_ineq_avg(-1.0, 1.0, 1.0, 1.0)
        with pytest.raises(PreconditionError):
            check_ineq_avg(1.0, 1.0, 0.5, 1.0)  # x below 1

    def test_zero_weights_ok(self):
        s = check_ineq_avg(1.0, 0.0, 5.0, 1.0)
        assert s.holds


class TestIneq2:
    def test_threshold_by_length(self):
        assert ineq2_threshold(2) == 1.0
        assert ineq2_threshold(3) == pytest.approx(math.log(4) / math.log(3), rel=0)
        assert ineq2_threshold(4) == ALPHA_CAP
        assert ineq2_threshold(10) == ALPHA_CAP

    def test_all_ones_length4_is_equality(self):
        # lhs = 1 + 1 + 2*2 = 6, rhs = 4^(log_4 6) = 6
        s = check_ineq_2([1.0, 1.0, 1.0, 1.0], ALPHA_CAP)
        assert s.lhs == 6.0
        assert s.rhs == pytest.approx(6.0, rel=1e-12)
        assert s.holds
        assert abs(s.slack) <= 1e-12 * s.rhs

    def test_all_ones_length3_at_own_threshold_is_equality(self):
        # lhs = 1 + 1 + 2 = 4, rhs = 3^(log_3 4) = 4
        s = check_ineq_2([1.0, 1.0, 1.0], ineq2_threshold(3))
        assert s.lhs == 4.0
        assert s.rhs == pytest.approx(4.0, rel=1e-12)

    def test_all_ones_length3_at_cap_has_slack(self):
        # rhs = 3^(log_4 6) ~ 4.1367 > 4
        s = check_ineq_2([1.0, 1.0, 1.0], ALPHA_CAP)
        assert s.rhs == pytest.approx(4.1367, rel=1e-4)
        assert s.slack > 0.1

    def test_below_threshold_inapplicable(self):
        with pytest.raises(InapplicableSample):
            check_ineq_2([1.0, 2.0, 3.0], 1.0)  # needs log_3 4 for length 3

    def test_preconditions(self):
        with pytest.raises(PreconditionError):
            check_ineq_2([1.0], ALPHA_CAP)
        with pytest.raises(PreconditionError):
            check_ineq_2([2.0, 1.0], 1.0)  # decreasing
        with pytest.raises(PreconditionError):
            check_ineq_2([0.5, 1.0], 1.0)  # below 1

    def test_length2_at_p1(self):
        # lhs = a1 + a2 = rhs exactly at p = 1
        s = check_ineq_2([2.0, 5.0], 1.0)
        assert s.lhs == s.rhs == 7.0


class TestAlphaSup:
    def test_maximiser_and_value(self):
        res = alpha_sup(1000)
        assert res.argmax == 4
        assert res.value == pytest.approx(ALPHA_CAP, rel=1e-12)
        assert res.tail_ok

    def test_neighbourhood_of_maximum(self):
        # log_3(4) ~ 1.2619 < log_4(6) ~ 1.2925 > log_5(8) ~ 1.2920
        f = lambda i: math.log(2 * i - 2) / math.log(i)
        assert f(3) < f(4)
        assert f(5) < f(4)
        assert f(5) == pytest.approx(1.2920, rel=1e-4)

    def test_requires_room(self):
        with pytest.raises(PreconditionError):
            alpha_sup(3)

    def test_small_scan_without_tail(self):
        assert alpha_sup(10).argmax == 4


class TestSamplers:
    def test_avg_batch_clean(self):
        batch = sample_ineq_avg(3000, seed=11)
        assert batch.samples == 3000
        assert batch.failures == []
        assert batch.ok
        # extremes are the tightest cases, sorted by relative slack
        slacks = [(s.rhs - s.lhs) / max(1.0, abs(s.rhs)) for s in batch.extremes]
        assert slacks == sorted(slacks)
        assert batch.min_rel_slack >= -1e-12

    def test_avg_batch_deterministic(self):
        b1 = sample_ineq_avg(500, seed=3)
        b2 = sample_ineq_avg(500, seed=3)
        assert b1.min_rel_slack == b2.min_rel_slack
        assert [s.inputs for s in b1.extremes] == [s.inputs for s in b2.extremes]

    def test_ineq2_batch_clean(self):
        batch = sample_ineq_2(3000, seed=11)
        assert batch.samples == 3000
        assert batch.failures == []
        assert batch.min_rel_slack >= -1e-12

    def test_ineq2_batch_hits_equality_cases(self):
        """All-ones probes at the threshold keep the minimum slack pinned at
        (numerical) zero, so the sampler is genuinely touching the boundary."""
        batch = sample_ineq_2(3000, seed=5)
        assert batch.min_rel_slack <= 1e-12

    def test_avg_batch_hits_equality_cases(self):
        batch = sample_ineq_avg(3000, seed=5)
        assert batch.min_rel_slack <= 1e-12
