import math

import pytest
from hypothesis import given, strategies as st

from lsapprox.asymptotics import (
    VoronovskajaSpec,
    gap_trend_ok,
    moment_audit,
    rate_check,
    residual_sequence,
    richardson,
    voronovskaja_spec,
    voronovskaja_target,
)
from lsapprox.errors import MetadataError, ParameterError
from lsapprox.functions import UNIT, abs_shift, closed, constant, monomial, sine
from lsapprox.operators import make_operator
from lsapprox.transform import LambdaSchedule, TransformedOperator


def T(family, sched):
    return TransformedOperator(make_operator(family), sched)


class TestResiduals:
    def test_constant_and_identity_vanish(self):
        t = T("szasz_mirakjan", LambdaSchedule.constant(0.7))
        for f in (constant(1.0), monomial(1)):
            for _, r in residual_sequence(t, f, 1.3, [5, 10, 20]):
                assert abs(r) <= 1e-9

    def test_bernstein_e2_exact(self):
        t = T("bernstein", LambdaSchedule.constant(1.0))
        for _, r in residual_sequence(t, monomial(2, UNIT), 0.5, [1, 2, 7, 50, 400]):
            assert r == pytest.approx(0.25, abs=1e-10)

    @given(st.integers(1, 200), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    def test_bernstein_e2_closed_form(self, n, lam, x):
        # n (L_{n,lambda} e2 - e2)(x) = lambda x (1 - x) exactly
        t = T("bernstein", LambdaSchedule.constant(lam))
        (_, r), = residual_sequence(t, monomial(2, UNIT), x, [n])
        assert r == pytest.approx(lam * x * (1 - x), abs=1e-10)

    def test_requires_increasing(self):
        t = T("bernstein", LambdaSchedule.constant(0.5))
        with pytest.raises(ParameterError):
            residual_sequence(t, sine(UNIT), 0.5, [10, 10, 20])


class TestTargets:
    def test_exponential_target(self):
        op = make_operator("baskakov")
        spec = voronovskaja_spec(op, 0.4)
        x = 0.8
        assert voronovskaja_target(spec, monomial(3), x) == pytest.approx(0.4 * x * (1 + x) * 6 * x / 2)

    def test_kantorovich_drift(self):
        spec = voronovskaja_spec(make_operator("kantorovich"))
        assert voronovskaja_target(spec, monomial(1, UNIT), 0.2) == pytest.approx(0.3)

    def test_needs_derivatives(self):
        spec = voronovskaja_spec(make_operator("bernstein"))
        with pytest.raises(MetadataError):
            voronovskaja_target(spec, abs_shift(0.5, UNIT), 0.3)

    def test_q_validation(self):
        with pytest.raises(ParameterError):
            VoronovskajaSpec(lambda x: x, lambda x: 0.0, q=3)


class TestRichardson:
    def test_removes_first_order_term(self):
        ns = [10, 20, 40]
        vals = [2.0 + 3.0 / n for n in ns]
        est, drift = richardson(ns, vals)
        assert est == pytest.approx(2.0, abs=1e-14) and drift == pytest.approx(0.0, abs=1e-14)

    def test_drift_reports_second_order(self):
        ns = [10, 20, 40]
        est, drift = richardson(ns, [1.0 + 1.0 / n**2 for n in ns])
        # (40 r2 - 20 r1) / 20 = 1 - 1/800; the previous pair gives 1 - 1/200
        assert est == pytest.approx(1 - 1 / 800, abs=1e-14)
        assert drift == pytest.approx(3 / 800, abs=1e-14)

    def test_needs_three_points(self):
        with pytest.raises(ParameterError):
            richardson([1, 2], [0.0, 0.0])

    def test_gap_trend(self):
        assert gap_trend_ok([0.4, 0.2, 0.1, 0.05])
        assert not gap_trend_ok([0.1, 0.2, 0.4, 0.8])


class TestRates:
    def test_bernstein_half_lambda_e3(self):
        t = T("bernstein", LambdaSchedule.constant(0.5))
        spec = voronovskaja_spec(t.base, 0.5)
        r = rate_check(t, spec, monomial(3, UNIT), 0.4, [50, 100, 200, 400], 1e-3)
        assert r.target == pytest.approx(0.5 * 0.4 * 0.6 * 6 * 0.4 / 2)
        assert r.passed and not r.diagnostics
        assert list(r.gaps) == sorted(r.gaps, reverse=True)

    @pytest.mark.parametrize("family", ["szasz_mirakjan", "baskakov", "weierstrass", "post_widder"])
    def test_exponential_rates(self, family):
        t = T(family, LambdaSchedule.constant(0.6))
        spec = voronovskaja_spec(t.base, 0.6)
        r = rate_check(t, spec, sine(), 0.9, [25, 50, 100, 200], 1e-3)
        assert r.passed, r

    def test_schurer_reciprocal_schedule_limit(self):
        # with lambda_n = 1/n only a fraction 1 - (1 - 1/n)^n -> 1 - 1/e of the drift survives
        t = T("bernstein_schurer", LambdaSchedule.reciprocal())
        f = sine(closed(0, 2))
        seq = residual_sequence(t, f, 0.5, [50, 100, 200, 400])
        est, drift = richardson([n for n, _ in seq], [r for _, r in seq])
        assert est == pytest.approx((1 - 1 / math.e) * 0.5 * math.cos(0.5), abs=1e-4)
        assert drift < 1e-4

    def test_diagnostics_flag_wrong_limits(self):
        t = T("bernstein", LambdaSchedule.constant(0.5))
        wrong = VoronovskajaSpec(lambda x: 2 * x * (1 - x), lambda x: 0.1, 4, lambda x: 0.5)
        r = rate_check(t, wrong, monomial(3, UNIT), 0.4, [50, 100, 200, 400], 1e-3)
        assert not r.passed and any("moment limits" in d for d in r.diagnostics)


class TestMomentAudit:
    @pytest.mark.parametrize("family", ["szasz_mirakjan", "baskakov", "weierstrass", "post_widder"])
    def test_exponential_limits_at_200(self, family):
        op = make_operator(family)
        a = moment_audit(op, voronovskaja_spec(op), 0.7, 200)
        assert a.ok(1e-8, 1e-6)
        assert a.n_mq < 0.1

    def test_schurer(self):
        op = make_operator("bernstein_schurer")
        a = moment_audit(op, voronovskaja_spec(op), 0.5, 400)
        assert a.n_m1 == pytest.approx(0.5) and a.n_m2 == pytest.approx(0.25 + 0.5 / 400)
