import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lsapprox.errors import (
    ConfigurationError,
    GrowthError,
    MetadataError,
    NeedsWindowError,
    ParameterError,
    UnsupportedFamilyError,
)
from lsapprox.estimates import (
    BoundKind,
    ErrorBoundReport,
    calibrate_constant,
    ditzian_totik_bound,
    dt_modulus,
    error_bound_pointwise,
    error_bound_weighted,
    exp_cosh_bound,
    local_window,
    modulus,
    omega,
    omega_prime,
)
from lsapprox.functions import (
    HALF_LINE,
    UNIT,
    Interval,
    ScalarFunction,
    abs_shift,
    closed,
    constant,
    exponential,
    monomial,
    polynomial,
    sine,
)
from lsapprox.moments import GrowthConstants, cosh_weight, estimate_Mg, known_growth, quadratic_weight
from lsapprox.operators import Family, make_operator
from lsapprox.transform import LambdaSchedule, TransformedOperator


def T(family, lam):
    sched = lam if isinstance(lam, LambdaSchedule) else LambdaSchedule.constant(lam)
    return TransformedOperator(make_operator(family), sched)


class TestModulus:
    def test_examples(self):
        assert modulus(monomial(1), 0.2, UNIT, 0.2 / 16).value == pytest.approx(0.2, abs=1e-12)
        assert modulus(constant(3.0), 0.2, UNIT, 0.01).value == 0.0
        est = modulus(monomial(2), 0.3, UNIT, 0.3 / 16)
        assert est.value == pytest.approx(0.51, abs=1e-12)
        assert est.lower_bound

    def test_preconditions(self):
        with pytest.raises(NeedsWindowError):
            modulus(sine(), 0.1, HALF_LINE, 0.001)
        with pytest.raises(ParameterError):
            modulus(sine(), 0.1, UNIT, 0.1)
        with pytest.raises(ParameterError):
            modulus(sine(), 0.0, UNIT, 0.001)

    @given(st.floats(0.01, 0.9), st.floats(1.0, 2.0))
    def test_monotone_in_delta(self, delta, factor):
        f = polynomial([0.0, 1.0, -3.0, 2.0], UNIT)
        step = delta / 16
        a = modulus(f, delta, UNIT, step).value
        b = modulus(f, delta * factor, UNIT, step).value
        assert a <= b + 1e-12

    @given(st.floats(0.01, 0.5))
    def test_grid_is_lower_bound_of_exact(self, delta):
        for f in (monomial(3, UNIT), exponential(2.0, UNIT), abs_shift(0.37, UNIT)):
            grid = modulus(f, delta, UNIT, delta / 16).value
            assert grid <= f.modulus(delta, UNIT) + 1e-12

    def test_vanishes_with_delta(self):
        vals = [modulus(sine(), d, UNIT, d / 16).value for d in (0.1, 0.01, 0.001)]
        assert vals[-1] < 1.1e-3 and vals[0] > vals[1] > vals[2]

    def test_omega_prefers_closed_form(self):
        assert omega(monomial(2), 0.3, UNIT) == pytest.approx(0.51)
        g = monomial(2, UNIT) + sine(UNIT)
        assert omega(g, 0.1, UNIT) > 0
        with pytest.raises(NeedsWindowError):
            omega(g, 0.1, HALF_LINE)
        assert omega(sine(), 0.0, UNIT) == 0.0

    def test_omega_prime(self):
        assert omega_prime(monomial(2), 0.1, UNIT) == pytest.approx(0.2)
        with pytest.raises(MetadataError):
            omega_prime(abs_shift(0.5), 0.1, UNIT)


class TestDTModulus:
    phi = staticmethod(lambda x: np.sqrt(x))

    def test_affine_and_constant_vanish(self):
        iv = closed(0.0, 4.0)
        assert dt_modulus(polynomial([2.0, -3.0]), 0.3, self.phi, iv, 0.01, HALF_LINE).value == pytest.approx(0, abs=1e-12)
        assert dt_modulus(constant(1.0), 0.3, self.phi, iv, 0.01, HALF_LINE).value == 0.0

    @pytest.mark.parametrize("delta", [0.1, 0.5])
    def test_e2_exact(self, delta):
        iv = closed(0.0, 4.0)
        est = dt_modulus(monomial(2), delta, self.phi, iv, 0.01, HALF_LINE)
        # second difference of e2 is 2 h^2 phi(x)^2; every point is admissible here
        assert est.value == pytest.approx(2 * delta**2 * 4.0, rel=1e-12)

    def test_admissibility_cuts_the_left_end(self):
        iv = closed(0.0, 1.0)
        phi = lambda x: np.ones_like(x)
        est = dt_modulus(monomial(2), 0.5, phi, iv, 0.01)
        # with phi = 1 on [0, 1], h <= min(x, 1-x) <= 1/2
        assert est.value == pytest.approx(2 * 0.25, rel=1e-12)

    def test_needs_window(self):
        with pytest.raises(NeedsWindowError):
            dt_modulus(monomial(2), 0.1, self.phi, HALF_LINE, 0.01)


class TestPointwise:
    def test_constant_function(self):
        t = T("bernstein", 0.6)
        for kind in ("omega", "derivative", "derivative_H1"):
            r = error_bound_pointwise(t, constant(1.0, UNIT), 9, 0.3, known_growth(t.base), kind)
            assert r.actual_error == pytest.approx(0, abs=1e-15) and r.bound >= 0

    def test_bernstein_example(self):
        t = T("bernstein", 1.0)
        r = error_bound_pointwise(t, monomial(2, UNIT), 20, 0.5, known_growth(t.base), BoundKind.OMEGA)
        d = math.sqrt(0.25 / 20)
        assert r.actual_error == pytest.approx(0.0125, abs=1e-15)
        assert r.bound == pytest.approx(2 * (2 - d) * d, rel=1e-12)
        assert r.bound == pytest.approx(0.4222, abs=1e-4)
        assert r.holds

    def test_schurer_derivative_h1(self):
        t = T("bernstein_schurer", LambdaSchedule.reciprocal())
        f = sine(closed(0, 2))
        g = known_growth(t.base)
        r = error_bound_pointwise(t, f, 10, 0.5, g, "derivative_H1")
        d = math.sqrt(0.1 * (0.25 + 0.5) / 10)
        expected = math.cos(0.5) * 0.5 * (1 - 0.9**10) / 10 + 2 * omega_prime(f, d, closed(0, 2)) * d
        assert r.bound == pytest.approx(expected, rel=1e-12)
        assert r.holds

    def test_missing_inputs(self):
        t = T("bernstein", 0.5)
        with pytest.raises(MetadataError):
            error_bound_pointwise(t, abs_shift(0.5, UNIT), 5, 0.5, known_growth(t.base), "derivative")
        with pytest.raises(ConfigurationError):
            error_bound_pointwise(t, sine(UNIT), 5, 0.5, GrowthConstants(Family.BERNSTEIN), "omega")
        with pytest.raises(ConfigurationError):
            no_m1 = GrowthConstants(Family.BERNSTEIN, M2=lambda x: x * (1 - x))
            error_bound_pointwise(t, sine(UNIT), 5, 0.5, no_m1, "derivative_H1")

    @given(st.integers(1, 60), st.floats(0.02, 1.0), st.floats(0.0, 1.0))
    def test_halving_lambda_does_not_grow_the_bound(self, n, lam, x):
        f = sine(UNIT)
        g = known_growth(make_operator("bernstein"))
        a = error_bound_pointwise(T("bernstein", lam), f, n, x, g, "omega").bound
        b = error_bound_pointwise(T("bernstein", lam / 2), f, n, x, g, "omega").bound
        assert b <= a + 1e-15

    @given(
        st.sampled_from(["bernstein", "bernstein_schurer", "kantorovich"]),
        st.sampled_from(["omega", "derivative", "derivative_H1"]),
        st.integers(1, 80),
        st.floats(0.0, 1.0),
        st.floats(0.0, 1.0),
        st.sampled_from(["sin", "e3", "exp", "abs"]),
    )
    def test_dominance(self, family, kind, n, lam, x, fname):
        op = make_operator(family)
        f = {"sin": sine(op.I), "e3": monomial(3, op.I), "exp": exponential(1.0, op.I), "abs": abs_shift(0.4, op.I)}[fname]
        if kind != "omega" and f.deriv1 is None:
            return
        r = error_bound_pointwise(TransformedOperator(op, LambdaSchedule.constant(lam)), f, n, x, known_growth(op), kind)
        assert r.holds, r


class TestWeighted:
    def test_bernstein_quadratic_example(self):
        lam, n, x = 0.4, 25, 0.5
        t = T("bernstein", lam)
        g = quadratic_weight(UNIT)
        mg = estimate_Mg(t.base, g, x, 60).value
        r = error_bound_weighted(t, monomial(2, UNIT), g, n, x, known_growth(t.base), mg, "weighted_2dis")
        assert r.actual_error == pytest.approx(0.25 * lam / n, abs=1e-14)
        d = math.sqrt(lam * 0.25 / n)
        assert r.base == pytest.approx(2 * (2 - d) * d, rel=1e-12)
        assert r.scaled == pytest.approx(lam * 0.25 / n, rel=1e-9)
        assert r.holds and not r.warnings

    def test_lambda_zero(self):
        t = T("szasz_mirakjan", 0.0)
        g = cosh_weight(0.5, HALF_LINE)
        r = error_bound_weighted(t, exponential(0.3), g, 10, 1.0, known_growth(t.base), 1.0, "weighted_1dis")
        assert r.actual_error == 0.0 and r.bound >= 0

    def test_f_equals_g_is_finite(self):
        t = T("szasz_mirakjan", 0.5)
        g = cosh_weight(0.5, HALF_LINE)
        mg = estimate_Mg(t.base, g, 1.0, 100).value
        r = error_bound_weighted(t, g.g, g, 30, 1.0, known_growth(t.base), mg, "weighted_2dis")
        assert math.isfinite(r.bound) and r.actual_error <= t.schedule(30, 1.0) * mg / 30 + 1e-12

    def test_growth_outside_weight_space(self):
        t = T("szasz_mirakjan", 0.5)
        g = quadratic_weight(HALF_LINE)
        with pytest.raises(GrowthError):
            error_bound_weighted(t, exponential(1.0), g, 10, 1.0, known_growth(t.base), 1.0)

    def test_kind_check(self):
        t = T("bernstein", 0.5)
        with pytest.raises(ParameterError):
            error_bound_weighted(t, sine(UNIT), quadratic_weight(UNIT), 4, 0.5, known_growth(t.base), 1.0, "omega")


class TestExpCosh:
    def test_szasz_example(self):
        t = T("szasz_mirakjan", 0.5)
        r = exp_cosh_bound(t, exponential(0.3), 0.3, 1.0, 50, 1.0)
        assert r.holds and math.isfinite(r.bound)
        assert r.scaled == pytest.approx(0.09 * 0.5 * 1.0 * math.cosh(0.3) / 50)

    def test_lambda_zero(self):
        r = exp_cosh_bound(T("baskakov", 0.0), exponential(0.3), 0.3, 1.0, 20, 1.0)
        assert r.actual_error == 0.0

    def test_small_w_leaves_modulus_term(self):
        t = T("weierstrass", 0.5)
        f = sine()
        r = exp_cosh_bound(t, f, 1e-8, 1.0, 10, 0.3)
        assert r.scaled < 1e-16 and r.bound == pytest.approx(r.base)

    def test_growth_check(self):
        with pytest.raises(GrowthError):
            exp_cosh_bound(T("szasz_mirakjan", 0.5), exponential(0.9), 0.3, 1.0, 10, 1.0)

    def test_family_check(self):
        with pytest.raises(UnsupportedFamilyError):
            exp_cosh_bound(T("kantorovich", 0.5), exponential(0.3, UNIT), 0.3, 1.0, 10, 0.5)

    def test_local_window(self):
        assert local_window(HALF_LINE, 0.4) == closed(0.0, 1.4)


class TestDitzianTotik:
    def test_runs_on_szasz_and_baskakov(self):
        for fam in ("szasz_mirakjan", "baskakov"):
            t = T(fam, 0.5)
            r = ditzian_totik_bound(t, exponential(-1.0), 20, np.linspace(0.1, 4, 14), known_growth(t.base))
            assert r.bound_kind is BoundKind.DITZIAN_TOTIK and r.scaled > 0
            assert r.actual_error > 0

    def test_scope(self):
        t = T("bernstein", 0.5)
        with pytest.raises(UnsupportedFamilyError):
            ditzian_totik_bound(t, sine(UNIT), 5, [0.2, 0.5, 0.8], known_growth(t.base))

    def test_variants(self):
        t = T("szasz_mirakjan", LambdaSchedule.reciprocal())
        xs, g = np.linspace(0.1, 3, 10), known_growth(t.base)
        small = ditzian_totik_bound(t, exponential(-1.0), 30, xs, g, variant="small_lambda")
        affine = ditzian_totik_bound(t, exponential(-1.0), 30, xs, g, variant="affine")
        assert small.scaled >= affine.scaled > 0
        with pytest.raises(ParameterError):
            ditzian_totik_bound(t, exponential(-1.0), 30, xs, g, variant="other")


class TestCalibration:
    def rep(self, actual, base, scaled):
        return ErrorBoundReport(0.5, 10, actual, base + scaled, BoundKind.EXP_COSH, base, scaled, 1.0)

    def test_max_ratio_with_headroom(self):
        c = calibrate_constant([self.rep(1.0, 0.2, 0.4), self.rep(0.5, 0.0, 1.0)])
        assert c == pytest.approx(1.5 * 2.0)
        assert self.rep(1.0, 0.2, 0.4).with_constant(c).holds

    def test_floor(self):
        assert calibrate_constant([self.rep(0.1, 0.5, 1.0)]) == 1e-12

    def test_unscaled_violation(self):
        with pytest.raises(ConfigurationError):
            calibrate_constant([self.rep(1.0, 0.5, 0.0)])
