import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lsapprox.errors import ConfigError, ParameterError
from lsapprox.functions import (
    HALF_LINE,
    REAL_LINE,
    UNIT,
    FUNCTION_NAMES,
    Interval,
    abs_shift,
    closed,
    constant,
    cosh_weight_fn,
    cosine,
    exponential,
    holder_abs,
    make_function,
    monomial,
    parse_function_spec,
    polynomial,
    psi,
    sine,
)


def brute_modulus(f, delta, a, b, m=4001):
    """Dense scan over shifts s <= delta and left points u."""
    best = 0.0
    for s in np.linspace(0.0, min(delta, b - a), 81)[1:]:
        u = np.linspace(a, b - s, m)
        best = max(best, float(np.max(np.abs(f(u + s) - f(u)))))
    return best


class TestInterval:
    def test_infinite_ends_are_open(self):
        iv = Interval(0.0, math.inf, True, True)
        assert not iv.hi_closed and not iv.bounded

    def test_rejects_empty(self):
        with pytest.raises(ParameterError):
            Interval(1.0, 1.0)

    @pytest.mark.parametrize("text", ["[0,1]", "(0,2]", "[0,inf)", "(-inf,inf)"])
    def test_parse_roundtrip(self, text):
        assert str(Interval.parse(text)) == text

    def test_parse_rejects_garbage(self):
        with pytest.raises(ConfigError):
            Interval.parse("0..1")

    def test_subset_and_contains(self):
        assert UNIT.issubset(HALF_LINE) and not HALF_LINE.issubset(UNIT)
        assert Interval(0, 1, False, True).issubset(UNIT)
        assert not UNIT.issubset(Interval(0, 1, False, True))
        assert 0.0 in UNIT and 0.0 not in Interval(0, 1, False, True)
        assert not HALF_LINE.contains(math.inf)


class TestRegistry:
    def test_names(self):
        assert set(FUNCTION_NAMES) == {f"e{k}" for k in range(7)} | {"exp", "sin", "cos", "abs", "cosh"}

    def test_parse_spec(self):
        assert parse_function_spec("exp:w=0.3") == ("exp", {"w": 0.3})
        assert parse_function_spec("e2") == ("e2", {})

    def test_unknown_name_lists_valid(self):
        with pytest.raises(ConfigError, match="valid names"):
            make_function("tanh")

    def test_bad_parameter(self):
        with pytest.raises(ConfigError):
            make_function("sin:w=2")

    @pytest.mark.parametrize("name", FUNCTION_NAMES)
    def test_registry_derivatives_match_finite_differences(self, name):
        f = make_function(name, closed(-1.5, 2.5))
        if f.deriv1 is None:
            assert name == "abs"
            return
        h = 1e-5
        for x in np.linspace(-1.2, 2.2, 15):
            fd = (f(x + h) - f(x - h)) / (2 * h)
            d1 = float(f.d1(x))
            assert abs(d1 - fd) <= 1e-6 * (1 + abs(d1))
            fd2 = (f.d1(x + h) - f.d1(x - h)) / (2 * h)
            assert abs(float(f.d2(x)) - fd2) <= 1e-5 * (1 + abs(fd2))


class TestClosedFormModuli:
    """Closed-form moduli against a brute-force grid oracle."""

    CASES = [
        (lambda: monomial(1, UNIT), UNIT),
        (lambda: monomial(2, UNIT), UNIT),
        (lambda: monomial(3, closed(-1, 2)), closed(-1, 2)),
        (lambda: monomial(4, closed(-1, 2)), closed(-1, 2)),
        (lambda: exponential(0.7, closed(0, 3)), closed(0, 3)),
        (lambda: exponential(-1.3, closed(0, 3)), closed(0, 3)),
        (lambda: cosh_weight_fn(0.8, closed(-1, 2)), closed(-1, 2)),
        (lambda: abs_shift(0.3, UNIT), UNIT),
        (lambda: sine(closed(0, 7)), closed(0, 7)),
        (lambda: cosine(closed(-4, 4)), closed(-4, 4)),
    ]

    @pytest.mark.parametrize("case", range(len(CASES)))
    @pytest.mark.parametrize("delta", [0.05, 0.3, 1.1])
    def test_matches_grid(self, case, delta):
        build, iv = self.CASES[case]
        f = build()
        exact = f.modulus(delta, iv)
        grid = brute_modulus(f, delta, iv.lo, iv.hi)
        # the grid is a lower bound that converges from below
        assert grid <= exact + 1e-12
        assert exact - grid <= 5e-3 * max(1.0, exact)

    def test_e2_example(self):
        assert monomial(2, UNIT).modulus(0.3, UNIT) == pytest.approx(0.51, abs=1e-12)

    def test_deriv_modulus_exp(self):
        f = exponential(0.5, closed(0, 2))
        d = f.deriv1_modulus(0.4, closed(0, 2))
        assert d == pytest.approx(brute_modulus(f.d1, 0.4, 0, 2), rel=1e-3)


class TestArithmetic:
    def test_scale_keeps_modulus(self):
        f = 3.0 * monomial(2, UNIT)
        assert f.modulus(0.3, UNIT) == pytest.approx(1.53)

    def test_negation_flips_shape(self):
        f = -monomial(2, UNIT)
        assert not f.convex and f(0.5) == pytest.approx(-0.25)

    def test_sum_drops_modulus_keeps_derivatives(self):
        f = monomial(2, UNIT) + sine(UNIT)
        assert f.modulus is None
        assert float(f.d1(0.2)) == pytest.approx(0.4 + math.cos(0.2))

    def test_psi_power(self):
        f = psi(0.3, 3)
        assert float(f(0.5)) == pytest.approx(0.008)
        assert float(f.d2(0.5)) == pytest.approx(6 * 0.2)

    def test_holder_has_tag_but_no_derivative(self):
        f = holder_abs(0.5, 0.5, UNIT)
        assert f.lipschitz == (1.0, 0.5) and f.deriv1 is None

    def test_polynomial_flags(self):
        convex = polynomial([0, -1, 2], UNIT)
        assert convex.convex and not convex.increasing
        cubic = polynomial([0, 0, 0, 1], closed(-1, 1))
        assert cubic.increasing and not cubic.convex

    def test_constant(self):
        c = constant(2.5)
        assert np.all(c(np.array([0.0, 1.0, 7.0])) == 2.5)


@given(st.floats(-2, 2), st.floats(0.01, 1.5))
def test_exp_modulus_monotone_in_delta(w, delta):
    iv = closed(-1, 1)
    f = exponential(w, iv)
    assert f.modulus(delta, iv) <= f.modulus(delta * 1.5, iv) + 1e-15
