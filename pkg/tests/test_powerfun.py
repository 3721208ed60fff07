import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import grid_argmax
from triplepower.powerfun import (
    DomainError,
    TrichotomyCase,
    TriplePower,
    classify,
    derivative,
    evaluate,
    log_threshold,
    primitive,
    term_magnitude,
    threshold,
    tilde,
    turning_point,
)
from triplepower.verify import random_triple, tilde_scale

BASE = dict(b=1.0, c=1.0, p=1.0, q=2.0, r=3.0)


def tp(a, b, c, p, q, r):
    return TriplePower(a, b, c, p, q, r)


coef = st.floats(1e-3, 1e3)


@st.composite
def triples(draw, tilde_ready=False):
    e = sorted(draw(st.lists(st.floats(0.1, 8.0), min_size=3, max_size=3)))
    assume(e[1] - e[0] >= 0.1 and e[2] - e[1] >= 0.1)
    if tilde_ready:
        assume(e[0] + e[1] > 1)
    return TriplePower(draw(coef), draw(coef), draw(coef), *e)


class TestConstruction:
    @pytest.mark.parametrize("args, message", [
        ((0, 1, 1, 1, 2, 3), "a > 0"),
        ((1, -1, 1, 1, 2, 3), "a > 0"),
        ((1, 1, 1, 3, 2, 1), "p < q < r"),
        ((1, 1, 1, 1, 1, 3), "p < q < r"),
        ((1, 1, 1, 0, 2, 3), "p > 0"),
        ((1, 1, 1, -0.5, 2, 3), "p > 0"),
        ((math.nan, 1, 1, 1, 2, 3), "finite"),
    ])
    def test_invariants(self, args, message):
        with pytest.raises(DomainError, match=message):
            TriplePower(*args)

    def test_is_a_value(self):
        assert tp(1, 1, 1, 1, 2, 3) == tp(1.0, 1.0, 1.0, 1.0, 2.0, 3.0)
        with pytest.raises(AttributeError):
            tp(1, 1, 1, 1, 2, 3).a = 2.0


class TestEvaluate:
    def test_origin(self):
        assert evaluate(tp(1, 1, 1, 1, 2, 3), 0.0) == 0.0

    def test_positive_value(self):
        # -1/16 + 1/4 - 1/8
        assert evaluate(tp(1 / 8, 1, 1, 1, 2, 3), 0.5) == pytest.approx(1 / 16, rel=1e-15)

    def test_zero_value(self):
        assert evaluate(tp(1 / 4, 1, 1, 1, 2, 3), 0.5) == pytest.approx(0.0, abs=1e-16)

    def test_negative_u_rejected(self):
        with pytest.raises(DomainError):
            evaluate(tp(1, 1, 1, 1, 2, 3), -0.1)

    def test_vectorised_matches_scalar(self):
        f = tp(0.3, 2.0, 0.7, 0.5, 1.5, 2.5)
        u = np.array([0.0, 0.2, 1.0, 3.0, 40.0])
        np.testing.assert_allclose(evaluate(f, u), [evaluate(f, x) for x in u], rtol=1e-15)

    def test_factored_form_keeps_sign_past_overflow(self):
        f = tp(1.0, 1.0, 1.0, 100.0, 150.0, 200.0)
        # individual terms overflow at u = 1e3, the bracket is clearly negative
        assert evaluate(f, 1e3) == -math.inf

    def test_call_is_evaluate(self):
        f = tp(1 / 8, 1, 1, 1, 2, 3)
        assert f(0.5) == evaluate(f, 0.5)


class TestDerivative:
    def test_first_derivative_by_hand(self):
        # -1 + 2u - 3u^2 at 1/2
        assert derivative(tp(1, 1, 1, 1, 2, 3), 0.5, 1) == pytest.approx(-0.75, rel=1e-15)

    def test_first_derivative_other_exponents(self):
        assert derivative(tp(1, 1, 1, 2, 3, 4), 1.0, 1) == pytest.approx(-3.0, rel=1e-15)

    def test_second_derivative_by_hand(self):
        # 2 - 6u at 1/2
        assert derivative(tp(1, 1, 1, 1, 2, 3), 0.5, 2) == pytest.approx(-1.0, rel=1e-15)

    @pytest.mark.parametrize("u", [0.0, -1.0])
    def test_domain(self, u):
        with pytest.raises(DomainError):
            derivative(tp(1, 1, 1, 1, 2, 3), u, 1)

    def test_bad_order(self):
        with pytest.raises(DomainError):
            derivative(tp(1, 1, 1, 1, 2, 3), 1.0, 3)

    @settings(max_examples=200, deadline=None)
    @given(triples())
    def test_against_central_difference(self, f):
        h = 1e-6
        fd1 = (evaluate(f, 1 + h) - evaluate(f, 1 - h)) / (2 * h)
        fd2 = (evaluate(f, 1 + h) - 2 * evaluate(f, 1.0) + evaluate(f, 1 - h)) / h**2
        scale = term_magnitude(f, 1.0) * f.r
        assert abs(fd1 - derivative(f, 1.0, 1)) <= 1e-8 * scale
        assert abs(fd2 - derivative(f, 1.0, 2)) <= 1e-3 * scale * f.r


class TestThreshold:
    @pytest.mark.parametrize("b, c, p, q, r", [
        (1, 1, 1, 2, 3),
        (1, 1, 1, 3, 5),
        (2, 2, 1, 2, 3),
        (3.0, 0.5, 0.7, 1.9, 4.2),
    ])
    def test_against_grid_maximum(self, b, c, p, q, r):
        f = tp(1.0, b, c, p, q, r)
        u_max, v_max = grid_argmax(lambda u: b * u ** (q - p) - c * u ** (r - p), 1e-6, 10.0)
        assert threshold(f) == pytest.approx(v_max, rel=1e-8)
        assert turning_point(f) == pytest.approx(u_max, abs=1e-4)

    @pytest.mark.parametrize("b, c, p, q, r, expected", [
        (1, 1, 1, 2, 3, 0.25),
        (1, 1, 1, 3, 5, 0.25),
        (2, 2, 1, 2, 3, 0.5),
    ])
    def test_frozen_values(self, b, c, p, q, r, expected):
        assert threshold(tp(1.0, b, c, p, q, r)) == pytest.approx(expected, rel=1e-15)

    @pytest.mark.parametrize("b, c, p, q, r, expected", [
        (1, 1, 1, 2, 3, 0.5),
        (1, 1, 1, 3, 5, math.sqrt(0.5)),
        (2, 1, 1, 2, 3, 1.0),
    ])
    def test_turning_point(self, b, c, p, q, r, expected):
        assert turning_point(tp(1.0, b, c, p, q, r)) == pytest.approx(expected, rel=1e-15)

    @pytest.mark.parametrize("lam", [1e-3, 1.0, 1e3])
    def test_homogeneous_in_b_and_c(self, rng, lam):
        for _ in range(200):
            f = random_triple(rng)
            g = TriplePower(f.a, lam * f.b, lam * f.c, f.p, f.q, f.r)
            assert log_threshold(g) - log_threshold(f) == pytest.approx(math.log(lam), abs=1e-12)
            if threshold(f) < 1e300 and threshold(g) < 1e300:
                assert threshold(g) == pytest.approx(lam * threshold(f), rel=1e-12)

    def test_overflowing_threshold_is_inf(self):
        f = tp(1.0, 1e3, 1e-3, 0.1, 7.9, 8.0)
        assert log_threshold(f) > 709
        assert threshold(f) == math.inf
        assert classify(f) is TrichotomyCase.POSITIVE_PART


class TestClassify:
    @pytest.mark.parametrize("a, expected", [
        (1 / 8, TrichotomyCase.POSITIVE_PART),
        (1 / 4, TrichotomyCase.ONE_ZERO),
        (1 / 2, TrichotomyCase.NEGATIVE),
    ])
    def test_examples(self, a, expected):
        assert classify(tp(a, **BASE), 1e-12) is expected

    def test_negative_example_against_log_grid(self):
        f = tp(0.5, **BASE)
        u = np.logspace(-8, 8, 100_001)
        assert np.max(evaluate(f, u)) < 0

    @pytest.mark.parametrize("rel_tol", [0.0, -1e-9, 1e-5])
    def test_rel_tol_range(self, rel_tol):
        with pytest.raises(DomainError):
            classify(tp(0.2, **BASE), rel_tol)

    def test_band_edges(self):
        T = 0.25
        assert classify(tp(T * (1 - 2e-9), **BASE), 1e-9) is TrichotomyCase.POSITIVE_PART
        assert classify(tp(T * (1 - 0.5e-9), **BASE), 1e-9) is TrichotomyCase.ONE_ZERO
        assert classify(tp(T * (1 + 0.5e-9), **BASE), 1e-9) is TrichotomyCase.ONE_ZERO
        assert classify(tp(T * (1 + 2e-9), **BASE), 1e-9) is TrichotomyCase.NEGATIVE

    def test_labels_and_duals(self):
        assert [c.label for c in TrichotomyCase] == ["a", "b", "c"]
        assert TrichotomyCase.POSITIVE_PART.dual is TrichotomyCase.NEGATIVE
        assert TrichotomyCase.NEGATIVE.dual is TrichotomyCase.POSITIVE_PART
        assert TrichotomyCase.ONE_ZERO.dual is TrichotomyCase.ONE_ZERO

    @settings(max_examples=300, deadline=None)
    @given(triples())
    def test_double_zero_at_boundary(self, f):
        assume(abs(log_threshold(f)) < 600)
        g = f.with_a(threshold(f))
        u = turning_point(g)
        assume(1e-100 < term_magnitude(g, u) < 1e100)
        scale = term_magnitude(g, u)
        assert abs(evaluate(g, u)) <= 1e-9 * scale
        assert abs(u * derivative(g, u, 1)) <= 1e-9 * scale * g.r
        assert classify(g, 1e-9) is TrichotomyCase.ONE_ZERO


class TestTilde:
    def test_worked_example(self):
        t = tilde(tp(1, 1, 1, 1, 2, 3))
        assert (t.a, t.b, t.c, t.p, t.q, t.r) == (1, 4, 1, 2, 3, 4)

    def test_second_example(self):
        t = tilde(tp(2, 3, 5, 1, 2, 4))
        assert (t.a, t.b, t.c, t.p, t.q, t.r) == (6, 90, 60, 2, 4, 5)

    def test_second_example_by_finite_differences(self):
        f = tp(2, 3, 5, 1, 2, 4)
        t = tilde(f)
        h = 1e-4
        for u in np.linspace(0.2, 2.0, 19):
            d1 = (evaluate(f, u + h) - evaluate(f, u - h)) / (2 * h)
            g = lambda x: x * (evaluate(f, x + h) - evaluate(f, x - h)) / (2 * h)
            dg = (g(u + h) - g(u - h)) / (2 * h)
            expected = dg * evaluate(f, u) - u * d1**2
            assert evaluate(t, u) == pytest.approx(expected, rel=1e-6, abs=1e-6 * tilde_scale(f, u))

    def test_requires_p_plus_q_above_one(self):
        with pytest.raises(DomainError, match="p \\+ q > 1"):
            tilde(tp(1, 1, 1, 0.2, 0.8, 3))

    @settings(max_examples=300, deadline=None)
    @given(triples(tilde_ready=True))
    def test_exponents_increase(self, f):
        t = tilde(f)
        assert (t.p, t.q, t.r) == pytest.approx((f.p + f.q - 1, f.p + f.r - 1, f.q + f.r - 1))
        assert 0 < t.p < t.q < t.r

    @settings(max_examples=300, deadline=None)
    @given(triples(tilde_ready=True), st.floats(0.05, 20.0))
    def test_pointwise_identity_exact_derivatives(self, f, s):
        u = s * turning_point(f)
        assume(1e-100 < term_magnitude(f, u) < 1e100)
        d1, d2 = derivative(f, u, 1), derivative(f, u, 2)
        direct = (d1 + u * d2) * evaluate(f, u) - u * d1 * d1
        assert abs(evaluate(tilde(f), u) - direct) <= 1e-12 * tilde_scale(f, u)

    @settings(max_examples=300, deadline=None)
    @given(triples(tilde_ready=True))
    def test_duality(self, f):
        gap = abs(math.expm1(math.log(f.a) - log_threshold(f)))
        assume(gap > 1e-6)
        assert classify(tilde(f)) is classify(f).dual


def test_primitive_differentiates_back(rng):
    for _ in range(100):
        f = random_triple(rng)
        F = primitive(f)
        for u in (0.3, 1.0, 2.0):
            scale = term_magnitude(f, u)
            assert abs(derivative(F, u, 1) - evaluate(f, u)) <= 1e-12 * scale
