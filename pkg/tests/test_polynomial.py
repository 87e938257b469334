from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rebit_moments.exact.gammas import wallis_integral
from rebit_moments.exact.polynomial import MAX_EXPONENT, SparsePoly, pack, unpack

VARS = ("x", "y", "s_x")

coeff = st.fractions(min_value=-5, max_value=5, max_denominator=7)
monomial = st.tuples(*[st.integers(0, 3)] * 3)
polys = st.dictionaries(monomial, coeff, max_size=5).map(lambda d: SparsePoly.from_dict(VARS, d))
point = st.fixed_dictionaries({v: st.fractions(min_value=-2, max_value=2, max_denominator=5) for v in VARS})


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(f, g, h):
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f + g == g + f
    assert f * 1 == f
    assert f - f == SparsePoly(VARS)


@settings(max_examples=40, deadline=None)
@given(polys, st.integers(0, 4))
def test_pow_is_repeated_multiplication(f, m):
    expected = SparsePoly.constant(VARS, 1)
    for _ in range(m):
        expected = expected * f
    assert f ** m == expected


@settings(max_examples=60, deadline=None)
@given(polys, polys, point)
def test_evaluation_is_a_homomorphism(f, g, p):
    assert (f * g).evaluate(p) == f.evaluate(p) * g.evaluate(p)
    assert (f + g).evaluate(p) == f.evaluate(p) + g.evaluate(p)


CIRCLE = [(Fraction(3, 5), Fraction(4, 5)), (Fraction(4, 5), Fraction(-3, 5)), (Fraction(5, 13), Fraction(12, 13))]


@settings(max_examples=60, deadline=None)
@given(polys, st.fractions(min_value=-3, max_value=3, max_denominator=4))
def test_normalize_preserves_values_on_the_circle(f, y):
    # s_x stands for sqrt(1 - x^2); points with s_x^2 = 1 - x^2 are unaffected by the rewrite
    n = f.normalize()
    assert all(e[2] <= 1 for e in n.as_dict())
    for x, s in CIRCLE:
        vals = {"x": x, "y": y, "s_x": s}
        assert n.evaluate(vals) == f.evaluate(vals)


def _integrate_x(poly):
    """Integral over x in [-1, 1] with s_x = sqrt(1 - x^2), as a (rational, pi power) sum."""
    total = {}
    for (a, _, b), c in poly.as_dict().items():
        w = wallis_integral(a, b)
        total[w.pi_power] = total.get(w.pi_power, 0) + c * w.rational
    return {k: v for k, v in total.items() if v}


@settings(max_examples=60, deadline=None)
@given(polys)
def test_normalize_keeps_the_integral(f):
    assert _integrate_x(f) == _integrate_x(f.normalize())


def test_pack_round_trip_and_overflow():
    assert unpack(pack((1, 0, 7)), 3) == (1, 0, 7)
    with pytest.raises(OverflowError):
        pack((MAX_EXPONENT + 1,))
    big = SparsePoly.var(VARS, "x", 200)
    with pytest.raises(OverflowError):
        big * big


def test_mismatched_variables_raise():
    with pytest.raises(ValueError):
        SparsePoly.var(("a",), "a") + SparsePoly.var(("b",), "b")


def test_coefficients_in_splits_by_power():
    x, y = SparsePoly.var(VARS, "x"), SparsePoly.var(VARS, "y")
    f = 3 * x * x * y + 2 * y + 5
    parts = f.coefficients_in("x")
    assert set(parts) == {0, 2}
    assert parts[2] == 3 * y
    assert f.degree("x") == 2 and f.degree("s_x") == 0
