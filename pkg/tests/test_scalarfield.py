from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from orthobethe.errors import PoleError, UnboundedError
from orthobethe.scalarfield import (
    BACKEND, Polynomial, Q, RationalFunction, coeff_at_infinity, format_rational, is_exact, poly_gcd, rf_eval,
    to_complex,
)

small = st.fractions(min_value=-20, max_value=20, max_denominator=12)
coeffs = st.lists(small, min_size=0, max_size=5)


def P(xs):
    return Polynomial(Q(x.numerator, x.denominator) for x in xs)


def naive_eval(cs, u):
    return sum(Fraction(c) * Fraction(u) ** k for k, c in enumerate(cs))


def test_parse_and_format():
    assert Q("3/7") == Q(3, 7)
    assert Q(" -4 ") == Q(-4)
    assert format_rational(Q(6, 4)) == "3/2"
    assert format_rational(Q(5)) == "5"
    assert format_rational(3) == "3"
    with pytest.raises(ZeroDivisionError):
        Q("1/0")
    with pytest.raises(TypeError):
        Q(0.5)
    with pytest.raises(ValueError):
        Q("")
    assert BACKEND in ("gmpy2", "fraction")


def test_to_complex():
    assert to_complex(Q(1, 4)) == 0.25 + 0j
    assert to_complex(2j) == 2j
    assert not is_exact(0.5)


@given(coeffs, coeffs, small)
def test_polynomial_ring_ops_match_pointwise(a, b, u):
    pa, pb = P(a), P(b)
    uq = Q(u.numerator, u.denominator)
    assert Fraction(str((pa + pb)(uq))) == naive_eval(a, u) + naive_eval(b, u)
    assert Fraction(str((pa * pb)(uq))) == naive_eval(a, u) * naive_eval(b, u)
    assert Fraction(str((pa - pb)(uq))) == naive_eval(a, u) - naive_eval(b, u)


@given(coeffs, coeffs.filter(lambda xs: any(xs)))
def test_long_division_identity(a, b):
    pa, pb = P(a), P(b)
    quo, rem = pa.divmod(pb)
    assert quo * pb + rem == pa
    assert rem.degree < pb.degree or not rem


@given(coeffs, small)
def test_shift(a, s):
    p = P(a)
    sq = Q(s.numerator, s.denominator)
    for u in (Q(0), Q(2, 3), Q(-5)):
        assert p.shift(sq)(u) == p(u + sq)


def test_gcd_known():
    a = Polynomial.linear(Q(1)) * Polynomial.linear(Q(2))
    b = Polynomial.linear(Q(2)) * Polynomial.linear(Q(-3))
    assert poly_gcd(a, b) == Polynomial.linear(Q(2))
    assert poly_gcd(a, Polynomial()) == a.monic()


@given(coeffs, coeffs.filter(lambda xs: any(xs)))
def test_gcd_divides_both(a, b):
    g = poly_gcd(P(a), P(b))
    assert not P(a).divmod(g)[1]
    assert not P(b).divmod(g)[1]


def test_rational_function_canonical():
    f = RationalFunction.from_roots(Q(2), zeros=[Q(1), Q(3)], poles=[Q(1), Q(5)])
    assert f.den == Polynomial.linear(Q(5))
    assert f.num == Polynomial((Q(-6), Q(2)))
    assert f == RationalFunction.from_roots(Q(2), zeros=[Q(3)], poles=[Q(5)])
    assert RationalFunction(Polynomial(), Polynomial.linear(Q(1))) == 0


@given(st.lists(small, min_size=1, max_size=3, unique=True), st.lists(small, min_size=1, max_size=3), small)
def test_rational_arithmetic_pointwise(poles, residues, u):
    poles = [Q(p.numerator, p.denominator) for p in poles]
    uq = Q(u.numerator, u.denominator) + Q(1, 997)
    terms = [RationalFunction.from_roots(Q(r.numerator, r.denominator), [], [p])
             for r, p in zip(residues, poles)]
    total = sum(terms[1:], terms[0])
    expect = sum(Q(r.numerator, r.denominator) / (uq - p) for r, p in zip(residues, poles))
    assert total(uq) == expect
    prod = terms[0] * terms[-1]
    assert prod(uq) == terms[0](uq) * terms[-1](uq)


@given(st.lists(small, min_size=1, max_size=3, unique=True), st.lists(small, min_size=3, max_size=3),
       st.integers(min_value=0, max_value=6))
def test_coeff_at_infinity_partial_fractions(poles, residues, k):
    """Oracle: sum r/(u - a) has u^{-k} coefficient sum r a^{k-1}; the constant term is k = 0."""
    poles = [Q(p.numerator, p.denominator) for p in poles]
    res = [Q(r.numerator, r.denominator) for r in residues[:len(poles)]]
    f = RationalFunction.constant(Q(7))
    for r, p in zip(res, poles):
        f = f + RationalFunction.from_roots(r, [], [p])
    expect = Q(7) if k == 0 else sum((r * p ** (k - 1) for r, p in zip(res, poles)), Q(0))
    assert coeff_at_infinity(f, k) == expect


def test_coeff_at_infinity_errors():
    with pytest.raises(UnboundedError):
        coeff_at_infinity(RationalFunction(Polynomial.linear(Q(0))), 0)
    with pytest.raises(ValueError):
        coeff_at_infinity(RationalFunction.constant(Q(1)), -1)


def test_pole_evaluation():
    f = RationalFunction.from_roots(Q(1), [], [Q(2)])
    with pytest.raises(PoleError):
        rf_eval(f, Q(2))
    assert abs(f(2.5 + 0j) - 2) < 1e-14
