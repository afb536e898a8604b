from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wbring.exactmath import (
    MultiPoly,
    QPoly,
    binomial_basis,
    is_numerical,
    is_numerical_multi,
    prime_divisors,
)

q = QPoly.q()
Q = MultiPoly.coerce(q)
x = MultiPoly.var("x")
y = MultiPoly.var("y")


def test_binomial_basis_examples():
    assert binomial_basis(q**2).coeffs == (0, 1, 2)
    assert binomial_basis(QPoly()).coeffs == (0,)
    assert binomial_basis((q**2 - q) / 2).coeffs == (0, 0, 1)


def test_is_numerical_examples():
    assert is_numerical((q**2 - q) / 2)
    assert not is_numerical(q / 2)
    assert is_numerical(3 * q**5 - 7 * q + 11)
    # integer valued but not integer coefficients
    assert is_numerical(q * (q - 1) * (q - 2) / 6)
    assert not is_numerical(q * (q - 1) / 4)


def test_is_numerical_multi_examples():
    assert is_numerical_multi(Q * x * (x - 1) / 2)
    assert not is_numerical_multi(x**2 / 3)
    assert is_numerical_multi(x * y)
    assert not is_numerical_multi(Q * x / 2)


def test_qpoly_arithmetic_and_json():
    p = (q**3 - q) / 6 + Fraction(1, 2)
    assert p.evaluate(2) == Fraction(3, 2)
    assert QPoly.from_json(p.to_json()) == p
    assert (p * 0).is_zero()
    assert str((q**2 - q) / 2) == "1/2*q^2 - 1/2*q"


def test_multipoly_ops():
    f = (x + y) ** 2
    assert f.evaluate({"x": 2, "y": 3}) == 25
    assert f.subs({"y": x}) == 4 * x**2
    assert MultiPoly.from_json(f.to_json()) == f
    g = (Q * x**2 - Q * x) / 2
    assert g.specialize_q(3) == (3 * x**2 - 3 * x) / 2
    assert g.denominator_primes() == {2}
    assert f.scale_exponents(["x"], 2) == (x**2 + y) ** 2


def test_prime_divisors():
    assert prime_divisors(12) == {2, 3}
    assert prime_divisors(-30) == {2, 3, 5}
    assert prime_divisors(1) == set()


coeffs = st.lists(st.fractions(max_denominator=6).map(lambda c: c.limit_denominator(6)), max_size=5)


@settings(max_examples=200, deadline=None)
@given(coeffs)
def test_numerical_implies_integer_values(cs):
    p = QPoly(dict(enumerate(cs)))
    vals_integral = all(Fraction(p.evaluate(n)).denominator == 1 for n in range(-50, 51))
    if is_numerical(p):
        assert vals_integral
    # degree + 1 consecutive integer values decide numericality
    if vals_integral:
        assert is_numerical(p)


@settings(max_examples=100, deadline=None)
@given(coeffs)
def test_binomial_expansion_reproduces_values(cs):
    p = QPoly(dict(enumerate(cs)))
    b = binomial_basis(p)
    assert all(b.evaluate(n) == p.evaluate(n) for n in range(-5, 6))


@settings(max_examples=100, deadline=None)
@given(coeffs, coeffs)
def test_qpoly_ring_laws(a, b):
    pa, pb = QPoly(dict(enumerate(a))), QPoly(dict(enumerate(b)))
    assert pa * pb == pb * pa
    assert (pa + pb) - pb == pa
    assert (pa * pb).evaluate(3) == pa.evaluate(3) * pb.evaluate(3)
