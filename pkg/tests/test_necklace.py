from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wbring.exactmath import GuardExceeded, MultiPoly, QPoly, is_numerical_multi
from wbring.necklace import (
    necklace_poly,
    orbit_sum,
    qword_aperiodic_count,
    qword_aperiodic_words,
    verify_first_main_formula,
)
from wbring.poset import build_cyclic, build_finite_abelian, divisors

Q = MultiPoly.coerce(QPoly.q())
x = MultiPoly.var("x")

# counts by brute-force enumeration, indexed [q-1][m-1][n-1]
QWORD_TABLE = [
    [[1, 0, 0, 0, 0, 0], [2, 1, 2, 3, 6, 9], [3, 3, 8, 18, 48, 116]],
    [[1, 0, 0, 0, 0, 0], [2, 2, 8, 26, 96, 320], [3, 6, 32, 150, 768, 3832]],
    [[1, 0, 0, 0, 0, 0], [2, 3, 18, 90, 486, 2475], [3, 9, 72, 513, 3888, 29268]],
]


def test_orbit_sum_small_cyclic():
    P = build_cyclic([1, 2, 3, 6])
    assert orbit_sum(P, 0).value == x
    assert orbit_sum(P, "2").value == Q * (x**2 - x) / 2
    six = (Q**5 * x**6 - Q**3 * x**3 - Q**3 * x**2 + (2 * Q**3 - Q**5) * x) / 6
    assert orbit_sum(P, "6").value == six
    assert orbit_sum(P, "6").value.specialize_q(1) == (x**6 - x**3 - x**2 + x) / 6


def test_orbit_sum_klein_trivial_subgroup():
    K = build_finite_abelian([2, 2])
    want = (Q**3 * x**4 - 3 * Q**2 * x**2 + 3 * Q**2 * x - Q**3 * x) / 4
    assert orbit_sum(K, 4).value == want


def test_power_sum_form():
    f = orbit_sum(build_cyclic([1, 2]), 1, 2)
    assert f.value == Q * MultiPoly.var("x1") * MultiPoly.var("x2")


@pytest.mark.parametrize("n", range(1, 25))
def test_necklace_numerical(n):
    assert is_numerical_multi(necklace_poly(n))


def test_qword_examples():
    assert qword_aperiodic_count(1, 2, 3) == 2
    assert qword_aperiodic_count(2, 1, 2) == 0
    assert qword_aperiodic_words(2, 1, 2) == 0
    assert qword_aperiodic_count(3, 2, 1) == 2


def test_qword_table_frozen():
    got = [[[qword_aperiodic_count(q, m, n) for n in range(1, 7)] for m in (1, 2, 3)] for q in (1, 2, 3)]
    assert got == QWORD_TABLE


@pytest.mark.parametrize("q", [1, 2, 3])
def test_qword_matches_closed_form(q):
    for m in (1, 2, 3):
        for n in range(1, 7):
            assert necklace_poly(n).subs({"q": q, "x": m}).constant_value() == QWORD_TABLE[q - 1][m - 1][n - 1]


def test_qword_guard():
    with pytest.raises(GuardExceeded):
        qword_aperiodic_count(10, 10, 9)


@pytest.mark.parametrize(
    "P,v,m",
    [
        (build_cyclic([1, 2]), 1, 2),
        (build_cyclic([1, 2]), 0, 3),
        (build_finite_abelian([2, 2]), 4, 2),
        (build_cyclic(divisors(12)), 5, 2),
        (build_finite_abelian([4]), 2, 3),
    ],
)
def test_first_main_formula(P, v, m):
    assert verify_first_main_formula(P, v, m)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 12), st.integers(-4, 4), st.integers(-4, 4))
def test_necklace_integer_values(n, qv, xv):
    val = necklace_poly(n).subs({"q": qv, "x": xv}).constant_value()
    assert val == int(val)
