from __future__ import annotations

import json
import os
from math import comb, gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wbring.exactmath import MultiPoly, NonUnitError, QPoly, is_numerical
from wbring.necklace import necklace_poly
from wbring.poset import build_cyclic, build_finite_abelian, divisors
from wbring.rings import (
    INTEGERS,
    POLY_POWER,
    RATIONALS,
    SYM,
    IntegersMod,
    RingVector,
    StructureTable,
    convert,
    ghost_invert,
    ghost_necklace,
    ghost_witt,
    nr_add,
    nr_mul,
    p_coeffs,
    p_coeffs_meet,
    structure_table,
    witt_add,
    witt_add_ghost,
    witt_mul,
    witt_mul_ghost,
    witt_neg,
    xvar,
    yvar,
)
from wbring.verify import s3_marks

Q = MultiPoly.coerce(QPoly.q())
P2 = build_cyclic([1, 2])
P6 = build_cyclic([1, 2, 3, 6])
KLEIN = build_finite_abelian([2, 2])


def vec(P, values, kind="witt", ring=INTEGERS):
    return RingVector.from_list(P, kind, ring, values)


# -- ghost maps ---------------------------------------------------------------


def test_ghost_witt_examples():
    assert ghost_witt(2, vec(P2, [1, 1])).entries == (1, 4)
    # q = 0 keeps only the diagonal term
    assert ghost_witt(0, vec(P6, [1, 2, 3, 4])).entries == (1, 4, 9, 24)
    g = ghost_witt(5, vec(KLEIN, [3, -1, 2, 0, 7]))
    assert g["0,1,2,3"] == 3


def test_ghost_necklace_examples():
    t = MultiPoly.var("t")
    g = ghost_necklace(SYM, vec(P2, [t, 0], "nr", POLY_POWER.with_q()))
    assert g.entries == (t, Q * t**2)
    eg = RingVector.basis(P6, "nr", INTEGERS, "1")
    assert ghost_necklace(3, eg).entries == (1, 3, 9, 243)
    v = vec(P6, [4, -1, 2, 5], "nr")
    assert ghost_necklace(2, v).entries == ghost_necklace(2, v.with_entries(v.entries, kind="nr_hat")).entries


def test_ghost_invert():
    assert ghost_invert(1, vec(P2, [0, 2], "ghost"), "witt").entries == (0, 1)
    with pytest.raises(NonUnitError):
        ghost_invert(1, vec(P2, [0, 2], "ghost", IntegersMod(6)), "witt")


@pytest.mark.parametrize("q", range(-2, 4))
def test_ghost_roundtrip(q):
    import random

    rng = random.Random(q)
    for _ in range(100):
        v = RingVector.random(P6, "witt", INTEGERS, rng)
        assert ghost_invert(q, ghost_witt(q, v), "witt") == v


def test_relation_to_undeformed_ghost():
    v = vec(P6, [2, -1, 3, 1])
    for q in (-3, 2, 5):
        lhs = ghost_witt(q, v).entries
        rhs = ghost_witt(1, vec(P6, [q * c for c in v.entries])).entries
        assert all(a * q == b for a, b in zip(lhs, rhs))


# -- structure polynomials ----------------------------------------------------


def chain_forms(p):
    xG, xU, yG, yU = (MultiPoly.var(n) for n in (xvar("1"), xvar(str(p)), yvar("1"), yvar(str(p))))
    s = xU + yU - Q ** (p - 1) * sum((comb(p, r) * xG**r * yG ** (p - r) for r in range(1, p)), MultiPoly()) / p
    prod = (
        Q ** (p - 1) * (Q ** (p - 1) - 1) / p * xG**p * yG**p
        + Q ** (p - 1) * (xG**p * yU + xU * yG**p)
        + p * xU * yU
    )
    return s, prod


@pytest.mark.parametrize("p", [2, 3, 5])
def test_two_element_chain_closed_form(p):
    t = structure_table(build_cyclic([1, p]))
    s, prod = chain_forms(p)
    assert t.s[1] == s and t.p[1] == prod
    assert t.s[0] == MultiPoly.var(xvar("1")) + MultiPoly.var(yvar("1"))


def test_structure_p2_string():
    t = structure_table(P2)
    assert str(t.p[1]) == "1/2*q^2*x[1]^2*y[1]^2 - 1/2*q*x[1]^2*y[1]^2 + q*x[1]^2*y[2] + q*x[2]*y[1]^2 + 2*x[2]*y[2]"
    assert str(t.iota[1]) == "-q*x[1]^2 - x[2]"


@pytest.mark.parametrize("P", [build_cyclic(divisors(12)), KLEIN, build_finite_abelian([4]), s3_marks()], ids=str)
def test_structure_integrality(P):
    t = structure_table(P)
    assert t.integrality_failures() == []
    assert all(is_numerical(c) for c in t.coefficients())


def test_scaling_identities():
    # sums and negatives rescale linearly; products do not
    t = structure_table(P6)
    classical = t.at(1)
    qx = {xvar(l): Q * MultiPoly.var(xvar(l)) for l in P6.labels}
    qy = {yvar(l): Q * MultiPoly.var(yvar(l)) for l in P6.labels}
    for u in range(len(P6)):
        assert t.s[u] * Q == classical.s[u].subs({**qx, **qy})
        assert t.iota[u] * Q == classical.iota[u].subs(qx)


def test_disk_cache_roundtrip(tmp_path, monkeypatch):
    monkeypatch.setenv("WBR_CACHE_DIR", str(tmp_path))
    P = build_cyclic([1, 3, 9])
    t = structure_table(P, use_disk=True)
    files = os.listdir(tmp_path)
    assert len(files) == 1 and files[0].startswith("structure-v1-")
    doc = json.loads((tmp_path / files[0]).read_text())
    back = StructureTable.from_json(doc)
    assert (back.poset, back.q, back.s, back.p, back.iota) == (t.poset, t.q, t.s, t.p, t.iota)


# -- Witt operations ----------------------------------------------------------


def test_witt_add_example():
    a = vec(P2, [1, 0])
    assert witt_add(2, a, a).entries == (2, -2)


def test_classical_q1_matches_ghost():
    a, b = vec(P6, [1, 2, -1, 3]), vec(P6, [0, 1, 1, -2])
    for op, ref in ((witt_add, witt_add_ghost), (witt_mul, witt_mul_ghost)):
        assert op(1, a, b) == ref(1, a, b)


small = st.integers(-4, 4)
AXIOM_POSETS = [build_cyclic([1, 2, 4]), P6, KLEIN]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(AXIOM_POSETS), st.integers(-3, 4), st.data())
def test_witt_ring_axioms(P, q, data):
    vals = st.lists(small, min_size=len(P), max_size=len(P))
    a, b, c = (vec(P, data.draw(vals)) for _ in range(3))
    add = lambda u, v: witt_add(q, u, v)  # noqa: E731
    mul = lambda u, v: witt_mul(q, u, v)  # noqa: E731
    assert add(a, b) == add(b, a)
    assert mul(a, b) == mul(b, a)
    assert add(add(a, b), c) == add(a, add(b, c))
    assert mul(mul(a, b), c) == mul(a, mul(b, c))
    assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))
    assert add(a, witt_neg(q, a)) == vec(P, [0] * len(P))
    ga, gb = ghost_witt(q, a).entries, ghost_witt(q, b).entries
    assert ghost_witt(q, mul(a, b)).entries == tuple(x * y for x, y in zip(ga, gb))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([4, 6, 9]), st.integers(-3, 4), st.data())
def test_witt_functoriality_mod_m(m, q, data):
    P = P6
    vals = st.lists(st.integers(-20, 20), min_size=4, max_size=4)
    a, b = vec(P, data.draw(vals)), vec(P, data.draw(vals))
    R = IntegersMod(m)
    red = lambda v: RingVector.from_list(P, "witt", R, v.entries)  # noqa: E731
    assert red(witt_add(q, a, b)) == witt_add(q, red(a), red(b))
    assert red(witt_mul(q, a, b)) == witt_mul(q, red(a), red(b))


# -- necklace side ------------------------------------------------------------


def test_metropolis_rota_product():
    P = build_cyclic(divisors(12))
    for d in P.index:
        for e in P.index:
            prod = nr_mul(1, RingVector.basis(P, "nr", INTEGERS, str(d)), RingVector.basis(P, "nr", INTEGERS, str(e)))
            want = {str(d * e // gcd(d, e)): gcd(d, e)}
            assert prod == RingVector.from_dict(P, "nr", INTEGERS, want)


def test_unit_at_q1():
    a = vec(P6, [3, -1, 4, 1], "nr")
    one = RingVector.basis(P6, "nr", INTEGERS, "1")
    assert nr_mul(1, one, a) == a
    assert ghost_necklace(1, one).entries == (1, 1, 1, 1)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([P6, KLEIN, build_cyclic(divisors(8))]), st.integers(-3, 4), st.data())
def test_necklace_ghost_is_multiplicative(P, q, data):
    vals = st.lists(small, min_size=len(P), max_size=len(P))
    a, b = vec(P, data.draw(vals), "nr"), vec(P, data.draw(vals), "nr")
    ab = nr_mul(q, a, b)
    assert ab == nr_mul(q, a, b, route="meet")
    ga, gb = ghost_necklace(q, a).entries, ghost_necklace(q, b).entries
    assert ghost_necklace(q, ab).entries == tuple(x * y for x, y in zip(ga, gb))
    assert ghost_necklace(q, nr_add(a, b)).entries == tuple(x + y for x, y in zip(ga, gb))


def test_poly_power_necklace_product():
    t = MultiPoly.var("t")
    R = POLY_POWER.with_q()
    a = vec(P2, [t, 0], "nr", R)
    prod = nr_mul(1, a, a)
    g = ghost_necklace(1, a).entries
    assert ghost_necklace(1, prod).entries == tuple(x * x for x in g)
    assert prod[0] == t**2


def test_convert_roundtrip():
    w = vec(P6, [1, 2, 3, 4])
    for q in (-2, 1, 2, 3):
        for kind in ("nr", "nr_hat"):
            assert convert(q, convert(q, w, kind), "witt") == w


# -- P coefficients -----------------------------------------------------------


def test_pcoeff_examples():
    t = p_coeffs(P2)
    q = QPoly.q()
    assert t.get(1, 0, 0) == (q**2 - q) / 2
    P12 = build_cyclic(divisors(12))
    t12 = p_coeffs(P12)
    for n in range(len(P12)):
        assert t12.get(n, n, n) == QPoly.const(P12.index[n])


def _closed_form(i, j, n):
    g, l = gcd(i, j), i * j // gcd(i, j)
    if n % l:
        return QPoly()
    k = (i + j) // g - 1
    val = necklace_poly(n // l).subs({"x": Q**k})
    return val.terms.get((), QPoly()).divide_by_q() * g


@pytest.mark.parametrize("N", range(1, 13))
def test_pcoeff_cyclic_closed_form(N):
    P = build_cyclic(divisors(N))
    t = p_coeffs(P)
    for u, n in enumerate(P.index):
        for v, i in enumerate(P.index):
            for w, j in enumerate(P.index):
                if n % i == 0 and n % j == 0:
                    assert t.get(u, v, w) == _closed_form(i, j, n), (n, i, j)


@pytest.mark.parametrize("P", [KLEIN, build_finite_abelian([4]), build_finite_abelian([2, 4]), s3_marks()], ids=str)
def test_pcoeff_properties(P):
    t = p_coeffs(P)
    assert t.integrality_failures() == []
    assert t.is_symmetric()
    assert t.recursion_failures() == []
    if P.abelian:
        assert t.entries == p_coeffs_meet(P).entries
