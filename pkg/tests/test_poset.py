from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wbring.exactmath import QPoly
from wbring.poset import (
    PosetError,
    build_cyclic,
    build_finite_abelian,
    divisors,
    load_marks,
    mu_q,
    poset_from_json,
    zeta_q,
)
from wbring.verify import S3_MARKS, s3_marks

q = QPoly.q()


def grid(mat, n):
    return [[mat.coeff(i, j) for j in range(n)] for i in range(n)]


def test_cyclic_builders():
    P = build_cyclic([1, 2])
    assert P.marks == ((1, 0), (1, 2))
    assert build_cyclic([1]).marks == ((1,),)
    chain = build_cyclic([1, 2, 4])
    assert chain.index == (1, 2, 4)
    # G sits at the bottom of the orbit-type order
    assert [chain.leq[0][2], chain.leq[1][2], chain.leq[2][0]] == [True, True, False]
    assert chain.below(2) == [0, 1, 2] and chain.contains(2, 1)
    with pytest.raises(PosetError):
        build_cyclic([1, 4])  # not divisor closed


def test_klein_and_z4():
    K = build_finite_abelian([2, 2])
    assert len(K) == 5 and K.index == (1, 2, 2, 2, 4)
    assert K.marks[4] == (1, 2, 2, 2, 4)
    Z4 = build_finite_abelian([4])
    assert Z4.index == (1, 2, 4) and Z4.marks == build_cyclic([1, 2, 4]).marks
    assert build_finite_abelian([2]).marks == ((1, 0), (1, 2))


def test_s3_marks_diagonal():
    S = s3_marks()
    assert S.index == (1, 2, 3, 6)
    # (N(V):V) for S3, C3, C2, 1
    assert [S.marks[i][i] for i in range(4)] == [1, 2, 1, 6]
    assert not S.abelian


def test_load_marks_rejects_bad_tables():
    with pytest.raises(PosetError):
        load_marks({"labels": ["a", "b"], "index": [1, 2], "marks": [[1, 1], [1, 2]]})
    with pytest.raises(PosetError):
        load_marks({"labels": ["a", "b", "c"], "index": [1, 2, 3], "marks": [[1, 0, 0], [1, 2, 0], [1, 1, 3]]})


def test_zeta_examples():
    Z = zeta_q(build_cyclic([1, 2]))
    assert grid(Z, 2) == [[QPoly.const(1), QPoly()], [q, QPoly.const(2)]]
    assert Z.adams(1, 0) == 2
    Z6 = zeta_q(build_cyclic([1, 2, 3, 6]))
    assert [Z6.coeff(3, j) for j in range(4)] == [q**5, 2 * q**2, 3 * q, QPoly.const(6)]


def test_mu_examples():
    P = build_cyclic([1, 2])
    assert grid(mu_q(P), 2) == [[QPoly.const(1), QPoly()], [-q / 2, QPoly.const(1) / 2]]
    P6 = build_cyclic([1, 2, 3, 6])
    bold = mu_q(P6).coeff(3, 0) * 6
    assert bold == 2 * q**3 - q**5
    assert bold.evaluate(1) == 1


@pytest.mark.parametrize("n", [1, 2, 4, 6, 8, 12, 16, 30])
def test_zeta_mu_inverse_cyclic(n):
    P = build_cyclic(divisors(n))
    assert (zeta_q(P) @ mu_q(P)).is_identity()
    assert (mu_q(P) @ zeta_q(P)).is_identity()


@pytest.mark.parametrize("inv", [[2, 2], [4], [2, 4], [3, 3], [2, 2, 2]])
def test_zeta_mu_inverse_abelian(inv):
    P = build_finite_abelian(inv)
    assert (zeta_q(P) @ mu_q(P)).is_identity()
    assert (mu_q(P) @ zeta_q(P)).is_identity()


def test_zeta_mu_inverse_s3():
    P = s3_marks()
    assert (zeta_q(P) @ mu_q(P)).is_identity()


def test_json_roundtrip():
    for P in (build_cyclic(divisors(12)), build_finite_abelian([2, 2]), s3_marks()):
        assert poset_from_json(json.loads(json.dumps(P.to_json()))) == P
    assert load_marks(S3_MARKS) == s3_marks()


def test_subposet():
    K = build_finite_abelian([2, 2])
    sub, emb = K.subposet(1)
    assert sub.index == (1, 2) and emb == [1, 4]
    sub, emb = build_cyclic([1, 2, 4]).subposet(1)
    assert sub.labels == ("2", "4") and emb == [1, 2]


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 60))
def test_cyclic_marks_formula(n):
    P = build_cyclic(divisors(n))
    for u, du in enumerate(P.index):
        for v, dv in enumerate(P.index):
            assert P.marks[u][v] == (dv if du % dv == 0 else 0)
