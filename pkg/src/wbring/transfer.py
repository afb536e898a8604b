"""Induction, q-restriction, the cyclic Frobenius and the q-Teichmueller map.

All transfer maps are modelled for abelian posets only. For a subgroup ``U`` the
poset of its subgroups is :meth:`GroupPoset.subposet`, which keeps the parent's
labels and measures indices relative to ``U``.
"""
from __future__ import annotations

import random
from functools import lru_cache

from .exactmath import IntegralityError, MultiPoly, Q_VAR, QPoly, is_numerical
from .necklace import necklace_poly
from .poset import GroupPoset, TwistedMatrix, build_cyclic, divisors, mu_q, zeta_q
from .rings import (
    INTEGERS,
    SYM,
    AdamsRing,
    IntegerRing,
    PolyRing,
    RationalRing,
    RATIONALS,
    RingVector,
    _is_sym,
    nr_mul,
    p_coeffs,
)

__all__ = [
    "induction_matrix",
    "restriction_matrix",
    "ghost_restriction_matrix",
    "restriction_intertwines",
    "apply_matrix",
    "induce",
    "q_restrict",
    "frobenius_cyclic",
    "verschiebung_cyclic",
    "orbit_sum_value",
    "tau",
    "tau_inverse",
    "witt_restrict",
    "witt_induce",
    "lenart_Q",
    "lenart_Q_with_gcd",
    "verify_mackey_frobenius",
]


def _require_abelian(poset: GroupPoset):
    if not poset.abelian:
        raise ValueError("transfer maps are modelled for abelian posets only")


def _pos(poset: GroupPoset, u) -> int:
    return u if isinstance(u, int) and not isinstance(u, bool) else poset.position(u)


# --------------------------------------------------------------------------
# matrices
# --------------------------------------------------------------------------


def induction_matrix(poset: GroupPoset, u) -> TwistedMatrix:
    """0/1 matrix taking vectors on the subgroups of ``U`` to vectors on the poset."""
    _require_abelian(poset)
    sub, emb = poset.subposet(_pos(poset, u))
    return TwistedMatrix(len(poset), len(sub), {(g, i): (1, 1) for i, g in enumerate(emb)})


def restriction_matrix(poset: GroupPoset, u, check: bool = True) -> TwistedMatrix:
    """q-restriction to the subgroups of ``U``.

    Entry ``(V, W)`` is ``sum_S mu_U(V,S) marks[S][W] q^((W:S)-1)`` over ``V <= S <= U``,
    with Adams power ``(W:V)``.
    """
    _require_abelian(poset)
    upos = _pos(poset, u)
    sub, emb = poset.subposet(upos)
    mu = mu_q(sub, twisted=False)
    ent = {}
    for i, v in enumerate(emb):
        for w in poset.below(v):
            acc = QPoly()
            for s_i in sub.below(i):
                s = emb[s_i]
                m = mu.coeff(i, s_i)
                if m.is_zero() or not poset.marks[s][w]:
                    continue
                acc = acc + m * QPoly.monomial(poset.marks[s][w], poset.rel_index(w, s) - 1)
            if not acc.is_zero():
                ent[(i, w)] = (acc, poset.rel_index(w, v))
    mat = TwistedMatrix(len(sub), len(poset), ent)
    if check:
        bad = [(sub.labels[i], poset.labels[w]) for (i, w), (c, _) in mat.entries.items() if not is_numerical(c)]
        if bad:
            raise IntegralityError(f"non-numerical restriction coefficients at {bad[:5]}")
    return mat


def ghost_restriction_matrix(poset: GroupPoset, u) -> TwistedMatrix:
    """Componentwise restriction of ghost vectors (picks the entries below ``U``)."""
    sub, emb = poset.subposet(_pos(poset, u))
    return TwistedMatrix(len(sub), len(poset), {(i, g): (1, 1) for i, g in enumerate(emb)})


def restriction_intertwines(poset: GroupPoset, u) -> bool:
    """``zeta~_U . qRes == R . zeta~_G`` as twisted matrices over Q[q]."""
    upos = _pos(poset, u)
    sub, _ = poset.subposet(upos)
    lhs = zeta_q(sub) @ restriction_matrix(poset, upos)
    rhs = ghost_restriction_matrix(poset, upos) @ zeta_q(poset)
    return lhs == rhs


def apply_matrix(mat: TwistedMatrix, values, ring: AdamsRing, q) -> list:
    """``out[i] = sum_j c_ij(q) * Psi^(k_ij)(values[j])``."""
    out = [ring.zero() for _ in range(mat.nrows)]
    for (i, j), (c, k) in mat.entries.items():
        cv = ring.coerce(c) if _is_sym(q) else ring.from_rational(c.evaluate(int(q)))
        out[i] = ring.add(out[i], ring.mul(cv, ring.psi(k, values[j])))
    return out


def _lift(v: RingVector, q):
    if not _is_sym(q):
        return v.ring, list(v.entries)
    ring = v.ring.with_q()
    return ring, [ring.coerce(x) for x in v.entries]


def induce(poset: GroupPoset, u, y: RingVector) -> RingVector:
    """Induction of a necklace vector on the subgroups of ``U`` (q-free)."""
    upos = _pos(poset, u)
    mat = induction_matrix(poset, upos)
    out = apply_matrix(mat, list(y.entries), y.ring, 1)
    return RingVector(poset, y.kind, y.ring, tuple(out))


def q_restrict(q, poset: GroupPoset, u, x: RingVector) -> RingVector:
    """q-restriction of a necklace vector to the subgroups of ``U``."""
    upos = _pos(poset, u)
    sub, _ = poset.subposet(upos)
    ring, vals = _lift(x, q)
    mat = restriction_matrix(poset, upos)
    if x.kind == "nr_hat":
        mat = mat.untwisted()
    return RingVector(sub, x.kind, ring, tuple(apply_matrix(mat, vals, ring, q)))


# --------------------------------------------------------------------------
# cyclic Frobenius and Verschiebung
# --------------------------------------------------------------------------


def _cyclic_top(poset: GroupPoset) -> int:
    if poset.source.get("kind") != "cyclic":
        raise ValueError("expected a cyclic poset")
    return max(poset.index)


def frobenius_cyclic(q, r: int, v: RingVector) -> RingVector:
    """q-restriction to the index-``r`` subgroup, relabelled by relative index.

    A vector on the divisors of ``N`` yields a vector on the divisors of ``N/r``.
    """
    N = _cyclic_top(v.poset)
    if r < 1 or N % r:
        raise ValueError(f"truncation too small: {r} does not divide {N}")
    res = q_restrict(q, v.poset, str(r), v)
    target = build_cyclic(divisors(N // r))
    return RingVector(target, res.kind, res.ring, res.entries)


def verschiebung_cyclic(r: int, y: RingVector, n_top: int | None = None) -> RingVector:
    """Induction from the index-``r`` subgroup: component ``d`` moves to ``r*d``."""
    N = _cyclic_top(y.poset)
    top = n_top or N * r
    if top % (N * r):
        raise ValueError("target truncation must contain r times the source")
    target = build_cyclic(divisors(top))
    vals = [y.ring.zero()] * len(target)
    for d, val in zip(y.poset.index, y.entries):
        vals[target.position(str(d * r))] = val
    return RingVector(target, y.kind, y.ring, tuple(vals))


# --------------------------------------------------------------------------
# Teichmueller map
# --------------------------------------------------------------------------


def _rational_ring(ring: AdamsRing) -> AdamsRing:
    """A ring over Q sharing the carrier, used for intermediate rational terms."""
    if isinstance(ring, (IntegerRing, RationalRing)):
        return RATIONALS
    if isinstance(ring, PolyRing):
        if ring.code.startswith("Zt") and not ring.line_vars:
            raise ValueError(
                "Zt with trivial Adams operations is not a binomial ring; "
                "the Teichmueller map is not defined over it"
            )
        return PolyRing("Q~" + ring.code, ring.line_vars, None)
    raise ValueError(f"the Teichmueller map needs a binomial or Zt_power ring, not {ring.code}")


def orbit_sum_value(poset: GroupPoset, w: int, r, ring: AdamsRing, q) -> object:
    """``M_G(r, W) = sum_S mu(W,S) q^((G:S)-1) (Psi^((S:W)) r)^((G:S))`` in ``ring``."""
    mu = mu_q(poset, twisted=False)
    qe = ring.qelem(q)
    acc = ring.zero()
    for s in poset.below(w):
        m = mu.coeff(w, s)
        gs = poset.index[s]
        cm = ring.coerce(m) if _is_sym(q) else ring.from_rational(m.evaluate(int(q)))
        term = ring.mul(cm, ring.mul(ring.pow(qe, gs - 1), ring.pow(ring.psi(poset.rel_index(s, w), r), gs)))
        acc = ring.add(acc, term)
    return acc


def _finish(ring: AdamsRing, vals) -> tuple:
    """Move rational intermediates back into ``ring``; raises on non-integral values."""
    if isinstance(ring, IntegerRing):
        return tuple(ring.from_rational(x) for x in vals)
    if isinstance(ring, PolyRing):
        return tuple(ring._checked(MultiPoly.coerce(x)) for x in vals)
    return tuple(vals)


def _tau_parts(poset: GroupPoset):
    _require_abelian(poset)
    return [poset.subposet(u) for u in range(len(poset))]


def tau(q, a: RingVector) -> RingVector:
    """q-Teichmueller map: ``tau(a)(W) = sum_{U >= W} M_U(a(U), W)``."""
    if a.kind != "witt":
        raise ValueError("tau expects a witt vector")
    P = a.poset
    ring, vals = _lift(a, q)
    work = _rational_ring(ring)
    out = [work.zero() for _ in range(len(P))]
    for u, (sub, emb) in enumerate(_tau_parts(P)):
        r = work.coerce(vals[u])
        if work.is_zero(r):
            continue
        for i, w in enumerate(emb):
            out[w] = work.add(out[w], orbit_sum_value(sub, i, r, work, q))
    return RingVector(P, "nr", ring, _finish(ring, out))


def tau_inverse(q, v: RingVector) -> RingVector:
    """Inverse of :func:`tau` by forward substitution down the poset."""
    if v.kind != "nr":
        raise ValueError("tau_inverse expects an nr vector")
    P = v.poset
    ring, vals = _lift(v, q)
    work = _rational_ring(ring)
    parts = _tau_parts(P)
    x = [None] * len(P)
    for w in range(len(P)):
        rest = work.coerce(vals[w])
        for u in range(w):
            if not P.contains(w, u):
                continue
            sub, emb = parts[u]
            rest = work.sub(rest, orbit_sum_value(sub, emb.index(w), x[u], work, q))
        x[w] = rest
    return RingVector(P, "witt", ring, _finish(ring, x))


def witt_restrict(q, poset: GroupPoset, u, a: RingVector) -> RingVector:
    """``f^q_U = tau_U^-1 . qRes_U . tau_G`` on Witt vectors."""
    return tau_inverse(q, q_restrict(q, poset, u, tau(q, a)))


def witt_induce(q, poset: GroupPoset, u, b: RingVector) -> RingVector:
    """``v^q_U = tau_G^-1 . Ind_U . tau_U`` on Witt vectors."""
    return tau_inverse(q, induce(poset, u, tau(q, b)))


# --------------------------------------------------------------------------
# Lenart coefficients
# --------------------------------------------------------------------------


def _lenart(r: int, n: int, d: int, with_gcd: bool) -> QPoly:
    from math import gcd, lcm

    if r < 1 or n < 1 or d < 1:
        raise ValueError("r, n and d must be positive")
    if n % d:
        raise ValueError(f"{d} does not divide {n}")
    if r == 1:
        return QPoly.const(1 if n == d else 0)
    P = build_cyclic(divisors(n))
    pc = p_coeffs(P)
    top = P.position(str(n))
    dpos = P.position(str(d))
    acc = QPoly()
    for i in divisors(n):
        if n % lcm(i, d):
            continue
        c = pc.get(top, P.position(str(i)), dpos)
        if c.is_zero():
            continue
        m = necklace_poly(i).subs({"x": MultiPoly.var(Q_VAR, r - 2)})
        mq = m.terms.get((), QPoly())
        acc = acc + c * mq * (gcd(i, d) if with_gcd else 1)
    return acc * QPoly.q()


@lru_cache(maxsize=None)
def lenart_Q(r: int, n: int, d: int) -> QPoly:
    """``Q_{r,n,d}(q) = q sum_i P^n_{i,d}(q) M(q^(r-2), i)``; Kronecker delta for ``r = 1``.

    This is the variant that satisfies the Frobenius expansion identity; see
    :func:`lenart_Q_with_gcd` for the form carrying an extra ``gcd(i, d)``.
    """
    return _lenart(r, n, d, False)


@lru_cache(maxsize=None)
def lenart_Q_with_gcd(r: int, n: int, d: int) -> QPoly:
    return _lenart(r, n, d, True)


# --------------------------------------------------------------------------
# Mackey identities
# --------------------------------------------------------------------------


def _mackey_b(poset: GroupPoset, u: int, v: int) -> bool:
    z = poset.meet[u][v]
    j = poset.join[u][v]
    lhs = restriction_matrix(poset, u) @ induction_matrix(poset, v)
    sub_u, emb_u = poset.subposet(u)
    sub_v, emb_v = poset.subposet(v)
    ind = induction_matrix(sub_u, emb_u.index(z))
    res = restriction_matrix(sub_v, emb_v.index(z))
    if sub_u.subposet(emb_u.index(z))[0].labels != sub_v.subposet(emb_v.index(z))[0].labels:
        return False
    rhs = (ind @ res).scale(poset.index[j])
    return lhs == rhs


def _mackey_c(poset: GroupPoset, u: int, v: int) -> bool:
    """``phi~(Ind_V y)(U) = (G:V) phi~_U(qRes^V_U y)(U)`` if ``U <= V``, else 0."""
    lhs = zeta_q(poset) @ induction_matrix(poset, v)
    row = {j: e for (i, j), e in lhs.entries.items() if i == u}
    if not poset.contains(u, v):
        return not row
    sub_v, emb_v = poset.subposet(v)
    ui = emb_v.index(u)
    sub_u, _ = sub_v.subposet(ui)
    rhs = (zeta_q(sub_u) @ restriction_matrix(sub_v, ui)).scale(poset.index[v])
    want = {j: e for (i, j), e in rhs.entries.items() if i == 0}
    return row == want


def _mackey_a(poset: GroupPoset, u: int, q: int, trials: int, rng: random.Random) -> bool:
    sub, _ = poset.subposet(u)
    for _ in range(trials):
        x = RingVector.random(poset, "nr", INTEGERS, rng, 4)
        y = RingVector.random(sub, "nr", INTEGERS, rng, 4)
        lhs = nr_mul(q, induce(poset, u, y), x)
        rhs = induce(poset, u, nr_mul(q, y, q_restrict(q, poset, u, x)))
        if lhs != rhs:
            return False
    return True


def verify_mackey_frobenius(poset: GroupPoset, u, v, q=SYM, trials: int = 10, seed: int = 0) -> dict:
    """Check the Frobenius reciprocity (a), double-coset (b) and ghost (c) identities.

    (b) and (c) are matrix identities over Q[q]; (a) is checked on random integer
    vectors at the given integer ``q`` (at ``q = 2`` when ``q`` is symbolic).
    """
    _require_abelian(poset)
    upos, vpos = _pos(poset, u), _pos(poset, v)
    rng = random.Random(seed)
    qa = 2 if _is_sym(q) else int(q)
    checks = {
        "a": _mackey_a(poset, upos, qa, trials, rng),
        "b": _mackey_b(poset, upos, vpos),
        "c": _mackey_c(poset, upos, vpos),
    }
    return {
        "identity": "mackey",
        "poset": poset.describe(),
        "params": {"U": poset.labels[upos], "V": poset.labels[vpos], "q": q if _is_sym(q) else int(q)},
        "status": "pass" if all(checks.values()) else "fail",
        "checks": checks,
    }
