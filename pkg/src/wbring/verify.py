"""Verification suites.

Each suite returns a list of reports ``{identity, poset, params, status, witness?}``
with ``status`` either ``"pass"`` or ``"fail"``. The default parameters are the
desk-scale ones used by ``wbring verify``.
"""
from __future__ import annotations

import random

from .classify import solve_transfer, strict_iso_over_Z
from .exactmath import MultiPoly, is_numerical, is_numerical_multi
from .necklace import necklace_poly, qword_aperiodic_count, verify_first_main_formula
from .poset import GroupPoset, build_cyclic, build_finite_abelian, divisors, load_marks, mu_q
from .rings import (
    INTEGERS,
    POLY_POWER,
    RATIONALS,
    SYM,
    IntegersMod,
    PolyRing,
    RingVector,
    ghost_necklace,
    ghost_witt,
    nr_mul,
    p_coeffs,
    structure_table,
    witt_add,
    witt_mul,
    witt_neg,
)
from .transfer import (
    frobenius_cyclic,
    lenart_Q,
    restriction_intertwines,
    restriction_matrix,
    tau,
    tau_inverse,
    verify_mackey_frobenius,
)

__all__ = ["SUITES", "run_suite", "run_all", "s3_marks", "standard_posets"]

S3_MARKS = {
    "kind": "marks",
    "labels": ["S3", "C3", "C2", "1"],
    "index": [1, 2, 3, 6],
    "marks": [[1, 0, 0, 0], [1, 2, 0, 0], [1, 0, 1, 0], [1, 2, 3, 6]],
}


def s3_marks() -> GroupPoset:
    return load_marks(S3_MARKS)


def standard_posets(nmax: int = 12, nonabelian: bool = True) -> list[GroupPoset]:
    out = [build_cyclic(divisors(n)) for n in range(1, nmax + 1)]
    out += [build_finite_abelian([2, 2]), build_finite_abelian([4])]
    if nonabelian:
        out.append(s3_marks())
    return out


def _report(identity, poset, params, ok, witness=None) -> dict:
    rep = {
        "identity": identity,
        "poset": poset.describe() if isinstance(poset, GroupPoset) else poset,
        "params": params,
        "status": "pass" if ok else "fail",
    }
    if witness is not None and not ok:
        rep["witness"] = witness
    return rep


# --------------------------------------------------------------------------
# integrality
# --------------------------------------------------------------------------


def suite_integrality(nmax: int = 12, rmax: int = 5) -> list[dict]:
    reps = []
    for P in standard_posets(nmax):
        bad = structure_table(P, check=False).integrality_failures()
        reps.append(_report("structure-table-numerical", P, {}, not bad, [list(map(str, b)) for b in bad[:5]]))
        pc = p_coeffs(P, check=False)
        bad = pc.integrality_failures()
        reps.append(_report("p-coefficients-numerical", P, {}, not bad, bad[:5]))
        rec = pc.recursion_failures()
        reps.append(_report("p-coefficients-recursion", P, {}, not rec and pc.is_symmetric(), rec[:5]))
        if P.abelian:
            for u in range(len(P)):
                mat = restriction_matrix(P, u, check=False)
                bad = [
                    (P.labels[w], str(c)) for (i, w), (c, _) in mat.entries.items() if not is_numerical(c)
                ]
                ok = not bad and restriction_intertwines(P, u)
                reps.append(_report("restriction-numerical", P, {"U": P.labels[u]}, ok, bad[:5]))
    bad = []
    for r in range(1, rmax + 1):
        for n in range(1, nmax + 1):
            for d in divisors(n):
                c = lenart_Q(r, n, d)
                if not is_numerical(c):
                    bad.append({"r": r, "n": n, "d": d, "Q": str(c)})
    reps.append(_report("lenart-numerical", "cyclic", {"rmax": rmax, "nmax": nmax}, not bad, bad[:5]))
    return reps


# --------------------------------------------------------------------------
# ring axioms
# --------------------------------------------------------------------------

AXIOM_POSETS = [[1, 2], [1, 2, 4], [1, 2, 3, 6], [1, 2, 4, 8], [1, 2, 3, 4, 6, 12]]


def axiom_posets() -> list[GroupPoset]:
    return [build_cyclic(d) for d in AXIOM_POSETS] + [build_finite_abelian([2, 2]), s3_marks()]


def _axioms(q, a, b, c, zero) -> str | None:
    add = lambda x, y: witt_add(q, x, y)  # noqa: E731
    mul = lambda x, y: witt_mul(q, x, y)  # noqa: E731
    if add(a, b) != add(b, a):
        return "additive commutativity"
    if mul(a, b) != mul(b, a):
        return "multiplicative commutativity"
    if add(add(a, b), c) != add(a, add(b, c)):
        return "additive associativity"
    if mul(mul(a, b), c) != mul(a, mul(b, c)):
        return "multiplicative associativity"
    if mul(a, add(b, c)) != add(mul(a, b), mul(a, c)):
        return "distributivity"
    if add(a, zero) != a:
        return "additive identity"
    if add(a, witt_neg(q, a)) != zero:
        return "additive inverse"
    return None


def _ghost_hom(q, a, b) -> str | None:
    ga, gb = ghost_witt(q, a), ghost_witt(q, b)
    R = ga.ring
    if ghost_witt(q, witt_add(q, a, b)).entries != tuple(R.add(x, y) for x, y in zip(ga.entries, gb.entries)):
        return "ghost of sum"
    if ghost_witt(q, witt_mul(q, a, b)).entries != tuple(R.mul(x, y) for x, y in zip(ga.entries, gb.entries)):
        return "ghost of product"
    if ghost_witt(q, witt_neg(q, a)).entries != tuple(R.neg(x) for x in ga.entries):
        return "ghost of negative"
    return None


def _reduce(v: RingVector, ring) -> RingVector:
    return RingVector.from_list(v.poset, v.kind, ring, v.entries)


def suite_ring_axioms(trials: int = 50, qs=range(-3, 5), moduli=(4, 6, 9), seed: int = 0) -> list[dict]:
    reps = []
    for P in axiom_posets():
        for q in qs:
            rng = random.Random(f"{seed}-{P.key}-{q}")
            zero = RingVector.from_list(P, "witt", INTEGERS, [0] * len(P))
            fail = None
            for _ in range(trials):
                a, b, c = (RingVector.random(P, "witt", INTEGERS, rng, 3) for _ in range(3))
                why = _ghost_hom(q, a, b) or _axioms(q, a, b, c, zero)
                if why:
                    fail = {"law": why, "a": list(a.entries), "b": list(b.entries)}
                    break
            reps.append(_report("ring-axioms-Z", P, {"q": q, "trials": trials}, fail is None, fail))
            for m in moduli:
                R = IntegersMod(m)
                zm = _reduce(zero, R)
                fail = None
                for _ in range(trials):
                    a, b, c = (RingVector.random(P, "witt", INTEGERS, rng, 3) for _ in range(3))
                    am, bm, cm = (_reduce(v, R) for v in (a, b, c))
                    why = None
                    if _reduce(witt_add(q, a, b), R) != witt_add(q, am, bm):
                        why = "functoriality of sum"
                    elif _reduce(witt_mul(q, a, b), R) != witt_mul(q, am, bm):
                        why = "functoriality of product"
                    elif _reduce(witt_neg(q, a), R) != witt_neg(q, am):
                        why = "functoriality of negative"
                    else:
                        why = _axioms(q, am, bm, cm, zm)
                    if why:
                        fail = {"law": why, "a": list(a.entries), "b": list(b.entries)}
                        break
                reps.append(_report(f"ring-axioms-Zmod{m}", P, {"q": q, "m": m, "trials": trials}, fail is None, fail))
    return reps


# --------------------------------------------------------------------------
# necklace oracle
# --------------------------------------------------------------------------


def suite_necklace_oracle(qmax: int = 3, mmax: int = 3, nmax: int = 6) -> list[dict]:
    bad = []
    for q in range(1, qmax + 1):
        for m in range(1, mmax + 1):
            for n in range(1, nmax + 1):
                want = necklace_poly(n).evaluate({"q": q, "x": m})
                got = qword_aperiodic_count(q, m, n)
                if got != want:
                    bad.append({"q": q, "m": m, "n": n, "count": got, "closed_form": str(want)})
    reps = [_report("qword-count", "cyclic", {"qmax": qmax, "mmax": mmax, "nmax": nmax}, not bad, bad[:5])]
    bad = [n for n in range(1, 25) if not is_numerical_multi(necklace_poly(n))]
    reps.append(_report("necklace-numerical", "cyclic", {"nmax": 24}, not bad, bad))
    bad = []
    for s in (1, 2, 3):
        for n in range(1, 13):
            f = necklace_poly(n).subs({"x": MultiPoly.var("q", s)}).divide_by_var("q")
            if not is_numerical_multi(f):
                bad.append({"s": s, "n": n})
    reps.append(_report("necklace-at-q-power", "cyclic", {"s": [1, 2, 3], "nmax": 12}, not bad, bad))
    checks = [(build_cyclic([1, 2]), 2), (build_cyclic(divisors(6)), 2), (build_finite_abelian([2, 2]), 2), (s3_marks(), 2)]
    for P, m in checks:
        ok = all(verify_first_main_formula(P, v, m) for v in range(len(P)))
        reps.append(_report("first-main-formula", P, {"m": m}, ok))
    return reps


# --------------------------------------------------------------------------
# Teichmueller
# --------------------------------------------------------------------------


def _symbolic_ring(P: GroupPoset, line: bool) -> tuple[PolyRing, RingVector]:
    names = [f"a[{l}]" for l in P.labels]
    ring = PolyRing("Q[a]" + ("~psi" if line else ""), tuple(names) if line else (), None).with_q()
    vec = RingVector(P, "witt", ring, tuple(MultiPoly.var(n) for n in names))
    return ring, vec


def suite_teichmuller(pairs: int = 30, roundtrips: int = 100, seed: int = 0) -> list[dict]:
    reps = []
    posets = [build_cyclic(d) for d in ([1, 2], [1, 2, 4], [1, 2, 3, 6], [1, 2, 3, 4, 6, 12])]
    posets += [build_finite_abelian([2, 2]), build_finite_abelian([4])]
    for P in posets:
        for line in (False, True):
            _, a = _symbolic_ring(P, line)
            ok = ghost_witt(SYM, a) == ghost_necklace(SYM, tau(SYM, a))
            reps.append(_report("commuting-triangle-symbolic", P, {"adams": "line" if line else "trivial"}, ok))
        rng = random.Random(f"{seed}-{P.key}")
        a = RingVector.from_list(P, "witt", POLY_POWER, [POLY_POWER.random(rng) for _ in range(len(P))])
        ok = ghost_witt(SYM, a) == ghost_necklace(SYM, tau(SYM, a))
        reps.append(_report("commuting-triangle-Zt_power", P, {}, ok))
    P = build_cyclic(divisors(12))
    rng = random.Random(seed)
    for q in range(-3, 4):
        fail = None
        for _ in range(pairs):
            a, b = (RingVector.random(P, "witt", INTEGERS, rng, 3) for _ in range(2))
            ta, tb = tau(q, a), tau(q, b)
            if tau(q, witt_add(q, a, b)).entries != tuple(x + y for x, y in zip(ta.entries, tb.entries)):
                fail = {"law": "additive", "a": list(a.entries), "b": list(b.entries)}
                break
            if tau(q, witt_mul(q, a, b)) != nr_mul(q, ta, tb):
                fail = {"law": "multiplicative", "a": list(a.entries), "b": list(b.entries)}
                break
        reps.append(_report("tau-ring-homomorphism", P, {"q": q, "pairs": pairs}, fail is None, fail))
        fail = None
        for _ in range(roundtrips):
            v = RingVector.random(P, "nr", INTEGERS, rng, 5)
            w = tau_inverse(q, v)
            if tau(q, w) != v or tau_inverse(q, tau(q, w)) != w:
                fail = {"v": list(v.entries)}
                break
        reps.append(_report("tau-roundtrip", P, {"q": q, "trials": roundtrips}, fail is None, fail))
        # tau_G(q x y) = q (tau_G(x) tau_G(y)) for scalars x, y placed at G
        fail = None
        for _ in range(pairs):
            x, y = (RATIONALS.random(rng, 4) for _ in range(2))
            lhs = tau(q, _at_top(P, q * x * y))
            txy = nr_mul(q, tau(q, _at_top(P, x)), tau(q, _at_top(P, y)))
            rhs = txy.with_entries([q * e for e in txy.entries])
            if lhs != rhs:
                fail = {"x": str(x), "y": str(y)}
                break
        reps.append(_report("tau-q-multiplicative", P, {"q": q, "pairs": pairs}, fail is None, fail))
    return reps


def _at_top(P: GroupPoset, r) -> RingVector:
    """The Witt vector ``r * eps_G``."""
    return RingVector.from_list(P, "witt", RATIONALS, [r] + [0] * (len(P) - 1))


# --------------------------------------------------------------------------
# Frobenius and Lenart
# --------------------------------------------------------------------------

_XRING = PolyRing("Q[x]", (), None).with_q()


def _necklace_vector(N: int) -> RingVector:
    P = build_cyclic(divisors(N))
    return RingVector(P, "nr", _XRING, tuple(necklace_poly(d) for d in P.index))


def frobenius_component(r: int, n: int) -> MultiPoly:
    """Component ``n`` of ``f_r`` applied to ``(M(x, m))_m``, on the divisors of ``r n``."""
    return frobenius_cyclic(SYM, r, _necklace_vector(r * n))[str(n)]


def suite_lenart(rmax: int = 5, nmax: int = 12, frob_rmax: int = 4, frob_nmax: int = 6) -> list[dict]:
    reps = []
    x = MultiPoly.var("x")
    for r in range(1, max(rmax, frob_rmax) + 1):
        if r <= frob_rmax:
            bad = []
            target = MultiPoly.var("q", r - 1) * x**r
            for n in range(1, frob_nmax + 1):
                if frobenius_component(r, n) != necklace_poly(n).subs({"x": target}):
                    bad.append(n)
            reps.append(_report("frobenius-on-necklaces", "cyclic", {"r": r, "nmax": frob_nmax}, not bad, bad))
        if r <= rmax:
            bad = []
            for n in range(1, nmax + 1):
                rhs = MultiPoly()
                for d in divisors(n):
                    rhs = rhs + MultiPoly.coerce(lenart_Q(r, n, d)) * necklace_poly(d).subs({"x": x**r})
                if frobenius_component(r, n) != rhs:
                    bad.append(n)
            reps.append(_report("lenart-expansion", "cyclic", {"r": r, "nmax": nmax}, not bad, bad))
    return reps


# --------------------------------------------------------------------------
# Mackey
# --------------------------------------------------------------------------


def suite_mackey(trials: int = 5) -> list[dict]:
    reps = []
    for P in (build_cyclic(divisors(6)), build_cyclic(divisors(12)), build_finite_abelian([2, 2])):
        for u in range(len(P)):
            for v in range(len(P)):
                for q in (SYM, -2, 0, 3):
                    rep = verify_mackey_frobenius(P, u, v, q=q, trials=trials)
                    if rep["status"] != "pass":
                        rep["witness"] = rep["checks"]
                    reps.append(rep)
    return reps


# --------------------------------------------------------------------------
# classification
# --------------------------------------------------------------------------


def suite_classify(span: int = 6) -> list[dict]:
    reps = []
    for p in (2, 3):
        P = build_cyclic(divisors(p * p))
        bad = []
        for q in range(-span, span + 1):
            for r in range(-span, span + 1):
                d = strict_iso_over_Z(P, q, r)
                if d["exists"] != (not d["observed_primes"]) or not d["consistent"]:
                    bad.append({"q": q, "r": r, "predicted": d["obstruction_primes"], "observed": d["observed_primes"]})
        reps.append(_report("classification-agrees", P, {"span": span}, not bad, bad[:5]))
    P = build_cyclic(divisors(4))
    d = strict_iso_over_Z(P, 2, 1)
    reps.append(_report("classification-witness", P, {"q": 2, "r": 1}, not d["exists"] and d["obstruction_primes"] == [2], d))
    d = strict_iso_over_Z(P, 2, 6)
    reps.append(_report("classification-witness", P, {"q": 2, "r": 6}, d["exists"] and not d["obstruction_primes"], d))
    return reps


# --------------------------------------------------------------------------
# classical limit
# --------------------------------------------------------------------------


def _moebius(n: int) -> int:
    from .exactmath import prime_divisors

    ps = prime_divisors(n)
    m = 1
    for p in ps:
        if n % (p * p) == 0:
            return 0
        m = -m
    return m


def suite_classical(nmax: int = 24, trials: int = 20, seed: int = 0) -> list[dict]:
    reps = []
    bad = []
    for n in range(1, nmax + 1):
        P = build_cyclic(divisors(n))
        mu = mu_q(P, twisted=False)
        top = P.position(str(n))
        for d in divisors(n):
            bold = mu.coeff(top, P.position(str(d))) * n
            if bold.evaluate(1) != _moebius(n // d):
                bad.append({"n": n, "d": d})
    reps.append(_report("classical-moebius", "cyclic", {"nmax": nmax}, not bad, bad[:5]))
    bad = []
    x = MultiPoly.var("x")
    for n in range(1, nmax + 1):
        want = MultiPoly()
        for d in divisors(n):
            want = want + MultiPoly.const(_moebius(n // d)) * x**d
        if necklace_poly(n).specialize_q(1) != want / n:
            bad.append(n)
    reps.append(_report("classical-necklace", "cyclic", {"nmax": nmax}, not bad, bad))
    rng = random.Random(seed)
    for P in axiom_posets():
        fail = None
        for _ in range(trials):
            a, b = (RingVector.random(P, "witt", INTEGERS, rng, 4) for _ in range(2))
            ga, gb = _classical_ghost(P, a), _classical_ghost(P, b)
            s = _classical_ghost(P, witt_add(1, a, b))
            m = _classical_ghost(P, witt_mul(1, a, b))
            if s != [x + y for x, y in zip(ga, gb)] or m != [x * y for x, y in zip(ga, gb)]:
                fail = {"a": list(a.entries), "b": list(b.entries)}
                break
        reps.append(_report("classical-witt", P, {"trials": trials}, fail is None, fail))
    return reps


def _classical_ghost(P: GroupPoset, v: RingVector) -> list[int]:
    """The undeformed ghost ``sum marks[U][V] v(V)^((V:U))``, written out independently."""
    out = []
    for u in range(len(P)):
        total = 0
        for w in range(len(P)):
            if P.marks[u][w]:
                total += P.marks[u][w] * v.entries[w] ** (P.index[u] // P.index[w])
        out.append(total)
    return out


SUITES = {
    "integrality": suite_integrality,
    "ring-axioms": suite_ring_axioms,
    "necklace-oracle": suite_necklace_oracle,
    "teichmuller": suite_teichmuller,
    "lenart": suite_lenart,
    "mackey": suite_mackey,
    "classify": suite_classify,
    "classical": suite_classical,
}


def run_suite(name: str, **params) -> list[dict]:
    if name == "all":
        return run_all()
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'") from None
    return fn(**params)


def run_all() -> list[dict]:
    out = []
    for name in sorted(SUITES):
        out.extend(SUITES[name]())
    return out


def clear_caches() -> None:
    """Drop every in-memory memo so the next run recomputes from scratch (disk cache untouched)."""
    from . import necklace, poset, rings, transfer

    for table in (rings._TABLES, rings._SPECIAL, rings._COMPILED, rings._PCOEFFS, poset._MU_CACHE):
        table.clear()
    necklace.necklace_poly.cache_clear()
    transfer.lenart_Q.cache_clear()
    transfer.lenart_Q_with_gcd.cache_clear()
