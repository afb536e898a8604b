"""Orbit-sum (q-necklace) polynomials and the aperiodic q-word oracle."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .exactmath import GuardExceeded, MultiPoly, Q_VAR
from .poset import GroupPoset, build_cyclic, divisors, mu_q

__all__ = [
    "GuardExceeded",
    "OrbitSumPoly",
    "orbit_sum",
    "necklace_poly",
    "qword_aperiodic_count",
    "qword_aperiodic_words",
    "verify_first_main_formula",
    "ENUMERATION_GUARD",
]

ENUMERATION_GUARD = 10**8
X_VAR = "x"


def _xvar(i: int) -> str:
    return f"x{i}"


def _pvar(k: int) -> str:
    return f"p{k}"


@dataclass(frozen=True)
class OrbitSumPoly:
    """``M(X, V)`` for one poset element.

    In multivariate mode ``powersum`` holds the polynomial in the variables
    ``p1, p2, ...`` (power sums of ``x1..xm``) and :meth:`expand` produces
    monomials. In univariate mode ``powersum`` is ``None``.
    """

    element: str
    nvars: int | None
    value: MultiPoly
    powersum: MultiPoly | None = None

    def expand(self) -> MultiPoly:
        return self.value

    def at_q(self, qval) -> MultiPoly:
        return self.value.specialize_q(qval)


def _q_pow(e: int) -> MultiPoly:
    return MultiPoly.var(Q_VAR, e)


def orbit_sum(poset: GroupPoset, v, mode="univariate") -> OrbitSumPoly:
    """The orbit-sum polynomial of element ``v`` (label or position).

    ``mode`` is ``"univariate"`` (variable ``x``) or a positive integer ``m``
    for the power-sum form in ``x1..xm``.
    """
    vpos = v if isinstance(v, int) and not isinstance(v, bool) else poset.position(v)
    if not 0 <= vpos < len(poset):
        raise KeyError(f"unknown poset element {v!r}")
    mu = mu_q(poset, twisted=False)
    label = poset.labels[vpos]
    if mode == "univariate":
        total = MultiPoly()
        for w in poset.below(vpos):
            gw = poset.index[w]
            total = total + MultiPoly.coerce(mu.coeff(vpos, w)) * _q_pow(gw - 1) * MultiPoly.var(X_VAR, gw)
        return OrbitSumPoly(label, None, total)
    m = int(mode)
    if m < 1:
        raise ValueError("number of variables must be positive")
    ps = MultiPoly()
    for w in poset.below(vpos):
        gw = poset.index[w]
        k = poset.rel_index(w, vpos)
        ps = ps + MultiPoly.coerce(mu.coeff(vpos, w)) * _q_pow(gw - 1) * MultiPoly.var(_pvar(k), gw)
    return OrbitSumPoly(label, m, _expand_powersums(ps, m), ps)


def _expand_powersums(ps: MultiPoly, m: int) -> MultiPoly:
    names = {v for v in ps.variables() if v.startswith("p")}
    sub = {}
    for name in names:
        k = int(name[1:])
        sub[name] = sum((MultiPoly.var(_xvar(i), k) for i in range(1, m + 1)), MultiPoly())
    return ps.subs(sub)


@lru_cache(maxsize=None)
def necklace_poly(n: int) -> MultiPoly:
    """``M^q(x, n)`` for the procyclic group, in variables ``q`` and ``x``."""
    return orbit_sum(build_cyclic(divisors(n)), str(n)).value


# --------------------------------------------------------------------------
# q-word oracle
# --------------------------------------------------------------------------


def _is_period(res, let, n: int, k: int, q: int) -> bool:
    for i in range(k, n):
        if let[i] != let[i % k]:
            return False
    for j in range(1, n // k):
        shift = (res[j * k] - res[0]) % q
        for i in range(1, k):
            if (res[j * k + i] - res[i]) % q != shift:
                return False
    return True


def qword_aperiodic_words(q: int, m: int, n: int) -> int:
    """Number of aperiodic q-words of length ``n`` over ``m`` letters.

    Words are taken up to the global residue shift (first residue fixed to 0).
    A divisor ``k`` of ``n`` is a period when the letters are ``k``-periodic and
    every length-``k`` block is a residue shift of the first block.
    """
    if q < 1 or m < 1 or n < 1:
        raise ValueError("q, m and n must be positive")
    if (q * m) ** n > ENUMERATION_GUARD:
        raise GuardExceeded(f"(q*m)^n = {(q * m) ** n} exceeds {ENUMERATION_GUARD}")
    proper = [k for k in divisors(n) if k < n]
    total = 0
    for tail in product(range(q), repeat=n - 1):
        res = (0,) + tail
        for let in product(range(m), repeat=n):
            if not any(_is_period(res, let, n, k, q) for k in proper):
                total += 1
    return total


def qword_aperiodic_count(q: int, m: int, n: int) -> int:
    """Number of equivalence classes of aperiodic q-words of length ``n``.

    Each class collects ``n`` conjugate aperiodic words. Plain rotation does
    not preserve the q-period condition (block shifts need not be
    arithmetic), so classes are counted as aperiodic words divided by ``n``;
    the division is checked to be exact.
    """
    words = qword_aperiodic_words(q, m, n)
    classes, rem = divmod(words, n)
    if rem:
        raise ArithmeticError(f"{words} aperiodic words do not split into classes of size {n}")
    return classes


# --------------------------------------------------------------------------
# internal consistency of the closed form
# --------------------------------------------------------------------------


def verify_first_main_formula(poset: GroupPoset, v, m: int) -> bool:
    """Check ``q^((G:V)-1) p1^(G:V) == sum_W marks[V][W] q^((W:V)-1) Psi^(W:V) M(X, W)``."""
    if not 1 <= m <= 4:
        raise ValueError("m must be between 1 and 4")
    vpos = v if isinstance(v, int) else poset.position(v)
    xs = [_xvar(i) for i in range(1, m + 1)]
    p1 = sum((MultiPoly.var(x) for x in xs), MultiPoly())
    gv = poset.index[vpos]
    lhs = _q_pow(gv - 1) * p1**gv
    rhs = MultiPoly()
    for w in poset.below(vpos):
        k = poset.rel_index(w, vpos)
        mw = orbit_sum(poset, w, m).value.scale_exponents(xs, k)
        rhs = rhs + MultiPoly.const(poset.marks[vpos][w]) * _q_pow(k - 1) * mw
    return lhs == rhs

