"""Strict isomorphisms between q- and r-deformed Witt-Burnside rings.

Over Q the ghost equation ``sum (G:V) q^(k-1) X_V^k = sum (G:V) r^(k-1) Y_V^k``
(``k = (V:U)``, ``V`` containing ``U``) has a unique triangular solution ``Y(X)``.
An integral strict isomorphism exists exactly when no prime divides a
denominator of that solution; the predicted set of such primes is
``(D(q) sym-diff D(r)) cap D(G)`` with ``D(0)`` the set of all primes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .exactmath import MultiPoly, prime_divisors
from .poset import GroupPoset

__all__ = [
    "TransferSolution",
    "solve_transfer",
    "strict_iso_over_Z",
    "group_primes",
    "xname",
]


def xname(label: str) -> str:
    return f"X[{label}]"


@dataclass(frozen=True)
class TransferSolution:
    poset: GroupPoset
    q: int
    r: int
    Y: tuple
    denominator_primes: frozenset = field(default_factory=frozenset)

    def __getitem__(self, label):
        return self.Y[self.poset.position(label)]

    def is_integral(self) -> bool:
        return not self.denominator_primes

    def to_json(self) -> dict:
        return {
            "poset": self.poset.describe(),
            "q": self.q,
            "r": self.r,
            "transfer": {l: str(y) for l, y in zip(self.poset.labels, self.Y)},
            "denominator_primes": sorted(self.denominator_primes),
        }


def _ghost(P: GroupPoset, u: int, qv: int, comps) -> MultiPoly:
    acc = MultiPoly()
    for v in P.below(u):
        k = P.rel_index(v, u)
        acc = acc + MultiPoly.const(P.marks[u][v] * qv ** (k - 1)) * comps[v] ** k
    return acc


def solve_transfer(poset: GroupPoset, q: int, r: int, verify: bool = True) -> TransferSolution:
    """``Y_U = X_U + sum_{V > U} (q^(k-1) X_V^k - r^(k-1) Y_V^k) / k`` down the poset."""
    if not poset.abelian:
        raise ValueError("the classification is modelled for abelian posets only")
    q, r = int(q), int(r)
    X = [MultiPoly.var(xname(l)) for l in poset.labels]
    Y: list = []
    for u in range(len(poset)):
        acc = X[u]
        for v in poset.below(u):
            if v == u:
                continue
            k = poset.rel_index(v, u)
            acc = acc + (MultiPoly.const(q ** (k - 1)) * X[v] ** k - MultiPoly.const(r ** (k - 1)) * Y[v] ** k) / k
        Y.append(acc)
    if verify:
        for u in range(len(poset)):
            if _ghost(poset, u, q, X) != _ghost(poset, u, r, Y):
                raise ArithmeticError(f"transfer solution fails the ghost equation at {poset.labels[u]}")
    primes = frozenset().union(*(y.denominator_primes() for y in Y))
    return TransferSolution(poset, q, r, tuple(Y), primes)


def group_primes(poset: GroupPoset) -> frozenset:
    """Primes dividing some index of the poset."""
    return frozenset().union(*(prime_divisors(i) for i in poset.index))


def _primes_within(n: int, universe: frozenset) -> frozenset:
    # the prime support of 0 is every prime
    if n == 0:
        return universe
    return frozenset(prime_divisors(n)) & universe


def strict_iso_over_Z(poset: GroupPoset, q: int, r: int) -> dict:
    """Decide whether an integral strict isomorphism between the q- and r-rings exists."""
    dg = group_primes(poset)
    predicted = _primes_within(q, dg) ^ _primes_within(r, dg)
    sol = solve_transfer(poset, q, r)
    observed = sol.denominator_primes
    return {
        "exists": not predicted,
        "obstruction_primes": sorted(predicted),
        "observed_primes": sorted(observed),
        "consistent": observed == predicted,
        "transfer": {l: str(y) for l, y in zip(poset.labels, sol.Y)},
    }
