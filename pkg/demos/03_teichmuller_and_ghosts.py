#!/usr/bin/env python3
"""
From Witt vectors to necklace vectors.

The q-Teichmueller map sends a Witt vector to a necklace vector, and the two
ghost maps agree along it.  Placing a single value r at the whole group
produces the orbit sums evaluated at r.
"""
import random

from wbring import INTEGERS, RingVector, build_cyclic, divisors, ghost_necklace, ghost_witt, tau, tau_inverse

P = build_cyclic(divisors(6))
q = 2
a = RingVector.from_list(P, "witt", INTEGERS, [5, 0, 0, 0])
print("tau(5 at G)          =", tau(q, a).entries)
print("its necklace ghost   =", ghost_necklace(q, tau(q, a)).entries)
print("q^(n-1) 5^n          =", tuple(q ** (n - 1) * 5**n for n in P.index))

rng = random.Random(1)
for q in (-2, 0, 3):
    v = RingVector.random(P, "witt", INTEGERS, rng)
    same = ghost_necklace(q, tau(q, v)).entries == ghost_witt(q, v).entries
    print(f"q={q:2d}  v={v.entries}  tau(v)={tau(q, v).entries}  ghosts agree: {same}")

# the inverse keeps integer vectors integral
n = RingVector.from_list(P, "nr", INTEGERS, [1, -2, 3, 1])
print("\ntau^-1 of", n.entries, "at q=3:", tau_inverse(3, n).entries)
