#!/usr/bin/env python3
"""
Arithmetic in the q-deformed Witt-Burnside ring.

The sum and product of two Witt vectors are given by universal polynomials
with coefficients that are integer-valued polynomials in q.  We print them
for the two-element chain, then add and multiply concrete vectors over Z and
over Z/6, where the ghost map is no longer injective.
"""
from wbring import INTEGERS, IntegersMod, RingVector, build_cyclic, build_finite_abelian, structure_table
from wbring import ghost_witt, witt_add, witt_mul, witt_neg
from wbring.exactmath import is_numerical

for p in (2, 3):
    t = structure_table(build_cyclic([1, p]))
    print(f"index {p} chain")
    print("  sum      :", t.s[1])
    print("  product  :", t.p[1])
    print("  negative :", t.iota[1])

K = build_finite_abelian([2, 2])
t = structure_table(K)
coeffs = list(t.coefficients())
print(f"\nKlein group: {len(coeffs)} coefficients, all numerical: {all(is_numerical(c) for c in coeffs)}")

q = 3
a = RingVector.from_list(K, "witt", INTEGERS, [1, 2, 0, -1, 3])
b = RingVector.from_list(K, "witt", INTEGERS, [2, -1, 1, 0, 1])
s, m = witt_add(q, a, b), witt_mul(q, a, b)
print(f"\nq={q}\n  a + b =", s.entries, "\n  a * b =", m.entries)
print("  ghost(a*b) == ghost(a)*ghost(b):",
      ghost_witt(q, m).entries == tuple(x * y for x, y in zip(ghost_witt(q, a).entries, ghost_witt(q, b).entries)))
print("  a + (-a) =", witt_add(q, a, witt_neg(q, a)).entries)

# the same polynomials work over Z/6; reduction commutes with the operations
R = IntegersMod(6)
red = lambda v: RingVector.from_list(K, "witt", R, v.entries)
print("\nover Z/6: reduce(a*b) == reduce(a)*reduce(b):", red(m) == witt_mul(q, red(a), red(b)))
