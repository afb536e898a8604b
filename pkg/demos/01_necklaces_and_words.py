#!/usr/bin/env python3
"""
Deformed necklace polynomials, and the words they count.

For the procyclic group the orbit-sum polynomial attached to the subgroup of
index n is a polynomial in q and x.  At q = 1 it is the classical necklace
polynomial; for positive integers q and x it counts aperiodic q-words.
"""
from wbring import build_cyclic, divisors, orbit_sum, qword_aperiodic_count
from wbring.exactmath import is_numerical_multi
from wbring.necklace import necklace_poly

P = build_cyclic(divisors(12))
print("orbit sums on the divisors of 12")
for v, n in enumerate(P.index):
    print(f"  n={n:2d}  {orbit_sum(P, v).value}")

# dividing by n leaves an integer-valued polynomial in both q and x
print("\nnumerical in (q, x) for n <= 24:", all(is_numerical_multi(necklace_poly(n)) for n in range(1, 25)))

# q = 1 recovers (1/n) sum mu(n/d) x^d
print("\nq = 1, n = 6:", necklace_poly(6).specialize_q(1))

# brute force: words of length n over Z/q x {1..m}, counted up to rotation
print("\n  q m n   closed form   enumeration")
for q, m, n in [(1, 2, 3), (2, 2, 4), (3, 2, 6), (2, 3, 5)]:
    closed = necklace_poly(n).subs({"q": q, "x": m}).constant_value()
    print(f"  {q} {m} {n}   {str(closed):>11}   {qword_aperiodic_count(q, m, n):>11}")
