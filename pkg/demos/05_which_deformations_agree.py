#!/usr/bin/env python3
"""
When are two deformations strictly isomorphic over Z?

Solving the ghost equation for the transfer Y(X) over Q and looking at its
denominators tells us.  The primes that appear are exactly the primes of the
group that divide one of q, r but not the other.
"""
from wbring import build_cyclic, divisors, solve_transfer, strict_iso_over_Z

P = build_cyclic(divisors(4))
for q, r in [(2, 1), (2, 6), (2, 4), (3, 5), (0, 2)]:
    d = strict_iso_over_Z(P, q, r)
    print(f"(q, r) = ({q}, {r}):  integral iso: {d['exists']!s:5}  obstruction: {d['obstruction_primes']}")
    print("    Y[4] =", d["transfer"]["4"])

# a small table over the divisors of 9: '.' means isomorphic, 'x' means not
P9 = build_cyclic(divisors(9))
span = range(-6, 7)
print("\n      r: " + " ".join(f"{r:2d}" for r in span))
for q in span:
    row = " ".join(" ." if strict_iso_over_Z(P9, q, r)["exists"] else " x" for r in span)
    print(f"q={q:3d}:  {row}")

sol = solve_transfer(build_cyclic([1, 2]), 7, 3)
print("\nindex 2, (q, r) = (7, 3):", sol.Y[1])
