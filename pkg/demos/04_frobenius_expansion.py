#!/usr/bin/env python3
"""
Frobenius on deformed necklace polynomials.

Applying the r-th Frobenius to the vector of orbit sums M(x, n) gives
M(q^(r-1) x^r, n).  Expanding the same components in the basis M(x^r, d)
produces coefficients Q(r, n, d) that are integer-valued polynomials in q.
"""
from wbring import build_cyclic, divisors, lenart_Q
from wbring.exactmath import MultiPoly, QPoly, is_numerical
from wbring.necklace import necklace_poly
from wbring.verify import frobenius_component

r = 2
Q = MultiPoly.coerce(QPoly.q())
x = MultiPoly.var("x")
for n in (1, 2, 3, 4):
    lhs = frobenius_component(r, n)
    print(f"n={n}: f_{r} M = M(q x^2) ? {lhs == necklace_poly(n).subs({'x': Q * x**2})}")

print("\nexpansion coefficients for r = 3, n = 6")
for d in divisors(6):
    c = lenart_Q(3, 6, d)
    print(f"  d={d}  {c}   numerical: {is_numerical(c)}")

# reassemble component 6 from the coefficients
n = 6
total = MultiPoly()
for d in divisors(n):
    total = total + MultiPoly.coerce(lenart_Q(3, n, d)) * necklace_poly(d).subs({"x": x**3})
print("\nsum_d Q(3,6,d) M(x^3, d) matches:", total == frobenius_component(3, n))

bad = [(r, n, d) for r in range(1, 6) for n in range(1, 13) for d in divisors(n) if not is_numerical(lenart_Q(r, n, d))]
print("non-numerical coefficients for r <= 5, n <= 12:", bad)
