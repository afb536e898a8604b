"""Exact polynomial arithmetic over the rationals.

Two polynomial types live here:

* :class:`QPoly` -- a univariate polynomial in the distinguished variable ``q``.
* :class:`MultiPoly` -- a sparse multivariate polynomial in named variables.
  The variable ``q`` is an ordinary variable internally; :attr:`MultiPoly.terms`
  groups the remaining variables and exposes coefficients as :class:`QPoly`.

Everything is exact (``int`` / :class:`fractions.Fraction`), nothing is float.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb, factorial
from numbers import Rational
from typing import Iterable, Mapping

__all__ = [
    "Q_VAR",
    "QPoly",
    "MultiPoly",
    "BinomialExpansion",
    "binomial_basis",
    "is_numerical",
    "is_numerical_multi",
    "rational_to_json",
    "rational_from_json",
    "stirling2",
    "mixed_binomial_expansion",
    "prime_divisors",
    "NonUnitError",
    "IntegralityError",
    "GuardExceeded",
]

Q_VAR = "q"


class NonUnitError(ArithmeticError):
    """Division by an element that is not a unit of the coefficient ring."""


class IntegralityError(ArithmeticError):
    """An exact division or coefficient left the integral carrier."""


class GuardExceeded(ValueError):
    """A brute-force or symbolic computation would exceed its size guard."""


def _norm(c):
    """Collapse integral Fractions to int so hashing and printing stay stable."""
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _as_rational(c):
    if isinstance(c, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return _norm(c)
    if isinstance(c, Rational):
        return _norm(Fraction(c.numerator, c.denominator))
    raise TypeError(f"not an exact rational: {c!r}")


def rational_to_json(c) -> dict:
    c = Fraction(c)
    return {"num": str(c.numerator), "den": str(c.denominator)}


def rational_from_json(obj):
    if isinstance(obj, dict):
        return _norm(Fraction(int(obj["num"]), int(obj.get("den", "1"))))
    if isinstance(obj, int):
        return obj
    if isinstance(obj, str):
        return _norm(Fraction(obj))
    raise ValueError(f"cannot parse rational from {obj!r}")


def _fmt_rational(c) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


# --------------------------------------------------------------------------
# QPoly
# --------------------------------------------------------------------------


class QPoly:
    """Univariate polynomial in ``q`` with rational coefficients.

    Immutable. The coefficient map never stores zeros, and the constant term
    is the coefficient of ``q**0`` -- so evaluating at ``q = 0`` returns it
    (``0**0 == 1`` by construction).
    """

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs: Mapping[int, object] | None = None):
        c = {}
        if coeffs:
            for e, v in coeffs.items():
                if e < 0:
                    raise ValueError("negative exponent in QPoly")
                v = _as_rational(v)
                if v != 0:
                    c[int(e)] = v
        self._c = c
        self._hash = None

    @classmethod
    def _raw(cls, c: dict) -> "QPoly":
        p = cls.__new__(cls)
        p._c = c
        p._hash = None
        return p

    @classmethod
    def const(cls, c) -> "QPoly":
        return cls({0: c})

    @classmethod
    def q(cls) -> "QPoly":
        return cls._raw({1: 1})

    @classmethod
    def monomial(cls, coeff, exp: int) -> "QPoly":
        """``coeff * q**exp``; ``exp == 0`` is the constant ``coeff``."""
        return cls({exp: coeff})

    @property
    def coeffs(self) -> dict:
        return dict(self._c)

    def items(self):
        return sorted(self._c.items())

    def coeff(self, e: int):
        return self._c.get(e, 0)

    @property
    def degree(self) -> int:
        return max(self._c) if self._c else -1

    def is_zero(self) -> bool:
        return not self._c

    def is_constant(self) -> bool:
        return not self._c or set(self._c) == {0}

    def constant_value(self):
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self._c.get(0, 0)

    # arithmetic ---------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "QPoly":
        if isinstance(other, QPoly):
            return other
        return QPoly.const(other)

    def __add__(self, other):
        if isinstance(other, MultiPoly):
            return NotImplemented
        o = self._coerce(other)
        c = dict(self._c)
        for e, v in o._c.items():
            s = c.get(e, 0) + v
            if s:
                c[e] = _norm(s)
            else:
                c.pop(e, None)
        return QPoly._raw(c)

    __radd__ = __add__

    def __neg__(self):
        return QPoly._raw({e: -v for e, v in self._c.items()})

    def __sub__(self, other):
        if isinstance(other, MultiPoly):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, MultiPoly):
            return NotImplemented
        o = self._coerce(other)
        c: dict = {}
        for e1, v1 in self._c.items():
            for e2, v2 in o._c.items():
                e = e1 + e2
                c[e] = c.get(e, 0) + v1 * v2
        return QPoly._raw({e: _norm(v) for e, v in c.items() if v})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, QPoly):
            other = other.constant_value()
        other = _as_rational(other)
        if other == 0:
            raise ZeroDivisionError("QPoly division by zero")
        return QPoly._raw({e: _norm(Fraction(v) / other) for e, v in self._c.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = QPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def divide_by_q(self, k: int = 1) -> "QPoly":
        """Exact division by ``q**k``; raises if a low-order term would be lost."""
        if any(e < k for e in self._c):
            raise ArithmeticError(f"{self} is not divisible by q^{k}")
        return QPoly._raw({e - k: v for e, v in self._c.items()})

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        """Evaluate at ``x`` (any value supporting ``+``, ``*`` and int powers)."""
        total = 0
        for e, v in self._c.items():
            total = total + (v if e == 0 else v * x**e)
        return _norm(total) if isinstance(total, (int, Fraction)) else total

    def compose(self, other: "QPoly") -> "QPoly":
        """``self(other(q))``."""
        total = QPoly()
        for e, v in self._c.items():
            total = total + other**e * v
        return total

    def denominator_lcm(self) -> int:
        d = 1
        for v in self._c.values():
            den = Fraction(v).denominator
            d = d * den // _gcd(d, den)
        return d

    def is_integral(self) -> bool:
        return all(Fraction(v).denominator == 1 for v in self._c.values())

    def to_multipoly(self) -> "MultiPoly":
        return MultiPoly._raw({((Q_VAR, e),) if e else (): v for e, v in self._c.items()})

    # comparisons -------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, QPoly):
            return self._c == other._c
        if isinstance(other, (int, Fraction)):
            return self._c == ({0: _norm(other)} if other != 0 else {})
        if isinstance(other, MultiPoly):
            return self.to_multipoly() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._c.items()))
        return self._hash

    def __repr__(self):
        return f"QPoly({self})"

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for e, v in sorted(self._c.items(), reverse=True):
            parts.append(_fmt_term(v, ((Q_VAR, e),) if e else ()))
        return _join_terms(parts)

    # json ---------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "terms": [
                {"monomial": ({Q_VAR: e} if e else {}), "coeff": rational_to_json(v)}
                for e, v in sorted(self._c.items(), reverse=True)
            ]
        }

    @classmethod
    def from_json(cls, obj) -> "QPoly":
        if isinstance(obj, dict) and "terms" in obj:
            c: dict = {}
            for t in obj["terms"]:
                mono = t.get("monomial", {})
                extra = set(mono) - {Q_VAR}
                if extra:
                    raise ValueError(f"QPoly monomial has foreign variables {extra}")
                e = int(mono.get(Q_VAR, 0))
                c[e] = c.get(e, 0) + rational_from_json(t["coeff"])
            return cls(c)
        return cls.const(rational_from_json(obj))


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


# --------------------------------------------------------------------------
# MultiPoly
# --------------------------------------------------------------------------

# A monomial is a tuple of (name, exponent) pairs sorted by name; () is 1.


@lru_cache(maxsize=1 << 17)
def _mono_mul(m1: tuple, m2: tuple) -> tuple:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _mono_from_dict(d: Mapping[str, int]) -> tuple:
    for v, e in d.items():
        if e < 0:
            raise ValueError(f"negative exponent for {v}")
    return tuple(sorted((str(v), int(e)) for v, e in d.items() if e))


def _mono_str(m: tuple) -> str:
    return "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)


def _fmt_term(c, m: tuple) -> str:
    c = Fraction(c)
    if not m:
        return _fmt_rational(c)
    ms = _mono_str(m)
    if c == 1:
        return ms
    if c == -1:
        return "-" + ms
    return f"{_fmt_rational(c)}*{ms}"


def _join_terms(parts: list[str]) -> str:
    out = parts[0]
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


def _grlex_key(m: tuple):
    """Descending graded-lex sort key on sorted-name monomials."""
    deg = sum(e for _, e in m)
    return (-deg, tuple((v, -e) for v, e in m))


class MultiPoly:
    """Sparse multivariate polynomial over Q in named variables.

    Immutable. ``q`` may appear as a variable; :attr:`terms` regroups the
    polynomial as a map from q-free monomials to :class:`QPoly` coefficients.
    """

    __slots__ = ("_t", "_hash")

    def __init__(self, terms: Mapping | None = None):
        t: dict = {}
        if terms:
            for m, c in terms.items():
                if isinstance(m, dict):
                    m = _mono_from_dict(m)
                else:
                    m = _mono_from_dict(dict(m))
                c = _as_rational(c)
                if c:
                    t[m] = _norm(t.get(m, 0) + c)
                    if not t[m]:
                        del t[m]
        self._t = t
        self._hash = None

    @classmethod
    def _raw(cls, t: dict) -> "MultiPoly":
        p = cls.__new__(cls)
        p._t = t
        p._hash = None
        return p

    @classmethod
    def var(cls, name: str, exp: int = 1) -> "MultiPoly":
        return cls._raw({((name, exp),): 1} if exp else {(): 1})

    @classmethod
    def const(cls, c) -> "MultiPoly":
        c = _as_rational(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def coerce(cls, x) -> "MultiPoly":
        if isinstance(x, MultiPoly):
            return x
        if isinstance(x, QPoly):
            return x.to_multipoly()
        return cls.const(x)

    # inspection ---------------------------------------------------------
    def raw_items(self):
        """(monomial tuple, rational) pairs including any ``q`` factor."""
        return self._t.items()

    def __len__(self):
        return len(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def is_constant(self) -> bool:
        return not self._t or set(self._t) == {()}

    def constant_value(self):
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self._t.get((), 0)

    def constant_term(self):
        return self._t.get((), 0)

    def variables(self) -> set[str]:
        return {v for m in self._t for v, _ in m}

    def degree(self, var: str | None = None) -> int:
        if not self._t:
            return -1
        if var is None:
            return max(sum(e for _, e in m) for m in self._t)
        return max(dict(m).get(var, 0) for m in self._t)

    @property
    def terms(self) -> dict[tuple, QPoly]:
        """Map q-free monomial -> :class:`QPoly` coefficient."""
        acc: dict = {}
        for m, c in self._t.items():
            d = dict(m)
            e = d.pop(Q_VAR, 0)
            key = tuple(sorted(d.items()))
            acc.setdefault(key, {})[e] = c
        return {k: QPoly(v) for k, v in acc.items()}

    def coefficient(self, mono: Mapping[str, int]) -> QPoly:
        return self.terms.get(_mono_from_dict(mono), QPoly())

    def denominator_lcm(self) -> int:
        d = 1
        for c in self._t.values():
            den = Fraction(c).denominator
            d = d * den // _gcd(d, den)
        return d

    def is_integral(self) -> bool:
        return all(Fraction(c).denominator == 1 for c in self._t.values())

    def denominator_primes(self) -> set[int]:
        out: set[int] = set()
        for c in self._t.values():
            out |= prime_divisors(Fraction(c).denominator)
        return out

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = MultiPoly.coerce(other)
        if not o._t:
            return self
        t = dict(self._t)
        for m, c in o._t.items():
            s = t.get(m, 0) + c
            if s:
                t[m] = _norm(s)
            else:
                t.pop(m, None)
        return MultiPoly._raw(t)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw({m: -c for m, c in self._t.items()})

    def __sub__(self, other):
        return self + (-MultiPoly.coerce(other))

    def __rsub__(self, other):
        return MultiPoly.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, (MultiPoly, QPoly)):
            c = _as_rational(other)
            if c == 0:
                return MultiPoly()
            if c == 1:
                return self
            return MultiPoly._raw({m: _norm(v * c) for m, v in self._t.items()})
        o = MultiPoly.coerce(other)
        t: dict = {}
        mm = _mono_mul
        for m1, c1 in self._t.items():
            for m2, c2 in o._t.items():
                m = mm(m1, m2)
                t[m] = t.get(m, 0) + c1 * c2
        return MultiPoly._raw({m: _norm(c) for m, c in t.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (MultiPoly, QPoly)):
            other = other.constant_value()
        other = _as_rational(other)
        if other == 0:
            raise ZeroDivisionError("MultiPoly division by zero")
        return MultiPoly._raw({m: _norm(Fraction(c) / other) for m, c in self._t.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        if n == 0:
            return MultiPoly.const(1)
        if n == 1:
            return self
        if len(self._t) == 1:
            ((m, c),) = self._t.items()
            return MultiPoly._raw({tuple((v, e * n) for v, e in m): _norm(Fraction(c) ** n)})
        result = MultiPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # substitution -----------------------------------------------------------
    def scale_exponents(self, names: Iterable[str], k: int) -> "MultiPoly":
        """Replace each variable ``v`` in ``names`` by ``v**k`` (Adams-style)."""
        names = set(names)
        if k == 1 or not names:
            return self
        t = {}
        for m, c in self._t.items():
            t[tuple((v, e * k) if v in names else (v, e) for v, e in m)] = c
        return MultiPoly._raw(t)

    def subs(self, values: Mapping[str, object]) -> "MultiPoly":
        """Substitute variables by MultiPoly / QPoly / rational values."""
        values = {k: MultiPoly.coerce(v) for k, v in values.items()}
        cache: dict = {}

        def power(v, e):
            key = (v, e)
            if key not in cache:
                cache[key] = values[v] ** e
            return cache[key]

        total: dict = {}
        result = MultiPoly._raw(total)
        for m, c in self._t.items():
            keep = []
            term = None
            for v, e in m:
                if v in values:
                    p = power(v, e)
                    term = p if term is None else term * p
                else:
                    keep.append((v, e))
            base = MultiPoly._raw({tuple(keep): c})
            result = result + (base if term is None else base * term)
        return result

    def evaluate(self, values: Mapping[str, object]):
        """Full evaluation with Python arithmetic; every variable must be bound."""
        cache: dict = {}
        total = 0
        for m, c in self._t.items():
            term = c
            for v, e in m:
                key = (v, e)
                if key not in cache:
                    cache[key] = values[v] ** e
                term = term * cache[key]
            total = total + term
        return _norm(total) if isinstance(total, (int, Fraction)) else total

    def specialize_q(self, qval) -> "MultiPoly":
        """Set ``q`` to an integer (or rational) value."""
        return self.subs({Q_VAR: qval})

    def divide_by_var(self, name: str, k: int = 1) -> "MultiPoly":
        t = {}
        for m, c in self._t.items():
            d = dict(m)
            if d.get(name, 0) < k:
                raise ArithmeticError(f"{self} is not divisible by {name}^{k}")
            d[name] -= k
            t[tuple(sorted((v, e) for v, e in d.items() if e))] = c
        return MultiPoly._raw(t)

    # comparisons -------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self._t == other._t
        if isinstance(other, (int, Fraction, QPoly)):
            return self == MultiPoly.coerce(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    def __repr__(self):
        return f"MultiPoly({self})"

    def __str__(self):
        if not self._t:
            return "0"
        parts = [_fmt_term(c, m) for m, c in sorted(self._t.items(), key=lambda kv: _grlex_key(kv[0]))]
        return _join_terms(parts)

    # json ---------------------------------------------------------------
    def to_json(self) -> dict:
        out = []
        grouped = self.terms
        for m in sorted(grouped, key=_grlex_key):
            qp = grouped[m]
            coeff = rational_to_json(qp.constant_value()) if qp.is_constant() else qp.to_json()
            out.append({"monomial": dict(m), "coeff": coeff})
        return {"terms": out}

    @classmethod
    def from_json(cls, obj) -> "MultiPoly":
        if not (isinstance(obj, dict) and "terms" in obj):
            return cls.const(rational_from_json(obj))
        total = cls()
        for t in obj["terms"]:
            mono = cls._raw({_mono_from_dict(t.get("monomial", {})): 1})
            coeff = t["coeff"]
            if isinstance(coeff, dict) and "terms" in coeff:
                c = cls.from_json(coeff)
            else:
                c = cls.const(rational_from_json(coeff))
            total = total + mono * c
        return total


# --------------------------------------------------------------------------
# Numerical (integer-valued) polynomials
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BinomialExpansion:
    """Coefficients ``c_k`` with ``p(t) == sum_k c_k * C(t, k)``."""

    coeffs: tuple

    def __len__(self):
        return len(self.coeffs)

    def evaluate(self, n: int):
        return _norm(sum(Fraction(c) * _binom_any(n, k) for k, c in enumerate(self.coeffs)))

    def is_integral(self) -> bool:
        return all(Fraction(c).denominator == 1 for c in self.coeffs)


def _binom_any(n: int, k: int) -> int:
    """``C(n, k)`` for any integer ``n`` and ``k >= 0``."""
    if n >= 0:
        return comb(n, k)
    return (-1) ** k * comb(k - n - 1, k)


def binomial_basis(p: QPoly) -> BinomialExpansion:
    """Expand ``p`` in the basis ``C(q, k)`` via forward differences at 0."""
    d = max(p.degree, 0)
    vals = [Fraction(p.evaluate(i)) for i in range(d + 1)]
    out = []
    for _ in range(d + 1):
        out.append(_norm(vals[0]))
        vals = [b - a for a, b in zip(vals, vals[1:])]
    return BinomialExpansion(tuple(out))


def is_numerical(p: QPoly) -> bool:
    """True iff ``p`` takes integer values at every integer."""
    return binomial_basis(p).is_integral()


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


@lru_cache(maxsize=None)
def _power_to_binomial(e: int) -> tuple:
    """``x**e == sum_k c_k C(x, k)``; returns ((k, c_k), ...)."""
    return tuple((k, stirling2(e, k) * factorial(k)) for k in range(e + 1) if stirling2(e, k))


def mixed_binomial_expansion(p: MultiPoly) -> dict:
    """Coefficients of ``p`` in the basis ``prod_v C(v, k_v)``.

    Keys are sorted tuples of (variable, k) with k > 0.
    """
    out: dict = {}
    for m, c in p.raw_items():
        factors = [[((v, k), ck) for k, ck in _power_to_binomial(e)] for v, e in m]
        for combo in product(*factors):
            key = tuple(sorted(vk for vk, _ in combo if vk[1]))
            w = c
            for _, ck in combo:
                w = w * ck
            out[key] = out.get(key, 0) + w
    return {k: _norm(v) for k, v in out.items() if v}


def is_numerical_multi(p: MultiPoly) -> bool:
    """True iff ``p`` is integer-valued jointly in all of its variables (``q`` included)."""
    return all(Fraction(c).denominator == 1 for c in mixed_binomial_expansion(p).values())


def prime_divisors(n: int) -> set[int]:
    n = abs(n)
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out
