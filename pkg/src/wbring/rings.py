"""Coefficient rings with Adams operations, the three vector rings and their ghost maps.

``witt`` vectors carry the q-deformed Witt-Burnside structure, ``nr`` vectors the
Adams-twisted necklace structure and ``nr_hat`` the untwisted one. Ring
operations on ``witt`` vectors evaluate universal structure polynomials, which
are computed once per poset with ``q`` kept symbolic.
"""
from __future__ import annotations

import json
import os
import random
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from pathlib import Path

from .exactmath import (
    GuardExceeded,
    IntegralityError,
    MultiPoly,
    NonUnitError,
    Q_VAR,
    QPoly,
    is_numerical,
    is_numerical_multi,
    rational_from_json,
    rational_to_json,
)
from .necklace import orbit_sum
from .poset import GroupPoset, mu_q, poset_from_json

__all__ = [
    "SYM",
    "AdamsRing",
    "IntegerRing",
    "RationalRing",
    "IntegersMod",
    "PolyRing",
    "INTEGERS",
    "RATIONALS",
    "POLY_INT",
    "POLY_POWER",
    "ring_from_code",
    "RingVector",
    "KINDS",
    "ghost_witt",
    "ghost_necklace",
    "ghost_invert",
    "StructureTable",
    "structure_table",
    "xvar",
    "yvar",
    "witt_add",
    "witt_mul",
    "witt_neg",
    "witt_add_ghost",
    "witt_mul_ghost",
    "nr_add",
    "nr_neg",
    "nr_mul",
    "PCoeffTable",
    "p_coeffs",
    "p_coeffs_meet",
    "convert",
    "STRUCTURE_SIZE_GUARD",
]

SYM = "sym"
KINDS = ("witt", "nr", "nr_hat", "ghost")
STRUCTURE_SIZE_GUARD = 12
T_VAR = "t"


def _is_sym(q) -> bool:
    return isinstance(q, str) and q == SYM


# --------------------------------------------------------------------------
# coefficient rings
# --------------------------------------------------------------------------


class AdamsRing:
    """A commutative ring with Adams operations ``psi(n, a)``.

    Subclasses fix the carrier; the base class supplies the derived operations.
    """

    code = "?"
    binomial = True

    def zero(self):
        return self.from_int(0)

    def one(self):
        return self.from_int(1)

    def from_int(self, n: int):
        raise NotImplementedError

    def from_rational(self, c):
        if isinstance(c, int):
            return self.from_int(c)
        c = Fraction(c)
        if c.denominator != 1:
            raise IntegralityError(f"{c} is not an element of {self.code}")
        return self.from_int(c.numerator)

    def coerce(self, a):
        return a

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def pow(self, a, n: int):
        if n == 0:
            return self.one()
        return a**n

    def psi(self, n: int, a):
        if n < 1:
            raise ValueError("Adams operations are indexed by positive integers")
        return a

    def eq(self, a, b) -> bool:
        return a == b

    def is_zero(self, a) -> bool:
        return self.eq(a, self.zero())

    def div_int(self, a, n: int):
        """Exact division by a positive integer; fails loudly when impossible."""
        raise NotImplementedError

    def to_json(self, a):
        raise NotImplementedError

    def from_json(self, v):
        raise NotImplementedError

    def random(self, rng: random.Random, bound: int = 5):
        return self.from_int(rng.randint(-bound, bound))

    def with_q(self) -> "AdamsRing":
        """The polynomial extension holding a symbolic ``q``."""
        raise ValueError(f"symbolic q is not supported over {self.code}")

    def qelem(self, q):
        if _is_sym(q):
            raise ValueError(f"{self.code} has no symbolic q; use with_q()")
        return self.from_int(int(q))

    def sum(self, items):
        acc = self.zero()
        for x in items:
            acc = self.add(acc, x)
        return acc

    def __eq__(self, other):
        return isinstance(other, AdamsRing) and self.code == other.code

    def __hash__(self):
        return hash(self.code)

    def __repr__(self):
        return f"<ring {self.code}>"


class IntegerRing(AdamsRing):
    code = "Z"

    def from_int(self, n):
        return int(n)

    def coerce(self, a):
        if isinstance(a, Fraction):
            return self.from_rational(a)
        return int(a)

    def div_int(self, a, n):
        d, r = divmod(a, n)
        if r:
            raise IntegralityError(f"{a} is not divisible by {n} in Z")
        return d

    def to_json(self, a):
        return int(a)

    def from_json(self, v):
        if isinstance(v, str):
            return self.from_rational(Fraction(v))
        if isinstance(v, dict):
            return self.from_rational(rational_from_json(v))
        return int(v)

    def with_q(self):
        return PolyRing("Z[q]", (), "numerical")


class RationalRing(AdamsRing):
    code = "Q"

    def from_int(self, n):
        return int(n)

    def from_rational(self, c):
        c = Fraction(c)
        return c.numerator if c.denominator == 1 else c

    def coerce(self, a):
        return self.from_rational(a)

    def div_int(self, a, n):
        return self.from_rational(Fraction(a) / n)

    def to_json(self, a):
        return rational_to_json(a)

    def from_json(self, v):
        if isinstance(v, dict):
            return self.from_rational(rational_from_json(v))
        return self.from_rational(Fraction(v))

    def random(self, rng, bound=5):
        return self.from_rational(Fraction(rng.randint(-bound, bound), rng.randint(1, 3)))

    def with_q(self):
        return PolyRing("Q[q]", (), None)


class IntegersMod(AdamsRing):
    def __init__(self, m: int):
        if m < 2:
            raise ValueError("modulus must be at least 2")
        self.m = m
        self.code = f"Zmod:{m}"

    def from_int(self, n):
        return int(n) % self.m

    def from_rational(self, c):
        if isinstance(c, int):
            return c % self.m
        c = Fraction(c)
        if gcd(c.denominator, self.m) != 1:
            raise NonUnitError(f"{c.denominator} is not a unit mod {self.m}")
        return c.numerator * pow(c.denominator, -1, self.m) % self.m

    def coerce(self, a):
        return self.from_rational(a)

    def add(self, a, b):
        return (a + b) % self.m

    def sub(self, a, b):
        return (a - b) % self.m

    def neg(self, a):
        return -a % self.m

    def mul(self, a, b):
        return a * b % self.m

    def pow(self, a, n):
        return pow(a, n, self.m)

    def div_int(self, a, n):
        if gcd(n, self.m) != 1:
            raise NonUnitError(
                f"{n} is not invertible mod {self.m}: the ring has {n}-torsion"
            )
        return a * pow(n, -1, self.m) % self.m

    def to_json(self, a):
        return int(a)

    def from_json(self, v):
        return self.from_int(int(v))

    def random(self, rng, bound=5):
        return rng.randrange(self.m)


class PolyRing(AdamsRing):
    """Polynomials in ``t`` (and possibly ``q``) stored as :class:`MultiPoly`.

    ``line_vars`` are the variables on which ``psi(n)`` acts by ``v -> v**n``;
    everything else (coefficients, ``q``) is fixed by the Adams operations.
    ``check`` selects the integrality test applied on division:
    ``"int"`` (integer coefficients), ``"numerical"`` (integer valued) or None.
    """

    def __init__(self, code: str, line_vars: tuple = (), check: str | None = "int"):
        self.code = code
        self.line_vars = tuple(line_vars)
        self.check = check
        self.binomial = not self.line_vars

    def from_int(self, n):
        return MultiPoly.const(int(n))

    def from_rational(self, c):
        c = Fraction(c)
        if self.check and c.denominator != 1:
            raise IntegralityError(f"{c} is not an element of {self.code}")
        return MultiPoly.const(c)

    def coerce(self, a):
        if isinstance(a, (MultiPoly, QPoly)):
            return MultiPoly.coerce(a)
        return self.from_rational(a)

    def pow(self, a, n):
        return a**n

    def psi(self, n, a):
        if n < 1:
            raise ValueError("Adams operations are indexed by positive integers")
        return a.scale_exponents(self.line_vars, n)

    def _checked(self, a):
        if self.check == "int" and not a.is_integral():
            raise IntegralityError(f"{a} has non-integral coefficients")
        if self.check == "numerical" and not is_numerical_multi(a):
            raise IntegralityError(f"{a} is not integer valued")
        return a

    def div_int(self, a, n):
        return self._checked(a / n)

    def to_json(self, a):
        return a.to_json()

    def from_json(self, v):
        if isinstance(v, dict) and "terms" in v:
            return MultiPoly.from_json(v)
        if isinstance(v, dict):
            return self.from_rational(rational_from_json(v))
        return self.from_rational(Fraction(v))

    def random(self, rng, bound=3):
        if not self.code.startswith("Zt"):
            return self.from_int(rng.randint(-bound, bound))
        out = MultiPoly()
        for e in range(3):
            out = out + MultiPoly.const(rng.randint(-bound, bound)) * MultiPoly.var(T_VAR, e)
        return out

    def with_q(self):
        if Q_VAR in self.code:
            return self
        return PolyRing(self.code + "[q]", self.line_vars, "numerical" if self.check else None)

    def qelem(self, q):
        if _is_sym(q):
            if not self.code.endswith("[q]"):
                raise ValueError(f"{self.code} has no symbolic q; use with_q()")
            return MultiPoly.var(Q_VAR)
        return self.from_int(int(q))


INTEGERS = IntegerRing()
RATIONALS = RationalRing()
POLY_INT = PolyRing("Zt", ())
POLY_POWER = PolyRing("Zt_power", (T_VAR,))


def ring_from_code(code: str) -> AdamsRing:
    base, sym = (code[:-3], True) if code.endswith("[q]") else (code, False)
    if base == "Z":
        ring = INTEGERS
    elif base == "Q":
        ring = RATIONALS
    elif base == "Zt":
        ring = POLY_INT
    elif base == "Zt_power":
        ring = POLY_POWER
    elif base.startswith("Zmod:"):
        try:
            ring = IntegersMod(int(base[5:]))
        except ValueError as exc:
            raise ValueError(f"bad modulus in ring code {code!r}") from exc
    else:
        raise ValueError(f"unknown ring {code!r}")
    return ring.with_q() if sym else ring


# --------------------------------------------------------------------------
# vectors
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RingVector:
    """A map from poset elements to ring elements, tagged with its ring structure."""

    poset: GroupPoset
    kind: str
    ring: AdamsRing
    entries: tuple

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown vector kind {self.kind!r}")
        if len(self.entries) != len(self.poset):
            raise ValueError("vector entries must cover the whole poset")

    @classmethod
    def from_list(cls, poset, kind, ring, values) -> "RingVector":
        return cls(poset, kind, ring, tuple(ring.coerce(v) for v in values))

    @classmethod
    def from_dict(cls, poset, kind, ring, mapping) -> "RingVector":
        vals = [ring.zero()] * len(poset)
        for lab, v in mapping.items():
            vals[poset.position(lab)] = ring.coerce(v)
        return cls(poset, kind, ring, tuple(vals))

    @classmethod
    def basis(cls, poset, kind, ring, label) -> "RingVector":
        return cls.from_dict(poset, kind, ring, {label: ring.one()})

    @classmethod
    def random(cls, poset, kind, ring, rng, bound=5) -> "RingVector":
        return cls(poset, kind, ring, tuple(ring.random(rng, bound) for _ in range(len(poset))))

    def __getitem__(self, key):
        if isinstance(key, int):
            return self.entries[key]
        return self.entries[self.poset.position(key)]

    def __len__(self):
        return len(self.entries)

    def with_entries(self, values, kind=None, ring=None) -> "RingVector":
        return RingVector(self.poset, kind or self.kind, ring or self.ring, tuple(values))

    def __eq__(self, other):
        if not isinstance(other, RingVector):
            return NotImplemented
        return (
            self.poset == other.poset
            and self.kind == other.kind
            and self.ring == other.ring
            and all(self.ring.eq(a, b) for a, b in zip(self.entries, other.entries))
        )

    def __repr__(self):
        body = ", ".join(f"{l}: {v}" for l, v in zip(self.poset.labels, self.entries))
        return f"RingVector[{self.kind}/{self.ring.code}]({{{body}}})"

    def to_json(self) -> dict:
        return {
            "poset": self.poset.describe(),
            "kind": self.kind,
            "ring": self.ring.code,
            "entries": {l: self.ring.to_json(v) for l, v in zip(self.poset.labels, self.entries)},
        }

    @classmethod
    def from_json(cls, doc: dict, poset: GroupPoset | None = None) -> "RingVector":
        if poset is None:
            poset = poset_from_json(doc["poset"])
        ring = ring_from_code(doc.get("ring", "Z"))
        kind = doc.get("kind", "witt")
        entries = doc.get("entries", {})
        if isinstance(entries, list):
            return cls.from_list(poset, kind, ring, [ring.from_json(v) for v in entries])
        vals = [ring.zero()] * len(poset)
        for lab, v in entries.items():
            vals[poset.position(lab)] = ring.from_json(v)
        return cls(poset, kind, ring, tuple(vals))


def _lift(v: RingVector, q) -> tuple[AdamsRing, tuple]:
    """Ring and entries to compute in: the q-extension when q is symbolic."""
    if not _is_sym(q):
        return v.ring, v.entries
    ring = v.ring.with_q()
    return ring, tuple(ring.coerce(x) for x in v.entries)


def _qpowers(ring: AdamsRing, q, top: int) -> list:
    qe = ring.qelem(q)
    out = [ring.one()]
    for _ in range(top):
        out.append(ring.mul(out[-1], qe))
    return out


# --------------------------------------------------------------------------
# ghost maps
# --------------------------------------------------------------------------


def ghost_witt(q, v: RingVector) -> RingVector:
    """``U -> sum_{V<=U} marks[U][V] q^((V:U)-1) v(V)^((V:U))``."""
    if v.kind != "witt":
        raise ValueError("ghost_witt expects a witt vector")
    P = v.poset
    ring, x = _lift(v, q)
    qp = _qpowers(ring, q, max(P.index))
    out = []
    for u in range(len(P)):
        acc = ring.zero()
        for w in P.below(u):
            k = P.rel_index(w, u)
            term = ring.mul(ring.from_int(P.marks[u][w]), ring.mul(qp[k - 1], ring.pow(x[w], k)))
            acc = ring.add(acc, term)
        out.append(acc)
    return RingVector(P, "ghost", ring, tuple(out))


def ghost_necklace(q, v: RingVector) -> RingVector:
    """Linear ghost map; Adams-twisted for ``nr``, untwisted for ``nr_hat``."""
    if v.kind not in ("nr", "nr_hat"):
        raise ValueError("ghost_necklace expects an nr or nr_hat vector")
    P = v.poset
    ring, x = _lift(v, q)
    qp = _qpowers(ring, q, max(P.index))
    twisted = v.kind == "nr"
    out = []
    for u in range(len(P)):
        acc = ring.zero()
        for w in P.below(u):
            k = P.rel_index(w, u)
            val = ring.psi(k, x[w]) if twisted else x[w]
            acc = ring.add(acc, ring.mul(ring.from_int(P.marks[u][w]), ring.mul(qp[k - 1], val)))
        out.append(acc)
    return RingVector(P, "ghost", ring, tuple(out))


def ghost_invert(q, g: RingVector, kind: str) -> RingVector:
    """Invert the ghost map of ``kind`` by forward substitution.

    Each step divides by ``marks[U][U]``; over ``Z`` the division is checked to be
    exact (:class:`IntegralityError`), over ``Z/m`` a non-unit raises
    :class:`NonUnitError`.
    """
    if g.kind != "ghost":
        raise ValueError("ghost_invert expects a ghost vector")
    if kind not in ("witt", "nr", "nr_hat"):
        raise ValueError(f"cannot invert into kind {kind!r}")
    P = g.poset
    ring, gv = _lift(g, q)
    qp = _qpowers(ring, q, max(P.index))
    x: list = [None] * len(P)
    for u in range(len(P)):
        rest = gv[u]
        for w in P.below(u):
            if w == u:
                continue
            k = P.rel_index(w, u)
            if kind == "witt":
                val = ring.pow(x[w], k)
            elif kind == "nr":
                val = ring.psi(k, x[w])
            else:
                val = x[w]
            rest = ring.sub(rest, ring.mul(ring.from_int(P.marks[u][w]), ring.mul(qp[k - 1], val)))
        x[u] = ring.div_int(rest, P.marks[u][u])
    return RingVector(P, kind, ring, tuple(x))


# --------------------------------------------------------------------------
# structure polynomials
# --------------------------------------------------------------------------


def xvar(label: str) -> str:
    return f"x[{label}]"


def yvar(label: str) -> str:
    return f"y[{label}]"


_CACHE_VERSION = 1


@dataclass(frozen=True, eq=False)
class StructureTable:
    """Sum, product and negation polynomials per poset element.

    ``q`` is either :data:`SYM` (coefficients are polynomials in ``q``) or the
    integer the table was specialized at.
    """

    poset: GroupPoset
    q: object
    s: tuple
    p: tuple
    iota: tuple

    def at(self, qval) -> "StructureTable":
        if not _is_sym(self.q):
            raise ValueError("table is already specialized")
        if _is_sym(qval):
            return self
        sp = lambda polys: tuple(f.specialize_q(qval) for f in polys)  # noqa: E731
        return StructureTable(self.poset, int(qval), sp(self.s), sp(self.p), sp(self.iota))

    def integrality_failures(self) -> list[tuple[str, str, tuple]]:
        """(kind, element, monomial) triples whose q-coefficient is not numerical."""
        bad = []
        for name, polys in (("s", self.s), ("p", self.p), ("iota", self.iota)):
            for lab, f in zip(self.poset.labels, polys):
                for mono, c in f.terms.items():
                    if not is_numerical(c):
                        bad.append((name, lab, mono))
        return bad

    def coefficients(self):
        for polys in (self.s, self.p, self.iota):
            for f in polys:
                yield from f.terms.values()

    def to_json(self) -> dict:
        return {
            "poset": self.poset.describe(),
            "q": self.q,
            "elements": {
                lab: {"s": s.to_json(), "p": p.to_json(), "iota": i.to_json()}
                for lab, s, p, i in zip(self.poset.labels, self.s, self.p, self.iota)
            },
        }

    @classmethod
    def from_json(cls, doc: dict, poset: GroupPoset | None = None) -> "StructureTable":
        poset = poset or poset_from_json(doc["poset"])
        el = doc["elements"]
        get = lambda key: tuple(MultiPoly.from_json(el[l][key]) for l in poset.labels)  # noqa: E731
        return cls(poset, doc["q"], get("s"), get("p"), get("iota"))


def _ghost_polys(P: GroupPoset, var) -> list[MultiPoly]:
    out = []
    for u in range(len(P)):
        acc = MultiPoly()
        for w in P.below(u):
            k = P.rel_index(w, u)
            acc = acc + MultiPoly.const(P.marks[u][w]) * MultiPoly.var(Q_VAR, k - 1) * MultiPoly.var(
                var(P.labels[w]), k
            )
        out.append(acc)
    return out


def _solve_witt(P: GroupPoset, ghosts: list[MultiPoly]) -> tuple:
    """Witt components whose q-ghost is ``ghosts``, computed symbolically."""
    sol: list = []
    for u in range(len(P)):
        rest = ghosts[u]
        for w in P.below(u):
            if w == u:
                continue
            k = P.rel_index(w, u)
            rest = rest - MultiPoly.const(P.marks[u][w]) * MultiPoly.var(Q_VAR, k - 1) * sol[w] ** k
        sol.append(rest / P.marks[u][u])
    return tuple(sol)


def _compute_table(P: GroupPoset) -> StructureTable:
    gx = _ghost_polys(P, xvar)
    gy = _ghost_polys(P, yvar)
    s = _solve_witt(P, [a + b for a, b in zip(gx, gy)])
    p = _solve_witt(P, [a * b for a, b in zip(gx, gy)])
    iota = _solve_witt(P, [-a for a in gx])
    return StructureTable(P, SYM, s, p, iota)


def _cache_dir() -> Path:
    return Path(os.environ.get("WBR_CACHE_DIR", ".wbr-cache"))


def _cache_path(P: GroupPoset) -> Path:
    return _cache_dir() / f"structure-v{_CACHE_VERSION}-{P.key}.json"


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


_TABLES: dict[str, StructureTable] = {}
_SPECIAL: dict[tuple, StructureTable] = {}


def structure_table(poset: GroupPoset, q=SYM, *, use_disk: bool = True, check: bool = True) -> StructureTable:
    """Universal polynomials for sum, product and negation.

    Computed symbolically in ``q``, memoized in memory and on disk under
    ``$WBR_CACHE_DIR`` (default ``.wbr-cache/``), then specialized when ``q`` is
    an integer. With ``check`` every coefficient must be a numerical polynomial
    in ``q``; a failure raises :class:`IntegralityError`.
    """
    if len(poset) > STRUCTURE_SIZE_GUARD:
        raise GuardExceeded(f"poset of size {len(poset)} exceeds the structure-table guard {STRUCTURE_SIZE_GUARD}")
    key = poset.key
    table = _TABLES.get(key)
    if table is None:
        path = _cache_path(poset)
        if use_disk and path.exists():
            try:
                table = StructureTable.from_json(json.loads(path.read_text()), poset)
            except (OSError, ValueError, KeyError):
                table = None
        if table is None:
            table = _compute_table(poset)
            if check:
                bad = table.integrality_failures()
                if bad:
                    raise IntegralityError(f"non-numerical structure coefficients: {bad[:5]}")
            if use_disk:
                try:
                    _atomic_write(path, json.dumps(table.to_json(), sort_keys=True))
                except OSError:
                    pass
        _TABLES[key] = table
    if _is_sym(q):
        return table
    skey = (key, int(q))
    if skey not in _SPECIAL:
        _SPECIAL[skey] = table.at(int(q))
    return _SPECIAL[skey]


def _compile(f: MultiPoly) -> list:
    return [(c, m) for m, c in f.raw_items()]


_COMPILED: dict[tuple, tuple] = {}


def _compiled(table: StructureTable, which: str) -> tuple:
    key = (table.poset.key, str(table.q), which)
    if key not in _COMPILED:
        _COMPILED[key] = tuple(_compile(f) for f in getattr(table, which))
    return _COMPILED[key]


def _eval_terms(ring: AdamsRing, terms: list, values: dict):
    cache: dict = {}
    acc = ring.zero()
    for c, mono in terms:
        t = ring.from_rational(c)
        for v, e in mono:
            pe = cache.get((v, e))
            if pe is None:
                pe = cache[(v, e)] = ring.pow(values[v], e)
            t = ring.mul(t, pe)
        acc = ring.add(acc, t)
    return acc


def _witt_binary(q, a: RingVector, b: RingVector | None, which: str) -> RingVector:
    for v in (a, b):
        if v is not None and v.kind != "witt":
            raise ValueError("witt operations expect witt vectors")
    if b is not None and (a.poset != b.poset or a.ring != b.ring):
        raise ValueError("operands must share poset and ring")
    P = a.poset
    table = structure_table(P, q)
    ring, xa = _lift(a, q)
    values = {xvar(l): xa[i] for i, l in enumerate(P.labels)}
    if b is not None:
        _, xb = _lift(b, q)
        values.update({yvar(l): xb[i] for i, l in enumerate(P.labels)})
    if _is_sym(q):
        values[Q_VAR] = ring.qelem(SYM)
    polys = _compiled(table, which)
    out = tuple(_eval_terms(ring, polys[u], values) for u in range(len(P)))
    return RingVector(P, "witt", ring, out)


def witt_add(q, a: RingVector, b: RingVector) -> RingVector:
    return _witt_binary(q, a, b, "s")


def witt_mul(q, a: RingVector, b: RingVector) -> RingVector:
    return _witt_binary(q, a, b, "p")


def witt_neg(q, a: RingVector) -> RingVector:
    return _witt_binary(q, a, None, "iota")


def _via_ghost(q, a, b, op) -> RingVector:
    ga, gb = ghost_witt(q, a), ghost_witt(q, b)
    ring = ga.ring
    g = ga.with_entries([op(ring, x, y) for x, y in zip(ga.entries, gb.entries)])
    return ghost_invert(q, g, "witt")


def witt_add_ghost(q, a: RingVector, b: RingVector) -> RingVector:
    """Sum through the ghost map; needs the divisions to be exact in the ring."""
    return _via_ghost(q, a, b, lambda r, x, y: r.add(x, y))


def witt_mul_ghost(q, a: RingVector, b: RingVector) -> RingVector:
    return _via_ghost(q, a, b, lambda r, x, y: r.mul(x, y))


# --------------------------------------------------------------------------
# necklace rings
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PCoeffTable:
    """``P^U_{V,W}(q)`` for ``V, W <= U`` (positions), symbolic in ``q``."""

    poset: GroupPoset
    entries: dict

    def get(self, u: int, v: int, w: int) -> QPoly:
        return self.entries.get((u, v, w), QPoly())

    def integrality_failures(self) -> list:
        L = self.poset.labels
        return [(L[u], L[v], L[w]) for (u, v, w), c in self.entries.items() if not is_numerical(c)]

    def is_symmetric(self) -> bool:
        return all(self.get(u, w, v) == c for (u, v, w), c in self.entries.items())

    def recursion_failures(self) -> list:
        """Check ``sum_Z marks[U][Z] q^((Z:U)-1) P^Z_{V,W} = marks[U][V] marks[U][W] q^((V:U)+(W:U)-2)``."""
        P = self.poset
        bad = []
        for u in range(len(P)):
            below = P.below(u)
            for v in below:
                for w in below:
                    lhs = QPoly()
                    for z in below:
                        c = self.get(z, v, w)
                        if not c.is_zero():
                            lhs = lhs + QPoly.monomial(P.marks[u][z], P.rel_index(z, u) - 1) * c
                    rhs = QPoly.monomial(
                        P.marks[u][v] * P.marks[u][w], P.rel_index(v, u) + P.rel_index(w, u) - 2
                    )
                    if lhs != rhs:
                        bad.append((P.labels[u], P.labels[v], P.labels[w]))
        return bad

    def to_json(self) -> dict:
        L = self.poset.labels
        return {
            "poset": self.poset.describe(),
            "entries": [
                {"U": L[u], "V": L[v], "W": L[w], "P": c.to_json()}
                for (u, v, w), c in sorted(self.entries.items())
            ],
        }


_PCOEFFS: dict[str, PCoeffTable] = {}


def p_coeffs(poset: GroupPoset, check: bool = True) -> PCoeffTable:
    """``P^U_{V,W} = sum_Z mu(U,Z) marks[Z][V] marks[Z][W] q^((V:Z)-1) q^((W:Z)-1)``."""
    if poset.key in _PCOEFFS:
        return _PCOEFFS[poset.key]
    mu = mu_q(poset, twisted=False)
    ent = {}
    n = len(poset)
    for u in range(n):
        below = poset.below(u)
        for v in below:
            for w in below:
                acc = QPoly()
                for z in below:
                    m = mu.coeff(u, z)
                    if m.is_zero() or not (poset.marks[z][v] and poset.marks[z][w]):
                        continue
                    e = poset.rel_index(v, z) + poset.rel_index(w, z) - 2
                    acc = acc + m * QPoly.monomial(poset.marks[z][v] * poset.marks[z][w], e)
                if not acc.is_zero():
                    ent[(u, v, w)] = acc
    table = PCoeffTable(poset, ent)
    if check:
        bad = table.integrality_failures()
        if bad:
            raise IntegralityError(f"non-numerical P coefficients at {bad[:5]}")
    _PCOEFFS[poset.key] = table
    return table


def p_coeffs_meet(poset: GroupPoset) -> PCoeffTable:
    """Abelian closed form through meets and joins.

    ``P^U_{V,W} = (G:V+W)/q * M_{V cap W}(q^((V:V cap W)+(W:V cap W)-1), U)`` where the
    orbit sum is taken in the poset of subgroups of ``V cap W``.
    """
    if not poset.abelian:
        raise ValueError("the meet route needs an abelian poset")
    ent = {}
    n = len(poset)
    for v in range(n):
        for w in range(n):
            z = poset.meet[v][w]
            j = poset.join[v][w]
            e = poset.rel_index(v, z) + poset.rel_index(w, z) - 1
            sub, emb = poset.subposet(z)
            for i, u in enumerate(emb):
                m = orbit_sum(sub, i).value
                val = m.subs({"x": MultiPoly.var(Q_VAR, e)})
                c = _to_qpoly(val.divide_by_var(Q_VAR)) * poset.index[j]
                if not c.is_zero():
                    ent[(u, v, w)] = c
    return PCoeffTable(poset, ent)


def _to_qpoly(f: MultiPoly) -> QPoly:
    terms = f.terms
    if any(m for m in terms):
        raise ValueError("expected a polynomial in q alone")
    return terms.get((), QPoly())


def _check_necklace(a: RingVector, b: RingVector | None = None):
    if a.kind not in ("nr", "nr_hat"):
        raise ValueError("necklace operations expect nr or nr_hat vectors")
    if b is not None and (b.kind != a.kind or b.poset != a.poset or b.ring != a.ring):
        raise ValueError("operands must share kind, poset and ring")


def nr_add(a: RingVector, b: RingVector) -> RingVector:
    _check_necklace(a, b)
    return a.with_entries([a.ring.add(x, y) for x, y in zip(a.entries, b.entries)])


def nr_neg(a: RingVector) -> RingVector:
    _check_necklace(a)
    return a.with_entries([a.ring.neg(x) for x in a.entries])


def nr_mul(q, a: RingVector, b: RingVector, route: str = "p") -> RingVector:
    """Necklace product ``sum P^U_{V,W}(q) Psi^(V:U) a(V) Psi^(W:U) b(W)``.

    ``route="meet"`` takes the coefficients from the abelian closed form instead.
    ``nr_hat`` vectors use the same coefficients without Adams operations.
    """
    _check_necklace(a, b)
    P = a.poset
    table = p_coeffs(P) if route == "p" else p_coeffs_meet(P)
    ring, xa = _lift(a, q)
    _, xb = _lift(b, q)
    twisted = a.kind == "nr"
    out = []
    for u in range(len(P)):
        acc = ring.zero()
        below = P.below(u)
        for v in below:
            av = ring.psi(P.rel_index(v, u), xa[v]) if twisted else xa[v]
            for w in below:
                c = table.get(u, v, w)
                if c.is_zero():
                    continue
                cv = ring.coerce(c) if _is_sym(q) else ring.from_rational(c.evaluate(int(q)))
                bw = ring.psi(P.rel_index(w, u), xb[w]) if twisted else xb[w]
                acc = ring.add(acc, ring.mul(cv, ring.mul(av, bw)))
        out.append(acc)
    return RingVector(P, a.kind, ring, tuple(out))


# --------------------------------------------------------------------------
# isomorphisms over the rationals
# --------------------------------------------------------------------------


def convert(q, v: RingVector, kind: str) -> RingVector:
    """Transport ``v`` to another ring structure by ghost conjugation.

    Needs the ghost divisions to be possible, e.g. over ``Q``.
    """
    if v.kind == kind:
        return v
    if v.kind == "witt":
        g = ghost_witt(q, v)
    elif v.kind in ("nr", "nr_hat"):
        g = ghost_necklace(q, v)
    else:
        g = v
    if kind == "ghost":
        return g
    return ghost_invert(q, g, kind)
