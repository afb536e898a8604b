"""Finite models of the subgroup poset with its table of marks.

A :class:`GroupPoset` lists (conjugacy classes of) subgroups in an order
that extends the subconjugacy relation, position 0 being the whole group.
``leq[v][u]`` encodes ``[V] <= [U]`` -- for abelian groups that is
``U`` contained in ``V``, so the whole group sits at the bottom.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from math import gcd, lcm, prod

from .exactmath import QPoly

__all__ = [
    "PosetError",
    "GroupPoset",
    "TwistedMatrix",
    "build_cyclic",
    "build_finite_abelian",
    "load_marks",
    "poset_from_json",
    "zeta_q",
    "mu_q",
    "divisors",
]

ABELIAN_ORDER_CAP = 4096


class PosetError(ValueError):
    """A poset document or construction violates a structural invariant."""


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


@dataclass(frozen=True, eq=False)
class GroupPoset:
    labels: tuple[str, ...]
    index: tuple[int, ...]
    marks: tuple[tuple[int, ...], ...]
    abelian: bool = False
    meet: tuple[tuple[int, ...], ...] | None = None
    join: tuple[tuple[int, ...], ...] | None = None
    source: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        _validate(self)

    # --- structure ----------------------------------------------------------
    def __len__(self):
        return len(self.labels)

    @cached_property
    def leq(self) -> tuple[tuple[bool, ...], ...]:
        """``leq[v][u]`` is ``[V] <= [U]``; read off from the nonzero marks."""
        n = len(self)
        return tuple(tuple(self.marks[u][v] != 0 for u in range(n)) for v in range(n))

    @cached_property
    def _pos(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    def position(self, label) -> int:
        try:
            return self._pos[str(label)]
        except KeyError:
            raise KeyError(f"unknown poset element {label!r}") from None

    def below(self, u: int) -> list[int]:
        """Positions ``v`` with ``[V] <= [U]`` (includes ``u``)."""
        return [v for v in range(u + 1) if self.marks[u][v]]

    def above(self, v: int) -> list[int]:
        return [u for u in range(v, len(self)) if self.marks[u][v]]

    def rel_index(self, w: int, v: int) -> int:
        """``(W:V) = (G:V)/(G:W)`` for ``[V] <= [W]``... i.e. ``w`` below ``v``."""
        return self.index[v] // self.index[w]

    def normalizer_index(self, v: int) -> int:
        return self.marks[v][v]

    @cached_property
    def key(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def __eq__(self, other):
        if not isinstance(other, GroupPoset):
            return NotImplemented
        return (self.labels, self.index, self.marks, self.meet, self.join) == (
            other.labels,
            other.index,
            other.marks,
            other.meet,
            other.join,
        )

    def __hash__(self):
        return hash((self.labels, self.index, self.marks))

    def __repr__(self):
        return f"GroupPoset({list(self.labels)}, index={list(self.index)})"

    # --- abelian helpers ------------------------------------------------------
    def contains(self, u: int, v: int) -> bool:
        """Abelian only: subgroup ``u`` is contained in subgroup ``v``."""
        return self.leq[v][u]

    def subposet(self, u: int) -> tuple["GroupPoset", list[int]]:
        """The poset of subgroups of ``U`` with indices relative to ``U``.

        Returns the subposet and the list mapping its positions to positions
        in ``self``. Abelian posets only.
        """
        if not self.abelian:
            raise PosetError("subposets are modelled for abelian posets only")
        emb = [v for v in range(len(self)) if self.contains(v, u)]
        base = self.index[u]
        idx = tuple(self.index[v] // base for v in emb)
        marks = tuple(
            tuple(idx[j] if self.contains(a, b) else 0 for j, b in enumerate(emb)) for a in emb
        )
        where = {v: i for i, v in enumerate(emb)}
        meet = tuple(tuple(where[self.meet[a][b]] for b in emb) for a in emb)
        join = tuple(tuple(where[self.join[a][b]] for b in emb) for a in emb)
        sub = GroupPoset(
            labels=tuple(self.labels[v] for v in emb),
            index=idx,
            marks=marks,
            abelian=True,
            meet=meet,
            join=join,
            source={"kind": "subposet", "parent": self.source, "element": self.labels[u]},
        )
        return sub, emb

    # --- serialization --------------------------------------------------------
    def to_json(self) -> dict:
        doc = {
            "kind": "marks",
            "labels": list(self.labels),
            "index": list(self.index),
            "marks": [list(r) for r in self.marks],
        }
        if self.abelian:
            doc["meet"] = [list(r) for r in self.meet]
            doc["join"] = [list(r) for r in self.join]
        return doc

    def describe(self) -> dict:
        """The short reference form if the poset was built from one."""
        if self.source.get("kind") in ("cyclic", "abelian"):
            return dict(self.source)
        return self.to_json()


def _validate(p: GroupPoset) -> None:
    n = len(p.labels)
    if n == 0:
        raise PosetError("empty poset")
    if len(set(p.labels)) != n:
        raise PosetError("duplicate labels")
    if len(p.index) != n or len(p.marks) != n or any(len(r) != n for r in p.marks):
        raise PosetError("marks matrix must be square and match the label list")
    if p.index[0] != 1:
        raise PosetError("element 0 must be the whole group (index 1)")
    for v in range(n):
        if p.index[v] < 1:
            raise PosetError("indices must be positive")
        if p.marks[v][v] < 1:
            raise PosetError(f"diagonal mark at {p.labels[v]} must be positive")
        if p.marks[v][0] != 1:
            raise PosetError(f"marks[{p.labels[v]}][G] must be 1")
        for w in range(n):
            m = p.marks[v][w]
            if m < 0:
                raise PosetError("marks are non-negative")
            if w > v and m != 0:
                raise PosetError(
                    f"marks[{p.labels[v]}][{p.labels[w]}] != 0 above the diagonal: "
                    "the order does not extend subconjugacy"
                )
            if m and p.index[v] % p.index[w]:
                raise PosetError(
                    f"index of {p.labels[w]} does not divide index of {p.labels[v]}"
                )
    # transitivity of the relation read off the marks
    for a in range(n):
        for b in range(a + 1):
            if not p.marks[a][b]:
                continue
            for c in range(b + 1):
                if p.marks[b][c] and not p.marks[a][c]:
                    raise PosetError("subconjugacy relation is not transitive")
    if p.abelian:
        if p.meet is None or p.join is None:
            raise PosetError("abelian posets need meet and join tables")
        _validate_abelian(p)


def _validate_abelian(p: GroupPoset) -> None:
    n = len(p.labels)
    for v in range(n):
        for w in range(n):
            want = p.index[w] if p.marks[v][w] else 0
            if p.marks[v][w] != want:
                raise PosetError("abelian marks must equal (G:W) on containment")
    for tab in (p.meet, p.join):
        if len(tab) != n or any(len(r) != n for r in tab):
            raise PosetError("meet/join tables must be square")
    sub = lambda a, b: p.marks[a][b] != 0  # noqa: E731  a contained in b
    for a in range(n):
        for b in range(n):
            m, j = p.meet[a][b], p.join[a][b]
            if p.meet[b][a] != m or p.join[b][a] != j:
                raise PosetError("meet/join must be symmetric")
            if not (sub(m, a) and sub(m, b)):
                raise PosetError("meet is not a common subgroup")
            if not (sub(a, j) and sub(b, j)):
                raise PosetError("join is not a common supergroup")
            for c in range(n):
                if sub(c, a) and sub(c, b) and not sub(c, m):
                    raise PosetError("meet is not the greatest lower bound")
                if sub(a, c) and sub(b, c) and not sub(j, c):
                    raise PosetError("join is not the least upper bound")


# --------------------------------------------------------------------------
# constructors
# --------------------------------------------------------------------------


def build_cyclic(divs) -> GroupPoset:
    """Truncation of the procyclic poset to a divisor-closed set of indices."""
    ds = sorted({int(d) for d in divs})
    if not ds or ds[0] < 1:
        raise PosetError("divisor set must be a non-empty set of positive integers")
    dset = set(ds)
    for d in ds:
        for e in divisors(d):
            if e not in dset:
                raise PosetError(f"divisor set is not divisor-closed: {e} | {d} missing")
    n = len(ds)
    marks = tuple(tuple(d if m % d == 0 else 0 for d in ds) for m in ds)
    pos = {d: i for i, d in enumerate(ds)}
    meet = []
    join = []
    for a in ds:
        mrow, jrow = [], []
        for b in ds:
            l = lcm(a, b)
            if l not in dset:
                raise PosetError(
                    f"divisor set is not lcm-closed ({a}, {b}); meets would leave the truncation"
                )
            mrow.append(pos[l])
            jrow.append(pos[gcd(a, b)])
        meet.append(tuple(mrow))
        join.append(tuple(jrow))
    return GroupPoset(
        labels=tuple(str(d) for d in ds),
        index=tuple(ds),
        marks=marks,
        abelian=True,
        meet=tuple(meet),
        join=tuple(join),
        source={"kind": "cyclic", "divisors": ds},
    )


def _closure(gens: frozenset, factors: tuple[int, ...]) -> frozenset:
    elems = {tuple(0 for _ in factors)}
    frontier = list(elems)
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                s = tuple((x + y) % f for x, y, f in zip(a, g, factors))
                if s not in elems:
                    elems.add(s)
                    nxt.append(s)
        frontier = nxt
    return frozenset(elems)


def _encode(elem: tuple[int, ...], factors: tuple[int, ...]) -> int:
    code = 0
    for x, f in zip(elem, factors):
        code = code * f + x
    return code


def build_finite_abelian(invariants) -> GroupPoset:
    """All subgroups of ``Z/f_1 x ... x Z/f_k``, labelled by sorted element codes."""
    factors = tuple(int(f) for f in invariants)
    if any(f < 2 for f in factors):
        raise PosetError("invariant factors must be >= 2")
    order = prod(factors)
    if order > ABELIAN_ORDER_CAP:
        raise PosetError(f"group of order {order} exceeds the desk-scale cap {ABELIAN_ORDER_CAP}")
    elements = list(product(*(range(f) for f in factors)))
    trivial = _closure(frozenset(), factors)
    found = {trivial}
    frontier = [trivial]
    while frontier:
        nxt = []
        for s in frontier:
            for g in elements:
                if g in s:
                    continue
                t = _closure(frozenset(s | {g}), factors)
                if t not in found:
                    found.add(t)
                    nxt.append(t)
        frontier = nxt
    codes = {s: tuple(sorted(_encode(e, factors) for e in s)) for s in found}
    subs = sorted(found, key=lambda s: (-len(s), codes[s]))
    n = len(subs)
    pos = {s: i for i, s in enumerate(subs)}
    index = tuple(order // len(s) for s in subs)
    marks = tuple(tuple(index[w] if subs[v] <= subs[w] else 0 for w in range(n)) for v in range(n))
    meet = tuple(tuple(pos[subs[a] & subs[b]] for b in range(n)) for a in range(n))
    join = tuple(
        tuple(pos[_closure(frozenset(subs[a] | subs[b]), factors)] for b in range(n))
        for a in range(n)
    )
    return GroupPoset(
        labels=tuple(",".join(map(str, codes[s])) for s in subs),
        index=index,
        marks=marks,
        abelian=True,
        meet=meet,
        join=join,
        source={"kind": "abelian", "invariants": list(factors)},
    )


def load_marks(doc: dict) -> GroupPoset:
    """Build a poset from a table-of-marks document (validated)."""
    try:
        labels = tuple(str(x) for x in doc["labels"])
        index = tuple(int(x) for x in doc["index"])
        marks = tuple(tuple(int(x) for x in row) for row in doc["marks"])
    except (KeyError, TypeError) as exc:
        raise PosetError(f"malformed marks document: {exc}") from exc
    meet = doc.get("meet")
    join = doc.get("join")
    abelian = meet is not None and join is not None
    return GroupPoset(
        labels=labels,
        index=index,
        marks=marks,
        abelian=abelian,
        meet=tuple(tuple(int(x) for x in r) for r in meet) if abelian else None,
        join=tuple(tuple(int(x) for x in r) for r in join) if abelian else None,
        source={"kind": "marks"},
    )


def poset_from_json(doc: dict) -> GroupPoset:
    kind = doc.get("kind", "marks")
    if kind == "cyclic":
        if "divisors" in doc:
            return build_cyclic(doc["divisors"])
        return build_cyclic(divisors(int(doc["n"])))
    if kind == "abelian":
        return build_finite_abelian(doc["invariants"])
    if kind == "marks":
        return load_marks(doc)
    raise PosetError(f"unknown poset kind {kind!r}")


# --------------------------------------------------------------------------
# twisted matrices
# --------------------------------------------------------------------------


class TwistedMatrix:
    """Sparse matrix of ``(QPoly coefficient, Adams power)`` entries.

    Entry ``(i, j)`` acts on a vector component as ``c(q) * Psi^k``. Composition
    multiplies coefficients and Adams powers.
    """

    def __init__(self, nrows: int, ncols: int, entries: dict | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.entries: dict[tuple[int, int], tuple[QPoly, int]] = {}
        for (i, j), (c, k) in (entries or {}).items():
            c = c if isinstance(c, QPoly) else QPoly.const(c)
            if not c.is_zero():
                self.entries[(i, j)] = (c, int(k))

    def coeff(self, i: int, j: int) -> QPoly:
        return self.entries.get((i, j), (QPoly(), 1))[0]

    def adams(self, i: int, j: int) -> int:
        return self.entries.get((i, j), (QPoly(), 1))[1]

    def __getitem__(self, ij):
        return self.entries.get(ij, (QPoly(), 1))

    def untwisted(self) -> "TwistedMatrix":
        return TwistedMatrix(self.nrows, self.ncols, {ij: (c, 1) for ij, (c, _) in self.entries.items()})

    def __matmul__(self, other: "TwistedMatrix") -> "TwistedMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        by_row: dict[int, list] = {}
        for (j, k), e in other.entries.items():
            by_row.setdefault(j, []).append((k, e))
        out: dict = {}
        for (i, j), (c1, a1) in self.entries.items():
            for k, (c2, a2) in by_row.get(j, ()):
                key = (i, k)
                if key in out:
                    c, a = out[key]
                    if a != a1 * a2:
                        raise ValueError(f"inconsistent Adams powers at {key}")
                    out[key] = (c + c1 * c2, a)
                else:
                    out[key] = (c1 * c2, a1 * a2)
        return TwistedMatrix(self.nrows, other.ncols, out)

    def __add__(self, other: "TwistedMatrix") -> "TwistedMatrix":
        out = dict(self.entries)
        for key, (c, a) in other.entries.items():
            if key in out:
                c0, a0 = out[key]
                if a0 != a:
                    raise ValueError(f"inconsistent Adams powers at {key}")
                out[key] = (c0 + c, a)
            else:
                out[key] = (c, a)
        return TwistedMatrix(self.nrows, self.ncols, out)

    def scale(self, s) -> "TwistedMatrix":
        return TwistedMatrix(self.nrows, self.ncols, {ij: (c * s, a) for ij, (c, a) in self.entries.items()})

    def __eq__(self, other):
        if not isinstance(other, TwistedMatrix):
            return NotImplemented
        return (self.nrows, self.ncols, self.entries) == (other.nrows, other.ncols, other.entries)

    def is_identity(self) -> bool:
        if self.nrows != self.ncols:
            return False
        want = {(i, i): (QPoly.const(1), 1) for i in range(self.nrows)}
        return self.entries == want

    def specialize(self, q) -> list[list]:
        """Dense matrix of coefficient values at an integer ``q``."""
        m = [[0] * self.ncols for _ in range(self.nrows)]
        for (i, j), (c, _) in self.entries.items():
            m[i][j] = c.evaluate(q)
        return m

    def to_json(self) -> dict:
        return {
            "shape": [self.nrows, self.ncols],
            "entries": [
                {"row": i, "col": j, "coeff": c.to_json(), "adams": a}
                for (i, j), (c, a) in sorted(self.entries.items())
            ],
        }

    def __repr__(self):
        rows = []
        for i in range(self.nrows):
            rows.append("[" + ", ".join(str(self.coeff(i, j)) for j in range(self.ncols)) + "]")
        return "TwistedMatrix(" + ", ".join(rows) + ")"


def zeta_q(poset: GroupPoset, twisted: bool = True) -> TwistedMatrix:
    """Entries ``marks[V][W] * q^((W:V)-1)`` with Adams power ``(W:V)`` (1 if untwisted)."""
    n = len(poset)
    ent = {}
    for v in range(n):
        for w in poset.below(v):
            k = poset.rel_index(w, v)
            ent[(v, w)] = (QPoly.monomial(poset.marks[v][w], k - 1), k if twisted else 1)
    return TwistedMatrix(n, n, ent)


_MU_CACHE: dict[str, TwistedMatrix] = {}


def mu_q(poset: GroupPoset, twisted: bool = True) -> TwistedMatrix:
    """Inverse of :func:`zeta_q` over ``Q[q]`` by forward substitution."""
    key = poset.key
    if key not in _MU_CACHE:
        _MU_CACHE[key] = _invert_lower(poset, zeta_q(poset, twisted=False))
    mu = _MU_CACHE[key]
    if not twisted:
        return mu
    return TwistedMatrix(
        mu.nrows,
        mu.ncols,
        {(v, w): (c, poset.rel_index(w, v)) for (v, w), (c, _) in mu.entries.items()},
    )


def _invert_lower(poset: GroupPoset, zeta: TwistedMatrix) -> TwistedMatrix:
    n = len(poset)
    mu: dict = {}
    for v in range(n):
        below = poset.below(v)
        mu[(v, v)] = QPoly.const(1) / zeta.coeff(v, v)
        for w in reversed(below[:-1]):
            acc = QPoly()
            for k in below:
                if k > w and poset.marks[k][w] and (v, k) in mu:
                    acc = acc + mu[(v, k)] * zeta.coeff(k, w)
            mu[(v, w)] = -acc / zeta.coeff(w, w)
    return TwistedMatrix(n, n, {ij: (c, 1) for ij, c in mu.items()})
