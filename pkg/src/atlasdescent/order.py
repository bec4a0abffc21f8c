"""Finite posets, preorders, monotone maps and finite frames of open sets.

Everything here is immutable and small. Element identifiers are plain
strings; opens of a frame are ``frozenset`` objects of point identifiers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations, product
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

Open = frozenset

CONE_APEX = "_cone"


def _closure_matrix(n: int, pairs: Iterable[tuple[int, int]]) -> np.ndarray:
    m = np.eye(n, dtype=bool)
    for a, b in pairs:
        m[a, b] = True
    for k in range(n):
        m |= m[:, k : k + 1] & m[k : k + 1, :]
    return m


@dataclass(frozen=True)
class FinitePreorder:
    """A reflexive, transitive relation on a finite set of string identifiers."""

    elements: tuple[str, ...]
    leq: frozenset[tuple[str, str]]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "leq", frozenset(self.leq))
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("element identifiers must be pairwise distinct")
        known = set(self.elements)
        for a, b in self.leq:
            if a not in known or b not in known:
                raise ValueError(f"relation ({a!r}, {b!r}) mentions an unknown element")
        m = self.matrix
        if not m.diagonal().all():
            raise ValueError("relation is not reflexive")
        if ((m.astype(np.int64) @ m.astype(np.int64) > 0) & ~m).any():
            raise ValueError("relation is not transitive")

    @classmethod
    def from_relations(cls, elements: Sequence[str], relations: Iterable[tuple[str, str]] = ()):
        """Reflexive-transitive closure of the given pairs ``(a, b)`` meaning a <= b."""
        elements = tuple(elements)
        index = {x: i for i, x in enumerate(elements)}
        try:
            pairs = [(index[a], index[b]) for a, b in relations]
        except KeyError as exc:
            raise ValueError(f"unknown element {exc.args[0]!r}") from None
        m = _closure_matrix(len(elements), pairs)
        return cls(elements, _pairs_of(elements, m))

    @classmethod
    def from_matrix(cls, elements: Sequence[str], matrix) -> "FinitePreorder":
        elements = tuple(elements)
        return cls(elements, _pairs_of(elements, np.asarray(matrix, dtype=bool)))

    @cached_property
    def index(self) -> dict[str, int]:
        return {x: i for i, x in enumerate(self.elements)}

    @cached_property
    def matrix(self) -> np.ndarray:
        n = len(self.elements)
        m = np.zeros((n, n), dtype=bool)
        idx = {x: i for i, x in enumerate(self.elements)}
        for a, b in self.leq:
            m[idx[a], idx[b]] = True
        m.setflags(write=False)
        return m

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[str]:
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.index

    def le(self, a: str, b: str) -> bool:
        return bool(self.matrix[self.index[a], self.index[b]])

    def below(self, x: str) -> tuple[str, ...]:
        col = self.matrix[:, self.index[x]]
        return tuple(e for e, f in zip(self.elements, col) if f)

    def above(self, x: str) -> tuple[str, ...]:
        row = self.matrix[self.index[x]]
        return tuple(e for e, f in zip(self.elements, row) if f)

    def lower_bounds(self, subset: Iterable[str]) -> tuple[str, ...]:
        cols = [self.index[s] for s in subset]
        ok = self.matrix[:, cols].all(axis=1) if cols else np.ones(len(self), dtype=bool)
        return tuple(e for e, f in zip(self.elements, ok) if f)

    def minimal(self) -> tuple[str, ...]:
        m = self.matrix
        return tuple(
            x for i, x in enumerate(self.elements)
            if not any(m[j, i] and not m[i, j] for j in range(len(self)))
        )

    def subposet(self, subset: Iterable[str]):
        keep = [x for x in self.elements if x in set(subset)]
        return type(self)(tuple(keep), frozenset((a, b) for a, b in self.leq if a in keep and b in keep))

    def opposite(self):
        return type(self)(self.elements, frozenset((b, a) for a, b in self.leq))

    def linear_extension(self) -> tuple[str, ...]:
        """Elements sorted so that a < b (strictly) puts a first."""
        m = self.matrix
        height = m.sum(axis=0)
        return tuple(x for _, x in sorted(zip(height, self.elements), key=lambda t: (t[0], self.index[t[1]])))

    def relabel(self, mapping: Mapping[str, str]):
        return type(self)(
            tuple(mapping[x] for x in self.elements),
            frozenset((mapping[a], mapping[b]) for a, b in self.leq),
        )


def _pairs_of(elements: Sequence[str], m: np.ndarray) -> frozenset[tuple[str, str]]:
    rows, cols = np.nonzero(m)
    return frozenset((elements[a], elements[b]) for a, b in zip(rows, cols))


@dataclass(frozen=True)
class FinitePoset(FinitePreorder):
    """A finite partial order. ``leq`` holds every pair (a, b) with a <= b."""

    def __post_init__(self):
        super().__post_init__()
        m = self.matrix
        if (m & m.T & ~np.eye(len(self), dtype=bool)).any():
            raise ValueError("relation is not antisymmetric")

    @classmethod
    def discrete(cls, elements: Sequence[str]) -> "FinitePoset":
        return cls.from_relations(elements)

    @classmethod
    def chain(cls, elements: Sequence[str]) -> "FinitePoset":
        elements = tuple(elements)
        return cls.from_relations(elements, zip(elements, elements[1:]))

    @cached_property
    def up_masks(self) -> tuple[int, ...]:
        """Bit mask (over element positions) of everything above each element."""
        return tuple(sum(1 << j for j in np.nonzero(row)[0]) for row in self.matrix)

    @cached_property
    def down_masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << j for j in np.nonzero(col)[0]) for col in self.matrix.T)


@dataclass(frozen=True)
class MonotoneMap:
    source: FinitePreorder
    target: FinitePreorder
    assignment: Mapping[str, str] = field(hash=False)

    def __post_init__(self):
        a = dict(self.assignment)
        object.__setattr__(self, "assignment", a)
        if set(a) != set(self.source.elements):
            raise ValueError("assignment must be total on the source elements")
        for y in a.values():
            if y not in self.target:
                raise ValueError(f"{y!r} is not an element of the target")
        for x, y in self.source.leq:
            if not self.target.le(a[x], a[y]):
                raise ValueError(f"not monotone: {x!r} <= {y!r} but {a[x]!r} !<= {a[y]!r}")

    def __call__(self, x: str) -> str:
        return self.assignment[x]

    def compose(self, other: "MonotoneMap") -> "MonotoneMap":
        """``self`` after ``other``."""
        return MonotoneMap(other.source, self.target, {x: self(other(x)) for x in other.source})


def identity_map(P: FinitePreorder) -> MonotoneMap:
    return MonotoneMap(P, P, {x: x for x in P})


def inclusion_map(sub: FinitePreorder, P: FinitePreorder) -> MonotoneMap:
    return MonotoneMap(sub, P, {x: x for x in sub})


def monotone_maps(P: FinitePreorder, Q: FinitePreorder, fixed: Mapping[str, str] | None = None) -> Iterator[dict[str, str]]:
    """All monotone maps P -> Q (as dicts) extending ``fixed``, lexicographic in Q's order."""
    fixed = dict(fixed or {})
    order = [x for x in P.linear_extension() if x not in fixed]
    pm, qm = P.matrix, Q.matrix
    pi, qi = P.index, Q.index
    nq = len(Q)
    for x, y in fixed.items():
        for x2, y2 in fixed.items():
            if pm[pi[x], pi[x2]] and not qm[qi[y], qi[y2]]:
                return
    assign = {pi[x]: qi[y] for x, y in fixed.items()}

    def rec(k: int):
        if k == len(order):
            yield {P.elements[i]: Q.elements[j] for i, j in assign.items()}
            return
        xi = pi[order[k]]
        ok = np.ones(nq, dtype=bool)
        for zi, w in assign.items():
            if pm[zi, xi]:
                ok &= qm[w]
            if pm[xi, zi]:
                ok &= qm[:, w]
        for c in np.nonzero(ok)[0]:
            assign[xi] = int(c)
            yield from rec(k + 1)
        assign.pop(xi, None)

    yield from rec(0)


# ---------------------------------------------------------------------------
# cones, coinitial subsets, pushouts, quotients


def left_cone(P: FinitePoset, apex: str = CONE_APEX) -> FinitePoset:
    """P with a fresh minimum ``apex`` adjoined."""
    if apex in P:
        raise ValueError(f"cone apex identifier {apex!r} collides with an element of P")
    elements = (apex,) + P.elements
    leq = set(P.leq) | {(apex, x) for x in elements}
    return FinitePoset(elements, frozenset(leq))


def is_zero_coinitial(P: FinitePreorder, subset: Iterable[str]) -> bool:
    """Every element of P is bounded below by some element of ``subset``."""
    subset = list(subset)
    for s in subset:
        if s not in P:
            raise ValueError(f"{s!r} is not an element of the poset")
    if not subset:
        return len(P) == 0
    rows = P.matrix[[P.index[s] for s in subset]]
    return bool(rows.any(axis=0).all())


@dataclass(frozen=True)
class Pushout:
    poset: FinitePoset
    left: MonotoneMap
    right: MonotoneMap


def preorder_to_poset(Q: FinitePreorder) -> tuple[FinitePoset, MonotoneMap]:
    """Posetal quotient: identify x, y whenever x <= y <= x.

    Each class is named by its first member in ``Q.elements`` order.
    """
    m = Q.matrix
    eq = m & m.T
    rep = {}
    names = []
    for i, x in enumerate(Q.elements):
        j = int(np.argmax(eq[i]))
        rep[x] = Q.elements[j]
        if j == i:
            names.append(x)
    leq = frozenset((rep[a], rep[b]) for a, b in Q.leq)
    P = FinitePoset(tuple(names), leq)
    return P, MonotoneMap(Q, P, rep)


def poset_pushout(f: MonotoneMap, g: MonotoneMap) -> Pushout:
    """Pushout of P <-f- R -g-> Q in posets.

    Computed as the preorder pushout (disjoint union, glued along R, relations
    from P and Q, transitive closure) followed by the posetal quotient.
    """
    if f.source != g.source:
        raise ValueError("pushout legs must share their source")
    P, Q, R = f.target, g.target, f.source
    tagged = [f"0:{x}" for x in P] + [f"1:{y}" for y in Q]
    rel = [(f"0:{a}", f"0:{b}") for a, b in P.leq] + [(f"1:{a}", f"1:{b}") for a, b in Q.leq]
    for r in R:
        rel.append((f"0:{f(r)}", f"1:{g(r)}"))
        rel.append((f"1:{g(r)}", f"0:{f(r)}"))
    pre = FinitePreorder.from_relations(tagged, rel)
    poset, quot = preorder_to_poset(pre)
    left = MonotoneMap(P, poset, {x: quot(f"0:{x}") for x in P})
    right = MonotoneMap(Q, poset, {y: quot(f"1:{y}") for y in Q})
    return Pushout(poset, left, right)


def find_isomorphism(P: FinitePreorder, Q: FinitePreorder) -> dict[str, str] | None:
    """An order isomorphism P -> Q by backtracking search, or None."""
    if len(P) != len(Q) or len(P.leq) != len(Q.leq):
        return None
    pm, qm = P.matrix, Q.matrix

    def sig(m, i):
        return int(m[i].sum()), int(m[:, i].sum())

    psig = [sig(pm, i) for i in range(len(P))]
    qsig = [sig(qm, i) for i in range(len(Q))]
    if sorted(psig) != sorted(qsig):
        return None
    order = sorted(range(len(P)), key=lambda i: psig[i])
    image: dict[int, int] = {}
    used = set()

    def rec(k: int) -> bool:
        if k == len(order):
            return True
        i = order[k]
        for j in range(len(Q)):
            if j in used or qsig[j] != psig[i]:
                continue
            if all(pm[i, a] == qm[j, b] and pm[a, i] == qm[b, j] for a, b in image.items()) and pm[i, i] == qm[j, j]:
                image[i] = j
                used.add(j)
                if rec(k + 1):
                    return True
                del image[i]
                used.discard(j)
        return False

    if not rec(0):
        return None
    return {P.elements[i]: Q.elements[j] for i, j in image.items()}


def canonical_form(P: FinitePreorder) -> tuple:
    """Isomorphism-invariant key: the lexicographically least relabelled relation matrix.

    Brute force over all permutations at once, so limited to 8 elements.
    """
    n = len(P)
    if n == 0:
        return (0, ())
    if n > 8:
        raise ValueError("canonical forms are limited to 8 elements; use find_isomorphism")
    m = np.asarray(P.matrix, dtype=np.int64)
    perms = np.array(list(permutations(range(n))), dtype=np.int64)
    flat = m[perms[:, :, None], perms[:, None, :]].reshape(len(perms), n * n)
    if n * n <= 62:
        best = flat[int(np.argmin(flat @ (1 << np.arange(n * n - 1, -1, -1, dtype=np.int64))))]
    else:
        best = min(map(tuple, flat.tolist()))
    return (n, tuple(bool(v) for v in best))


# ---------------------------------------------------------------------------
# frames


def open_id(U: Iterable[str]) -> str:
    return "{" + ",".join(sorted(U)) + "}"


@dataclass(frozen=True)
class FiniteFrame:
    """Opens of a finite space: a family of point subsets closed under union and intersection."""

    points: tuple[str, ...]
    opens: frozenset[frozenset[str]]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "opens", frozenset(frozenset(U) for U in self.opens))
        if len(set(self.points)) != len(self.points):
            raise ValueError("point identifiers must be pairwise distinct")
        if len(self.points) > 62:
            raise ValueError("frames are limited to 62 points")
        top = frozenset(self.points)
        for U in self.opens:
            if not U <= top:
                raise ValueError(f"open {open_id(U)} mentions unknown points")
        if top not in self.opens or frozenset() not in self.opens:
            raise ValueError("a frame must contain the empty set and the full point set")
        masks = set(self.mask_of.values())
        for a in masks:
            for b in masks:
                if a | b not in masks or a & b not in masks:
                    raise ValueError("opens are not closed under union and intersection")

    @classmethod
    def generated(cls, points: Sequence[str], generators: Iterable[Iterable[str]]) -> "FiniteFrame":
        """Close ``generators`` (plus the empty set and everything) under union and intersection."""
        points = tuple(points)
        pos = {p: i for i, p in enumerate(points)}
        fam = {0, (1 << len(points)) - 1}
        for G in generators:
            try:
                fam.add(sum(1 << pos[p] for p in G))
            except KeyError as exc:
                raise ValueError(f"unknown point {exc.args[0]!r} in generator") from None
        while True:
            new = {a | b for a in fam for b in fam} | {a & b for a in fam for b in fam}
            if new <= fam:
                break
            fam |= new
        opens = frozenset(frozenset(p for i, p in enumerate(points) if m >> i & 1) for m in fam)
        return cls(points, opens)

    @cached_property
    def point_index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.points)}

    @cached_property
    def mask_of(self) -> dict[frozenset, int]:
        pos = {p: i for i, p in enumerate(self.points)}
        return {U: sum(1 << pos[p] for p in U) for U in self.opens}

    @cached_property
    def sorted_opens(self) -> tuple[frozenset, ...]:
        """Opens ordered by size, then by the sorted positions of their points."""
        pos = self.point_index
        return tuple(sorted(self.opens, key=lambda U: (len(U), sorted(pos[p] for p in U))))

    @property
    def top(self) -> frozenset:
        return frozenset(self.points)

    @property
    def bottom(self) -> frozenset:
        return frozenset()

    def mask(self, U: Iterable[str]) -> int:
        pos = self.point_index
        return sum(1 << pos[p] for p in set(U))

    def from_mask(self, m: int) -> frozenset:
        return frozenset(p for i, p in enumerate(self.points) if m >> i & 1)

    def is_open(self, U: Iterable[str]) -> bool:
        return frozenset(U) in self.opens

    def opens_within(self, V: Iterable[str]) -> tuple[frozenset, ...]:
        V = frozenset(V)
        return tuple(U for U in self.sorted_opens if U <= V)

    def union(self, family: Iterable[Iterable[str]]) -> frozenset:
        out: set = set()
        for U in family:
            out |= set(U)
        return frozenset(out)

    def meet(self, family: Iterable[Iterable[str]]) -> frozenset:
        out = set(self.points)
        for U in family:
            out &= set(U)
        return frozenset(out)

    @cached_property
    def poset(self) -> FinitePoset:
        """The opens ordered by inclusion, with identifiers from :func:`open_id`."""
        ops = self.sorted_opens
        ids = tuple(open_id(U) for U in ops)
        leq = frozenset((ids[a], ids[b]) for a, A in enumerate(ops) for b, B in enumerate(ops) if A <= B)
        return FinitePoset(ids, leq)

    def open_of(self, ident: str) -> frozenset:
        return self._by_id[ident]

    @cached_property
    def _by_id(self) -> dict[str, frozenset]:
        return {open_id(U): U for U in self.opens}


def alexandrov_frame(P: FinitePreorder) -> FiniteFrame:
    """Up-closed subsets of a finite preorder, as a frame on its elements."""
    principal = [frozenset(P.above(x)) for x in P]
    fam = {frozenset()}
    for U in principal:
        fam |= {V | U for V in fam}
    return FiniteFrame(P.elements, frozenset(fam))


def specialization_preorder(frame: FiniteFrame) -> FinitePreorder:
    """x <= y iff every open containing x contains y (so opens are the up-sets)."""
    pts = frame.points
    rel = [(x, y) for x, y in product(pts, pts) if all(y in U for U in frame.opens if x in U)]
    return FinitePreorder(pts, frozenset(rel))


def meet_over(frame: FiniteFrame, U, alpha: MonotoneMap) -> frozenset:
    """Intersection of ``U(alpha(k))`` over the source of ``alpha``; the top for an empty source.

    ``U`` is either a mapping from index elements to opens, or a monotone map
    into ``frame.poset``.
    """
    if isinstance(U, MonotoneMap):
        lookup = lambda i: frame.open_of(U(i))  # noqa: E731
    else:
        lookup = lambda i: frozenset(U[i])  # noqa: E731
    out = set(frame.points)
    for k in alpha.source:
        out &= lookup(alpha(k))
    return frozenset(out)


def covers(frame: FiniteFrame, family: Iterable[Iterable[str]], V: Iterable[str]) -> bool:
    """Does ``family`` cover ``V``? In a locale this means its union is V."""
    V = frozenset(V)
    family = [frozenset(W) for W in family]
    for W in family:
        if not W <= V:
            raise ValueError(f"{open_id(W)} is not contained in {open_id(V)}")
    return frame.union(family) == V
