"""Set-valued sheaves on finite frames and descent along diagrams of opens.

With ``i <= j`` giving ``U[i] <= U[j]``, a compatible family restricts
downward: ``s[j]`` restricted to ``U[i]`` must equal ``s[i]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterator, Mapping, Sequence

import numpy as np

from .lifting import OpenDiagram
from .nerve import nerve_truncated
from .order import FiniteFrame, FinitePreorder, alexandrov_frame, open_id
from .semirep import SetPresheaf

MAX_OPENS = 64


@dataclass(frozen=True, eq=False)
class SetSheaf:
    presheaf: SetPresheaf
    sheaf_checked: bool = False

    @property
    def frame(self) -> FiniteFrame:
        return self.presheaf.frame

    @classmethod
    def checked(cls, F: SetPresheaf) -> "SetSheaf":
        if not is_sheaf(F):
            raise ValueError("the presheaf fails the sheaf condition")
        return cls(F, True)


def _as_presheaf(F) -> SetPresheaf:
    return F.presheaf if isinstance(F, SetSheaf) else F


# ---------------------------------------------------------------------------
# matching families


def matching_families(F: SetPresheaf, family: Sequence[frozenset]) -> Iterator[tuple]:
    """Tuples ``(s_a)`` with ``s_a in F(W_a)`` agreeing on every pairwise overlap."""
    family = [frozenset(W) for W in family]
    overlap = {(a, b): family[a] & family[b] for a in range(len(family)) for b in range(a)}
    pick: list = []

    def rec(k):
        if k == len(family):
            yield tuple(pick)
            return
        Wk = family[k]
        for s in F.sections[Wk]:
            if all(F.restrict(Wk, overlap[(k, b)], s) == F.restrict(family[b], overlap[(k, b)], pick[b]) for b in range(k)):
                pick.append(s)
                yield from rec(k + 1)
                pick.pop()

    yield from rec(0)


def _glues(F: SetPresheaf, V: frozenset, family: Sequence[frozenset]) -> bool:
    images = [tuple(F.restrict(V, W, s) for W in family) for s in F.sections[V]]
    if len(set(images)) != len(images):
        return False
    return set(images) == set(matching_families(F, family))


def _covering_antichains(opens: Sequence[frozenset], V: frozenset) -> Iterator[tuple[frozenset, ...]]:
    """Antichains of proper opens inside V whose union is V."""
    inside = [W for W in opens if W < V]
    chosen: list[frozenset] = []

    def rec(k, covered):
        if covered == V:
            yield tuple(chosen)
        for t in range(k, len(inside)):
            W = inside[t]
            if any(W <= C or C <= W for C in chosen):
                continue
            chosen.append(W)
            yield from rec(t + 1, covered | W)
            chosen.pop()

    yield from rec(0, frozenset())


def is_sheaf(F, method: str = "antichains") -> bool:
    """Gluing and uniqueness for every cover of every open.

    ``antichains`` quantifies over all covering families, keeping only those
    made of pairwise incomparable opens (a family and its maximal members
    have the same matching families). ``pairs`` checks the empty cover and
    two-member covers only, which suffices on a finite frame.
    """
    F = _as_presheaf(F)
    frame = F.frame
    if len(frame.opens) > MAX_OPENS:
        raise ValueError(f"sheaf checking is limited to frames with at most {MAX_OPENS} opens")
    if len(F.sections[frame.bottom]) != 1:
        return False
    opens = frame.sorted_opens
    if method == "pairs":
        for A, B in combinations(opens, 2):
            if not _glues(F, A | B, (A, B)):
                return False
        return True
    if method != "antichains":
        raise ValueError(f"unknown method {method!r}")
    for V in opens:
        if not V:
            continue
        for fam in _covering_antichains(opens, V):
            if not _glues(F, V, fam):
                return False
    return True


# ---------------------------------------------------------------------------
# generators of test presheaves


def constant_presheaf(frame: FiniteFrame, values: Sequence[Hashable]) -> SetPresheaf:
    vals = tuple(values)
    return SetPresheaf.from_functions(frame, lambda W: vals, lambda W, W2, s: s)


def sections_sheaf(E: FinitePreorder, X: FinitePreorder, p: Mapping[str, str]) -> SetSheaf:
    """Continuous sections of ``p: E -> X`` over the up-set opens of ``X``.

    A section over ``V`` is stored as a sorted tuple of ``(point, lift)`` pairs.
    """
    p = dict(p)
    if set(p) != set(E.elements) or not set(p.values()) <= set(X.elements):
        raise ValueError("p must map every point of E to a point of X")
    for a, b in E.leq:
        if not X.le(p[a], p[b]):
            raise ValueError(f"p is not continuous: {a!r} <= {b!r} is not preserved")
    frame = alexandrov_frame(X)
    fibre = {x: [e for e in E.elements if p[e] == x] for x in X.elements}

    def sections(V):
        pts = sorted(V, key=X.index.get)
        out = []

        def rec(k, chosen):
            if k == len(pts):
                out.append(tuple(zip(pts, chosen)))
                return
            x = pts[k]
            for e in fibre[x]:
                if all(
                    E.le(e, chosen[t]) or not X.le(x, pts[t]) for t in range(k)
                ) and all(E.le(chosen[t], e) or not X.le(pts[t], x) for t in range(k)):
                    rec(k + 1, chosen + [e])

        rec(0, [])
        return out

    def restrict(W, W2, s):
        return tuple(pair for pair in s if pair[0] in W2)

    return SetSheaf(SetPresheaf.from_functions(frame, sections, restrict))


# ---------------------------------------------------------------------------
# limits and descent


@dataclass(frozen=True)
class DiagramLimit:
    """Compatible families over a diagram plus the comparison from the target's sections."""

    families: tuple[tuple, ...]
    index: tuple[str, ...]
    comparison: Mapping[Hashable, tuple]

    def __len__(self) -> int:
        return len(self.families)


def limit_over_diagram(F, D: OpenDiagram) -> DiagramLimit:
    F = _as_presheaf(F)
    I = D.index
    order = I.linear_extension()
    U = D.U
    below = {j: [i for i in I.below(j) if i != j] for j in I}
    pos = {i: k for k, i in enumerate(order)}
    pick: dict = {}
    out = []

    def rec(k):
        if k == len(order):
            out.append(tuple(pick[i] for i in I.elements))
            return
        j = order[k]
        for s in F.sections[U[j]]:
            if all(F.restrict(U[j], U[i], s) == pick[i] for i in below[j] if pos[i] < k):
                pick[j] = s
                rec(k + 1)
                del pick[j]

    rec(0)
    comparison = {s: tuple(F.restrict(D.target, U[i], s) for i in I.elements) for s in F.sections[D.target]}
    return DiagramLimit(tuple(out), I.elements, comparison)


@dataclass(frozen=True)
class DescentVerdict:
    passed: bool
    failure: str | None = None
    elements: tuple = ()
    source_size: int = 0
    limit_size: int = 0

    def __bool__(self) -> bool:
        return self.passed


def check_descent(F, D: OpenDiagram) -> DescentVerdict:
    """Is ``F(target) -> lim F(U_i)`` a bijection?

    On failure ``elements`` holds two sections with the same image
    (non-injective) or a compatible family with no preimage (non-surjective).
    """
    lim = limit_over_diagram(F, D)
    src, tgt = len(lim.comparison), len(lim.families)
    seen: dict = {}
    for s, fam in lim.comparison.items():
        if fam in seen:
            return DescentVerdict(False, "non-injective", (seen[fam], s), src, tgt)
        seen[fam] = s
    for fam in lim.families:
        if fam not in seen:
            return DescentVerdict(False, "non-surjective", (fam,), src, tgt)
    return DescentVerdict(True, None, (), src, tgt)


def refinement_limit_size(F, D: OpenDiagram) -> int:
    """Matching families over the vertices and edges of the refined diagram.

    Vertex sections must agree, on the label of every edge, with each other.
    """
    F = _as_presheaf(F)
    nv = nerve_truncated(D.index, 1)
    els = D.index.elements
    U = [D.U[e] for e in els]
    edges = nv.values[1].astype(np.int64)
    # columns: {0} -> 0, {1} -> 1, {0,1} -> 2
    cons = [(int(a), int(b), U[int(w)]) for a, b, w in edges if a != b]
    order = list(range(len(els)))
    pick: dict[int, Hashable] = {}
    count = 0

    def rec(k):
        nonlocal count
        if k == len(order):
            count += 1
            return
        for s in F.sections[U[k]]:
            pick[k] = s
            ok = all(
                F.restrict(U[a], L, pick[a]) == F.restrict(U[b], L, pick[b])
                for a, b, L in cons
                if max(a, b) == k
            )
            if ok:
                rec(k + 1)
            del pick[k]

    rec(0)
    return count
