"""Set-indexed families of opens and the presheaves they present.

A family ``s -> member[s]`` presents the coproduct of the representables
``member[s]``. Its sections over ``W`` are the indices whose open contains ``W``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Callable, Hashable, Iterator, Mapping, Sequence

from .order import FiniteFrame, open_id


@dataclass(frozen=True, eq=False)
class IndexedFamily:
    frame: FiniteFrame
    index: tuple
    member: Mapping[Hashable, frozenset]

    def __post_init__(self):
        index = tuple(self.index)
        object.__setattr__(self, "index", index)
        if len(set(index)) != len(index):
            raise ValueError("family indices must be distinct")
        member = {s: frozenset(self.member[s]) for s in index} if set(self.member) >= set(index) else None
        if member is None or set(self.member) != set(index):
            raise ValueError("member must be defined exactly on the index set")
        for s, U in member.items():
            if not self.frame.is_open(U):
                raise ValueError(f"member[{s!r}] = {open_id(U)} is not open")
        object.__setattr__(self, "member", member)

    def __len__(self) -> int:
        return len(self.index)

    def same_as(self, other: "IndexedFamily") -> bool:
        return self.index == other.index and self.member == other.member


@dataclass(frozen=True, eq=False)
class FamilyMorphism:
    source: IndexedFamily
    target: IndexedFamily
    reindex: Mapping[Hashable, Hashable]

    def __post_init__(self):
        f = dict(self.reindex)
        object.__setattr__(self, "reindex", f)
        if set(f) != set(self.source.index):
            raise ValueError("reindexing must be total on the source index")
        tgt = set(self.target.index)
        for s, t in f.items():
            if t not in tgt:
                raise ValueError(f"{s!r} is sent to unknown index {t!r}")
            if not self.source.member[s] <= self.target.member[t]:
                raise ValueError(f"member of {s!r} is not contained in member of {t!r}")

    def compose(self, first: "FamilyMorphism") -> "FamilyMorphism":
        """``self`` after ``first``."""
        return FamilyMorphism(first.source, self.target, {s: self.reindex[t] for s, t in first.reindex.items()})

    def is_local_isomorphism(self) -> bool:
        return all(self.source.member[s] == self.target.member[t] for s, t in self.reindex.items())

    def is_identity_reindex(self) -> bool:
        return self.source.index == self.target.index and all(s == t for s, t in self.reindex.items())

    def same_as(self, other: "FamilyMorphism") -> bool:
        return self.source.same_as(other.source) and self.target.same_as(other.target) and self.reindex == other.reindex


def identity_morphism(A: IndexedFamily) -> FamilyMorphism:
    return FamilyMorphism(A, A, {s: s for s in A.index})


@dataclass(frozen=True, eq=False)
class SetPresheaf:
    """Finite sets over every open with restriction maps along every inclusion."""

    frame: FiniteFrame
    sections: Mapping[frozenset, tuple]
    restriction: Mapping[tuple[frozenset, frozenset], Mapping]

    def __post_init__(self):
        opens = self.frame.opens
        secs = {frozenset(W): tuple(v) for W, v in self.sections.items()}
        if set(secs) != set(opens):
            raise ValueError("sections must be given over every open")
        object.__setattr__(self, "sections", secs)
        res = {(frozenset(a), frozenset(b)): dict(m) for (a, b), m in self.restriction.items()}
        object.__setattr__(self, "restriction", res)
        for W in opens:
            for W2 in opens:
                if not W2 <= W:
                    continue
                m = res.get((W, W2))
                if m is None or set(m) != set(secs[W]) or not set(m.values()) <= set(secs[W2]):
                    raise ValueError(f"restriction {open_id(W)} -> {open_id(W2)} is missing or malformed")
                if W2 == W and any(k != v for k, v in m.items()):
                    raise ValueError(f"restriction to {open_id(W)} itself is not the identity")
        for W in opens:
            for W2 in opens:
                if not W2 <= W:
                    continue
                for W3 in opens:
                    if W3 <= W2:
                        direct, a, b = res[(W, W3)], res[(W, W2)], res[(W2, W3)]
                        if any(direct[s] != b[a[s]] for s in secs[W]):
                            raise ValueError("restrictions do not compose")

    @classmethod
    def from_functions(cls, frame: FiniteFrame, sections: Callable[[frozenset], Sequence], restrict: Callable):
        """``restrict(W, W2, s)`` gives the restriction of ``s`` from ``W`` to ``W2``."""
        secs = {W: tuple(sections(W)) for W in frame.opens}
        res = {(W, W2): {s: restrict(W, W2, s) for s in secs[W]} for W in frame.opens for W2 in frame.opens if W2 <= W}
        return cls(frame, secs, res)

    def restrict(self, W, W2, s):
        return self.restriction[(frozenset(W), frozenset(W2))][s]

    @cached_property
    def total_size(self) -> int:
        return sum(len(v) for v in self.sections.values())


def totalize(A: IndexedFamily) -> SetPresheaf:
    """The coproduct of representables presented by ``A``."""
    return SetPresheaf.from_functions(
        A.frame,
        lambda W: [s for s in A.index if W <= A.member[s]],
        lambda W, W2, s: s,
    )


def hom_families(A: IndexedFamily, B: IndexedFamily) -> Iterator[FamilyMorphism]:
    """Every reindexing ``s -> t`` with ``A[s] <= B[t]``, in lexicographic order."""
    if A.frame is not B.frame and A.frame.opens != B.frame.opens:
        raise ValueError("families live over different frames")
    choices = [[t for t in B.index if A.member[s] <= B.member[t]] for s in A.index]
    for pick in product(*choices):
        yield FamilyMorphism(A, B, dict(zip(A.index, pick)))


def hom_count(A: IndexedFamily, B: IndexedFamily) -> int:
    n = 1
    for s in A.index:
        n *= sum(1 for t in B.index if A.member[s] <= B.member[t])
    return n


def factor_local_iso(m: FamilyMorphism) -> tuple[FamilyMorphism, FamilyMorphism]:
    """Split ``m`` into an identity-reindexed inclusion followed by a local isomorphism.

    The middle family is ``s -> target.member[m(s)]``.
    """
    A, B = m.source, m.target
    middle = IndexedFamily(A.frame, A.index, {s: B.member[m.reindex[s]] for s in A.index})
    fixed = FamilyMorphism(A, middle, {s: s for s in A.index})
    local = FamilyMorphism(middle, B, m.reindex)
    return fixed, local


# ---------------------------------------------------------------------------
# diagrams of families and tensoring with set-valued functors


@dataclass(frozen=True, eq=False)
class FamilyDiagram:
    """Families indexed by the objects of a small category, with morphisms along its arrows.

    ``arrows`` maps an arrow name to ``(source object, target object)``.
    """

    objects: tuple
    arrows: Mapping[Hashable, tuple]
    families: Mapping[Hashable, IndexedFamily]
    morphisms: Mapping[Hashable, FamilyMorphism]

    def __post_init__(self):
        if set(self.families) != set(self.objects):
            raise ValueError("need one family per object")
        if set(self.morphisms) != set(self.arrows):
            raise ValueError("need one morphism per arrow")
        for a, (x, y) in self.arrows.items():
            m = self.morphisms[a]
            if m.source is not self.families[x] or m.target is not self.families[y]:
                raise ValueError(f"morphism for arrow {a!r} has the wrong endpoints")


def tensor_family(
    sets: Mapping[Hashable, Sequence],
    maps: Mapping[Hashable, Mapping],
    D: FamilyDiagram,
) -> FamilyDiagram:
    """Objectwise product ``F(k) x D(k)`` with members inherited from ``D``.

    ``sets[k]`` is ``F(k)`` and ``maps[a]`` is ``F`` applied to arrow ``a``.
    """
    if set(sets) != set(D.objects) or set(maps) != set(D.arrows):
        raise ValueError("the set-valued functor must be given on every object and arrow")
    fams = {}
    for k in D.objects:
        base = D.families[k]
        idx = tuple((a, s) for a in sets[k] for s in base.index)
        fams[k] = IndexedFamily(base.frame, idx, {(a, s): base.member[s] for a, s in idx})
    morphs = {}
    for arr, (x, y) in D.arrows.items():
        f, m = maps[arr], D.morphisms[arr]
        morphs[arr] = FamilyMorphism(fams[x], fams[y], {(a, s): (f[a], m.reindex[s]) for a, s in fams[x].index})
    return FamilyDiagram(D.objects, dict(D.arrows), fams, morphs)


def constant_diagram(objects: Sequence, arrows: Mapping[Hashable, tuple], family: IndexedFamily) -> FamilyDiagram:
    fams = {k: family for k in objects}
    ident = identity_morphism(family)
    return FamilyDiagram(tuple(objects), dict(arrows), fams, {a: ident for a in arrows})
