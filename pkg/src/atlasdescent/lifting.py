"""Local lifting problems against diagrams of opens, and atlas criteria.

Orientation: a diagram ``U`` is monotone, so ``i <= j`` in the index poset
gives ``U[i] <= U[j]`` as opens. Intersections therefore sit *below* the
opens they are contained in.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import product
from typing import Iterator, Mapping

from .order import (
    FiniteFrame,
    FinitePoset,
    MonotoneMap,
    is_zero_coinitial,
    left_cone,
    monotone_maps,
    open_id,
    preorder_to_poset,
)
from .simplicial import (
    boundary_subposet,
    cone_over_boundary,
    simplex_category_h0,
    standard_simplex,
)


@dataclass(frozen=True, eq=False)
class OpenDiagram:
    """A monotone map from a finite poset into the opens of a frame, aimed at ``target``."""

    frame: FiniteFrame
    index: FinitePoset
    U: Mapping[str, frozenset]
    target: frozenset | None = None

    def __post_init__(self):
        U = {i: frozenset(V) for i, V in dict(self.U).items()}
        object.__setattr__(self, "U", U)
        if set(U) != set(self.index.elements):
            raise ValueError("U must assign an open to every index element")
        target = self.frame.top if self.target is None else frozenset(self.target)
        object.__setattr__(self, "target", target)
        if not self.frame.is_open(target):
            raise ValueError(f"target {open_id(target)} is not open")
        for i, V in U.items():
            if not self.frame.is_open(V):
                raise ValueError(f"U[{i!r}] = {open_id(V)} is not open")
            if not V <= target:
                raise ValueError(f"U[{i!r}] is not contained in the target")
        for a, b in self.index.leq:
            if not U[a] <= U[b]:
                raise ValueError(f"U is not monotone: {a!r} <= {b!r} but U[{a!r}] !<= U[{b!r}]")

    @cached_property
    def masks(self) -> dict[str, int]:
        return {i: self.frame.mask(V) for i, V in self.U.items()}

    @cached_property
    def target_mask(self) -> int:
        return self.frame.mask(self.target)

    def as_monotone_map(self) -> MonotoneMap:
        return MonotoneMap(self.index, self.frame.poset, {i: open_id(V) for i, V in self.U.items()})

    def relabel(self, mapping: Mapping[str, str]) -> "OpenDiagram":
        return OpenDiagram(self.frame, self.index.relabel(mapping), {mapping[i]: V for i, V in self.U.items()}, self.target)


@dataclass(frozen=True, eq=False)
class LiftingProblem:
    """``sigma: small -> I`` to be extended along ``small -> big``."""

    small: FinitePoset
    big: FinitePoset
    sigma: Mapping[str, str]
    embedding: Mapping[str, str] | None = None

    def __post_init__(self):
        emb = {k: k for k in self.small} if self.embedding is None else dict(self.embedding)
        object.__setattr__(self, "embedding", emb)
        object.__setattr__(self, "sigma", dict(self.sigma))
        if set(emb) != set(self.small.elements) or any(v not in self.big for v in emb.values()):
            raise ValueError("embedding must send every element of the small shape into the big one")
        if len(set(emb.values())) != len(emb):
            raise ValueError("embedding is not injective")
        for a in self.small:
            for b in self.small:
                if self.small.le(a, b) != self.big.le(emb[a], emb[b]):
                    raise ValueError("embedding is not an order embedding")


@dataclass(frozen=True)
class Witness:
    """Why a lifting condition failed: the uncovered part of ``region``."""

    problem: object
    region: frozenset
    achieved: frozenset
    residue: tuple[str, ...]
    filler_regions: tuple[frozenset, ...] = ()
    condition: str = ""


@dataclass(frozen=True)
class Verdict:
    passed: bool
    witness: Witness | None = None
    checked: int = 0
    condition: str = ""

    def __bool__(self) -> bool:
        return self.passed


def _residue(frame: FiniteFrame, region: int, achieved: int) -> tuple[str, ...]:
    left = region & ~achieved
    return tuple(p for i, p in enumerate(frame.points) if left >> i & 1)


def _solve(D: OpenDiagram, p: LiftingProblem) -> tuple[int, int, list[int]]:
    """Region U_sigma, union of the filler regions, and the filler regions themselves."""
    masks = D.masks
    region = D.target_mask
    for k in p.small:
        region &= masks[p.sigma[k]]
    fixed = {p.embedding[k]: p.sigma[k] for k in p.small}
    mins = p.big.minimal()
    fills = []
    achieved = 0
    for tau in monotone_maps(p.big, D.index, fixed):
        r = D.target_mask
        for l in mins:
            r &= masks[tau[l]]
        fills.append(r)
        achieved |= r
    return region, achieved, fills


def local_lifting_check(D: OpenDiagram, p: LiftingProblem) -> Verdict:
    """Are the regions U_tau of all fillers tau a covering of U_sigma?"""
    try:
        MonotoneMap(p.small, D.index, p.sigma)
    except ValueError as exc:
        raise ValueError(f"sigma is not a monotone map into the index poset: {exc}") from None
    region, achieved, fills = _solve(D, p)
    if region == achieved:
        return Verdict(True, checked=1)
    frame = D.frame
    w = Witness(
        p,
        frame.from_mask(region),
        frame.from_mask(achieved),
        _residue(frame, region, achieved),
        tuple(frame.from_mask(f) for f in fills),
    )
    return Verdict(False, w, checked=1)


# ---------------------------------------------------------------------------
# enumeration of lifting problems


def cone_apex(K: FinitePoset, L: FinitePoset, embedding: Mapping[str, str] | None = None) -> str | None:
    """The apex if ``L`` is ``K`` plus one element below everything, else None."""
    emb = {k: k for k in K} if embedding is None else embedding
    extra = [l for l in L if l not in set(emb.values())]
    if len(extra) != 1:
        return None
    e = extra[0]
    return e if all(L.le(e, l) for l in L) else None


def problem_sigmas(K: FinitePoset, L: FinitePoset, I: FinitePoset, exhaustive: bool = False) -> Iterator[dict]:
    """Monotone maps K -> I that cover every distinct lifting problem along K -> L.

    For a cone ``L = K + apex`` the fillers and the region only see sigma on
    the minimal elements of K (they are 0-coinitial), so one extension per
    restriction to those elements suffices; otherwise every monotone map is
    produced.
    """
    if exhaustive or cone_apex(K, L) is None:
        yield from monotone_maps(K, I)
        return
    mins = K.minimal()
    for vals in product(I.elements, repeat=len(mins)):
        ext = next(monotone_maps(K, I, dict(zip(mins, vals))), None)
        if ext is not None:
            yield ext


def _check_family(D: OpenDiagram, shapes, condition: str, exhaustive: bool = False) -> Verdict:
    checked = 0
    for K, L in shapes:
        for sigma in problem_sigmas(K, L, D.index, exhaustive):
            p = LiftingProblem(K, L, sigma)
            region, achieved, fills = _solve(D, p)
            checked += 1
            if region != achieved:
                frame = D.frame
                w = Witness(
                    p,
                    frame.from_mask(region),
                    frame.from_mask(achieved),
                    _residue(frame, region, achieved),
                    tuple(frame.from_mask(f) for f in fills),
                    condition,
                )
                return Verdict(False, w, checked, condition)
    return Verdict(True, None, checked, condition)


@lru_cache(maxsize=None)
def discrete_cone(k: int) -> tuple[FinitePoset, FinitePoset]:
    K = FinitePoset.discrete([str(a) for a in range(k)])
    return K, left_cone(K)


@lru_cache(maxsize=None)
def subset_cone(n: int) -> tuple[FinitePoset, FinitePoset]:
    """The nondegenerate-simplex shapes of the boundary of Delta^n and of Delta^n."""
    return boundary_subposet(n).poset, cone_over_boundary(n)


@lru_cache(maxsize=None)
def simplex_category_cone(n: int) -> tuple[FinitePoset, FinitePoset]:
    """Posetal shadows of the categories of all simplices of the boundary of Delta^n and of Delta^n.

    Built from the category of simplices of the standard simplex truncated one
    level above n, by 0-truncation and posetal quotient; the boundary part is
    the classes of non-surjective simplices.
    """
    S = standard_simplex(n, n + 1)
    L, quot = preorder_to_poset(simplex_category_h0(S))
    full = set(range(n + 1))
    boundary = {
        quot(S.cell_name(k, x)) for k in range(S.N + 1) for x, t in enumerate(S.keys[k]) if set(t) != full
    }
    K = L.subposet(boundary)
    return K, L


def basic_atlas_check(D: OpenDiagram) -> Verdict:
    """Global cover plus U_i & U_j == union of U_k over k <= i, j."""
    masks, I, frame = D.masks, D.index, D.frame
    union = 0
    for m in masks.values():
        union |= m
    if union != D.target_mask:
        K, L = discrete_cone(0)
        p = LiftingProblem(K, L, {})
        fills = tuple(frame.from_mask(masks[i]) for i in I)
        w = Witness(p, D.target, frame.from_mask(union), _residue(frame, D.target_mask, union), fills, "basic")
        return Verdict(False, w, 1, "basic")
    checked = 1
    for i in I:
        for j in I:
            checked += 1
            region = masks[i] & masks[j]
            lbs = I.lower_bounds([i, j])
            achieved = 0
            for k in lbs:
                achieved |= masks[k]
            if achieved != region:
                K, L = discrete_cone(2)
                p = LiftingProblem(K, L, {"0": i, "1": j})
                w = Witness(
                    p,
                    frame.from_mask(region),
                    frame.from_mask(achieved),
                    _residue(frame, region, achieved),
                    tuple(frame.from_mask(masks[k]) for k in lbs),
                    "basic",
                )
                return Verdict(False, w, checked, "basic")
    return Verdict(True, None, checked, "basic")


def check_atlas(D: OpenDiagram, mode: str = "basic", kmax: int = 4, nmax: int = 3) -> Verdict:
    """Is ``D`` an atlas of its target?

    ``mode`` is ``"basic"`` (global cover and binary intersections),
    ``"finite_sets"`` (cones on discrete K with ``|K| <= kmax``) or
    ``"subsets"`` (nondegenerate simplex boundaries for ``n <= nmax``).
    """
    if mode == "basic":
        return basic_atlas_check(D)
    if mode == "finite_sets":
        return _check_family(D, [discrete_cone(k) for k in range(kmax + 1)], "finite_sets")
    if mode == "subsets":
        return _check_family(D, [subset_cone(n) for n in range(nmax + 1)], "subsets")
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class EquivalenceReport:
    """One verdict per lifting condition, keyed 1..6."""

    verdicts: dict[int, Verdict] = field(hash=False)

    @property
    def values(self) -> tuple[bool, ...]:
        return tuple(self.verdicts[c].passed for c in sorted(self.verdicts))

    @property
    def consistent(self) -> bool:
        return len(set(self.values)) == 1


CONDITIONS = {
    1: "cones on K = {} and K = {0,1}",
    2: "cones on finite sets K",
    3: "nondegenerate simplex boundaries, n in {0,1}",
    4: "nondegenerate simplex boundaries, all n",
    5: "simplex boundaries (all simplices), n in {0,1}",
    6: "simplex boundaries (all simplices), all n",
}


def equivalence_report(D: OpenDiagram, nmax: int = 3, kmax: int | None = None) -> EquivalenceReport:
    """Evaluate the six lifting characterisations of atlases (truncated at nmax / kmax)."""
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    kmax = nmax + 1 if kmax is None else kmax
    v = {
        1: _check_family(D, [discrete_cone(0), discrete_cone(2)], "1"),
        2: _check_family(D, [discrete_cone(k) for k in range(kmax + 1)], "2"),
        3: _check_family(D, [subset_cone(n) for n in (0, 1)], "3"),
        4: _check_family(D, [subset_cone(n) for n in range(nmax + 1)], "4"),
        5: _check_family(D, [simplex_category_cone(n) for n in (0, 1)], "5"),
        6: _check_family(D, [simplex_category_cone(n) for n in range(nmax + 1)], "6"),
    }
    return EquivalenceReport(v)


@dataclass(frozen=True)
class TransferReport:
    reduced: Verdict
    full: Verdict

    @property
    def holds(self) -> bool:
        """Reduced problem solvable implies full problem solvable."""
        return (not self.reduced.passed) or self.full.passed

    @property
    def converse(self) -> bool:
        return (not self.full.passed) or self.reduced.passed

    def __bool__(self) -> bool:
        return self.holds


def pushout_transfer_check(D: OpenDiagram, p: LiftingProblem, K0) -> TransferReport:
    """Compare the cone problem on K with the one on a 0-coinitial K0 inside it."""
    K0 = list(K0)
    if not is_zero_coinitial(p.small, K0):
        raise ValueError("K0 is not 0-coinitial in the small shape")
    if cone_apex(p.small, p.big, p.embedding) is None:
        raise ValueError("the transfer check needs a cone problem K -> K + apex")
    sub = p.small.subposet(K0)
    small, big = sub, left_cone(sub)
    reduced = LiftingProblem(small, big, {k: p.sigma[k] for k in sub})
    return TransferReport(local_lifting_check(D, reduced), local_lifting_check(D, p))
