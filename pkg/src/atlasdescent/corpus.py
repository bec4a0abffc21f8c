"""Named example spaces and diagrams, exhaustive small corpora, and seeded random ones."""
from __future__ import annotations

import random
from functools import lru_cache
from itertools import combinations, product
from typing import Iterator

import numpy as np

from .hypercover import LabeledSSet, cech_nerve
from .lifting import OpenDiagram
from .order import (
    FiniteFrame,
    FinitePoset,
    FinitePreorder,
    alexandrov_frame,
    canonical_form,
    open_id,
)
from .simplicial import TruncatedSemiSSet, TruncatedSSet, simplicial_envelope

# ---------------------------------------------------------------------------
# named examples


def line_space() -> FiniteFrame:
    """Three points l, m, r; the middle one is open."""
    return FiniteFrame.generated(["l", "m", "r"], [{"m"}, {"l", "m"}, {"m", "r"}])


def wedge_poset() -> FinitePoset:
    return FinitePoset.from_relations(["w", "u", "v"], [("w", "u"), ("w", "v")])


def basic_atlas() -> OpenDiagram:
    """Two opens of the line space with their intersection placed below both."""
    return OpenDiagram(line_space(), wedge_poset(), {"w": {"m"}, "u": {"l", "m"}, "v": {"m", "r"}})


def discrete_pair() -> OpenDiagram:
    """The same two opens with no intersection: not an atlas."""
    return OpenDiagram(line_space(), FinitePoset.discrete(["u", "v"]), {"u": {"l", "m"}, "v": {"m", "r"}})


def circle_poset() -> FinitePoset:
    return FinitePoset.from_relations(["A", "B", "U", "V"], [("A", "U"), ("A", "V"), ("B", "U"), ("B", "V")])


def circle_space() -> FiniteFrame:
    return FiniteFrame.generated(["u", "v", "a", "b"], [{"a"}, {"b"}, {"u", "a", "b"}, {"v", "a", "b"}])


def circle_atlas() -> OpenDiagram:
    """Two opens whose overlap splits into two disjoint pieces, indexed by a four-element poset."""
    return OpenDiagram(
        circle_space(), circle_poset(), {"A": {"a"}, "B": {"b"}, "U": {"u", "a", "b"}, "V": {"v", "a", "b"}}
    )


def empty_diagram(frame: FiniteFrame) -> OpenDiagram:
    return OpenDiagram(frame, FinitePoset.discrete([]), {})


def basis_diagram(frame: FiniteFrame, opens=None, discrete: bool = False, target=None) -> OpenDiagram:
    """Index a family of opens by itself, ordered by inclusion (or discretely)."""
    if opens is None:
        opens = minimal_neighbourhoods(frame)
    opens = sorted({frozenset(U) for U in opens}, key=lambda U: (len(U), sorted(U)))
    ids = [open_id(U) for U in opens]
    if discrete:
        I = FinitePoset.discrete(ids)
    else:
        I = FinitePoset.from_relations(ids, [(a, b) for a, A in zip(ids, opens) for b, B in zip(ids, opens) if A <= B])
    return OpenDiagram(frame, I, dict(zip(ids, opens)), target)


def minimal_neighbourhoods(frame: FiniteFrame) -> list[frozenset]:
    """Smallest open around each point."""
    out = set()
    for p in frame.points:
        out.add(frozenset.intersection(*[U for U in frame.opens if p in U]))
    return sorted(out, key=lambda U: (len(U), sorted(U)))


# ---------------------------------------------------------------------------
# exhaustive small corpora


def _points(n: int) -> list[str]:
    return [f"p{k}" for k in range(n)]


@lru_cache(maxsize=None)
def preorders_up_to_iso(n: int) -> tuple[FinitePreorder, ...]:
    """One preorder per isomorphism class on ``n`` points.

    Every class arises by adding a point, with chosen relations to the others,
    to a class on ``n - 1`` points.
    """
    pts = _points(n)
    if n == 0:
        return (FinitePreorder((), frozenset()),)
    seen: dict = {}
    for Q in preorders_up_to_iso(n - 1):
        base = np.zeros((n, n), dtype=bool)
        base[: n - 1, : n - 1] = Q.matrix
        base[n - 1, n - 1] = True
        for bits in product((False, True), repeat=2 * (n - 1)):
            m = base.copy()
            m[: n - 1, n - 1] = bits[: n - 1]
            m[n - 1, : n - 1] = bits[n - 1 :]
            for k in range(n):
                m |= m[:, [k]] & m[[k], :]
            P = FinitePreorder.from_matrix(pts, m)
            seen.setdefault(canonical_form(P), P)
    return tuple(seen[k] for k in sorted(seen))


@lru_cache(maxsize=None)
def posets_up_to_iso(n: int) -> tuple[FinitePoset, ...]:
    out = []
    for P in preorders_up_to_iso(n):
        m = P.matrix
        if not (m & m.T & ~np.eye(n, dtype=bool)).any():
            out.append(FinitePoset(P.elements, P.leq))
    return tuple(out)


@lru_cache(maxsize=None)
def frames_with_few_opens(max_opens: int) -> tuple[FiniteFrame, ...]:
    """One frame per isomorphism class among those with at most ``max_opens`` opens.

    A finite frame is the up-set lattice of its poset of join-irreducibles, so
    it suffices to run over posets. Each poset arises from a smaller one by
    adding a maximal point above a down-set, and that never lowers the number
    of up-sets, so the search prunes as soon as the bound is exceeded.
    """
    level = {canonical_form(FinitePoset.discrete([])): FinitePoset.discrete([])}
    found = dict(level)
    while level:
        nxt: dict = {}
        for P in level.values():
            n = len(P)
            pts = _points(n + 1)
            for up in alexandrov_frame(P).sorted_opens:
                m = np.zeros((n + 1, n + 1), dtype=bool)
                m[:n, :n] = P.matrix
                m[n, n] = True
                m[:n, n] = [e not in up for e in P.elements]
                Q = FinitePoset.from_matrix(pts, m)
                if len(alexandrov_frame(Q).opens) > max_opens:
                    continue
                nxt.setdefault(canonical_form(Q), Q)
        level = {k: v for k, v in nxt.items() if k not in found}
        found.update(level)
    return tuple(alexandrov_frame(found[k]) for k in sorted(found))


def frame_diagrams(frame: FiniteFrame) -> list[tuple[str, OpenDiagram]]:
    """A fixed battery of diagrams over one frame, atlases and non-atlases alike."""
    out = [("empty", empty_diagram(frame))]
    out.append(("basis", basis_diagram(frame)))
    out.append(("basis-discrete", basis_diagram(frame, discrete=True)))
    proper = [U for U in frame.sorted_opens if U and U != frame.top]
    pair = next(((A, B) for A, B in combinations(proper, 2) if A | B == frame.top and not (A <= B or B <= A)), None)
    if pair is not None:
        A, B = pair
        I = FinitePoset.from_relations(["w", "u", "v"], [("w", "u"), ("w", "v")])
        out.append(("pair", OpenDiagram(frame, I, {"w": A & B, "u": A, "v": B})))
        out.append(("pair-discrete", OpenDiagram(frame, FinitePoset.discrete(["u", "v"]), {"u": A, "v": B})))
    nonempty = [U for U in frame.sorted_opens if U]
    if len(nonempty) <= 5:
        out.append(("all-opens", basis_diagram(frame, nonempty)))
    return out


def exhaustive_diagrams(max_points: int = 4) -> Iterator[tuple[str, OpenDiagram]]:
    """``frame_diagrams`` over the Alexandrov frame of every preorder up to isomorphism."""
    for n in range(max_points + 1):
        for k, P in enumerate(preorders_up_to_iso(n)):
            frame = alexandrov_frame(P)
            for name, D in frame_diagrams(frame):
                yield f"preorder{n}.{k}/{name}", D


# ---------------------------------------------------------------------------
# seeded random corpora


def random_preorder(rng: random.Random, n: int, density: float = 0.3) -> FinitePreorder:
    pts = _points(n)
    rel = [(a, b) for a in pts for b in pts if a != b and rng.random() < density]
    return FinitePreorder.from_relations(pts, rel)


def random_poset(rng: random.Random, n: int, density: float = 0.35) -> FinitePoset:
    ids = [f"i{k}" for k in range(n)]
    rel = [(ids[a], ids[b]) for a in range(n) for b in range(a + 1, n) if rng.random() < density]
    return FinitePoset.from_relations(ids, rel)


def _random_diagram(rng: random.Random) -> OpenDiagram:
    X = random_preorder(rng, rng.randint(1, 5))
    frame = alexandrov_frame(X)
    opens = list(frame.sorted_opens)
    target = frame.top if rng.random() < 0.7 else rng.choice(opens)
    style = rng.random()
    if style < 0.3:
        fam = {rng.choice(opens) & target for _ in range(rng.randint(1, 4))}
        closed = set(fam)
        for A in list(fam):
            for B in list(fam):
                closed.add(A & B)
        if rng.random() < 0.5:
            closed.discard(frozenset())
        if len(closed) <= 5 and closed:
            return basis_diagram(frame, closed, target=target)
    I = random_poset(rng, rng.randint(0, 5))
    pick = {i: rng.choice(opens) & target for i in I}
    U = {i: frozenset.intersection(target, *[pick[j] for j in I.above(i)]) for i in I}
    return OpenDiagram(frame, I, U, target)


def random_diagrams(seed: int = 0, count: int = 500) -> list[OpenDiagram]:
    rng = random.Random(seed)
    return [_random_diagram(rng) for _ in range(count)]


def fold_bundle(X: FinitePreorder, copies: int = 2) -> tuple[FinitePreorder, dict[str, str]]:
    """``copies`` disjoint copies of ``X`` projecting onto it."""
    pts = [f"{x}#{c}" for c in range(copies) for x in X.elements]
    rel = [(f"{a}#{c}", f"{b}#{c}") for c in range(copies) for a, b in X.leq if a != b]
    return FinitePreorder.from_relations(pts, rel), {e: e.rsplit("#", 1)[0] for e in pts}


def random_bundle(rng: random.Random, X: FinitePreorder, max_fibre: int = 2) -> tuple[FinitePreorder, dict[str, str]]:
    """Random continuous map onto ``X``: fibres of size up to ``max_fibre``, relations only over related base points."""
    pts = [f"{x}#{k}" for x in X.elements for k in range(rng.randint(0, max_fibre))]
    p = {e: e.rsplit("#", 1)[0] for e in pts}
    rel = [(a, b) for a in pts for b in pts if a != b and X.le(p[a], p[b]) and rng.random() < 0.5]
    return FinitePreorder.from_relations(pts, rel), p


def random_semi_complex(rng: random.Random, vertices: int, top: int) -> TruncatedSemiSSet:
    """Downward-closed random set of ordered vertex tuples, as a semisimplicial set."""
    levels = [[(v,) for v in range(vertices)]]
    for n in range(1, top + 1):
        cands = [t for t in combinations(range(vertices), n + 1) if all(t[:i] + t[i + 1 :] in set(levels[n - 1]) for i in range(n + 1))]
        levels.append([t for t in cands if rng.random() < 0.6])
    while len(levels) > 1 and not levels[-1]:
        levels.pop()
    return TruncatedSemiSSet.from_keys(levels, lambda n, i, t: t[:i] + t[i + 1 :])


def random_labels(rng: random.Random, S: TruncatedSSet, frame: FiniteFrame, target=None) -> LabeledSSet:
    """Labels chosen upward by level: below the faces' labels, copied along degeneracies."""
    target = frame.top if target is None else frozenset(target)
    opens = frame.sorted_opens
    labels: list[list[frozenset]] = []
    for n in range(S.N + 1):
        lv: list = [None] * S.sizes[n]
        if n:
            for j in range(n):
                for y, x in enumerate(S.degeneracies[n - 1][j]):
                    lv[int(x)] = labels[n - 1][y]
        for x in range(S.sizes[n]):
            if lv[x] is not None:
                continue
            bound = target
            for i in range(n + 1 if n else 0):
                bound = bound & labels[n - 1][int(S.faces[n][i][x])]
            inside = [U for U in opens if U <= bound]
            lv[x] = bound if rng.random() < 0.5 else rng.choice(inside)
        labels.append(lv)
    return LabeledSSet.from_opens(S, labels, frame, target)


def random_labeled_ssets(seed: int = 0, count: int = 200, max_simplices: int = 200) -> list[LabeledSSet]:
    from .nerve import nerve_truncated

    rng = random.Random(seed)
    out: list[LabeledSSet] = []
    while len(out) < count:
        X = random_preorder(rng, rng.randint(1, 4))
        frame = alexandrov_frame(X)
        kind = len(out) % 3
        N = rng.choice([2, 3])
        if kind == 0:
            G = random_semi_complex(rng, rng.randint(1, 4), rng.randint(1, 2))
            S = simplicial_envelope(G, N)
        elif kind == 1:
            S = nerve_truncated(random_poset(rng, rng.randint(1, 3)), N).sset
        else:
            opens = [U for U in frame.sorted_opens if U]
            cover = rng.sample(opens, min(len(opens), rng.randint(1, 3)))
            V = frame.union(cover)
            H = cech_nerve(frame, cover, V, N)
            if H.total_size <= max_simplices:
                out.append(H if rng.random() < 0.5 else random_labels(rng, H.shape, frame, V))
            continue
        if sum(S.sizes) > max_simplices:
            continue
        target = frame.top if rng.random() < 0.7 else rng.choice(frame.sorted_opens)
        out.append(random_labels(rng, S, frame, target))
    return out
