"""Labeled simplicial sets (index diagrams) and the hypercover conditions.

A :class:`LabeledSSet` attaches an open to every simplex so that faces have
larger labels and degeneracies equal ones. Labels are held as integer bit
masks over the frame's points, one array per level.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from .lifting import Verdict, Witness
from .order import FiniteFrame, covers, open_id
from .semirep import FamilyMorphism, IndexedFamily
from .simplicial import (
    TruncatedSSet,
    boundary_tuples,
    face_tuples,
    join_codes,
    monotone_operators,
    row_codes,
)


@dataclass(frozen=True, eq=False)
class LabeledSSet:
    shape: TruncatedSSet
    labels: tuple[np.ndarray, ...]
    frame: FiniteFrame
    target: frozenset | None = None

    def __post_init__(self):
        S, frame = self.shape, self.frame
        target = frame.top if self.target is None else frozenset(self.target)
        object.__setattr__(self, "target", target)
        if not frame.is_open(target):
            raise ValueError(f"target {open_id(target)} is not open")
        labels = tuple(np.asarray(l, dtype=np.int64) for l in self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) != S.N + 1 or any(len(l) != s for l, s in zip(labels, S.sizes)):
            raise ValueError("need one label per simplex")
        valid = np.array(sorted(frame.mask_of.values()), dtype=np.int64)
        tmask = frame.mask(target)
        for n, l in enumerate(labels):
            if not np.isin(l, valid).all():
                raise ValueError(f"a level-{n} label is not an open of the frame")
            if (l & ~tmask).any():
                raise ValueError(f"a level-{n} label is not contained in the target")
            for i in range(n + 1 if n else 0):
                if (l & ~labels[n - 1][S.faces[n][i]]).any():
                    raise ValueError(f"label of d{i} x does not contain label of x at level {n}")
            for j in range(n + 1 if n < S.N else 0):
                if not np.array_equal(labels[n + 1][S.degeneracies[n][j]], l):
                    raise ValueError(f"label changes along s{j} at level {n}")

    @classmethod
    def from_opens(cls, shape: TruncatedSSet, opens: Sequence[Sequence], frame: FiniteFrame, target=None):
        labels = tuple(np.array([frame.mask(U) for U in lv], dtype=np.int64) for lv in opens)
        return cls(shape, labels, frame, target)

    def label(self, n: int, x: int) -> frozenset:
        return self.frame.from_mask(int(self.labels[n][x]))

    @property
    def total_size(self) -> int:
        return sum(self.shape.sizes)


def _region(H: LabeledSSet, n: int, tuples: np.ndarray) -> np.ndarray:
    tmask = H.frame.mask(H.target)
    region = np.full(len(tuples), tmask, dtype=np.int64)
    for i in range(n + 1 if n else 0):
        region &= H.labels[n - 1][tuples[:, i]]
    return region


def _fillers(H: LabeledSSet, n: int, tuples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pairs (boundary tuple row, level-n filler) sorted by row then filler."""
    if n == 0:
        c = H.shape.sizes[0]
        return np.zeros(c, dtype=np.int64), np.arange(c, dtype=np.int64)
    tc, fc = row_codes(tuples, face_tuples(H.shape, n))
    return join_codes(tc, fc)


def _group_or(values: np.ndarray, groups: np.ndarray, count: int) -> np.ndarray:
    out = np.zeros(count, dtype=np.int64)
    np.bitwise_or.at(out, groups, values)
    return out


def _fail(H: LabeledSSet, n: int, row: int, tuples, region, achieved, li, fills, checked, condition) -> Verdict:
    frame = H.frame
    reg, ach = int(region[row]), int(achieved[row])
    left = reg & ~ach
    mine = fills[li == row]
    problem = {"level": n, "boundary": [int(v) for v in tuples[row]]}
    w = Witness(
        problem,
        frame.from_mask(reg),
        frame.from_mask(ach),
        tuple(p for i, p in enumerate(frame.points) if left >> i & 1),
        tuple(H.label(n, int(f)) for f in mine),
        condition,
    )
    return Verdict(False, w, checked, condition)


def check_hypercover(H: LabeledSSet, nmax: int) -> Verdict:
    """Fill condition: for every boundary configuration the fillers' labels cover its region."""
    if nmax > H.shape.N:
        raise ValueError("nmax exceeds the truncation level")
    checked = 0
    for n in range(nmax + 1):
        tuples = boundary_tuples(H.shape, n)
        region = _region(H, n, tuples)
        li, fills = _fillers(H, n, tuples)
        achieved = _group_or(H.labels[n][fills], li, len(tuples))
        bad = np.nonzero(achieved != region)[0]
        checked += len(tuples)
        if len(bad):
            return _fail(H, n, int(bad[0]), tuples, region, achieved, li, fills, checked, "fill")
    return Verdict(True, None, checked, "fill")


def cone_bounds(H: LabeledSSet, n: int) -> np.ndarray:
    """For each n-simplex tau, the intersection of the labels of every simplex of Delta^n mapped through tau.

    This is the largest open W for which Delta^n (x) W -> H exists with top simplex tau.
    """
    S = H.shape
    bound = np.full(S.sizes[n], H.frame.mask(H.target), dtype=np.int64)
    for m in range(S.N + 1):
        for alpha in monotone_operators(m, n):
            bound &= H.labels[m][S.operator_array(alpha, n)]
    return bound


def check_hypercover_dhi(H: LabeledSSet, nmax: int) -> Verdict:
    """Local liftings against boundary(Delta^n) (x) U_sigma -> Delta^n (x) U_sigma.

    For each boundary configuration sigma, collect the opens W inside U_sigma
    for which sigma extends to a map from Delta^n (x) W; they must cover U_sigma.
    """
    if nmax > H.shape.N:
        raise ValueError("nmax exceeds the truncation level")
    opens = np.array(sorted(H.frame.mask_of.values()), dtype=np.int64)
    checked = 0
    for n in range(nmax + 1):
        tuples = boundary_tuples(H.shape, n)
        region = _region(H, n, tuples)
        li, fills = _fillers(H, n, tuples)
        bound = cone_bounds(H, n)[fills]
        reg_of_fill = region[li]
        achieved = np.zeros(len(tuples), dtype=np.int64)
        for W in opens:
            ok = ((W & ~bound) == 0) & ((W & ~reg_of_fill) == 0)
            hit = np.zeros(len(tuples), dtype=bool)
            hit[li[ok]] = True
            achieved[hit] |= W
        checked += len(tuples)
        bad = np.nonzero(achieved != region)[0]
        if len(bad):
            return _fail(H, n, int(bad[0]), tuples, region, achieved, li, fills, checked, "dhi")
    return Verdict(True, None, checked, "dhi")


def cech_nerve(frame: FiniteFrame, cover: Sequence, V, N: int) -> LabeledSSet:
    """Tuples of cover indices labelled by the intersection of their members."""
    cover = [frozenset(U) for U in cover]
    V = frozenset(V)
    if not covers(frame, cover, V):
        raise ValueError(f"the family does not cover {open_id(V)}")
    m = len(cover)
    levels = [list(product(range(m), repeat=n + 1)) for n in range(N + 1)]
    shape = TruncatedSSet.from_keys(
        levels, lambda n, i, t: t[:i] + t[i + 1 :], lambda n, j, t: t[: j + 1] + t[j:]
    )
    labels = [[frame.meet(cover[a] for a in t) for t in lv] for lv in levels]
    return LabeledSSet.from_opens(shape, labels, frame, V)


def constant_labeled(shape: TruncatedSSet, V, frame: FiniteFrame) -> LabeledSSet:
    """``shape`` tensored with the open ``V``: every simplex labelled ``V``."""
    m = frame.mask(V)
    return LabeledSSet(shape, tuple(np.full(s, m, dtype=np.int64) for s in shape.sizes), frame, frozenset(V))


# ---------------------------------------------------------------------------
# levelwise families


@dataclass(frozen=True, eq=False)
class LevelFamilies:
    """A simplicial object of indexed families: one family per level, morphisms per structure map."""

    N: int
    families: tuple[IndexedFamily, ...]
    faces: Mapping[tuple[int, int], FamilyMorphism]
    degeneracies: Mapping[tuple[int, int], FamilyMorphism]
    target: frozenset


def _cell(n: int, x: int) -> str:
    return f"{n}:{x}"


def labeled_to_families(H: LabeledSSet) -> LevelFamilies:
    S, frame = H.shape, H.frame
    fams = tuple(
        IndexedFamily(frame, tuple(_cell(n, x) for x in range(S.sizes[n])), {_cell(n, x): H.label(n, x) for x in range(S.sizes[n])})
        for n in range(S.N + 1)
    )
    faces, degs = {}, {}
    for n in range(S.N + 1):
        for i in range(n + 1 if n else 0):
            faces[(n, i)] = FamilyMorphism(
                fams[n], fams[n - 1], {_cell(n, x): _cell(n - 1, int(y)) for x, y in enumerate(S.faces[n][i])}
            )
        for j in range(n + 1 if n < S.N else 0):
            degs[(n, j)] = FamilyMorphism(
                fams[n], fams[n + 1], {_cell(n, x): _cell(n + 1, int(y)) for x, y in enumerate(S.degeneracies[n][j])}
            )
    return LevelFamilies(S.N, fams, faces, degs, H.target)


def families_to_labeled(L: LevelFamilies) -> LabeledSSet:
    """Inverse of :func:`labeled_to_families`; degeneracy morphisms must be local isomorphisms."""
    N = L.N
    pos = [{s: k for k, s in enumerate(f.index)} for f in L.families]
    faces, degs = [], []
    for n in range(N + 1):
        faces.append(
            tuple(np.array([pos[n - 1][L.faces[(n, i)].reindex[s]] for s in L.families[n].index], dtype=np.int64) for i in range(n + 1))
            if n else ()
        )
        dl = []
        for j in range(n + 1 if n < N else 0):
            m = L.degeneracies[(n, j)]
            if not m.is_local_isomorphism():
                raise ValueError(f"degeneracy s{j} at level {n} is not a local isomorphism")
            dl.append(np.array([pos[n + 1][m.reindex[s]] for s in L.families[n].index], dtype=np.int64))
        degs.append(tuple(dl))
    shape = TruncatedSSet(N, tuple(len(f.index) for f in L.families), tuple(faces), tuple(degs))
    shape.validate()
    frame = L.families[0].frame
    labels = [[f.member[s] for s in f.index] for f in L.families]
    return LabeledSSet.from_opens(shape, labels, frame, L.target)
