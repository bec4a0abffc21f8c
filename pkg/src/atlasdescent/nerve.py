"""The tautological nerve of a finite poset, its counit, and homology.

An n-simplex of ``N(I)`` is an order-reversing map from the inhabited subsets
of ``{0..n}`` to ``I``: larger subsets take smaller values. Values are stored
as rows of element positions, column ``T - 1`` for the subset with bit mask
``T``, so the last column is the full subset.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from ._smith import elementary_divisors
from .hypercover import LabeledSSet
from .lifting import OpenDiagram
from .order import FinitePoset, canonical_form
from .simplicial import TruncatedSSet, lookup_rows


class NerveSimplex(NamedTuple):
    n: int
    values: tuple[str, ...]

    def at(self, T) -> str:
        mask = sum(1 << v for v in T)
        return self.values[mask - 1]

    def as_dict(self) -> dict[tuple[int, ...], str]:
        return {tuple(v for v in range(self.n + 1) if m >> v & 1): x for m, x in enumerate(self.values, 1)}


def counit_eval(x: NerveSimplex) -> str:
    """Value at the full subset, the initial object of the simplex's shape."""
    return x.values[-1]


def _popcount(m: int) -> int:
    return bin(m).count("1")


def _order_reversing_rows(leq: np.ndarray, n: int) -> np.ndarray:
    m = len(leq)
    full = (1 << (n + 1)) - 1
    order = sorted(range(1, full + 1), key=lambda T: (-_popcount(T), T))
    col = {T: c for c, T in enumerate(order)}
    dtype = np.int16 if m < 2**15 else np.int32
    rows = np.arange(m, dtype=dtype)[:, None]
    for T in order[1:]:
        allowed = np.ones((len(rows), m), dtype=bool)
        for v in range(n + 1):
            if not T >> v & 1:
                allowed &= leq[rows[:, col[T | 1 << v]]]
        r, c = np.nonzero(allowed)
        rows = np.concatenate([rows[r], c.astype(dtype)[:, None]], axis=1)
    vals = rows[:, [col[T] for T in range(1, full + 1)]]
    return vals[np.lexsort(vals.T[::-1])] if len(vals) else vals


def _image_mask(T: int, f) -> int:
    out = 0
    v = 0
    while T:
        if T & 1:
            out |= 1 << f(v)
        T >>= 1
        v += 1
    return out


def _pull(vals: np.ndarray, n_src: int, f) -> np.ndarray:
    """Rows of ``alpha^* x`` where ``f`` is the vertex map of alpha into ``[n_src]``."""
    cols = [_image_mask(T, f) - 1 for T in range(1, 1 << (n_src + 1))]
    return vals[:, cols]


@dataclass(frozen=True, eq=False)
class TruncatedNerve:
    poset: FinitePoset
    sset: TruncatedSSet
    values: tuple[np.ndarray, ...]

    @property
    def N(self) -> int:
        return self.sset.N

    def simplex(self, n: int, x: int) -> NerveSimplex:
        els = self.poset.elements
        return NerveSimplex(n, tuple(els[int(v)] for v in self.values[n][x]))

    def index_of(self, s: NerveSimplex) -> int:
        pos = self.poset.index
        row = np.array([[pos[v] for v in s.values]], dtype=np.int64)
        hit = int(lookup_rows(self.values[s.n], row)[0])
        if hit < 0:
            raise KeyError(f"{s} is not a simplex of the nerve")
        return hit

    def counit(self, n: int) -> np.ndarray:
        """Element positions of the counit on level ``n``."""
        return self.values[n][:, -1].astype(np.int64)

    @cached_property
    def total_size(self) -> int:
        return sum(self.sset.sizes)


@lru_cache(maxsize=16)
def nerve_truncated(I: FinitePoset, N: int) -> TruncatedNerve:
    leq = np.asarray(I.matrix, dtype=bool)
    vals = [_order_reversing_rows(leq, n) for n in range(N + 1)]
    for v in vals:
        v.setflags(write=False)
    faces, degs = [], []
    for n in range(N + 1):
        faces.append(
            tuple(lookup_rows(vals[n - 1], _pull(vals[n], n - 1, lambda v, i=i: v + (v >= i))) for i in range(n + 1))
            if n else ()
        )
        degs.append(
            tuple(lookup_rows(vals[n + 1], _pull(vals[n], n + 1, lambda v, j=j: v - (v > j))) for j in range(n + 1))
            if n < N else ()
        )
    sset = TruncatedSSet(N, tuple(len(v) for v in vals), tuple(faces), tuple(degs))
    return TruncatedNerve(I, sset, tuple(vals))


def refine_diagram(D: OpenDiagram, N: int) -> LabeledSSet:
    """The nerve of the index poset, each simplex labelled by ``U`` at its counit value."""
    nv = nerve_truncated(D.index, N)
    by_pos = np.array([D.masks[e] for e in D.index.elements], dtype=np.int64)
    labels = tuple(by_pos[nv.counit(n)] for n in range(N + 1))
    return LabeledSSet(nv.sset, labels, D.frame, D.target)


# ---------------------------------------------------------------------------
# maps into the nerve versus monotone assignments


def transpose_map(K: TruncatedSSet, nv: TruncatedNerve, g: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Map ``K -> N(I)`` to the assignment ``x -> g(x)(full)`` (element positions)."""
    if K.N > nv.N:
        raise ValueError("K is truncated above the nerve")
    return [nv.counit(n)[np.asarray(g[n], dtype=np.int64)] for n in range(K.N + 1)]


def assignment_is_monotone(K: TruncatedSSet, leq: np.ndarray, f: Sequence[np.ndarray]) -> bool:
    """``f(x) <= f(alpha^* x)`` along every face and degeneracy."""
    for n in range(K.N + 1):
        for i in range(n + 1 if n else 0):
            if not leq[f[n], f[n - 1][K.faces[n][i]]].all():
                return False
        for j in range(n + 1 if n < K.N else 0):
            if not leq[f[n], f[n + 1][K.degeneracies[n][j]]].all():
                return False
    return True


def transpose_assignment(K: TruncatedSSet, nv: TruncatedNerve, f: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Monotone assignment to the map ``x -> (T -> f(iota_T^* x))``."""
    if K.N > nv.N:
        raise ValueError("K is truncated above the nerve")
    f = [np.asarray(a, dtype=np.int64) for a in f]
    if tuple(len(a) for a in f) != K.sizes[: len(f)] or len(f) != K.N + 1:
        raise ValueError("assignment does not match the levels of K")
    leq = np.asarray(nv.poset.matrix, dtype=bool)
    if not assignment_is_monotone(K, leq, f):
        raise ValueError("assignment is not monotone along faces and degeneracies")
    out = []
    for n in range(K.N + 1):
        rows = np.empty((K.sizes[n], (1 << (n + 1)) - 1), dtype=np.int64)
        for T in range(1, 1 << (n + 1)):
            inj = tuple(v for v in range(n + 1) if T >> v & 1)
            rows[:, T - 1] = f[len(inj) - 1][K.operator_array(inj, n)]
        idx = lookup_rows(nv.values[n], rows)
        if (idx < 0).any():
            raise ValueError("assignment does not produce nerve simplices")
        out.append(idx)
    return out


def monotone_assignments(K: TruncatedSSet, I: FinitePoset):
    """All monotone assignments of element positions to the simplices of ``K`` (backtracking)."""
    leq = np.asarray(I.matrix, dtype=bool)
    cells = [(n, x) for n in range(K.N + 1) for x in range(K.sizes[n])]
    nbrs: dict[tuple[int, int], list[tuple[tuple[int, int], bool]]] = {c: [] for c in cells}
    for n in range(K.N + 1):
        for i in range(n + 1 if n else 0):
            for x, y in enumerate(K.faces[n][i]):
                nbrs[(n, x)].append(((n - 1, int(y)), True))
                nbrs[(n - 1, int(y))].append(((n, x), False))
        for j in range(n + 1 if n < K.N else 0):
            for x, y in enumerate(K.degeneracies[n][j]):
                nbrs[(n, x)].append(((n + 1, int(y)), True))
                nbrs[(n + 1, int(y))].append(((n, x), False))
    val: dict = {}

    def rec(k):
        if k == len(cells):
            yield [np.array([val[(n, x)] for x in range(K.sizes[n])], dtype=np.int64) for n in range(K.N + 1)]
            return
        c = cells[k]
        for e in range(len(leq)):
            ok = True
            for d, up in nbrs[c]:
                if d in val and not (leq[e, val[d]] if up else leq[val[d], e]):
                    ok = False
                    break
            if ok:
                val[c] = e
                yield from rec(k + 1)
                del val[c]

    yield from rec(0)


# ---------------------------------------------------------------------------


def slice_refinement_check(i: str, I: FinitePoset, N: int) -> bool:
    """Match ``N(i/I)`` levelwise against the simplices of ``N(I)`` with counit above ``i``.

    The embedding must be a bijection onto that set at every level and commute
    with all faces and degeneracies.
    """
    if i not in I:
        raise ValueError(f"{i!r} is not an element of the poset")
    sub = I.subposet(I.above(i))
    small, big = nerve_truncated(sub, N), nerve_truncated(I, N)
    pos = np.array([I.index[e] for e in sub.elements], dtype=np.int64)
    ipos = I.index[i]
    leq = np.asarray(I.matrix, dtype=bool)
    emb = []
    for n in range(N + 1):
        idx = lookup_rows(big.values[n], pos[small.values[n].astype(np.int64)])
        if (idx < 0).any() or len(np.unique(idx)) != len(idx):
            return False
        expected = np.nonzero(leq[ipos, big.counit(n)])[0]
        if not np.array_equal(np.sort(idx), expected):
            return False
        emb.append(idx)
    for n in range(N + 1):
        for k in range(n + 1 if n else 0):
            if not np.array_equal(big.sset.faces[n][k][emb[n]], emb[n - 1][small.sset.faces[n][k]]):
                return False
        for k in range(n + 1 if n < N else 0):
            if not np.array_equal(big.sset.degeneracies[n][k][emb[n]], emb[n + 1][small.sset.degeneracies[n][k]]):
                return False
    return True


# ---------------------------------------------------------------------------
# homology


class HomologyGroup(NamedTuple):
    betti: int
    torsion: tuple[int, ...]


def _boundary_columns(S: TruncatedSSet, k: int, nd: Sequence[np.ndarray], row_of: np.ndarray):
    # built in chunks so that an early exit in the reduction skips the rest
    for start in range(0, len(nd[k]), 4096):
        cells = nd[k][start : start + 4096]
        R = np.stack([row_of[S.faces[k][i][cells]] for i in range(k + 1)], axis=1)
        for rows in R.tolist():
            col: dict[int, int] = {}
            for i, r in enumerate(rows):
                if r >= 0:
                    col[r] = col.get(r, 0) + (-1 if i & 1 else 1)
            yield col


def homology(S: TruncatedSSet, maxdeg: int) -> list[HomologyGroup]:
    """Integral homology of the normalized chains in degrees ``0..maxdeg``."""
    if maxdeg > S.N - 1 or maxdeg < 0:
        raise ValueError(f"degrees up to {maxdeg} need truncation at least {maxdeg + 1}, have {S.N}")
    nd = [S.nondegenerate(n) for n in range(maxdeg + 2)]
    dims = [len(a) for a in nd]
    rank = [0]
    divisors: list[list[int]] = [[]]
    for k in range(1, maxdeg + 2):
        row_of = np.full(S.sizes[k - 1], -1, dtype=np.int64)
        row_of[nd[k - 1]] = np.arange(dims[k - 1])
        d = elementary_divisors(_boundary_columns(S, k, nd, row_of), dims[k - 1] - rank[k - 1])
        rank.append(len(d))
        divisors.append(d)
    return [
        HomologyGroup(dims[k] - rank[k] - rank[k + 1], tuple(sorted(d for d in divisors[k + 1] if d > 1)))
        for k in range(maxdeg + 1)
    ]


def slice_homology(i: str, I: FinitePoset, maxdeg: int) -> list[HomologyGroup]:
    """Homology of ``N(i/I)``, cached per isomorphism class of the slice."""
    return list(_class_homology(canonical_form(I.subposet(I.above(i))), maxdeg))


@lru_cache(maxsize=None)
def _class_homology(key: tuple, maxdeg: int) -> tuple[HomologyGroup, ...]:
    n, flat = key
    P = FinitePoset.from_matrix([f"e{k}" for k in range(n)], np.array(flat, dtype=bool).reshape(n, n))
    return tuple(homology(nerve_truncated(P, maxdeg + 1).sset, maxdeg))
