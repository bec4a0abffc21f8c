"""Truncated simplicial and semisimplicial sets.

Cells are integers ``0 .. sizes[n]-1`` at each level ``n``; structure maps are
integer arrays, ``faces[n][i]`` mapping level ``n`` to level ``n-1`` and
``degeneracies[n][j]`` mapping level ``n`` to level ``n+1``. Optional ``keys``
attach a hashable description to every cell (e.g. the monotone map of a
simplex of a standard simplex).

Simplicial operators are monotone maps ``[m] -> [n]`` written as tuples of
length ``m + 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, combinations_with_replacement
from typing import Callable, Hashable, Iterator, NamedTuple, Sequence

import numpy as np

from .order import FinitePoset, FinitePreorder, left_cone

Operator = tuple[int, ...]


def face_operator(n: int, i: int) -> Operator:
    """The coface [n-1] -> [n] skipping ``i``."""
    return tuple(k if k < i else k + 1 for k in range(n))


def degeneracy_operator(n: int, j: int) -> Operator:
    """The codegeneracy [n+1] -> [n] hitting ``j`` twice."""
    return tuple(k if k <= j else k - 1 for k in range(n + 2))


def compose(a: Operator, b: Operator) -> Operator:
    """``a`` after ``b``."""
    return tuple(a[k] for k in b)


def image_factorization(alpha: Operator) -> tuple[Operator, Operator]:
    """Split ``alpha`` as ``inj`` after ``surj``; returns ``(surj, inj)``."""
    image = sorted(set(alpha))
    pos = {v: i for i, v in enumerate(image)}
    return tuple(pos[a] for a in alpha), tuple(image)


def surjections(n: int, k: int) -> list[Operator]:
    """Monotone surjections [n] -> [k], lexicographic."""
    out = []
    for jumps in combinations(range(1, n + 1), k):
        s, level = [], 0
        for p in range(n + 1):
            if level < k and p == jumps[level]:
                level += 1
            s.append(level)
        out.append(tuple(s))
    return sorted(out)


def monotone_operators(m: int, n: int) -> list[Operator]:
    return list(combinations_with_replacement(range(n + 1), m + 1))


def _as_index(a) -> np.ndarray:
    arr = np.asarray(a, dtype=np.int64)
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# row encoding and joins used by the vectorised enumerations


def row_codes(*mats: np.ndarray) -> list[np.ndarray]:
    """Consistent integer codes for the rows of several equal-width int matrices."""
    mats = [np.asarray(m, dtype=np.int64) for m in mats]
    mats = [m[:, None] if m.ndim == 1 else m for m in mats]
    width = mats[0].shape[1]
    if width == 0:
        return [np.zeros(len(m), dtype=np.int64) for m in mats]
    base = max(int(m.max()) + 1 if m.size else 1 for m in mats)
    if base ** width < 2**62:
        weights = base ** np.arange(width - 1, -1, -1, dtype=np.int64)
        return [m @ weights for m in mats]
    stacked = np.concatenate(mats)
    _, inv = np.unique(stacked, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    out, start = [], 0
    for m in mats:
        out.append(inv[start : start + len(m)].astype(np.int64))
        start += len(m)
    return out


def join_codes(left: np.ndarray, right: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All index pairs ``(l, r)`` with ``left[l] == right[r]``, sorted by ``l`` then ``r``."""
    order = np.argsort(right, kind="stable")
    sorted_right = right[order]
    lo = np.searchsorted(sorted_right, left, "left")
    hi = np.searchsorted(sorted_right, left, "right")
    counts = hi - lo
    total = int(counts.sum())
    li = np.repeat(np.arange(len(left), dtype=np.int64), counts)
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    ri = order[np.repeat(lo, counts) + (np.arange(total) - starts)]
    return li, ri


def lookup_rows(table: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Row index of each query row inside ``table`` (-1 when absent)."""
    tcode, qcode = row_codes(table, queries)
    order = np.argsort(tcode, kind="stable")
    pos = np.searchsorted(tcode[order], qcode)
    pos = np.minimum(pos, len(order) - 1) if len(order) else pos
    out = np.full(len(queries), -1, dtype=np.int64)
    if len(order):
        hit = tcode[order][pos] == qcode
        out[hit] = order[pos[hit]]
    return out


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TruncatedSSet:
    """A simplicial set truncated at level ``N``."""

    N: int
    sizes: tuple[int, ...]
    faces: tuple[tuple[np.ndarray, ...], ...]
    degeneracies: tuple[tuple[np.ndarray, ...], ...]
    keys: tuple[tuple, ...] | None = None

    def __post_init__(self):
        if len(self.sizes) != self.N + 1:
            raise ValueError("need one size per level 0..N")
        if len(self.faces) != self.N + 1 or len(self.degeneracies) != self.N + 1:
            raise ValueError("faces/degeneracies must be given for every level (empty where absent)")
        for n in range(self.N + 1):
            if len(self.faces[n]) != (n + 1 if n else 0):
                raise ValueError(f"level {n} needs {n + 1 if n else 0} face maps")
            if len(self.degeneracies[n]) != (n + 1 if n < self.N else 0):
                raise ValueError(f"level {n} needs {n + 1 if n < self.N else 0} degeneracy maps")
            for arr in self.faces[n]:
                _check_map(arr, self.sizes[n], self.sizes[n - 1])
            for arr in self.degeneracies[n]:
                _check_map(arr, self.sizes[n], self.sizes[n + 1])
        if self.keys is not None and [len(k) for k in self.keys] != list(self.sizes):
            raise ValueError("keys must list one entry per cell")

    @classmethod
    def from_keys(
        cls,
        levels: Sequence[Sequence[Hashable]],
        face: Callable[[int, int, Hashable], Hashable],
        degeneracy: Callable[[int, int, Hashable], Hashable],
        check: bool = True,
    ) -> "TruncatedSSet":
        """Build from per-level key lists and key-level structure maps."""
        N = len(levels) - 1
        index = [{k: i for i, k in enumerate(lv)} for lv in levels]
        faces, degs = [], []
        for n, lv in enumerate(levels):
            faces.append(tuple(_as_index([index[n - 1][face(n, i, k)] for k in lv]) for i in range(n + 1)) if n else ())
            degs.append(
                tuple(_as_index([index[n + 1][degeneracy(n, j, k)] for k in lv]) for j in range(n + 1)) if n < N else ()
            )
        S = cls(N, tuple(len(lv) for lv in levels), tuple(faces), tuple(degs), tuple(tuple(lv) for lv in levels))
        if check:
            S.validate()
        return S

    # -- structure ---------------------------------------------------------

    def face(self, n: int, i: int, x: int) -> int:
        return int(self.faces[n][i][x])

    def degeneracy(self, n: int, j: int, x: int) -> int:
        return int(self.degeneracies[n][j][x])

    def operator_array(self, alpha: Operator, n: int) -> np.ndarray:
        """``alpha^*`` as an array from level ``n`` to level ``len(alpha) - 1``."""
        m = len(alpha) - 1
        if m > self.N or n > self.N:
            raise ValueError("operator leaves the truncation")
        if alpha and max(alpha) > n:
            raise ValueError(f"{alpha} is not an operator into [{n}]")
        surj, inj = image_factorization(alpha)
        arr = np.arange(self.sizes[n], dtype=np.int64)
        level = n
        for i in sorted(set(range(n + 1)) - set(inj), reverse=True):
            arr = self.faces[level][i][arr]
            level -= 1
        for j in range(m):
            if surj[j] == surj[j + 1]:
                arr = self.degeneracies[level][j][arr]
                level += 1
        return arr

    def act(self, alpha: Operator, n: int, x: int) -> int:
        return int(self.operator_array(alpha, n)[x])

    def degenerate_mask(self, n: int) -> np.ndarray:
        if n == 0:
            return np.zeros(self.sizes[0], dtype=bool)
        ar = np.arange(self.sizes[n])
        out = np.zeros(self.sizes[n], dtype=bool)
        for j in range(n):
            out |= self.degeneracies[n - 1][j][self.faces[n][j]] == ar
        return out

    def nondegenerate(self, n: int) -> np.ndarray:
        return np.nonzero(~self.degenerate_mask(n))[0]

    def cell_name(self, n: int, x: int) -> str:
        if self.keys is not None:
            return f"{n}:{self.keys[n][x]}"
        return f"{n}:{x}"

    @cached_property
    def _key_index(self) -> list[dict]:
        if self.keys is None:
            raise ValueError("this simplicial set has no cell keys")
        return [{k: i for i, k in enumerate(lv)} for lv in self.keys]

    def index_of(self, n: int, key: Hashable) -> int:
        return self._key_index[n][key]

    def truncate(self, M: int) -> "TruncatedSSet":
        if M > self.N:
            raise ValueError("cannot raise the truncation level")
        degs = list(self.degeneracies[: M + 1])
        degs[M] = ()
        keys = None if self.keys is None else self.keys[: M + 1]
        return TruncatedSSet(M, self.sizes[: M + 1], self.faces[: M + 1], tuple(degs), keys)

    def validate(self) -> None:
        """Check every simplicial identity that the truncation can see."""
        d, s = self.faces, self.degeneracies
        for n in range(2, self.N + 1):
            for j in range(n + 1):
                for i in range(j):
                    if not np.array_equal(d[n - 1][i][d[n][j]], d[n - 1][j - 1][d[n][i]]):
                        raise ValueError(f"d{i} d{j} != d{j - 1} d{i} at level {n}")
        for n in range(self.N):
            ar = np.arange(self.sizes[n])
            for j in range(n + 1):
                for i in range(n + 2):
                    lhs = d[n + 1][i][s[n][j]]
                    if i < j:
                        rhs = s[n - 1][j - 1][d[n][i]]
                    elif i in (j, j + 1):
                        rhs = ar
                    else:
                        rhs = s[n - 1][j][d[n][i - 1]]
                    if not np.array_equal(lhs, rhs):
                        raise ValueError(f"d{i} s{j} identity fails at level {n}")
            if n + 1 < self.N:
                for j in range(n + 1):
                    for i in range(j + 1):
                        if not np.array_equal(s[n + 1][i][s[n][j]], s[n + 1][j + 1][s[n][i]]):
                            raise ValueError(f"s{i} s{j} != s{j + 1} s{i} at level {n}")


def _check_map(arr, n_src: int, n_tgt: int) -> None:
    arr = np.asarray(arr)
    if arr.shape != (n_src,):
        raise ValueError("structure map has the wrong length")
    if n_src and (arr.min() < 0 or arr.max() >= n_tgt):
        raise ValueError("structure map leaves its target level")


@dataclass(frozen=True, eq=False)
class TruncatedSemiSSet:
    """A semisimplicial set (face maps only) truncated at level ``N``."""

    N: int
    sizes: tuple[int, ...]
    faces: tuple[tuple[np.ndarray, ...], ...]
    keys: tuple[tuple, ...] | None = None

    def __post_init__(self):
        if len(self.sizes) != self.N + 1 or len(self.faces) != self.N + 1:
            raise ValueError("need sizes and faces for every level 0..N")
        for n in range(self.N + 1):
            if len(self.faces[n]) != (n + 1 if n else 0):
                raise ValueError(f"level {n} needs {n + 1 if n else 0} face maps")
            for arr in self.faces[n]:
                _check_map(arr, self.sizes[n], self.sizes[n - 1])
        d = self.faces
        for n in range(2, self.N + 1):
            for j in range(n + 1):
                for i in range(j):
                    if not np.array_equal(d[n - 1][i][d[n][j]], d[n - 1][j - 1][d[n][i]]):
                        raise ValueError(f"d{i} d{j} != d{j - 1} d{i} at level {n}")

    @classmethod
    def from_keys(cls, levels, face) -> "TruncatedSemiSSet":
        index = [{k: i for i, k in enumerate(lv)} for lv in levels]
        faces = [
            tuple(_as_index([index[n - 1][face(n, i, k)] for k in lv]) for i in range(n + 1)) if n else ()
            for n, lv in enumerate(levels)
        ]
        return cls(len(levels) - 1, tuple(len(lv) for lv in levels), tuple(faces), tuple(tuple(lv) for lv in levels))

    def apply_injection(self, inj: Operator, n: int, y: int) -> int:
        """``inj^*`` for an injective operator into [n]."""
        level = n
        for i in sorted(set(range(n + 1)) - set(inj), reverse=True):
            y = int(self.faces[level][i][y])
            level -= 1
        return y


# ---------------------------------------------------------------------------
# standard examples


def _drop(t: tuple, i: int) -> tuple:
    return t[:i] + t[i + 1 :]


def _repeat(t: tuple, j: int) -> tuple:
    return t[: j + 1] + t[j:]


def standard_simplex(n: int, N: int) -> TruncatedSSet:
    """Delta^n truncated at N; the k-simplices are monotone maps [k] -> [n]."""
    levels = [monotone_operators(k, n) for k in range(N + 1)]
    return TruncatedSSet.from_keys(levels, lambda k, i, t: _drop(t, i), lambda k, j, t: _repeat(t, j))


def boundary_simplex(n: int, N: int) -> TruncatedSSet:
    """The boundary of Delta^n truncated at N: the non-surjective maps [k] -> [n]."""
    full = set(range(n + 1))
    levels = [[t for t in monotone_operators(k, n) if set(t) != full] for k in range(N + 1)]
    return TruncatedSSet.from_keys(levels, lambda k, i, t: _drop(t, i), lambda k, j, t: _repeat(t, j))


def semi_simplex(n: int, N: int | None = None) -> TruncatedSemiSSet:
    """Delta^n_+ : strictly increasing maps [k] -> [n]."""
    N = n if N is None else N
    levels = [list(combinations(range(n + 1), k + 1)) for k in range(N + 1)]
    return TruncatedSemiSSet.from_keys(levels, lambda k, i, t: _drop(t, i))


def semi_boundary(n: int, N: int | None = None) -> TruncatedSemiSSet:
    N = n if N is None else N
    levels = [[t for t in combinations(range(n + 1), k + 1) if k < n] for k in range(N + 1)]
    return TruncatedSemiSSet.from_keys(levels, lambda k, i, t: _drop(t, i))


def simplicial_envelope(G: TruncatedSemiSSet, N: int) -> TruncatedSSet:
    """Left Kan extension of G along Delta_+ in Delta, truncated at N.

    The n-simplices are triples ``(k, y, s)`` with ``y`` a k-simplex of G and
    ``s`` a surjection [n] -> [k].
    """
    levels = [
        [(k, y, s) for k in range(min(n, G.N) + 1) for y in range(G.sizes[k]) for s in surjections(n, k)]
        for n in range(N + 1)
    ]

    def face(n, i, key):
        k, y, s = key
        surj, inj = image_factorization(compose(s, face_operator(n, i)))
        return (len(inj) - 1, G.apply_injection(inj, k, y), surj)

    def degeneracy(n, j, key):
        k, y, s = key
        return (k, y, compose(s, degeneracy_operator(n, j)))

    return TruncatedSSet.from_keys(levels, face, degeneracy)


# ---------------------------------------------------------------------------
# Eilenberg-Zilber and boundary configurations


class EZ(NamedTuple):
    level: int
    core: int
    surjection: Operator


def ez_decompose(S: TruncatedSSet, n: int, x: int) -> EZ:
    """Unique ``(core, surjection)`` with ``core`` nondegenerate and ``x = surjection^* core``."""
    memo: dict[tuple[int, int], EZ] = {}

    def rec(n: int, x: int) -> EZ:
        if (n, x) in memo:
            return memo[(n, x)]
        results = set()
        for j in range(n):
            if S.degeneracies[n - 1][j][S.faces[n][j][x]] == x:
                y = int(S.faces[n][j][x])
                lv, core, s = rec(n - 1, y)
                results.add(EZ(lv, core, compose(s, degeneracy_operator(n - 1, j))))
        if not results:
            out = EZ(n, x, tuple(range(n + 1)))
        elif len(results) > 1:
            raise ValueError(f"simplex {n}:{x} has several Eilenberg-Zilber decompositions; simplicial identities fail")
        else:
            out = results.pop()
        memo[(n, x)] = out
        return out

    out = rec(n, x)
    if S.act(out.surjection, out.level, out.core) != x:
        raise ValueError(f"decomposition of {n}:{x} does not reproduce it; simplicial identities fail")
    return out


def boundary_tuples(S, n: int) -> np.ndarray:
    """Compatible tuples ``(x_0, ..., x_n)`` of (n-1)-simplices: d_i x_j = d_{j-1} x_i for i < j.

    These are the maps from the boundary of Delta^n into ``S``; returned as an
    int array of shape ``(count, n + 1)`` in lexicographic order.
    """
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    if n > S.N + 1:
        raise ValueError("boundary dimension exceeds the truncation")
    c = S.sizes[n - 1]
    if n == 1:
        a = np.arange(c, dtype=np.int64)
        return np.stack([np.repeat(a, c), np.tile(a, c)], axis=1)
    d = S.faces[n - 1]
    tuples = np.arange(c, dtype=np.int64)[:, None]
    cells = np.arange(c, dtype=np.int64)
    for j in range(1, n + 1):
        req = np.stack([d[j - 1][tuples[:, i]] for i in range(j)], axis=1)
        cand = np.stack([d[i][cells] for i in range(j)], axis=1)
        rc, cc = row_codes(req, cand)
        li, ri = join_codes(rc, cc)
        tuples = np.concatenate([tuples[li], ri[:, None]], axis=1)
    return tuples


def face_tuples(S: TruncatedSSet, n: int) -> np.ndarray:
    """``(d_0 x, ..., d_n x)`` for every n-simplex x."""
    if n == 0:
        return np.zeros((S.sizes[0], 0), dtype=np.int64)
    return np.stack(S.faces[n], axis=1)


def simplicial_maps(K: TruncatedSSet, S: TruncatedSSet) -> Iterator[list[np.ndarray]]:
    """Every levelwise map K -> S commuting with faces and degeneracies (brute force)."""
    if K.N != S.N:
        raise ValueError("truncation levels differ")
    N = K.N
    cells = [(n, x) for n in range(N + 1) for x in range(K.sizes[n])]
    faces_S = [face_tuples(S, n) for n in range(N + 1)]
    by_faces = [{} for _ in range(N + 1)]
    for n in range(1, N + 1):
        for y, row in enumerate(map(tuple, faces_S[n])):
            by_faces[n].setdefault(row, []).append(y)
    deg_from = {}
    for n in range(N):
        for j in range(n + 1):
            for z in range(K.sizes[n]):
                deg_from.setdefault((n + 1, int(K.degeneracies[n][j][z])), []).append((j, z))
    g = [np.full(K.sizes[n], -1, dtype=np.int64) for n in range(N + 1)]

    def candidates(n, x):
        if n == 0:
            cand = list(range(S.sizes[0]))
        else:
            key = tuple(int(g[n - 1][K.faces[n][i][x]]) for i in range(n + 1))
            cand = by_faces[n].get(key, [])
        for j, z in deg_from.get((n, x), []):
            forced = int(S.degeneracies[n - 1][j][g[n - 1][z]])
            cand = [y for y in cand if y == forced]
        return cand

    def rec(k):
        if k == len(cells):
            yield [a.copy() for a in g]
            return
        n, x = cells[k]
        for y in candidates(n, x):
            g[n][x] = y
            yield from rec(k + 1)
        g[n][x] = -1

    yield from rec(0)


def simplex_category_h0(S: TruncatedSSet) -> FinitePreorder:
    """The preorder underlying the category of simplices: x <= alpha^* x."""
    names = [S.cell_name(n, x) for n in range(S.N + 1) for x in range(S.sizes[n])]
    rel = []
    for n in range(S.N + 1):
        for x in range(S.sizes[n]):
            for i in range(n + 1 if n else 0):
                rel.append((S.cell_name(n, x), S.cell_name(n - 1, S.face(n, i, x))))
            for j in range(n + 1 if n < S.N else 0):
                rel.append((S.cell_name(n, x), S.cell_name(n + 1, S.degeneracy(n, j, x))))
    return FinitePreorder.from_relations(names, rel)


# ---------------------------------------------------------------------------
# subset posets


def subset_id(T) -> str:
    return "{" + ",".join(str(v) for v in sorted(T)) + "}"


@dataclass(frozen=True)
class SubsetPosetModel:
    """Inhabited subsets of {0..n} under reverse inclusion (the full set is the minimum)."""

    n: int
    subsets: tuple[frozenset, ...]
    poset: FinitePoset
    facets: tuple[str, ...]

    def id_of(self, T) -> str:
        return subset_id(T)


def _subset_model(n: int, proper: bool) -> SubsetPosetModel:
    full = frozenset(range(n + 1))
    subsets = [
        frozenset(c) for k in range(n + 1, 0, -1) for c in combinations(range(n + 1), k)
        if not (proper and frozenset(c) == full)
    ]
    ids = tuple(subset_id(T) for T in subsets)
    leq = frozenset((subset_id(A), subset_id(B)) for A in subsets for B in subsets if A >= B)
    facets = tuple(subset_id(T) for T in subsets if len(T) == n) if proper else ()
    return SubsetPosetModel(n, tuple(subsets), FinitePoset(ids, leq), facets)


def simplex_subposet(n: int) -> SubsetPosetModel:
    if n < 0:
        raise ValueError("n must be >= 0")
    return _subset_model(n, proper=False)


def boundary_subposet(n: int) -> SubsetPosetModel:
    """Inhabited proper subsets of {0..n}; ``facets`` flags the n-element ones."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return _subset_model(n, proper=True)


def cone_over_boundary(n: int) -> FinitePoset:
    """left_cone(boundary_subposet(n)) with the apex renamed to the full subset."""
    return left_cone(boundary_subposet(n).poset, apex=subset_id(range(n + 1)))
