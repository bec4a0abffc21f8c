"""Exact integer elementary divisors for boundary matrices."""
from __future__ import annotations

from typing import Iterable, Mapping


def smith_diagonal(A: list[list[int]]) -> list[int]:
    """Nonzero diagonal entries of the Smith normal form of a dense integer matrix."""
    A = [list(map(int, row)) for row in A]
    m = len(A)
    n = len(A[0]) if m else 0
    diag: list[int] = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        _move(A, t, *best)
        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // p
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                    dirty |= A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // p
                    for i in range(m):
                        A[i][j] -= q * A[i][t]
                    dirty |= A[t][j] != 0
            if dirty:
                cands = [(i, t) for i in range(t + 1, m) if A[i][t]] + [(t, j) for j in range(t + 1, n) if A[t][j]]
                i, j = min(cands, key=lambda ij: abs(A[ij[0]][ij[1]]))
                _move(A, t, i, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is None:
                break
            A[t] = [a + b for a, b in zip(A[t], A[bad[0]])]
        diag.append(abs(A[t][t]))
        t += 1
    return diag


def _move(A, t, i, j):
    A[t], A[i] = A[i], A[t]
    for row in A:
        row[t], row[j] = row[j], row[t]


def _subtract(c: dict, f: int, p: Mapping[int, int]) -> None:
    for r, v in p.items():
        nv = c.get(r, 0) - f * v
        if nv:
            c[r] = nv
        else:
            c.pop(r, None)


def elementary_divisors(columns: Iterable[Mapping[int, int]], rank_bound: int | None = None) -> list[int]:
    """Elementary divisors of the lattice spanned by sparse integer columns.

    Columns are reduced against unit pivots (keyed by their largest row). If
    ``rank_bound`` unit pivots are found the spanned lattice is a saturated
    summand of that rank and the scan stops early; ``rank_bound`` must be an
    upper bound on the rank. Columns left with a non-unit leading entry are
    projected off the pivot rows and finished with a dense Smith form.
    """
    pivots: dict[int, dict[int, int]] = {}
    hard: list[dict[int, int]] = []
    for col in columns:
        c = {r: v for r, v in col.items() if v}
        while c:
            low = max(c)
            p = pivots.get(low)
            if p is None:
                break
            _subtract(c, c[low] * p[low], p)
        if not c:
            continue
        low = max(c)
        if abs(c[low]) == 1:
            pivots[low] = c
            if rank_bound is not None and not hard and len(pivots) >= rank_bound:
                break
        else:
            hard.append(c)
    if not hard:
        return [1] * len(pivots)
    residual = []
    for c in hard:
        while True:
            prow = [r for r in c if r in pivots]
            if not prow:
                break
            r = max(prow)
            _subtract(c, c[r] * pivots[r][r], pivots[r])
        if c:
            residual.append(c)
    rows = sorted({r for c in residual for r in c})
    dense = [[c.get(r, 0) for c in residual] for r in rows]
    return [1] * len(pivots) + smith_diagonal(dense)
