"""Persistent homology over Z/2 of filtered complexes, plus diagram metrics.

Two independent computation routes are kept deliberately separate: the
standard column reduction of the boundary matrix (:func:`compute_diagram`)
and plain Gaussian-elimination Betti numbers of strict sublevel complexes
(:func:`betti_at`), used as the oracle for the former.  Sublevels follow
the open convention: a simplex with value b is present at scale r iff
b < r, so an interval born at b is populated only for r > b.

Diagrams are undecorated (birth, death) multisets; with the open
convention the decorations would differ from the closed one, and nothing
downstream needs them.  Coefficients are Z/2 only; swapping the field
would only touch the two elimination routines.

A filtration over a finite space is locally finite, so the weight-vector
topology of its realization and the Wasserstein topology on the same
underlying set of measures agree; the diagram computed here is declared
the diagram of both pictures, and instead of a (nonexistent) second
computation path the suite checks functoriality of the sublevel inclusion
maps across nested thresholds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np

from .complexes import FilteredComplex, Simplex

INF = math.inf


class SkeletonTooShallow(ValueError):
    """The complex's dimension cap cannot support the requested homology."""


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of (dimension, birth, death) intervals, canonically sorted."""

    intervals: tuple[tuple[int, float, float], ...]

    @staticmethod
    def of(items: Iterable[tuple[int, float, float]]) -> "PersistenceDiagram":
        norm = []
        for dim, b, d in items:
            if d < b:
                raise ValueError(f"death {d} before birth {b}")
            if dim < 0:
                raise ValueError("dimension must be nonnegative")
            norm.append((int(dim), float(b), float(d)))
        return PersistenceDiagram(tuple(sorted(norm)))

    def in_dim(self, dim: int) -> list[tuple[float, float]]:
        return [(b, d) for q, b, d in self.intervals if q == dim]

    def to_csv(self) -> str:
        lines = ["dim,birth,death"]
        for dim, b, d in self.intervals:
            death = "inf" if math.isinf(d) else repr(d)
            lines.append(f"{dim},{b!r},{death}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class BoundaryMatrix:
    """Z/2 boundary matrix in filtration order (value, then dim, then lex).

    Column j holds the row indices of the codimension-1 faces of the j-th
    simplex.  The ordering ties are broken lexicographically so reduction
    is deterministic.
    """

    simplices: tuple[Simplex, ...]
    values: tuple[float, ...]
    columns: tuple[frozenset[int], ...]

    @staticmethod
    def from_complex(K: FilteredComplex, max_dim: int) -> "BoundaryMatrix":
        items = [(s, v) for s, v in K.in_filtration_order() if len(s) <= max_dim + 2]
        index = {s: i for i, (s, _) in enumerate(items)}
        cols = []
        for s, _ in items:
            if len(s) == 1:
                cols.append(frozenset())
            else:
                cols.append(frozenset(index[f] for f in combinations(s, len(s) - 1)))
        return BoundaryMatrix(tuple(s for s, _ in items),
                              tuple(v for _, v in items),
                              tuple(cols))


def compute_diagram(K: FilteredComplex, max_dim: int) -> PersistenceDiagram:
    """Persistence diagram of the filtration, dimensions 0 through max_dim.

    Standard left-to-right column reduction: a column that reduces to zero
    creates a class at its simplex's value; a surviving column destroys the
    class created by its pivot row.  Zero-length intervals are discarded,
    unpaired creators die at +inf.
    """
    if max_dim < 0:
        raise ValueError("max_dim must be nonnegative")
    if K.k_max < max_dim + 1:
        raise SkeletonTooShallow(
            f"need the {max_dim + 1}-skeleton, complex capped at {K.k_max}")
    bm = BoundaryMatrix.from_complex(K, max_dim)
    n = len(bm.simplices)
    cols: list[set[int]] = [set(c) for c in bm.columns]
    pivot_owner: dict[int, int] = {}
    for j in range(n):
        col = cols[j]
        while col:
            low = max(col)
            owner = pivot_owner.get(low)
            if owner is None:
                pivot_owner[low] = j
                break
            col ^= cols[owner]
    destroyed = set(pivot_owner)
    intervals = []
    for low, j in pivot_owner.items():
        dim = len(bm.simplices[low]) - 1
        if dim > max_dim:
            continue
        birth, death = bm.values[low], bm.values[j]
        if birth != death:
            intervals.append((dim, birth, death))
    for i in range(n):
        if cols[i] or i in destroyed:
            continue
        dim = len(bm.simplices[i]) - 1
        if dim <= max_dim:
            intervals.append((dim, bm.values[i], INF))
    return PersistenceDiagram.of(intervals)


def _gf2_rank(rows: np.ndarray) -> int:
    """Rank over Z/2 by in-place elimination of a dense 0/1 matrix."""
    A = rows.copy().astype(np.uint8)
    m, n = A.shape
    rank = 0
    for col in range(n):
        pivot = None
        for r in range(rank, m):
            if A[r, col]:
                pivot = r
                break
        if pivot is None:
            continue
        A[[rank, pivot]] = A[[pivot, rank]]
        for r in range(m):
            if r != rank and A[r, col]:
                A[r] ^= A[rank]
        rank += 1
        if rank == m:
            break
    return rank


def betti_at(K: FilteredComplex, r: float, dim: int) -> int:
    """Betti number of the strict sublevel complex {s : value(s) < r}.

    Independent of the reduction path: builds the two boundary matrices of
    the sublevel complex and ranks them by Gaussian elimination, so it can
    serve as an oracle for :func:`compute_diagram`.
    """
    if dim < 0:
        raise ValueError("dim must be nonnegative")
    if K.k_max < dim + 1:
        raise SkeletonTooShallow(
            f"need the {dim + 1}-skeleton, complex capped at {K.k_max}")
    present = [s for s, _ in K.sublevel(r)]
    layer = sorted(s for s in present if len(s) == dim + 1)
    below = sorted(s for s in present if len(s) == dim)
    above = sorted(s for s in present if len(s) == dim + 2)
    if not layer:
        return 0

    def boundary(upper: list[Simplex], lower: list[Simplex]) -> np.ndarray:
        idx = {s: i for i, s in enumerate(lower)}
        M = np.zeros((len(lower), len(upper)), dtype=np.uint8)
        for j, s in enumerate(upper):
            for f in combinations(s, len(s) - 1):
                M[idx[f], j] = 1
        return M

    rank_down = _gf2_rank(boundary(layer, below)) if dim > 0 else 0
    rank_up = _gf2_rank(boundary(above, layer)) if above else 0
    return len(layer) - rank_down - rank_up


# -- bottleneck distance ------------------------------------------------


def _bipartite_max_matching(n_left: int, n_right: int,
                            adj: list[list[int]]) -> int:
    match_r = [-1] * n_right

    def augment(u: int, seen: list[bool]) -> bool:
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                if match_r[v] == -1 or augment(match_r[v], seen):
                    match_r[v] = u
                    return True
        return False

    size = 0
    for u in range(n_left):
        if augment(u, [False] * n_right):
            size += 1
    return size


def _finite_bottleneck(A: list[tuple[float, float]],
                       B: list[tuple[float, float]]) -> float:
    if not A and not B:
        return 0.0

    def pair_cost(a, b):
        return max(abs(a[0] - b[0]), abs(a[1] - b[1]))

    def diag_cost(a):
        return (a[1] - a[0]) / 2.0

    candidates = {0.0}
    candidates.update(pair_cost(a, b) for a in A for b in B)
    candidates.update(diag_cost(a) for a in A)
    candidates.update(diag_cost(b) for b in B)
    thresholds = sorted(candidates)
    nA, nB = len(A), len(B)
    size = nA + nB

    def feasible(theta: float) -> bool:
        # left: A points then diagonal slots for B; right: B points then
        # diagonal slots for A; diagonal slots pair with each other freely
        adj: list[list[int]] = []
        for i, a in enumerate(A):
            row = [j for j, b in enumerate(B) if pair_cost(a, b) <= theta]
            if diag_cost(a) <= theta:
                row.append(nB + i)
            adj.append(row)
        for j, b in enumerate(B):
            row = list(range(nB, nB + nA))
            if diag_cost(b) <= theta:
                row.append(j)
            adj.append(row)
        return _bipartite_max_matching(size, size, adj) == size

    lo, hi = 0, len(thresholds) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(thresholds[mid]):
            hi = mid
        else:
            lo = mid + 1
    return thresholds[lo]


def diagram_distance(D1: PersistenceDiagram, D2: PersistenceDiagram) -> float:
    """Exact bottleneck distance via bipartite matching with diagonal slots.

    Essential classes (death +inf) must match each other within a
    dimension; mismatched counts give +inf, matched ones contribute their
    sorted birth differences.  Finite parts binary-search the smallest
    feasible threshold among the candidate costs.
    """
    dims = {q for q, _, _ in D1.intervals} | {q for q, _, _ in D2.intervals}
    best = 0.0
    for q in sorted(dims):
        a_fin = [(b, d) for b, d in D1.in_dim(q) if not math.isinf(d)]
        b_fin = [(b, d) for b, d in D2.in_dim(q) if not math.isinf(d)]
        a_inf = sorted(b for b, d in D1.in_dim(q) if math.isinf(d))
        b_inf = sorted(b for b, d in D2.in_dim(q) if math.isinf(d))
        if len(a_inf) != len(b_inf):
            return INF
        if a_inf:
            best = max(best, max(abs(x - y) for x, y in zip(a_inf, b_inf)))
        best = max(best, _finite_bottleneck(a_fin, b_fin))
    return best
