"""Filtered simplicial complexes: open Vietoris-Rips, intrinsic Cech, Vietoris.

Simplices are stored as sorted vertex-index tuples with an entry threshold
(the value at which the simplex first appears).  The open convention is
enforced at query time: a simplex is present at scale r iff its value is
strictly below r, so one built complex serves all thresholds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from .metric import Cover, CoverKind, FiniteMetricSpace, UnboundedCover
from .measures import FiniteMeasure

Simplex = tuple[int, ...]


@dataclass(frozen=True)
class FilteredComplex:
    """Abstract simplicial complex with per-simplex filtration values.

    Invariants: closed under faces, face values never exceed coface values,
    simplices canonically sorted.  ``k_max`` is the dimension cap the
    builder honored; persistence in dimension d needs ``k_max >= d + 1``.
    """

    simplices: dict[Simplex, float]
    k_max: int
    space: FiniteMetricSpace | None = field(default=None, compare=False)

    def __len__(self) -> int:
        return len(self.simplices)

    def vertices(self) -> list[int]:
        return sorted(s[0] for s in self.simplices if len(s) == 1)

    def simplices_of_dim(self, d: int) -> list[Simplex]:
        return sorted(s for s in self.simplices if len(s) == d + 1)

    def value_of(self, S: Iterable[int]) -> float:
        return self.simplices[tuple(sorted(set(S)))]

    def is_simplex(self, S: Iterable[int]) -> bool:
        """Membership test; the empty set counts as a simplex by convention."""
        key = tuple(sorted(set(S)))
        if not key:
            return True
        return key in self.simplices

    def sublevel(self, r: float) -> list[tuple[Simplex, float]]:
        """Simplices with value strictly below r, in filtration order."""
        items = [(s, v) for s, v in self.simplices.items() if v < r]
        items.sort(key=lambda sv: (sv[1], len(sv[0]), sv[0]))
        return items

    def in_filtration_order(self) -> list[tuple[Simplex, float]]:
        items = list(self.simplices.items())
        items.sort(key=lambda sv: (sv[1], len(sv[0]), sv[0]))
        return items

    def check_face_closure(self) -> None:
        for s, v in self.simplices.items():
            if len(s) == 1:
                continue
            for face in combinations(s, len(s) - 1):
                if face not in self.simplices:
                    raise ValueError(f"face {face} of {s} missing")
                if self.simplices[face] > v:
                    raise ValueError(f"face {face} enters after coface {s}")

    def export_text(self) -> str:
        """One simplex per line: 'v0 v1 ... vk ; value'."""
        lines = []
        for s, v in self.in_filtration_order():
            lines.append(" ".join(str(i) for i in s) + f" ; {v!r}")
        return "\n".join(lines) + ("\n" if lines else "")


def is_simplex(K: FilteredComplex, S: Iterable[int]) -> bool:
    return K.is_simplex(S)


def build_vr(space: FiniteMetricSpace, r: float, k_max: int) -> FilteredComplex:
    """Open Vietoris-Rips complex: subsets with diameter strictly below r.

    Filtration value of a simplex is its diameter (0 for vertices).  The
    complex is the clique complex of its 1-skeleton, so higher simplices
    come from lower-neighbor expansion of the graph.  Returns the empty
    complex for r <= 0.
    """
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    simps: dict[Simplex, float] = {}
    if r <= 0.0:
        return FilteredComplex(simps, k_max, space)
    n = space.n_points
    for i in range(n):
        simps[(i,)] = 0.0
    lower: dict[int, list[int]] = {i: [] for i in range(n)}  # neighbors below i
    if k_max >= 1:
        for i in range(n):
            for j in range(i + 1, n):
                d = space.d(i, j)
                if d < r:
                    simps[(i, j)] = d
                    lower[j].append(i)
    frontier = [s for s in simps if len(s) == 2]
    for _ in range(2, k_max + 1):
        nxt: list[Simplex] = []
        for s in frontier:
            common = set(lower[s[0]])
            for v in s[1:]:
                common &= set(lower[v])
            for u in sorted(common):
                ext = (u,) + s
                val = max(simps[s], max(space.d(u, v) for v in s))
                simps[ext] = val
                nxt.append(ext)
        frontier = nxt
    return FilteredComplex(simps, k_max, space)


def build_cech(space: FiniteMetricSpace, r: float, k_max: int) -> FilteredComplex:
    """Intrinsic Cech complex: the witness z ranges over the space itself.

    A subset enters at the min over witnesses z in X of max_{x} d(z, x); it
    is present at scale r iff that value is strictly below r.  Candidate
    simplices are cliques of the 1-skeleton (witness values are monotone
    under inclusion, so every face of a kept simplex was already kept).
    """
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    simps: dict[Simplex, float] = {}
    if r <= 0.0:
        return FilteredComplex(simps, k_max, space)
    n = space.n_points
    pts = range(n)

    def witness_value(sub: Simplex) -> float:
        return min(max(space.d(z, x) for x in sub) for z in pts)

    for i in pts:
        simps[(i,)] = 0.0
    lower: dict[int, list[int]] = {i: [] for i in pts}
    if k_max >= 1:
        for i in pts:
            for j in range(i + 1, n):
                v = witness_value((i, j))
                if v < r:
                    simps[(i, j)] = v
                    lower[j].append(i)
    frontier = [s for s in simps if len(s) == 2]
    for _ in range(2, k_max + 1):
        nxt: list[Simplex] = []
        for s in frontier:
            common = set(lower[s[0]])
            for v in s[1:]:
                common &= set(lower[v])
            for u in sorted(common):
                ext = (u,) + s
                val = witness_value(ext)
                if val < r:
                    simps[ext] = val
                    nxt.append(ext)
        frontier = nxt
    return FilteredComplex(simps, k_max, space)


def build_vietoris(space: FiniteMetricSpace, cov: Cover, k_max: int) -> FilteredComplex:
    """Vietoris complex of a cover: simplices are subsets of some element.

    Unfiltered (every simplex at value 0).  Requires a cover whose elements
    can be listed; diameter covers are implicit and are exactly the
    Vietoris-Rips construction, so use :func:`build_vr` for those.
    """
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    if cov.kind is CoverKind.DIAMETER:
        raise ValueError("diameter covers are implicit; build_vr is their Vietoris complex")
    bound = cov.diameter_bound()
    if not (bound < float("inf")):
        raise UnboundedCover("cover reports no finite diameter bound")
    simps: dict[Simplex, float] = {}
    for _, elem in cov.enumerable_elements():
        members = sorted(elem)
        for size in range(1, min(k_max + 1, len(members)) + 1):
            for sub in combinations(members, size):
                simps[sub] = 0.0
    return FilteredComplex(simps, k_max, space)


@dataclass(frozen=True)
class RealizationPoint:
    """A point of the geometric realization: a measure carried by one simplex."""

    complex: FilteredComplex
    measure: FiniteMeasure

    def __post_init__(self):
        if not self.complex.is_simplex(self.measure.support):
            raise ValueError("measure support is not a simplex of the complex")
