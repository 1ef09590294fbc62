"""Finite metric spaces, covers of them, and cover-level predicates.

A :class:`FiniteMetricSpace` is a validated distance matrix over an indexed
point set, optionally carrying Euclidean coordinates.  A :class:`Cover` is a
family of subsets of the point set, given either implicitly (all sets of
diameter below a threshold, or all open balls of a fixed radius) or as an
explicit list of index subsets.  Implicit covers are never enumerated; they
exist only through the membership predicate :func:`cover_elements_containing`.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

# Relative slack for the triangle-inequality check only.  Euclidean inputs
# legitimately round one ulp past equality (e.g. collinear grid points), so
# exact comparison would reject valid point clouds.  Strict open-convention
# comparisons elsewhere remain exact.
TRIANGLE_TOL = 1e-12


class MetricValidationError(ValueError):
    """Base class for distance-matrix axiom violations."""


class NonSquare(MetricValidationError):
    def __init__(self, rows: int, cols: int):
        super().__init__(f"distance matrix must be square, got {rows}x{cols}")


class NonSymmetric(MetricValidationError):
    def __init__(self, i: int, j: int):
        self.i, self.j = i, j
        super().__init__(f"dist[{i}][{j}] != dist[{j}][{i}]")


class NegativeDistance(MetricValidationError):
    def __init__(self, i: int, j: int):
        self.i, self.j = i, j
        super().__init__(f"dist[{i}][{j}] < 0")


class NonzeroDiagonal(MetricValidationError):
    def __init__(self, i: int):
        self.i = i
        super().__init__(f"dist[{i}][{i}] != 0")


class TriangleViolation(MetricValidationError):
    """d(i, j) > d(i, k) + d(k, j): the pair (i, j) fails via waypoint k."""

    def __init__(self, i: int, j: int, k: int):
        self.i, self.j, self.k = i, j, k
        super().__init__(f"d({i},{j}) > d({i},{k}) + d({k},{j})")


class EmptySet(ValueError):
    """A cover membership query needs a nonempty vertex set."""


class UnboundedCover(ValueError):
    """Cover cannot report a finite bound on element diameters."""


@dataclass(frozen=True)
class FiniteMetricSpace:
    """A finite (pseudo)metric space given by a validated distance matrix.

    ``coords`` is optional (n, d) Euclidean coordinates when the space came
    from a point cloud.  ``is_pseudometric`` flags coincident points
    (distance zero off the diagonal); they are accepted because real data
    sets contain duplicates and no downstream algorithm is affected.
    """

    dist: np.ndarray
    coords: np.ndarray | None = None
    is_pseudometric: bool = field(default=False, compare=False)

    @property
    def n_points(self) -> int:
        return self.dist.shape[0]

    def d(self, i: int, j: int) -> float:
        return float(self.dist[i, j])

    def points(self) -> range:
        return range(self.n_points)

    def diam_of(self, indices: Iterable[int]) -> float:
        """Diameter of a subset: max pairwise distance, 0 for singletons."""
        idx = list(indices)
        if not idx:
            return 0.0
        sub = self.dist[np.ix_(idx, idx)]
        return float(sub.max())

    def set_distance(self, a: Iterable[int], b: Iterable[int]) -> float:
        """min d(x, y) over x in a, y in b; +inf if either side is empty."""
        ia, ib = list(a), list(b)
        if not ia or not ib:
            return math.inf
        return float(self.dist[np.ix_(ia, ib)].min())


def validate_metric(dist: Sequence[Sequence[float]] | np.ndarray,
                    coords: np.ndarray | None = None) -> FiniteMetricSpace:
    """Validate a square matrix as a (pseudo)metric and wrap it.

    Checks, in order: squareness, zero diagonal, symmetry, nonnegativity,
    triangle inequality.  Raises the structured error for the first
    violation found (row-major scan).  Coincident points are accepted and
    flagged via ``is_pseudometric``.
    """
    m = np.asarray(dist, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        rows = m.shape[0] if m.ndim >= 1 else 0
        cols = m.shape[1] if m.ndim >= 2 else 0
        raise NonSquare(rows, cols)
    n = m.shape[0]
    for i in range(n):
        if m[i, i] != 0.0:
            raise NonzeroDiagonal(i)
    for i in range(n):
        for j in range(i + 1, n):
            if m[i, j] != m[j, i]:
                raise NonSymmetric(i, j)
            if m[i, j] < 0.0:
                raise NegativeDistance(i, j)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            tol = TRIANGLE_TOL * max(1.0, float(m[i, j]))
            for k in range(n):
                if k == i or k == j:
                    continue
                if m[i, j] > m[i, k] + m[k, j] + tol:
                    raise TriangleViolation(i, j, k)
    pseudo = any(m[i, j] == 0.0 for i in range(n) for j in range(i + 1, n))
    return FiniteMetricSpace(dist=m, coords=coords, is_pseudometric=pseudo)


def space_from_points(coords: Sequence[Sequence[float]] | np.ndarray) -> FiniteMetricSpace:
    """Euclidean metric space from an (n, d) coordinate array."""
    pts = np.asarray(coords, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=-1))
    dist = (dist + dist.T) / 2.0
    np.fill_diagonal(dist, 0.0)
    return validate_metric(dist, coords=pts)


def distance_to_complement(space: FiniteMetricSpace, U: Iterable[int], x: int) -> float:
    """min over y outside U of d(x, y); +inf when U is the whole space.

    The +inf convention matches d(., emptyset) = inf.  Returns 0 whenever
    x itself lies outside U.
    """
    inside = set(U)
    if not inside:
        raise EmptySet("U must be nonempty")
    outside = [y for y in space.points() if y not in inside]
    if not outside:
        return math.inf
    return float(min(space.d(x, y) for y in outside))


class CoverKind(Enum):
    DIAMETER = "diameter"
    BALL = "ball"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class Cover:
    """A cover of a finite metric space.

    * ``DIAMETER``: all subsets of diameter strictly below ``radius``
      (implicit; membership tested, never enumerated).
    * ``BALL``: the open balls ``{x : d(z, x) < radius}`` centered at every
      point z; element ids are the center indices.
    * ``EXPLICIT``: a listed family of index subsets; element ids are list
      positions.
    """

    space: FiniteMetricSpace
    kind: CoverKind
    radius: float | None = None
    element_sets: tuple[frozenset[int], ...] | None = None

    # -- constructors -------------------------------------------------

    @staticmethod
    def by_diameter(space: FiniteMetricSpace, r: float) -> "Cover":
        if not (r > 0.0):
            raise ValueError("diameter cover needs r > 0 to cover every point")
        if math.isinf(r):
            raise UnboundedCover("r must be finite")
        return Cover(space, CoverKind.DIAMETER, radius=float(r))

    @staticmethod
    def by_balls(space: FiniteMetricSpace, r: float) -> "Cover":
        if not (r > 0.0):
            raise ValueError("ball cover needs r > 0 to cover every point")
        if math.isinf(r):
            raise UnboundedCover("r must be finite")
        return Cover(space, CoverKind.BALL, radius=float(r))

    @staticmethod
    def explicit(space: FiniteMetricSpace, elements: Iterable[Iterable[int]]) -> "Cover":
        sets = tuple(frozenset(int(i) for i in e) for e in elements)
        if not sets:
            raise ValueError("explicit cover needs at least one element")
        covered: set[int] = set()
        for e in sets:
            if not e:
                raise EmptySet("cover elements must be nonempty")
            for i in e:
                if not (0 <= i < space.n_points):
                    raise IndexError(f"cover element index {i} out of range")
            covered |= e
        missing = set(space.points()) - covered
        if missing:
            raise ValueError(f"points not covered: {sorted(missing)}")
        return Cover(space, CoverKind.EXPLICIT, element_sets=sets)

    # -- queries -------------------------------------------------------

    def diameter_bound(self) -> float:
        """Supremum of element diameters (exact on a finite space)."""
        if self.kind is CoverKind.DIAMETER:
            below = [self.space.d(i, j)
                     for i, j in combinations(self.space.points(), 2)
                     if self.space.d(i, j) < self.radius]
            return max(below, default=0.0)
        if self.kind is CoverKind.BALL:
            return max(self.space.diam_of(self.resolve(z)) for z in self.space.points())
        return max(self.space.diam_of(e) for e in self.element_sets)

    def resolve(self, element_id) -> frozenset[int]:
        """Point set of a cover element named by its identifier."""
        if self.kind is CoverKind.EXPLICIT:
            return self.element_sets[element_id]
        if self.kind is CoverKind.BALL:
            z = int(element_id)
            return frozenset(x for x in self.space.points() if self.space.d(z, x) < self.radius)
        # diameter covers: the synthetic witness is the queried set itself
        return frozenset(element_id)

    def enumerable_elements(self) -> list[tuple[object, frozenset[int]]]:
        """(id, point set) pairs, for cover kinds with listable elements."""
        if self.kind is CoverKind.EXPLICIT:
            return [(i, e) for i, e in enumerate(self.element_sets)]
        if self.kind is CoverKind.BALL:
            return [(z, self.resolve(z)) for z in self.space.points()]
        raise ValueError("diameter covers are implicit and cannot be enumerated")

    def elements_containing(self, S: Iterable[int]) -> list:
        """Identifiers of all elements containing the set S.

        Strict comparisons throughout (open convention): a set of diameter
        exactly r is not inside any diameter-cover element, and a witness at
        distance exactly r does not certify ball membership.
        """
        s = sorted(set(int(i) for i in S))
        if not s:
            raise EmptySet("membership query needs a nonempty set")
        for i in s:
            if not (0 <= i < self.space.n_points):
                raise IndexError(f"point index {i} out of range")
        if self.kind is CoverKind.DIAMETER:
            if self.space.diam_of(s) < self.radius:
                return [tuple(s)]
            return []
        if self.kind is CoverKind.BALL:
            out = []
            for z in self.space.points():
                if max(self.space.d(z, x) for x in s) < self.radius:
                    out.append(z)
            return out
        return [i for i, e in enumerate(self.element_sets) if set(s) <= e]


def cover_elements_containing(cov: Cover, S: Iterable[int]) -> list:
    """All cover elements containing S; see :meth:`Cover.elements_containing`."""
    return cov.elements_containing(S)


# -- file formats ------------------------------------------------------


def _read_csv_rows(path) -> list[list[float]]:
    rows: list[list[float]] = []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            rec = [c for c in rec if c.strip() != ""]
            if rec:
                rows.append([float(c) for c in rec])
    return rows


def load_points_csv(path) -> FiniteMetricSpace:
    """Point cloud CSV (one point per row) with the Euclidean metric."""
    rows = _read_csv_rows(path)
    if not rows:
        raise ValueError(f"no data rows in {path}")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("rows have inconsistent column counts")
    return space_from_points(rows)


def load_distance_csv(path) -> FiniteMetricSpace:
    """Full distance matrix CSV, validated on load."""
    rows = _read_csv_rows(path)
    if not rows:
        raise ValueError(f"no data rows in {path}")
    return validate_metric(rows)


def load_space_csv(path, kind: str = "auto") -> FiniteMetricSpace:
    """Load either CSV flavor.

    ``kind='auto'`` treats a square matrix with zero diagonal and symmetric
    entries as a distance matrix and anything else as a point cloud; pass
    ``'points'`` or ``'matrix'`` to override the heuristic.
    """
    if kind == "points":
        return load_points_csv(path)
    if kind == "matrix":
        return load_distance_csv(path)
    rows = _read_csv_rows(path)
    if not rows:
        raise ValueError(f"no data rows in {path}")
    n = len(rows)
    if all(len(r) == n for r in rows):
        m = np.asarray(rows)
        if np.allclose(np.diag(m), 0.0) and np.array_equal(m, m.T):
            return validate_metric(rows)
    return space_from_points(rows)


def load_cover_json(path, space: FiniteMetricSpace) -> Cover:
    """Explicit cover from a JSON list of index arrays."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise ValueError("cover JSON must be a list of index arrays")
    return Cover.explicit(space, data)
