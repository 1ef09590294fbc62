"""Freudenthal-Kuhn triangulation of the unit cube, with point location.

The cube [0,1]^n is split into p^n lattice cells and each cell into n!
simplices: a simplex is determined by a base lattice point x and an axis
order pi, its vertices being the chain v_0 = x, v_i = v_{i-1} + e_pi(i).
The triangulation is kept implicit (n! p^n explodes); enumeration, point
location, and star counts only ever touch local combinatorics.

Scale convention: lattice coordinates live in {0, ..., p}^n and map to the
cube by division by p.  Every simplex has diameter sqrt(n)/p (the long
diagonal edge) and volume 1/(n! p^n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

Lattice = tuple[int, ...]
SimplexKey = tuple[Lattice, tuple[int, ...]]


class OutOfDomain(ValueError):
    """Query point lies outside the unit cube."""


@dataclass(frozen=True)
class FKSimplex:
    """One simplex of the triangulation: base lattice point plus axis order."""

    base: Lattice
    perm: tuple[int, ...]           # axis visit order, 0-indexed

    def vertices(self) -> tuple[Lattice, ...]:
        out = [self.base]
        cur = list(self.base)
        for axis in self.perm:
            cur[axis] += 1
            out.append(tuple(cur))
        return tuple(out)

    @property
    def key(self) -> SimplexKey:
        return (self.base, self.perm)


@dataclass(frozen=True)
class FKTriangulation:
    """Implicit triangulation of [0,1]^n with p cells per axis."""

    n: int
    p: int

    def __post_init__(self):
        if self.n < 1 or self.p < 1:
            raise ValueError("need n >= 1 and p >= 1")

    @property
    def simplex_count(self) -> int:
        return math.factorial(self.n) * self.p ** self.n

    @property
    def vertex_count(self) -> int:
        return (self.p + 1) ** self.n

    @property
    def simplex_diameter(self) -> float:
        return math.sqrt(self.n) / self.p

    def simplices(self) -> Iterator[FKSimplex]:
        """All n-simplices, bases in lexicographic order, axis orders likewise."""
        for base in product(range(self.p), repeat=self.n):
            for perm in permutations(range(self.n)):
                yield FKSimplex(base, perm)

    def vertices(self) -> Iterator[Lattice]:
        yield from product(range(self.p + 1), repeat=self.n)

    def vertex_index(self, v: Lattice) -> int:
        idx = 0
        for c in v:
            idx = idx * (self.p + 1) + c
        return idx

    def vertex_point(self, v: Lattice) -> np.ndarray:
        return np.asarray(v, dtype=np.float64) / self.p

    def scaled_vertices(self, simplex: FKSimplex) -> np.ndarray:
        return np.asarray(simplex.vertices(), dtype=np.float64) / self.p

    def is_boundary_vertex(self, v: Lattice) -> bool:
        return any(c == 0 or c == self.p for c in v)

    # -- point location -------------------------------------------------

    def locate(self, y: Sequence[float]) -> tuple[FKSimplex, np.ndarray]:
        """Containing simplex and barycentric coordinates of a cube point.

        The base is the floored lattice cell (clamped on the far faces) and
        the axis order sorts fractional parts descending, stably, with the
        axis index as tie-breaker, so boundary points resolve
        deterministically.  With fractions sorted f_1 >= ... >= f_n the
        barycentric weights are the gaps (1 - f_1, f_1 - f_2, ..., f_n),
        all nonnegative by construction.
        """
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (self.n,):
            raise OutOfDomain(f"expected a point of dimension {self.n}")
        if (y < 0.0).any() or (y > 1.0).any():
            raise OutOfDomain("point must lie in the unit cube")
        z = y * self.p
        base = np.minimum(np.floor(z), self.p - 1).astype(int)
        frac = z - base
        order = sorted(range(self.n), key=lambda i: (-frac[i], i))
        coords = np.empty(self.n + 1)
        fs = frac[order]
        coords[0] = 1.0 - fs[0]
        for k in range(1, self.n):
            coords[k] = fs[k - 1] - fs[k]
        coords[self.n] = fs[self.n - 1]
        return FKSimplex(tuple(int(b) for b in base), tuple(order)), coords

    def point_of(self, simplex: FKSimplex, coords: Sequence[float]) -> np.ndarray:
        verts = self.scaled_vertices(simplex)
        return np.asarray(coords, dtype=np.float64) @ verts

    # -- incidence -------------------------------------------------------

    def simplices_containing_vertex(self, v: Lattice) -> list[FKSimplex]:
        """All n-simplices having v among their vertices (direct enumeration)."""
        out = []
        for delta in product((0, 1), repeat=self.n):
            base = tuple(c - d for c, d in zip(v, delta))
            if any(b < 0 or b > self.p - 1 for b in base):
                continue
            for perm in permutations(range(self.n)):
                if v in FKSimplex(base, perm).vertices():
                    out.append(FKSimplex(base, perm))
        return out

    def vertex_star_size(self, v: Lattice) -> int:
        """Number of n-simplices incident to a vertex; at most 2^n n!."""
        if len(v) != self.n or any(c < 0 or c > self.p for c in v):
            raise ValueError("not a triangulation vertex")
        return len(self.simplices_containing_vertex(v))

    def simplices_containing_fraction(self, nums: Sequence[int],
                                      dens: Sequence[int]) -> list[FKSimplex]:
        """All n-simplices whose closed realization contains the rational
        point (nums[i]/dens[i])_i, computed exactly.

        Used to assign grid samples to simplices without floating-point tie
        ambiguity: a closed simplex (x, pi) contains the point iff its cell
        fractions, read in pi order, are descending.
        """
        z = [Fraction(int(nums[i]) * self.p, int(dens[i])) for i in range(self.n)]
        axis_bases: list[list[int]] = []
        for zi in z:
            if zi < 0 or zi > self.p:
                raise OutOfDomain("point must lie in the unit cube")
            fl = math.floor(zi)
            cands = set()
            if fl <= self.p - 1:
                cands.add(fl)
            if zi == fl and fl - 1 >= 0:
                cands.add(fl - 1)
            axis_bases.append(sorted(cands))
        out = []
        for base in product(*axis_bases):
            frac = [z[i] - base[i] for i in range(self.n)]
            groups: dict[Fraction, list[int]] = {}
            for i, f in enumerate(frac):
                groups.setdefault(f, []).append(i)
            ordered = sorted(groups.items(), key=lambda kv: kv[0], reverse=True)
            for combo in product(*(permutations(axes) for _, axes in ordered)):
                perm = tuple(i for block in combo for i in block)
                out.append(FKSimplex(tuple(base), perm))
        return out

    # -- export -----------------------------------------------------------

    def to_off(self) -> str:
        """OFF mesh: all lattice vertices (lexicographic) then all simplices."""
        lines = ["OFF", f"{self.vertex_count} {self.simplex_count} 0"]
        for v in self.vertices():
            lines.append(" ".join(repr(c / self.p) for c in v))
        for s in self.simplices():
            idx = [self.vertex_index(v) for v in s.vertices()]
            lines.append(f"{self.n + 1} " + " ".join(str(i) for i in idx))
        return "\n".join(lines) + "\n"


def build_fk(n: int, p: int) -> FKTriangulation:
    """Triangulation of the unit n-cube at resolution p (cells per axis)."""
    return FKTriangulation(n, p)


def star_bound(n: int) -> int:
    """Resolution-independent cap on vertex stars: 2^n n!."""
    return (2 ** n) * math.factorial(n)


def subordinate_to(tri: FKTriangulation,
                   assignment: Mapping[SimplexKey, object]) -> bool:
    """True iff every n-simplex is assigned a (non-None) cover element id."""
    return all(assignment.get(s.key) is not None for s in tri.simplices())


def facet_counts(tri: FKTriangulation) -> dict[tuple[Lattice, ...], int]:
    """How many n-simplices share each (n-1)-face (enumerates everything)."""
    counts: dict[tuple[Lattice, ...], int] = {}
    for s in tri.simplices():
        verts = s.vertices()
        for drop in range(len(verts)):
            face = tuple(sorted(verts[:drop] + verts[drop + 1:]))
            counts[face] = counts.get(face, 0) + 1
    return counts


def is_boundary_face(tri: FKTriangulation, face: Iterable[Lattice]) -> bool:
    """A face lies on the cube boundary iff some coordinate is constant 0 or p."""
    pts = list(face)
    for axis in range(tri.n):
        col = [v[axis] for v in pts]
        if all(c == 0 for c in col) or all(c == tri.p for c in col):
            return True
    return False


def default_resolutions(p_max: int = 1024) -> list[int]:
    """Doubling sweep 1, 2, 4, ... capped at p_max."""
    out = []
    p = 1
    while p <= p_max:
        out.append(p)
        p *= 2
    return out


def _subordinate_resolution(bitsets: np.ndarray,
                            resolutions: Sequence[int]) -> int | None:
    """First resolution at which every simplex-with-samples shares an element.

    ``bitsets`` is an n-dimensional integer array over a regular grid on the
    cube (axis k sampled at j/(shape[k]-1)); each entry is the bitmask of
    cover elements admissible at that sample.  Simplices containing no grid
    sample pass vacuously, so grids should be at least as fine as the
    resolutions being certified.
    """
    n = bitsets.ndim
    dens = [s - 1 for s in bitsets.shape]
    if any(d < 1 for d in dens):
        raise ValueError("grid needs at least 2 samples per axis")
    for p in resolutions:
        tri = FKTriangulation(n, p)
        shared: dict[SimplexKey, int] = {}
        ok = True
        for idx in np.ndindex(*bitsets.shape):
            mask = int(bitsets[idx])
            for s in tri.simplices_containing_fraction(idx, dens):
                prev = shared.get(s.key)
                cur = mask if prev is None else (prev & mask)
                shared[s.key] = cur
                if cur == 0:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return p
    return None


def estimate_lebesgue(bitsets: np.ndarray, p_max: int = 1024,
                      resolutions: Sequence[int] | None = None) -> float:
    """Largest certified-at-samples mesh size sqrt(n)/p for the given cover data.

    Sweeps resolutions coarse-to-fine (doubling by default) and returns the
    mesh size of the first one whose every sampled simplex admits a common
    cover element; 0 signals that none of the tested resolutions works.
    """
    ps = list(resolutions) if resolutions is not None else default_resolutions(p_max)
    p = _subordinate_resolution(np.asarray(bitsets), ps)
    if p is None:
        return 0.0
    return math.sqrt(bitsets.ndim) / p
