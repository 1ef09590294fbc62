"""Simplexwise straightening of sampled maps into a Vietoris complex.

Pipeline: pick a mass threshold from the dimension, find a grid resolution
whose simplices are subordinate to the cover (at samples), label every
top simplex with a cover element it concentrates on, pump each vertex
measure into the intersection of the labels around it, and linearize
simplexwise.  Every stage emits pass/fail records into a certification
log; the end certificate is that each top simplex carries its vertex
supports inside a single cover element, i.e. the linearized map lands in
the Vietoris complex of the cover.

Only vertex (0-skeleton) measures are pumped; higher-skeleton deformation
is witnessed by sampled homotopy tracks whose membership thresholds are
checked pointwise.  Continuity itself is not machine-checkable and is out
of scope.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .fk import (FKTriangulation, Lattice, SimplexKey, default_resolutions,
                 star_bound, _subordinate_resolution)
from .measures import FiniteMeasure, barycentric_distance, mix
from .metric import Cover, FiniteMetricSpace
from .thickening import build_bump, pump, pump_homotopy, shrink_to_inner

TRACK_TIMES = (0.0, 0.25, 0.5, 0.75, 1.0)
DENSE_DEPTH = 3


class NoLabel(ValueError):
    """No cover element concentrates every sample of a simplex; refine."""

    def __init__(self, simplex: SimplexKey):
        self.simplex = simplex
        super().__init__(f"no admissible cover element for simplex {simplex}")


class BoundViolated(ValueError):
    """Intersection mass fell below 1 - N(1-p): a precondition was broken."""

    def __init__(self, mass: float, bound: float):
        self.mass, self.bound = mass, bound
        super().__init__(f"intersection mass {mass} <= bound {bound}")


class NotSubordinate(ValueError):
    """Vertex supports of a simplex escape its assigned cover element."""

    def __init__(self, simplex: SimplexKey, offending: frozenset[int]):
        self.simplex, self.offending = simplex, offending
        super().__init__(f"simplex {simplex} carries support points {sorted(offending)} "
                         "outside its label")


class PipelineError(RuntimeError):
    """A straightening stage failed; ``stage`` names it."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")


def choose_p(n: int) -> float:
    """Mass threshold strictly inside (1 - 1/(2^n n!), 1).

    The midpoint-like choice 1 - 1/(2 * 2^n n!) keeps labeling as feasible
    as possible while the vertex-region mass bound stays strictly positive.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return 1.0 - 1.0 / (2.0 * star_bound(n))


@dataclass(frozen=True)
class SampledMap:
    """A map from the unit cube into measures, sampled on a grid.

    Values live at the vertices of a Freudenthal-Kuhn triangulation;
    optionally each top simplex also carries interior samples on the
    barycentric lattice of some depth.  Dense samples are stored with exact
    rational coordinates (numerator tuple over a common denominator) so
    they can be assigned to simplices of coarser grids without ties."""

    tri: FKTriangulation
    vertex_values: dict[Lattice, FiniteMeasure]
    dense: dict[SimplexKey, tuple[tuple[Lattice, int, FiniteMeasure], ...]] | None = None

    def __post_init__(self):
        missing = [v for v in self.tri.vertices() if v not in self.vertex_values]
        if missing:
            raise ValueError(f"missing vertex values, e.g. {missing[0]}")

    @property
    def space(self) -> FiniteMetricSpace:
        return next(iter(self.vertex_values.values())).space

    @staticmethod
    def from_function(tri: FKTriangulation,
                      fn: Callable[[np.ndarray], FiniteMeasure],
                      dense_depth: int | None = DENSE_DEPTH) -> "SampledMap":
        values = {v: fn(tri.vertex_point(v)) for v in tri.vertices()}
        dense = None
        if dense_depth is not None and dense_depth >= 2:
            dense = {}
            den = dense_depth * tri.p
            for s in tri.simplices():
                verts = s.vertices()
                samples = []
                for comp in _compositions(dense_depth, tri.n + 1):
                    if max(comp) == dense_depth:
                        continue        # vertex of the simplex; already sampled
                    nums = tuple(sum(c * v[j] for c, v in zip(comp, verts))
                                 for j in range(tri.n))
                    point = np.asarray(nums, dtype=np.float64) / den
                    samples.append((nums, den, fn(point)))
                dense[s.key] = tuple(samples)
        return SampledMap(tri, values, dense)

    def value_on_subgrid(self, coarse: FKTriangulation, v: Lattice) -> FiniteMeasure:
        """Value at a vertex of a coarser grid whose resolution divides ours."""
        step = self.tri.p // coarse.p
        if coarse.p * step != self.tri.p:
            raise ValueError("coarse resolution must divide the sampled one")
        return self.vertex_values[tuple(c * step for c in v)]


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


@dataclass(frozen=True)
class Labeling:
    """Assignment of a cover element to every top simplex, plus derived data."""

    tri: FKTriangulation
    cover: Cover
    ell: dict[SimplexKey, object]

    def element_set(self, element_id) -> frozenset[int]:
        return self.cover.resolve(element_id)

    def star_of_vertex(self, v: Lattice) -> list[SimplexKey]:
        return [s.key for s in self.tri.simplices_containing_vertex(v)]

    def labels_at_vertex(self, v: Lattice) -> list:
        return sorted({self.ell[k] for k in self.star_of_vertex(v)})

    def region_at_vertex(self, v: Lattice) -> frozenset[int]:
        """Intersection of the cover elements labeling the star of v."""
        region: frozenset[int] | None = None
        for lab in self.labels_at_vertex(v):
            elem = self.element_set(lab)
            region = elem if region is None else (region & elem)
        assert region is not None, "every vertex lies in some top simplex"
        return region

    def assignment(self) -> dict[SimplexKey, object]:
        return dict(self.ell)


def label_simplices(smap: SampledMap, cov: Cover, p: float,
                    tri: FKTriangulation | None = None) -> Labeling:
    """Label each top simplex with the smallest-id element all its samples
    concentrate on (mass strictly above p).

    ``tri`` may be a coarser triangulation whose resolution divides the
    sampled one; the samples of a coarse simplex are all grid vertices and
    dense samples falling inside it (assignment is exact rational, so
    shared faces contribute to every incident simplex).  Raises
    :class:`NoLabel` when some simplex admits no element; callers refine
    the grid and retry.
    """
    target = tri if tri is not None else smap.tri
    fine = smap.tri
    if fine.p % target.p != 0:
        raise ValueError("labeling grid must divide the sampled grid")
    samples: dict[SimplexKey, list[FiniteMeasure]] = {}
    dens = (fine.p,) * fine.n
    for v in fine.vertices():
        mu = smap.vertex_values[v]
        for s in target.simplices_containing_fraction(v, dens):
            samples.setdefault(s.key, []).append(mu)
    if smap.dense:
        for batch in smap.dense.values():
            for nums, den, mu in batch:
                for s in target.simplices_containing_fraction(nums, (den,) * fine.n):
                    samples.setdefault(s.key, []).append(mu)
    elements = cov.enumerable_elements()
    ell: dict[SimplexKey, object] = {}
    for s in target.simplices():
        samp = samples[s.key]
        label = None
        for eid, elem in elements:
            if all(mu.mass_of(elem) > p for mu in samp):
                label = eid
                break
        if label is None:
            raise NoLabel(s.key)
        ell[s.key] = label
    return Labeling(target, cov, ell)


def intersection_mass_bound(mu: FiniteMeasure,
                            labels: Iterable[frozenset[int]],
                            p: float) -> float:
    """Mass of mu on the intersection of the label sets.

    When mu puts mass above p on each of the N sets, the intersection mass
    exceeds 1 - N(1-p); a value at or below that bound means a precondition
    was not actually satisfied, reported as :class:`BoundViolated`.
    """
    sets = [frozenset(s) for s in labels]
    if not sets:
        raise ValueError("need at least one label")
    inter = sets[0]
    for s in sets[1:]:
        inter &= s
    mass = mu.mass_of(inter)
    bound = 1.0 - len(sets) * (1.0 - p)
    if not mass > bound:
        raise BoundViolated(mass, bound)
    return mass


@dataclass(frozen=True)
class VertexPump:
    """Outcome of pumping one vertex measure into its label region."""

    vertex: Lattice
    result: FiniteMeasure
    track: tuple[tuple[float, FiniteMeasure], ...]
    labels: tuple
    region: frozenset[int]
    p_floor: float         # min over track samples and labels of the element mass
    identity: bool
    shrink_index: int | None = None


def pump_vertex(smap: SampledMap, lab: Labeling, v: Lattice, p: float,
                track_times: Sequence[float] = TRACK_TIMES) -> VertexPump:
    """Deform the measure at v so its support enters the label region.

    The region is the intersection of the elements labeling the simplices
    around v.  Measures already supported there are returned unchanged with
    a constant track (the pump fixes them).  Otherwise the region is
    shrunk away from its complement, a bump over the shrunken set drives
    the pump, and the linear homotopy is sampled at ``track_times``; every
    sample keeps mass above p on every label because pumping only adds
    mass to each of them.
    """
    mu = smap.value_on_subgrid(lab.tri, v)
    labels = tuple(lab.labels_at_vertex(v))
    region = lab.region_at_vertex(v)
    label_sets = [lab.element_set(b) for b in labels]

    def floor_of(track):
        return min(m.mass_of(es) for _, m in track for es in label_sets)

    if mu.support_set() <= region:
        track = tuple((t, mu) for t in track_times)
        return VertexPump(v, mu, track, labels, region, floor_of(track), True)
    q = 1.0 - len(labels) * (1.0 - p)
    if q <= 0.0:
        raise ValueError(f"threshold p={p} too low for {len(labels)} labels; "
                         "need p > 1 - 1/(2^n n!)")
    intersection_mass_bound(mu, label_sets, p)
    idx, inner = shrink_to_inner([mu], q, region)
    bump = build_bump(mu.space, (), inner)
    pumped = pump(mu, bump)
    track = tuple((t, pump_homotopy(mu, bump, t)) for t in track_times)
    return VertexPump(v, pumped, track, labels, region, floor_of(track), False, idx)


@dataclass(frozen=True)
class SimplexwiseAffineMap:
    """Map that is affine on each simplex: barycentric mixing of vertex values."""

    tri: FKTriangulation
    values: dict[Lattice, FiniteMeasure]
    labeling: Labeling | None = None

    def vertex_value(self, v: Lattice) -> FiniteMeasure:
        return self.values[v]

    def evaluate(self, y: Sequence[float]) -> FiniteMeasure:
        simplex, coords = self.tri.locate(y)
        verts = simplex.vertices()
        space = self.values[verts[0]].space
        return mix(space, [(float(coords[i]), self.values[verts[i]])
                           for i in range(len(verts))])


def linearize(values: Mapping[Lattice, FiniteMeasure],
              lab: Labeling) -> SimplexwiseAffineMap:
    """Simplexwise-affine map through the given vertex measures.

    Certifies, per top simplex, that the union of its vertex supports sits
    inside the assigned cover element, hence is a simplex of the Vietoris
    complex of the cover; :class:`NotSubordinate` reports the first
    offending simplex otherwise.
    """
    for s in lab.tri.simplices():
        union: set[int] = set()
        for v in s.vertices():
            union |= values[v].support_set()
        elem = lab.element_set(lab.ell[s.key])
        if not union <= elem:
            raise NotSubordinate(s.key, frozenset(union - elem))
    return SimplexwiseAffineMap(lab.tri, dict(values), lab)


@dataclass
class CertificationLog:
    """Flat pass/fail records, one JSON object per check."""

    records: list[dict] = field(default_factory=list)

    def add(self, stage: str, ident: str, quantity: float, threshold: float,
            passed: bool) -> None:
        self.records.append({"stage": stage, "id": ident,
                             "quantity": quantity, "threshold": threshold,
                             "pass": bool(passed)})

    def all_pass(self) -> bool:
        return all(r["pass"] for r in self.records)

    def stage_counts(self) -> dict[str, dict[str, int]]:
        out: dict[str, dict[str, int]] = {}
        for r in self.records:
            slot = out.setdefault(r["stage"], {"pass": 0, "fail": 0})
            slot["pass" if r["pass"] else "fail"] += 1
        return out

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records)


def _vertex_key(v: Lattice) -> str:
    return ",".join(str(c) for c in v)


def _simplex_key(k: SimplexKey) -> str:
    base, perm = k
    return _vertex_key(base) + "|" + _vertex_key(perm)


def straighten(smap: SampledMap, cov: Cover, p_mass: float | None = None,
               track_times: Sequence[float] = TRACK_TIMES,
               ) -> tuple[SimplexwiseAffineMap, CertificationLog]:
    """End-to-end straightening of a sampled map over a cover.

    Stages: choose the mass threshold, sweep grid resolutions for a
    subordinate one, label top simplices, pump every vertex, linearize.
    The log gets one record per membership check, per track sample, per
    boundary vertex (already-subordinate boundary values must come through
    unchanged), and per simplex certificate.  Stage failures raise
    :class:`PipelineError` naming the stage.
    """
    n = smap.tri.n
    log = CertificationLog()
    p = p_mass if p_mass is not None else choose_p(n)
    p_lo = 1.0 - 1.0 / star_bound(n)
    log.add("choose_p", "p", p, p_lo, p_lo < p < 1.0)
    if not (p_lo < p < 1.0):
        raise PipelineError("choose_p", ValueError(f"p={p} outside ({p_lo}, 1)"))

    elements = cov.enumerable_elements()
    shape = (smap.tri.p + 1,) * n
    bitsets = np.empty(shape, dtype=object)
    for v in smap.tri.vertices():
        mask = 0
        mu = smap.vertex_values[v]
        for bit, (_, elem) in enumerate(elements):
            if mu.mass_of(elem) > p:
                mask |= 1 << bit
        bitsets[v] = mask
    candidates = sorted({q for q in default_resolutions(smap.tri.p)
                         if smap.tri.p % q == 0} | {smap.tri.p})
    res = _subordinate_resolution(bitsets, candidates)
    if res is None:
        log.add("estimate_lebesgue", "mesh", 0.0, 0.0, False)
        raise PipelineError("estimate_lebesgue",
                            NoLabel((tuple([0] * n), tuple(range(n)))))
    log.add("estimate_lebesgue", "mesh", math.sqrt(n) / res, 0.0, True)

    coarse = FKTriangulation(n, res)
    log.add("build_fk", "simplices", coarse.simplex_count, 0.0, True)

    try:
        lab = label_simplices(smap, cov, p, coarse)
    except NoLabel as exc:
        log.add("label", _simplex_key(exc.simplex), 0.0, p, False)
        raise PipelineError("label_simplices", exc)
    for key in sorted(lab.ell):
        log.add("label", _simplex_key(key), 1.0, p, True)

    values: dict[Lattice, FiniteMeasure] = {}
    for v in sorted(coarse.vertices()):
        try:
            vp = pump_vertex(smap, lab, v, p, track_times)
        except ValueError as exc:   # BoundViolated, ZeroMass, NoMCP, DegenerateGap
            log.add("pump", _vertex_key(v), 0.0, p, False)
            raise PipelineError("pump_vertex", exc)
        values[v] = vp.result
        q_v = 1.0 - len(vp.labels) * (1.0 - p)
        region_mass = smap.value_on_subgrid(coarse, v).mass_of(vp.region)
        log.add("mass_bound", _vertex_key(v), region_mass, q_v, region_mass > q_v)
        for t, m in vp.track:
            floor = min(m.mass_of(lab.element_set(b)) for b in vp.labels)
            log.add("track", f"{_vertex_key(v)}:t={t}", floor, p, floor > p)
        if coarse.is_boundary_vertex(v):
            drift = barycentric_distance(vp.result, smap.value_on_subgrid(coarse, v))
            log.add("boundary", _vertex_key(v), drift, 0.0,
                    (not vp.identity) or drift == 0.0)

    try:
        gmap = linearize(values, lab)
    except NotSubordinate as exc:
        log.add("linearize", _simplex_key(exc.simplex), len(exc.offending), 0.0, False)
        raise PipelineError("linearize", exc)
    for s in lab.tri.simplices():
        union: set[int] = set()
        for v in s.vertices():
            union |= values[v].support_set()
        elem = lab.element_set(lab.ell[s.key])
        log.add("linearize", _simplex_key(s.key), len(union - elem), 0.0,
                union <= elem)
    return gmap, log


def prism_retract(x: Sequence[float], t: float) -> tuple[tuple[float, ...], float]:
    """Central-projection retraction of (simplex x [0,1]) onto
    (simplex x {0}) union (boundary x [0,1]).

    Projects from the point (barycenter, 2): follow the ray through (x, t)
    until it first meets the bottom face (time 0) or a wall (some
    barycentric coordinate 0).  Points already in the target are fixed, and
    the retraction is idempotent up to roundoff.
    """
    coords = np.asarray(x, dtype=np.float64)
    if coords.ndim != 1 or coords.size < 1:
        raise ValueError("x must be a nonempty barycentric coordinate vector")
    if (coords < 0.0).any() or abs(coords.sum() - 1.0) > 1e-9:
        raise ValueError("x must be a barycentric point of the simplex")
    if not (0.0 <= t <= 1.0):
        raise ValueError("t must lie in [0, 1]")
    k = coords.size
    center = 1.0 / k
    s_bottom = 2.0 / (2.0 - t)
    s_wall = math.inf
    for c in coords:
        if c < center:
            s_wall = min(s_wall, center / (center - c))
    s = min(s_bottom, s_wall)
    new = center + s * (coords - center)
    new = np.maximum(new, 0.0)
    new_t = 2.0 + s * (t - 2.0)
    if s == s_bottom:
        new_t = 0.0
    return tuple(float(c) for c in new), float(new_t)
