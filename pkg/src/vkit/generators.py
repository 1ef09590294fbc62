"""Built-in benchmark inputs for the straightening pipeline.

Each generator returns (space, cover, sampled map).  The measure paths are
piecewise-linear in the weights, so cell-by-cell mass thresholds can be
checked by hand; the optional leak parameter spreads a small uniform mass
over the whole space, which keeps labels valid but forces genuine
(non-identity) pumps at the vertices.
"""

from __future__ import annotations

import numpy as np

from .fk import FKTriangulation
from .measures import FiniteMeasure, dirac, mix
from .metric import Cover, FiniteMetricSpace, space_from_points
from .straightening import DENSE_DEPTH, SampledMap


def line3_space() -> FiniteMetricSpace:
    """Three collinear points at 0, 1, 2."""
    return space_from_points([[0.0], [1.0], [2.0]])


def far_clusters_space() -> FiniteMetricSpace:
    """Two well-separated pairs; no small ball sees both."""
    return space_from_points([[0.0], [1.0], [10.0], [11.0]])


def _with_leak(space: FiniteMetricSpace, mu: FiniteMeasure, leak: float) -> FiniteMeasure:
    if leak == 0.0:
        return mu
    n = space.n_points
    uniform = FiniteMeasure(space, tuple(range(n)), tuple(1.0 / n for _ in range(n)))
    return mix(space, [(1.0 - leak, mu), (leak, uniform)])


def _segment_path(space: FiniteMetricSpace, u: float,
                  stops: list[tuple[float, int]]) -> FiniteMeasure:
    """Piecewise-linear Dirac interpolation through (parameter, point) stops."""
    if u <= stops[0][0]:
        return dirac(space, stops[0][1])
    for (u0, a), (u1, b) in zip(stops, stops[1:]):
        if u <= u1:
            s = (u - u0) / (u1 - u0)
            return mix(space, [(1.0 - s, dirac(space, a)), (s, dirac(space, b))])
    return dirac(space, stops[-1][1])


def constant_map(n: int = 1, res: int = 4, point: int = 0,
                 dense_depth: int | None = DENSE_DEPTH):
    """Constant Dirac map; every stage of the pipeline is trivial."""
    space = line3_space()
    cover = Cover.by_balls(space, 1.5)
    tri = FKTriangulation(n, res)
    smap = SampledMap.from_function(tri, lambda y: dirac(space, point), dense_depth)
    return space, cover, smap


def sliding_dirac_map(n: int = 1, res: int = 8, leak: float = 0.0,
                      dense_depth: int | None = DENSE_DEPTH):
    """Dirac mass sliding along the 3-point line under its ball cover.

    The measure path moves 0 -> 1 -> 2 linearly in the weights; with
    res = 8 the map is sampled at 9 grid vertices and every edge of the
    grid stays inside one ball of radius 1.5.
    """
    if n != 1:
        raise ValueError("sliding Dirac benchmark is one-dimensional")
    space = line3_space()
    cover = Cover.by_balls(space, 1.5)
    tri = FKTriangulation(1, res)

    def fn(y: np.ndarray) -> FiniteMeasure:
        path = _segment_path(space, float(y[0]), [(0.0, 0), (0.5, 1), (1.0, 2)])
        return _with_leak(space, path, leak)

    return space, cover, SampledMap.from_function(tri, fn, dense_depth)


def two_ball_map(n: int = 1, res: int | None = None, leak: float = 0.0,
                 dense_depth: int | None = DENSE_DEPTH):
    """Transit between two overlapping explicit cover elements (n = 1 or 2).

    The path rests on the shared point for parameters in [3/8, 5/8], so no
    grid cell at the chosen resolutions ever mixes the two moving phases;
    the n-dimensional version drives the same path by the coordinate mean.
    """
    if n not in (1, 2):
        raise ValueError("two-ball benchmark supports n in {1, 2}")
    if res is None:
        res = 8 if n == 1 else 4
    space = line3_space()
    cover = Cover.explicit(space, [[0, 1], [1, 2]])
    tri = FKTriangulation(n, res)
    stops = [(0.0, 0), (0.375, 1), (0.625, 1), (1.0, 2)]

    def fn(y: np.ndarray) -> FiniteMeasure:
        u = float(np.mean(y))
        return _with_leak(space, _segment_path(space, u, stops), leak)

    return space, cover, SampledMap.from_function(tri, fn, dense_depth)


def spread_map(n: int = 1, res: int = 4, dense_depth: int | None = DENSE_DEPTH):
    """Failure benchmark: mass split across far-apart clusters.

    Every measure gives each small ball only half its mass, so no cover
    element ever clears a threshold above 1/2 and labeling must fail at
    every resolution.
    """
    space = far_clusters_space()
    cover = Cover.by_balls(space, 1.5)
    tri = FKTriangulation(n, res)
    half = FiniteMeasure(space, (0, 2), (0.5, 0.5))
    smap = SampledMap.from_function(tri, lambda y: half, dense_depth)
    return space, cover, smap


GENERATORS = {
    "constant": constant_map,
    "sliding_dirac": sliding_dirac_map,
    "two_ball": two_ball_map,
    "spread": spread_map,
}
