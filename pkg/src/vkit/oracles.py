"""Independent brute-force oracles used by the certification suites.

These deliberately share no code with the production paths they check:
the transport oracle enumerates basic feasible solutions of the
transportation polytope instead of running an LP solver, and the complex
oracles scan all vertex subsets instead of doing clique expansion.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .measures import FiniteMeasure
from .metric import FiniteMetricSpace

MAX_ORACLE_SUPPORT = 5


def _tree_flows(m: int, n: int, edges: list[tuple[int, int]],
                a: list[float], b: list[float]) -> list[float] | None:
    """Solve the marginal equations on a spanning tree by leaf elimination."""
    supply = a + [-x for x in b]          # nodes 0..m-1 rows, m..m+n-1 cols
    incident: dict[int, set[int]] = {v: set() for v in range(m + n)}
    for e, (i, j) in enumerate(edges):
        incident[i].add(e)
        incident[m + j].add(e)
    flows = [0.0] * len(edges)
    alive = set(range(m + n))
    used = [False] * len(edges)
    while len(alive) > 1:
        leaf = None
        for v in alive:
            live = [e for e in incident[v] if not used[e]]
            if len(live) == 1:
                leaf = v
                e = live[0]
                break
        if leaf is None:
            return None               # cycle: not a tree
        i, j = edges[e]
        other = m + j if leaf == i else i
        sign = 1.0 if leaf < m else -1.0
        flows[e] = sign * supply[leaf]
        supply[other] += supply[leaf]
        supply[leaf] = 0.0
        used[e] = True
        alive.remove(leaf)
    return flows


def wasserstein_bruteforce(mu: FiniteMeasure, nu: FiniteMeasure) -> float:
    """Exact 1-Wasserstein value by enumerating transportation-polytope vertices.

    Every vertex of the polytope is a basic feasible solution supported on a
    spanning tree of the complete bipartite graph on the two supports, so
    scanning all spanning trees and keeping the feasible ones covers every
    vertex; the optimum of the LP is attained at one of them.
    """
    if mu.space is not nu.space:
        raise ValueError("measures live on different spaces")
    m, n = len(mu.support), len(nu.support)
    if m > MAX_ORACLE_SUPPORT or n > MAX_ORACLE_SUPPORT:
        raise ValueError("oracle is exponential; supports must stay small")
    a, b = list(mu.weights), list(nu.weights)
    d = mu.space.dist[np.ix_(mu.support, nu.support)]
    cells = [(i, j) for i in range(m) for j in range(n)]
    best = None
    for tree in combinations(cells, m + n - 1):
        flows = _tree_flows(m, n, list(tree), a, b)
        if flows is None:
            continue
        if any(f < -1e-12 for f in flows):
            continue
        cost = sum(max(f, 0.0) * d[i, j] for f, (i, j) in zip(flows, tree))
        if best is None or cost < best:
            best = cost
    assert best is not None, "transportation problem is always feasible"
    return best


def vr_subset_scan(space: FiniteMetricSpace, r: float, k_max: int) -> dict[tuple[int, ...], float]:
    """All subsets of diameter strictly below r, with their diameters."""
    out: dict[tuple[int, ...], float] = {}
    if r <= 0.0:
        return out
    pts = list(space.points())
    for size in range(1, k_max + 2):
        for sub in combinations(pts, size):
            diam = space.diam_of(sub)
            if diam < r:
                out[sub] = diam
    return out


def cech_subset_scan(space: FiniteMetricSpace, r: float, k_max: int) -> dict[tuple[int, ...], float]:
    """All subsets admitting a witness z in X with max d(z, x) strictly below r."""
    out: dict[tuple[int, ...], float] = {}
    if r <= 0.0:
        return out
    pts = list(space.points())
    for size in range(1, k_max + 2):
        for sub in combinations(pts, size):
            value = min(max(space.d(z, x) for x in sub) for z in pts)
            if value < r:
                out[sub] = value
    return out
