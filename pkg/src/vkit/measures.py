"""Finitely supported probability measures and the two metrics on them.

A measure is a weighted sum of Dirac masses on points of a
:class:`~vkit.metric.FiniteMetricSpace`.  Two distances are implemented:
the exact 1-Wasserstein distance (a transportation LP) and the barycentric
l1 distance between weight vectors.  Couplings are explicit transport plans
with validated marginals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from .metric import FiniteMetricSpace

WEIGHT_SUM_EXACT = 1e-12      # accept the stored weights as-is below this
WEIGHT_SUM_RENORM = 1e-9      # renormalize up to this, reject beyond
MARGINAL_TOL = 1e-10


class ZeroMass(ValueError):
    """An operation produced or required strictly positive mass and got none."""


@dataclass(frozen=True)
class FiniteMeasure:
    """Probability measure with finite support on a fixed space.

    Canonical form: support indices strictly increasing, weights strictly
    positive, total weight 1 within ``WEIGHT_SUM_EXACT``.  Construction
    renormalizes drift up to ``WEIGHT_SUM_RENORM`` and rejects anything
    worse, so long chains of convex combinations stay stable.
    """

    space: FiniteMetricSpace
    support: tuple[int, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.support) != len(self.weights):
            raise ValueError("support and weights must have equal length")
        if len(set(self.support)) != len(self.support):
            raise ValueError("support indices must be distinct")
        items = sorted(
            ((int(x), float(w)) for x, w in zip(self.support, self.weights) if w != 0.0)
        )
        for x, w in items:
            if not (0 <= x < self.space.n_points):
                raise IndexError(f"support index {x} out of range")
            if w < 0.0 or not math.isfinite(w):
                raise ValueError(f"weight at {x} must be positive, got {w}")
        if not items:
            raise ZeroMass("a probability measure needs positive total mass")
        total = math.fsum(w for _, w in items)
        if abs(total - 1.0) > WEIGHT_SUM_RENORM:
            raise ValueError(f"weights sum to {total}, beyond renormalization tolerance")
        if abs(total - 1.0) > WEIGHT_SUM_EXACT:
            items = [(x, w / total) for x, w in items]
        object.__setattr__(self, "support", tuple(x for x, _ in items))
        object.__setattr__(self, "weights", tuple(w for _, w in items))

    def weight_of(self, x: int) -> float:
        """Barycentric coordinate of the point x (0 off support)."""
        try:
            return self.weights[self.support.index(x)]
        except ValueError:
            return 0.0

    def mass_of(self, points: Iterable[int]) -> float:
        pts = set(points)
        return math.fsum(w for x, w in zip(self.support, self.weights) if x in pts)

    def support_set(self) -> frozenset[int]:
        return frozenset(self.support)

    def to_json(self) -> str:
        return json.dumps({"support": list(self.support), "weights": list(self.weights)})

    @staticmethod
    def from_json(space: FiniteMetricSpace, text: str) -> "FiniteMeasure":
        data = json.loads(text)
        return FiniteMeasure(space, tuple(data["support"]), tuple(data["weights"]))


def dirac(space: FiniteMetricSpace, x: int) -> FiniteMeasure:
    """Unit mass at a single point."""
    return FiniteMeasure(space, (int(x),), (1.0,))


def mix(space: FiniteMetricSpace,
        terms: Sequence[tuple[float, FiniteMeasure]]) -> FiniteMeasure:
    """Convex combination sum(c_i * mu_i); zero coefficients drop out exactly."""
    acc: dict[int, float] = {}
    for c, mu in terms:
        if mu.space is not space:
            raise ValueError("all measures must live on the same space")
        if c == 0.0:
            continue
        if c < 0.0:
            raise ValueError("coefficients must be nonnegative")
        for x, w in zip(mu.support, mu.weights):
            acc[x] = acc.get(x, 0.0) + c * w
    sup = tuple(sorted(x for x, w in acc.items() if w != 0.0))
    return FiniteMeasure(space, sup, tuple(acc[x] for x in sup))


def convex_combine(mu: FiniteMeasure, nu: FiniteMeasure, t: float) -> FiniteMeasure:
    """(1 - t) mu + t nu on the union support; t in [0, 1].

    Endpoints are exact: t=0 returns a measure equal to mu, t=1 to nu.
    """
    if not (0.0 <= t <= 1.0):
        raise ValueError("t must lie in [0, 1]")
    return mix(mu.space, [(1.0 - t, mu), (t, nu)])


def barycentric_distance(mu: FiniteMeasure, nu: FiniteMeasure) -> float:
    """l1 distance between weight vectors over the union support; in [0, 2]."""
    if mu.space is not nu.space:
        raise ValueError("measures live on different spaces")
    pts = sorted(set(mu.support) | set(nu.support))
    return math.fsum(abs(mu.weight_of(x) - nu.weight_of(x)) for x in pts)


@dataclass(frozen=True)
class Coupling:
    """Transport plan between two measures with validated marginals.

    ``mass[i, j]`` is the mass moved from ``rows[i]`` to ``cols[j]``.
    """

    space: FiniteMetricSpace
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    mass: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mass, dtype=np.float64)
        if m.shape != (len(self.rows), len(self.cols)):
            raise ValueError("mass matrix shape mismatch")
        if (m < -MARGINAL_TOL).any():
            raise ValueError("coupling mass must be nonnegative")
        object.__setattr__(self, "mass", m)

    def check_marginals(self, mu: FiniteMeasure, nu: FiniteMeasure) -> None:
        a = np.array([mu.weight_of(x) for x in self.rows])
        b = np.array([nu.weight_of(y) for y in self.cols])
        if np.abs(self.mass.sum(axis=1) - a).max() > MARGINAL_TOL:
            raise ValueError("row marginals do not match mu")
        if np.abs(self.mass.sum(axis=0) - b).max() > MARGINAL_TOL:
            raise ValueError("column marginals do not match nu")

    def cost(self) -> float:
        d = self.space.dist[np.ix_(self.rows, self.cols)]
        return float((self.mass * d).sum())

    def off_diagonal_mass(self) -> float:
        total = 0.0
        for i, x in enumerate(self.rows):
            for j, y in enumerate(self.cols):
                if x != y:
                    total += float(self.mass[i, j])
        return total

    def transpose(self) -> "Coupling":
        return Coupling(self.space, self.cols, self.rows, self.mass.T.copy())


def _solve_transport(mu: FiniteMeasure, nu: FiniteMeasure) -> tuple[float, Coupling]:
    a = np.asarray(mu.weights)
    b = np.asarray(nu.weights)
    m, n = len(a), len(b)
    d = mu.space.dist[np.ix_(mu.support, nu.support)]
    c = d.reshape(m * n)
    A = np.zeros((m + n, m * n))
    for i in range(m):
        A[i, i * n:(i + 1) * n] = 1.0
    for j in range(n):
        A[m + j, j::n] = 1.0
    res = linprog(c, A_eq=A, b_eq=np.concatenate([a, b]), method="highs")
    if not res.success:  # transportation LPs are always feasible and bounded
        raise RuntimeError(f"transport LP failed: {res.message}")
    plan = np.maximum(res.x.reshape(m, n), 0.0)
    return float(res.fun), Coupling(mu.space, mu.support, nu.support, plan)


def wasserstein(mu: FiniteMeasure, nu: FiniteMeasure) -> tuple[float, Coupling]:
    """Exact 1-Wasserstein distance and one optimal coupling.

    Solved as the transportation LP min sum(gamma_ij * d(x_i, y_j)) over
    plans with marginals mu, nu (simplex method, optimum at a polytope
    vertex).  Arguments are ordered canonically before solving, so the
    result is symmetric in (mu, nu) by construction.
    """
    if mu.space is not nu.space:
        raise ValueError("measures live on different spaces")
    if (nu.support, nu.weights) < (mu.support, mu.weights):
        value, plan = _solve_transport(nu, mu)
        return value, plan.transpose()
    return _solve_transport(mu, nu)


def common_mass_coupling(mu: FiniteMeasure, nu: FiniteMeasure) -> Coupling:
    """Feasible plan fixing min(mu(x), nu(x)) on the diagonal.

    Residual supply and demand (which live on disjoint point sets once the
    shared mass is pinned) are matched greedily in index order.  The
    off-diagonal mass equals half the barycentric distance.
    """
    if mu.space is not nu.space:
        raise ValueError("measures live on different spaces")
    rows, cols = mu.support, nu.support
    plan = np.zeros((len(rows), len(cols)))
    res_a = list(mu.weights)
    res_b = list(nu.weights)
    col_of = {y: j for j, y in enumerate(cols)}
    for i, x in enumerate(rows):
        j = col_of.get(x)
        if j is not None:
            shared = min(res_a[i], res_b[j])
            plan[i, j] = shared
            res_a[i] -= shared
            res_b[j] -= shared
    i = j = 0
    while i < len(rows) and j < len(cols):
        if res_a[i] <= 0.0:
            i += 1
            continue
        if res_b[j] <= 0.0:
            j += 1
            continue
        moved = min(res_a[i], res_b[j])
        plan[i, j] += moved
        res_a[i] -= moved
        res_b[j] -= moved
    return Coupling(mu.space, rows, cols, plan)
