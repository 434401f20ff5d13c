"""Realism and quantum result vectors, and the violation statistics.

A result vector holds six line products in the order
``(row1, row2, row3, col1, col2, col3)``. The realistic, non-contextual
vectors are those produced by filling the square with fixed +-1 values;
their convex hull is the set of averages any such model can produce.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .projection import HullProjection, project_onto_hull
from .qsim import Counts

# triples of line products with an even / odd number of -1 cells behind them
EVEN_TRIPLES = ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))
ODD_TRIPLES = ((-1, -1, -1), (-1, 1, 1), (1, -1, 1), (1, 1, -1))

QUANTUM_PREDICTION = (1, 1, 1, 1, 1, -1)
REALISM_BOUND = 4
DISTANCE_TOL = 1e-9


def _concat(first: Sequence[Sequence[int]], second: Sequence[Sequence[int]]) -> tuple:
    return tuple(tuple(a) + tuple(b) for a in first for b in second)


@dataclass(frozen=True)
class VectorSets:
    """The 32 realism and 32 quantum result vectors as ``(32, 6)`` int arrays."""

    realism: np.ndarray
    quantum: np.ndarray

    def realism_tuples(self) -> list[tuple[int, ...]]:
        return [tuple(int(c) for c in r) for r in self.realism]

    def quantum_tuples(self) -> list[tuple[int, ...]]:
        return [tuple(int(c) for c in q) for q in self.quantum]


@lru_cache(maxsize=1)
def vector_sets() -> VectorSets:
    """Build both sets from the even/odd triple rule.

    Order: even+even, odd+odd for realism; even+odd, odd+even for quantum,
    each as a row-major loop over the triples in ``EVEN_TRIPLES`` and
    ``ODD_TRIPLES`` order.
    """
    realism = _concat(EVEN_TRIPLES, EVEN_TRIPLES) + _concat(ODD_TRIPLES, ODD_TRIPLES)
    quantum = _concat(EVEN_TRIPLES, ODD_TRIPLES) + _concat(ODD_TRIPLES, EVEN_TRIPLES)
    r = np.array(realism, dtype=np.int64)
    q = np.array(quantum, dtype=np.int64)
    r.setflags(write=False)
    q.setflags(write=False)
    return VectorSets(r, q)


def square_result_vector(square: np.ndarray) -> tuple[int, ...]:
    """Line products of a 3x3 grid of +-1 values."""
    s = np.asarray(square, dtype=np.int64).reshape(3, 3)
    return tuple(int(v) for v in np.prod(s, axis=1)) + tuple(int(v) for v in np.prod(s, axis=0))


def enumerate_sign_squares() -> list[tuple[np.ndarray, tuple[int, ...]]]:
    """All 512 assignments of +-1 to the nine cells with their result vectors."""
    out = []
    for entries in itertools.product((1, -1), repeat=9):
        grid = np.array(entries, dtype=np.int64).reshape(3, 3)
        out.append((grid, square_result_vector(grid)))
    return out


# -- statistics ---------------------------------------------------------------


def as_result_vector(values: Sequence[float]) -> np.ndarray:
    v = np.asarray(values, dtype=float).reshape(-1)
    if v.shape != (6,):
        raise ValueError(f"a result vector has 6 coefficients, got {v.shape[0]}")
    if np.any(np.abs(v) > 1 + 1e-12):
        raise ValueError("result vector coefficients must lie in [-1, 1]")
    return v


def line_statistics(counts: Counts) -> tuple[float, float]:
    """Mean of a +-1 outcome and the standard deviation of that mean.

    ``sigma = 2 sqrt(p (1 - p) / n)`` with ``p`` the observed +1 frequency,
    treating the runs as independent.
    """
    if counts.shots < 1:
        raise ValueError("counts need at least one shot")
    plus, minus = counts.plus_minus()
    n = counts.shots
    p = plus / n
    return (plus - minus) / n, 2.0 * math.sqrt(p * (1.0 - p) / n)


def result_from_counts(counts: Sequence[Counts]) -> tuple[np.ndarray, np.ndarray]:
    """Result and sigma vectors from six line Counts in result-vector order."""
    if len(counts) != 6:
        raise ValueError(f"need six Counts (rows then columns), got {len(counts)}")
    stats = [line_statistics(c) for c in counts]
    return (
        np.array([m for m, _ in stats]),
        np.array([s for _, s in stats]),
    )


def rule_of_three_bounds(counts: Sequence[Counts]) -> list[float | None]:
    """``3/n`` where every run gave the same outcome, else ``None``."""
    out = []
    for c in counts:
        plus, minus = c.plus_minus()
        out.append(3.0 / c.shots if plus == 0 or minus == 0 else None)
    return out


def overlaps(v: Sequence[float]) -> np.ndarray:
    return vector_sets().quantum @ np.asarray(v, dtype=float)


def max_overlap(v: Sequence[float]) -> tuple[float, int]:
    """Largest ``v . q_j`` over the quantum vectors, lowest index on ties.

    Any realistic non-contextual model keeps this at or below 4.
    """
    ov = overlaps(v)
    best = float(np.max(ov))
    # exact ties on integer inputs; tolerate rounding for measured data
    idx = int(np.flatnonzero(ov >= best - 1e-12)[0])
    return best, idx


def hull_distance(v: Sequence[float]) -> HullProjection:
    """Projection of ``v`` onto the convex hull of the realism vectors."""
    return project_onto_hull(np.asarray(v, dtype=float), vector_sets().realism)


def sigma_radius(sigmas: Sequence[float]) -> float:
    s = np.asarray(sigmas, dtype=float)
    return float(np.sqrt(s @ s))


def violation_score(
    v: Sequence[float], sigmas: Sequence[float], projection: HullProjection | None = None
) -> tuple[float, bool]:
    """Hull distance in units of the sigma-sphere radius, and the verdict.

    The score is ``inf`` when the radius is zero but the point is outside.
    """
    if projection is None:
        projection = hull_distance(v)
    distance = projection.distance
    violation = distance > DISTANCE_TOL
    radius = sigma_radius(sigmas)
    if not violation:
        return 0.0, False
    if radius == 0.0:
        return math.inf, True
    return distance / radius, True


def facet_distance(v: Sequence[float], q: Sequence[int] = QUANTUM_PREDICTION) -> float:
    """Distance from ``v`` to the supporting hyperplane ``x . q = 4``."""
    qv = np.asarray(q, dtype=float)
    return (float(np.asarray(v, dtype=float) @ qv) - REALISM_BOUND) / float(np.linalg.norm(qv))


def round_sig(x: float, digits: int = 3) -> float:
    if x == 0 or not math.isfinite(x):
        return x
    return round(x, digits - 1 - int(math.floor(math.log10(abs(x)))))


@dataclass
class AnalysisReport:
    result_vector: np.ndarray
    sigma_vector: np.ndarray
    overlaps: np.ndarray
    max_overlap: float
    max_overlap_index: int
    hull_distance: float
    nearest_point: np.ndarray
    hull_weights: np.ndarray
    kkt_residual: float
    sigma_radius: float
    score: float
    violation: bool
    metadata: dict = field(default_factory=dict)

    @property
    def max_overlap_vector(self) -> tuple[int, ...]:
        return tuple(int(c) for c in vector_sets().quantum[self.max_overlap_index])

    @property
    def verdict(self) -> str:
        return "violation" if self.violation else "no violation"

    @property
    def score_3sf(self) -> float:
        return round_sig(self.score, 3)

    def facet_vertices(self, tol: float = 1e-9) -> list[int]:
        """Indices of realism vectors carrying weight in the projection."""
        return [int(i) for i in np.flatnonzero(self.hull_weights > tol)]


def analyze(
    v: Sequence[float], sigmas: Sequence[float], metadata: dict | None = None
) -> AnalysisReport:
    """Run every statistic on a result vector and its sigmas."""
    vec = as_result_vector(v)
    sig = np.asarray(sigmas, dtype=float).reshape(-1)
    if sig.shape != (6,) or np.any(sig < 0):
        raise ValueError("sigma vector must have six non-negative entries")
    ov = overlaps(vec)
    best, idx = max_overlap(vec)
    proj = hull_distance(vec)
    score, violation = violation_score(vec, sig, proj)
    return AnalysisReport(
        result_vector=vec,
        sigma_vector=sig,
        overlaps=ov,
        max_overlap=best,
        max_overlap_index=idx,
        hull_distance=proj.distance,
        nearest_point=proj.nearest_point,
        hull_weights=proj.weights,
        kkt_residual=proj.kkt_residual,
        sigma_radius=sigma_radius(sig),
        score=score,
        violation=violation,
        metadata=dict(metadata or {}),
    )


def analyze_counts(counts: Sequence[Counts], metadata: dict | None = None) -> AnalysisReport:
    v, s = result_from_counts(counts)
    meta = dict(metadata or {})
    meta.setdefault("shots", [c.shots for c in counts])
    meta.setdefault("rule_of_three_upper_bounds", rule_of_three_bounds(counts))
    return analyze(v, s, meta)
