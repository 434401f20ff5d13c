"""Euclidean projection of a point onto the convex hull of a finite point set.

Uses Wolfe's minimum-norm-point algorithm on the translated set
``{p_j - v}``: an active-set method that keeps an affinely independent
corral of vertices, solves the affine least-norm problem over it, and walks
back toward the simplex whenever a weight would turn negative. It is exact
up to rounding for small dense problems like the 32-vertex hull here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KKT_TOL = 1e-9
MAX_ITER = 100_000


class ProjectionError(RuntimeError):
    """The solver hit its iteration cap without meeting the KKT tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (KKT residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class HullProjection:
    """Closest hull point to a query and its barycentric weights."""

    distance: float
    nearest_point: np.ndarray
    weights: np.ndarray
    kkt_residual: float
    iterations: int

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.weights > 0)

    def __iter__(self):
        # allows ``distance, point, weights = project(...)``
        return iter((self.distance, self.nearest_point, self.weights))


def _affine_min(points: np.ndarray) -> np.ndarray:
    """Weights a with sum(a) = 1 minimizing ||a @ points||."""
    k = points.shape[0]
    gram = points @ points.T
    system = np.zeros((k + 1, k + 1))
    system[:k, :k] = gram
    system[:k, k] = 1.0
    system[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol = np.linalg.lstsq(system, rhs, rcond=None)[0]
    return sol[:k]


def kkt_residual(shifted: np.ndarray, weights: np.ndarray) -> float:
    """Violation of the optimality conditions of min ||weights @ shifted||^2/2
    over the probability simplex."""
    x = weights @ shifted
    grad = shifted @ x
    mu = float(weights @ grad)
    active = weights > 0
    stationarity = float(np.max(np.abs(grad[active] - mu))) if active.any() else 0.0
    dual = float(np.max(np.maximum(0.0, mu - grad)))
    simplex = abs(float(weights.sum()) - 1.0) + float(np.max(np.maximum(0.0, -weights)))
    return max(stationarity, dual, simplex)


def project_onto_hull(
    point: np.ndarray,
    vertices: np.ndarray,
    *,
    tol: float = KKT_TOL,
    max_iter: int = MAX_ITER,
) -> HullProjection:
    """Project ``point`` onto ``conv(vertices)``.

    Args:
        point: Query point, shape ``(d,)``.
        vertices: Hull generators, shape ``(m, d)``.
        tol: Required KKT residual.
        max_iter: Cap on outer plus inner iterations.

    Raises:
        ProjectionError: if the residual is still above ``tol`` at the cap.
    """
    v = np.asarray(point, dtype=float)
    verts = np.asarray(vertices, dtype=float)
    shifted = verts - v
    m = shifted.shape[0]
    scale = max(1.0, float(np.max(np.sum(shifted**2, axis=1))))
    eps = 1e-14

    start = int(np.argmin(np.sum(shifted**2, axis=1)))
    corral = [start]
    lam = np.array([1.0])
    x = shifted[start].copy()
    iterations = 0

    while iterations < max_iter:
        iterations += 1
        grad = shifted @ x
        j = int(np.argmin(grad))
        if float(x @ x) - grad[j] <= 1e-14 * scale or j in corral:
            break
        corral.append(j)
        lam = np.append(lam, 0.0)
        while iterations < max_iter:
            iterations += 1
            alpha = _affine_min(shifted[corral])
            if np.all(alpha > eps):
                lam = alpha
                break
            step = lam - alpha
            blocked = (alpha <= eps) & (step > 0)
            theta = float(np.min(lam[blocked] / step[blocked])) if blocked.any() else 1.0
            lam = lam + theta * (alpha - lam)
            keep = lam > eps
            corral = [c for c, k in zip(corral, keep) if k]
            lam = lam[keep] / lam[keep].sum()
        x = lam @ shifted[corral]

    weights = np.zeros(m)
    weights[corral] = lam
    residual = kkt_residual(shifted, weights)
    if residual > tol:
        raise ProjectionError("hull projection did not converge", residual)
    nearest = weights @ verts
    return HullProjection(
        distance=float(np.linalg.norm(nearest - v)),
        nearest_point=nearest,
        weights=weights,
        kkt_residual=residual,
        iterations=iterations,
    )
