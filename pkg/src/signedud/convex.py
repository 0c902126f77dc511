"""Arithmetic means of points converging to a point of a convex hull.

Finite-dimensional real vector spaces with the Euclidean norm.  A convex
combination ``x = sum_i w_i v_i`` is treated as the probability measure
``sum_i w_i delta_{v_i}``; the greedy finite sequence for that measure gives
``||mean_N - x|| <= (2R / N) (1 + C(m))`` for all ``N``.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .finite import c_constant, generate_finite, iter_finite
from .measures import IDENTITY_TOL, FiniteSignedMeasure, _frozen
from .merge import MergedSequence


@dataclass(frozen=True, eq=False)
class ConvexTarget:
    """Support points ``(m, d)``, positive weights, their barycenter and a radius."""

    points: np.ndarray
    weights: np.ndarray
    target: np.ndarray
    radius: float

    def __post_init__(self):
        pts = _frozen(self.points)
        w = _frozen(self.weights)
        x = _frozen(self.target)
        if pts.ndim != 2 or w.shape != (pts.shape[0],) or x.shape != (pts.shape[1],):
            raise ValidationError("points must be (m, d), weights (m,), target (d,)")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > IDENTITY_TOL:
            raise ValidationError("weights must be positive and sum to 1")
        scale = max(1.0, float(np.abs(pts).max()))
        if np.abs(w @ pts - x).max() > IDENTITY_TOL * scale:
            raise ValidationError("target is not the weighted sum of the points")
        norms = np.linalg.norm(pts, axis=1)
        if np.any(norms > self.radius * (1 + 1e-12)):
            raise ValidationError("radius smaller than the largest point norm")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "target", x)
        object.__setattr__(self, "radius", float(self.radius))

    @classmethod
    def from_combination(cls, points, weights, radius: float | None = None) -> "ConvexTarget":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        w = np.asarray(weights, dtype=float)
        if radius is None:
            radius = float(np.linalg.norm(pts, axis=1).max())
        return cls(pts, w, w @ pts, radius)

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def measure(self) -> FiniteSignedMeasure:
        return FiniteSignedMeasure(range(self.m), self.weights)

    def bound(self, N):
        """``(2R / N) (1 + C(m))``."""
        return 2.0 * self.radius / np.asarray(N, dtype=float) * (1 + c_constant(self.m))

    def to_dict(self) -> dict:
        return {
            "points": self.points.tolist(),
            "weights": self.weights.tolist(),
            "target": self.target.tolist(),
            "radius": self.radius,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConvexTarget":
        return cls(d["points"], d["weights"], d["target"], d["radius"])


def cesaro_approximate(ct: ConvexTarget, N: int) -> tuple[np.ndarray, float]:
    """``N`` support points whose mean approximates ``ct.target``, and the error."""
    seq = generate_finite(ct.measure, N)
    pts = ct.points[seq.indices]
    return pts, float(np.linalg.norm(pts.mean(axis=0) - ct.target))


def cesaro_error_trace(ct: ConvexTarget, N: int) -> np.ndarray:
    """``||mean_n - x||`` for every ``n = 1..N``."""
    seq = generate_finite(ct.measure, N)
    means = np.cumsum(ct.points[seq.indices], axis=0) / np.arange(1, N + 1)[:, None]
    return np.linalg.norm(means - ct.target, axis=1)


def cesaro_limit_stream(
    combos: Callable[[int], ConvexTarget] | Sequence[ConvexTarget],
    N_eval: Sequence[int],
    limit,
) -> list[tuple[int, float]]:
    """Errors ``||mean_N - limit||`` of the block-merged sequence for combos ``j = 1, 2, ...``.

    ``combos`` yields convex combinations whose barycenters converge in norm
    to ``limit``; block ``j`` of the merged sequence follows the greedy
    sequence of combination ``j`` and block lengths use ``C_j = C(m_j)``.
    """
    get = combos if callable(combos) else (lambda j: combos[j - 1])
    limit = np.asarray(limit, dtype=float)
    cache: dict[int, ConvexTarget] = {}

    def combo(j: int) -> ConvexTarget:
        if j not in cache:
            if not callable(combos) and j > len(combos):
                raise ValidationError(f"only {len(combos)} combinations supplied")
            ct = get(j)
            if ct.dim != limit.size:
                raise ValidationError(f"combination {j} has dimension {ct.dim}, limit has {limit.size}")
            cache[j] = ct
        return cache[j]

    def source(j: int):
        ct = combo(j)
        return (ct.points[i] for i in iter_finite(ct.measure))

    def constant(j: int) -> float:
        if not callable(combos) and j > len(combos):
            return 0.0  # only feeds the length of the last supplied block
        return float(c_constant(combo(j).m))

    N_eval = sorted(int(n) for n in N_eval)
    if not N_eval or N_eval[0] < 1:
        raise ValidationError("evaluation lengths must be positive")
    ms = MergedSequence(source, constant)
    pts = np.asarray(ms.prefix(N_eval[-1]))
    csum = np.cumsum(pts, axis=0)
    return [(n, float(np.linalg.norm(csum[n - 1] / n - limit))) for n in N_eval]


def barycentric_coordinates(target, vertices) -> np.ndarray:
    """Solve ``sum_i w_i v_i = target``, ``sum_i w_i = 1`` for ``d + 1`` vertices in ``R^d``."""
    V = np.atleast_2d(np.asarray(vertices, dtype=float))
    x = np.asarray(target, dtype=float)
    m, d = V.shape
    if m != d + 1 or x.shape != (d,):
        raise ValidationError(f"need d + 1 = {d + 1} vertices in R^{d}, got {m}")
    A = np.vstack([V.T, np.ones(m)])
    if np.linalg.matrix_rank(A) < m:
        raise ValidationError("vertices are affinely dependent (degenerate simplex)")
    return np.linalg.solve(A, np.append(x, 1.0))


def simplex_combination(target, vertices, tol: float = 1e-10) -> ConvexTarget:
    """Convex combination of simplex vertices representing ``target``.

    Vertices with zero barycentric weight are dropped from the support.
    """
    w = barycentric_coordinates(target, vertices)
    if np.any(w < -tol):
        raise ValidationError(f"target lies outside the simplex (coordinates {w.tolist()})")
    V = np.atleast_2d(np.asarray(vertices, dtype=float))
    keep = w > tol
    w = np.where(keep, w, 0.0)
    w = w[keep] / w[keep].sum()
    radius = float(np.linalg.norm(V, axis=1).max())
    return ConvexTarget(V[keep], w, w @ V[keep], radius)

