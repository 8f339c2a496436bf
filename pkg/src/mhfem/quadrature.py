"""Quadrature rules on triangles, stored in barycentric coordinates.

Weights are normalized to sum to one, so an integral over a triangle ``T``
is ``|T| * sum(w_q * f(x_q))``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import ceil, sqrt

import numpy as np


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    points: np.ndarray  # (Q, 3) barycentric coordinates
    weights: np.ndarray  # (Q,), sum to 1
    exactness_degree: int

    def __len__(self) -> int:
        return len(self.weights)

    def physical_points(self, vertex_coords: np.ndarray) -> np.ndarray:
        """Map to physical points, ``(T, 3, 2) -> (T, Q, 2)``."""
        return np.einsum("qi,tid->tqd", self.points, vertex_coords)


def _centroid_rule() -> QuadratureRule:
    return QuadratureRule(np.full((1, 3), 1.0 / 3.0), np.ones(1), 1)


def _three_point_rule() -> QuadratureRule:
    a, b = 2.0 / 3.0, 1.0 / 6.0
    pts = np.array([[a, b, b], [b, a, b], [b, b, a]])
    return QuadratureRule(pts, np.full(3, 1.0 / 3.0), 2)


def _seven_point_rule() -> QuadratureRule:
    """Radon's symmetric 7-point rule, exact for degree 5."""
    r = sqrt(15.0)
    a1, a2 = (6.0 - r) / 21.0, (6.0 + r) / 21.0
    b1, b2 = 1.0 - 2.0 * a1, 1.0 - 2.0 * a2
    w1, w2 = (155.0 - r) / 1200.0, (155.0 + r) / 1200.0
    pts = np.array([
        [1 / 3, 1 / 3, 1 / 3],
        [b1, a1, a1], [a1, b1, a1], [a1, a1, b1],
        [b2, a2, a2], [a2, b2, a2], [a2, a2, b2],
    ])
    return QuadratureRule(pts, np.array([9.0 / 40.0, w1, w1, w1, w2, w2, w2]), 5)


def conical_rule(degree: int) -> QuadratureRule:
    """Collapsed Gauss-Legendre product rule of arbitrary exactness."""
    if degree < 0:
        raise ValueError("degree must be non-negative")
    m = max(1, ceil((degree + 2) / 2))
    x, w = np.polynomial.legendre.leggauss(m)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    u, v = np.meshgrid(x, x, indexing="ij")
    wu, wv = np.meshgrid(w, w, indexing="ij")
    # Duffy map (u, v) -> (u, v(1-u)) with Jacobian (1-u)
    px = u.ravel()
    py = (v * (1.0 - u)).ravel()
    weights = 2.0 * (wu * wv * (1.0 - u)).ravel()
    pts = np.column_stack([1.0 - px - py, px, py])
    return QuadratureRule(pts, weights, degree)


@lru_cache(maxsize=None)
def rule_for_degree(degree: int = 5) -> QuadratureRule:
    """Cheapest available rule integrating polynomials of ``degree`` exactly."""
    if degree <= 1:
        return _centroid_rule()
    if degree == 2:
        return _three_point_rule()
    if degree <= 5:
        return _seven_point_rule()
    return conical_rule(degree)


DEFAULT_DEGREE = 5
