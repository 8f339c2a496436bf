"""Lowest-order Raviart-Thomas reconstruction of averaged P1 fluxes."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import CoefficientField, p1_gradients
from .mesh import Mesh


@dataclass(frozen=True, eq=False)
class RT0FluxField:
    """``tau(x) = (a, b) + c x`` on each triangle.

    ``edge_fluxes`` are normal components with respect to the mesh's stored
    edge normals; ``coeffs`` holds ``(a, b, c)`` per triangle.
    """

    mesh: Mesh
    edge_fluxes: np.ndarray
    coeffs: np.ndarray

    @property
    def divergence(self) -> np.ndarray:
        """Elementwise constant divergence ``2c``."""
        return 2.0 * self.coeffs[:, 2]

    def at(self, points: np.ndarray) -> np.ndarray:
        """Evaluate on per-element points ``(T, Q, 2) -> (T, Q, 2)``."""
        ab = self.coeffs[:, None, :2]
        return ab + self.coeffs[:, None, 2:3] * points

    def normal_trace(self, element: int, edge: int) -> float:
        """Normal component on ``edge`` seen from ``element``, stored orientation."""
        m = self.mesh
        return float(rt0_evaluate(self, element, m.edge_midpoints[edge]) @ m.edge_normals[edge])


def average_normal_fluxes(mesh: Mesh, grad_field: np.ndarray,
                          nu: CoefficientField | None = None) -> np.ndarray:
    """Edge normal fluxes of ``nu * grad``, averaged with weight 1/2.

    Interior edges take the mean of the two adjacent elements; boundary edges
    use their single element.
    """
    grad_field = np.asarray(grad_field, dtype=float)
    left, right = mesh.edge_tris[:, 0], mesh.edge_tris[:, 1]
    n = mesh.edge_normals
    q_left = np.einsum("ed,ed->e", grad_field[left], n)
    interior = right >= 0
    q = q_left.copy()
    q[interior] = 0.5 * (q_left[interior]
                         + np.einsum("ed,ed->e", grad_field[right[interior]], n[interior]))
    if nu is not None:
        mid = mesh.edge_midpoints
        q = q * nu(mid[:, 0], mid[:, 1])
    return q


def rt0_from_edge_fluxes(mesh: Mesh, edge_fluxes: np.ndarray) -> RT0FluxField:
    """Per-element RT0 field matching the three edge normal fluxes."""
    edge_fluxes = np.asarray(edge_fluxes, dtype=float)
    if edge_fluxes.shape != (mesh.n_edges,):
        raise ValueError(f"expected {mesh.n_edges} edge fluxes, got {edge_fluxes.shape}")
    e = mesh.tri_edges
    n = mesh.edge_normals[e]  # (T, 3, 2)
    xn = np.einsum("tid,tid->ti", mesh.edge_midpoints[e], n)
    # x.n is constant along an edge, so one row per edge determines (a, b, c)
    A = np.concatenate([n, xn[..., None]], axis=-1)
    try:
        coeffs = np.linalg.solve(A, edge_fluxes[e][..., None])[..., 0]
    except np.linalg.LinAlgError as exc:
        raise ValueError("degenerate triangle in RT0 extension") from exc
    return RT0FluxField(mesh, edge_fluxes, coeffs)


def rt0_divergence(field: RT0FluxField, element: int) -> float:
    return float(2.0 * field.coeffs[element, 2])


def rt0_evaluate(field: RT0FluxField, element: int, point) -> np.ndarray:
    a, b, c = field.coeffs[element]
    return np.array([a, b]) + c * np.asarray(point, dtype=float)


def reconstruct_flux(mesh: Mesh, nodal: np.ndarray, nu: CoefficientField | None = None) -> RT0FluxField:
    """Averaged RT0 flux of ``nu * grad(eta)`` for a nodal P1 field ``eta``."""
    return rt0_from_edge_fluxes(mesh, average_normal_fluxes(mesh, p1_gradients(mesh, nodal), nu))
