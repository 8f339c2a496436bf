"""P1 finite element assembly with Dirichlet elimination."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
import scipy.sparse as sp

from .mesh import Mesh
from .quadrature import QuadratureRule, rule_for_degree, DEFAULT_DEGREE

Evaluator = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CoefficientField:
    """A material coefficient bounded away from zero.

    ``value`` is either a float or a callable ``(x1, x2) -> array``.
    """

    value: Union[float, Evaluator]
    lower_bound: float
    upper_bound: float

    def __post_init__(self):
        if not (0.0 < self.lower_bound <= self.upper_bound):
            raise ValueError(
                f"coefficient bounds must satisfy 0 < lower <= upper, got "
                f"({self.lower_bound}, {self.upper_bound})"
            )
        if self.is_constant and not (self.lower_bound <= self.value <= self.upper_bound):
            raise ValueError("constant coefficient lies outside its bounds")

    @classmethod
    def constant(cls, value: float) -> "CoefficientField":
        value = float(value)
        if value <= 0.0:
            raise ValueError(f"coefficient must be positive, got {value}")
        return cls(value, value, value)

    @property
    def is_constant(self) -> bool:
        return not callable(self.value)

    def __call__(self, x1, x2) -> np.ndarray:
        if self.is_constant:
            return np.full(np.shape(x1), self.value)
        return np.asarray(self.value(x1, x2), dtype=float)


@dataclass(frozen=True, eq=False)
class DirichletMap:
    """Bijection between interior nodes and unknowns."""

    interior: np.ndarray  # dof -> node
    node_to_dof: np.ndarray  # node -> dof, -1 on the boundary

    @classmethod
    def from_mesh(cls, mesh: Mesh) -> "DirichletMap":
        interior = np.flatnonzero(~mesh.boundary_node_flags)
        node_to_dof = np.full(mesh.n_nodes, -1, dtype=np.int64)
        node_to_dof[interior] = np.arange(len(interior))
        return cls(interior, node_to_dof)

    @property
    def n_dofs(self) -> int:
        return len(self.interior)

    @property
    def n_nodes(self) -> int:
        return len(self.node_to_dof)

    def restrict(self, A: sp.spmatrix) -> sp.csr_matrix:
        return A.tocsr()[self.interior][:, self.interior].tocsr()

    def extend(self, u: np.ndarray) -> np.ndarray:
        """Nodal vector with zero boundary values from a dof vector."""
        full = np.zeros(self.n_nodes)
        full[self.interior] = u
        return full


def _scatter(mesh: Mesh, local: np.ndarray) -> sp.csr_matrix:
    tri = mesh.triangles
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    n = mesh.n_nodes
    return sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def _element_average(mesh: Mesh, coef: CoefficientField, rule: QuadratureRule) -> np.ndarray:
    pts = rule.physical_points(mesh.vertex_coords)
    return coef(pts[..., 0], pts[..., 1]) @ rule.weights


def assemble_stiffness(mesh: Mesh, nu: CoefficientField, dmap: DirichletMap | None = None,
                       rule: QuadratureRule | None = None) -> sp.csr_matrix:
    """Weighted stiffness matrix ``int nu grad(phi_i).grad(phi_j)``.

    Without ``dmap`` the matrix over all nodes is returned.
    """
    G = mesh.basis_gradients
    if nu.is_constant:
        weight = nu.value * mesh.areas
    else:
        weight = _element_average(mesh, nu, rule or rule_for_degree(DEFAULT_DEGREE)) * mesh.areas
    local = weight[:, None, None] * np.einsum("tid,tjd->tij", G, G)
    A = _scatter(mesh, local)
    return dmap.restrict(A) if dmap is not None else A


_P1_MASS = (np.ones((3, 3)) + np.eye(3)) / 12.0


def assemble_mass(mesh: Mesh, sigma: CoefficientField, dmap: DirichletMap | None = None,
                  rule: QuadratureRule | None = None) -> sp.csr_matrix:
    """Weighted mass matrix ``int sigma phi_i phi_j``."""
    if sigma.is_constant:
        local = (sigma.value * mesh.areas)[:, None, None] * _P1_MASS
    else:
        rule = rule or rule_for_degree(DEFAULT_DEGREE)
        pts = rule.physical_points(mesh.vertex_coords)
        s = sigma(pts[..., 0], pts[..., 1]) * rule.weights
        local = mesh.areas[:, None, None] * np.einsum("tq,qi,qj->tij", s, rule.points, rule.points)
    A = _scatter(mesh, local)
    return dmap.restrict(A) if dmap is not None else A


def assemble_load(mesh: Mesh, s: Evaluator, rule: QuadratureRule | None = None,
                  dmap: DirichletMap | None = None) -> np.ndarray:
    """Load vector ``int s phi_j``, restricted to interior unknowns if ``dmap``."""
    rule = rule or rule_for_degree(DEFAULT_DEGREE)
    pts = rule.physical_points(mesh.vertex_coords)
    vals = np.asarray(s(pts[..., 0], pts[..., 1]), dtype=float)
    vals = np.broadcast_to(vals, pts.shape[:2])
    local = mesh.areas[:, None] * ((vals * rule.weights) @ rule.points)
    b = np.bincount(mesh.triangles.ravel(), weights=local.ravel(), minlength=mesh.n_nodes)
    return b[dmap.interior] if dmap is not None else b


def p1_at_quadrature(mesh: Mesh, nodal: np.ndarray, rule: QuadratureRule) -> np.ndarray:
    """Values of a P1 field at the quadrature points, shape ``(T, Q)``."""
    return nodal[mesh.triangles] @ rule.points.T


def p1_gradients(mesh: Mesh, nodal: np.ndarray) -> np.ndarray:
    """Elementwise constant gradient of a P1 field, shape ``(T, 2)``."""
    return np.einsum("ti,tid->td", nodal[mesh.triangles], mesh.basis_gradients)


def squared_norm_on_mesh(integrand: Callable[[np.ndarray], np.ndarray], mesh: Mesh,
                         rule: QuadratureRule) -> float:
    """``sum_T |T| sum_q w_q |integrand(x_q)|^2``.

    ``integrand`` receives the physical points ``(T, Q, 2)`` and returns
    scalar ``(T, Q)`` or vector ``(T, Q, d)`` values.
    """
    pts = rule.physical_points(mesh.vertex_coords)
    vals = np.asarray(integrand(pts), dtype=float)
    sq = vals ** 2
    if sq.ndim == 3:
        sq = sq.sum(axis=-1)
    sq = np.broadcast_to(sq, pts.shape[:2])
    return float(mesh.areas @ (sq @ rule.weights))


def l2_norm_on_mesh(integrand: Callable[[np.ndarray], np.ndarray], mesh: Mesh,
                    rule: QuadratureRule) -> float:
    return float(np.sqrt(squared_norm_on_mesh(integrand, mesh, rule)))
