"""Uniform triangulations of the unit square.

Each of the ``n x n`` square cells is split by its lower-left to upper-right
diagonal into two counterclockwise triangles. Nodes are numbered
lexicographically, ``index = i + j*(n+1)`` for the node at ``(i/n, j/n)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

BOUNDARY = -1


@dataclass(frozen=True, eq=False)
class Mesh:
    """Immutable triangle mesh with edge connectivity.

    Attributes
    ----------
    nodes : (V, 2) float array
    triangles : (T, 3) int array, counterclockwise vertex order
    edge_nodes : (E, 2) int array, sorted node pair per edge
    edge_tris : (E, 2) int array, ``(left, right)``; ``right`` is
        :data:`BOUNDARY` for edges on the boundary
    edge_normals : (E, 2) float array, unit normal pointing from the left
        triangle into the right one (outward on the boundary)
    tri_edges : (T, 3) int array, local edge ``i`` is opposite vertex ``i``
    tri_edge_signs : (T, 3) float array, ``+1`` where the stored edge normal
        is the outward normal of the triangle, ``-1`` otherwise
    cells_per_side : int
    boundary_node_flags : (V,) bool array
    """

    nodes: np.ndarray
    triangles: np.ndarray
    edge_nodes: np.ndarray
    edge_tris: np.ndarray
    edge_normals: np.ndarray
    tri_edges: np.ndarray
    tri_edge_signs: np.ndarray
    cells_per_side: int
    boundary_node_flags: np.ndarray = field(repr=False)

    @property
    def h(self) -> float:
        return 1.0 / self.cells_per_side

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def n_edges(self) -> int:
        return len(self.edge_nodes)

    @cached_property
    def vertex_coords(self) -> np.ndarray:
        """(T, 3, 2) coordinates of the triangle vertices."""
        return self.nodes[self.triangles]

    @cached_property
    def areas(self) -> np.ndarray:
        p = self.vertex_coords
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    @cached_property
    def centroids(self) -> np.ndarray:
        return self.vertex_coords.mean(axis=1)

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        d = self.nodes[self.edge_nodes[:, 1]] - self.nodes[self.edge_nodes[:, 0]]
        return np.hypot(d[:, 0], d[:, 1])

    @cached_property
    def edge_midpoints(self) -> np.ndarray:
        return 0.5 * (self.nodes[self.edge_nodes[:, 0]] + self.nodes[self.edge_nodes[:, 1]])

    @cached_property
    def boundary_edge_flags(self) -> np.ndarray:
        return self.edge_tris[:, 1] == BOUNDARY

    @cached_property
    def basis_gradients(self) -> np.ndarray:
        """(T, 3, 2) constant gradients of the three P1 hat functions."""
        p = self.vertex_coords
        # grad(lambda_i) = rot90(p_{i+2} - p_{i+1}) / (2|T|), counterclockwise order
        e = np.roll(p, -2, axis=1) - np.roll(p, -1, axis=1)
        grads = np.stack([-e[..., 1], e[..., 0]], axis=-1)
        return grads / (2.0 * self.areas)[:, None, None]


def _connectivity(nodes: np.ndarray, triangles: np.ndarray):
    n_tri = len(triangles)
    # local edge i joins vertices i+1 and i+2, i.e. it is opposite vertex i
    local = np.stack(
        [triangles[:, [1, 2]], triangles[:, [2, 0]], triangles[:, [0, 1]]], axis=1
    ).reshape(-1, 2)
    local.sort(axis=1)
    edge_nodes, inverse = np.unique(local, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    n_edges = len(edge_nodes)
    tri_of_local = np.repeat(np.arange(n_tri), 3)

    order = np.argsort(inverse, kind="stable")
    counts = np.bincount(inverse, minlength=n_edges)
    if counts.max() > 2:
        raise ValueError("non-manifold triangulation: an edge has more than two triangles")
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    edge_tris = np.full((n_edges, 2), BOUNDARY, dtype=np.int64)
    edge_tris[:, 0] = tri_of_local[order[starts]]
    shared = counts == 2
    edge_tris[shared, 1] = tri_of_local[order[starts[shared] + 1]]

    a = nodes[edge_nodes[:, 0]]
    b = nodes[edge_nodes[:, 1]]
    d = b - a
    normals = np.stack([d[:, 1], -d[:, 0]], axis=1)
    normals /= np.hypot(normals[:, 0], normals[:, 1])[:, None]
    centroids = nodes[triangles].mean(axis=1)
    outward = np.einsum("ij,ij->i", normals, 0.5 * (a + b) - centroids[edge_tris[:, 0]])
    normals[outward < 0] *= -1.0

    tri_edges = inverse.reshape(n_tri, 3)
    signs = np.where(edge_tris[tri_edges, 0] == np.arange(n_tri)[:, None], 1.0, -1.0)
    return edge_nodes, edge_tris, normals, tri_edges, signs


def build_uniform_mesh(n: int) -> Mesh:
    """Triangulate the unit square with ``n`` cells per side."""
    if int(n) != n or n < 1:
        raise ValueError(f"cells per side must be a positive integer, got {n!r}")
    n = int(n)
    ticks = np.linspace(0.0, 1.0, n + 1)
    x, y = np.meshgrid(ticks, ticks)
    nodes = np.column_stack([x.ravel(), y.ravel()])

    i, j = np.meshgrid(np.arange(n), np.arange(n))
    ll = (i + j * (n + 1)).ravel()
    lr, ul = ll + 1, ll + n + 1
    ur = ul + 1
    triangles = np.empty((2 * n * n, 3), dtype=np.int64)
    triangles[0::2] = np.column_stack([ll, lr, ur])
    triangles[1::2] = np.column_stack([ll, ur, ul])

    on_boundary = (
        np.isclose(nodes[:, 0], 0.0) | np.isclose(nodes[:, 0], 1.0)
        | np.isclose(nodes[:, 1], 0.0) | np.isclose(nodes[:, 1], 1.0)
    )
    return mesh_from_arrays(nodes, triangles, on_boundary, cells_per_side=n)


def mesh_from_arrays(nodes, triangles, boundary_node_flags=None, cells_per_side: int = 0) -> Mesh:
    """Mesh from raw arrays; triangles must be counterclockwise.

    Without flags, a node is on the boundary if it lies on a boundary edge.
    Used for small hand-built test meshes.
    """
    nodes = np.asarray(nodes, dtype=float)
    triangles = np.asarray(triangles, dtype=np.int64)
    p = nodes[triangles]
    d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
    if np.any(d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0] <= 0.0):
        raise ValueError("triangles must be counterclockwise and non-degenerate")
    edge_nodes, edge_tris, normals, tri_edges, signs = _connectivity(nodes, triangles)
    if boundary_node_flags is None:
        boundary_node_flags = np.zeros(len(nodes), dtype=bool)
        boundary_node_flags[edge_nodes[edge_tris[:, 1] == BOUNDARY].ravel()] = True
    return Mesh(
        nodes=nodes,
        triangles=triangles,
        edge_nodes=edge_nodes,
        edge_tris=edge_tris,
        edge_normals=normals,
        tri_edges=tri_edges,
        tri_edge_signs=signs,
        cells_per_side=cells_per_side,
        boundary_node_flags=np.asarray(boundary_node_flags, dtype=bool),
    )


def refine3(mesh: Mesh) -> Mesh:
    """Trisect every cell side: ``n`` cells per side become ``3n``."""
    return build_uniform_mesh(3 * mesh.cells_per_side)


def boundary_nodes(mesh: Mesh) -> np.ndarray:
    """Sorted indices of the nodes on the boundary of the unit square."""
    return np.flatnonzero(mesh.boundary_node_flags)
