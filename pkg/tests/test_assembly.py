import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from mhfem.assembly import (CoefficientField, DirichletMap, assemble_load, assemble_mass,
                            assemble_stiffness, l2_norm_on_mesh, p1_at_quadrature)
from mhfem.majorant import FRIEDRICHS_UNIT_SQUARE
from mhfem.mesh import build_uniform_mesh, mesh_from_arrays
from mhfem.quadrature import conical_rule, rule_for_degree

ONE = CoefficientField.constant(1.0)


@pytest.fixture(scope="module")
def unit_triangle():
    return mesh_from_arrays([[0, 0], [1, 0], [0, 1]], [[0, 1, 2]])


def test_element_stiffness(unit_triangle):
    K = assemble_stiffness(unit_triangle, ONE).toarray()
    expected = [[1, -0.5, -0.5], [-0.5, 0.5, 0], [-0.5, 0, 0.5]]
    np.testing.assert_allclose(K, expected, atol=1e-15)


def test_element_mass(unit_triangle):
    M = assemble_mass(unit_triangle, ONE).toarray()
    np.testing.assert_allclose(M, (0.5 / 12) * np.array([[2, 1, 1], [1, 2, 1], [1, 1, 2]]))


@pytest.mark.parametrize("n", [1, 3, 8])
def test_stiffness_rows_sum_to_zero(n):
    K = assemble_stiffness(build_uniform_mesh(n), CoefficientField.constant(1.7))
    assert np.abs(K.sum(axis=1)).max() < 1e-12


@pytest.mark.parametrize("sigma", [1.0, 0.3, 2.5])
def test_mass_total(sigma):
    M = assemble_mass(build_uniform_mesh(5), CoefficientField.constant(sigma))
    assert abs(M.sum() - sigma) < 1e-13


def test_exact_symmetry_and_definiteness():
    m = build_uniform_mesh(3)
    d = DirichletMap.from_mesh(m)
    assert d.n_dofs == 4
    for A in (assemble_stiffness(m, ONE, d), assemble_mass(m, ONE, d)):
        dense = A.toarray()
        assert np.array_equal(dense, dense.T)
        assert np.linalg.eigvalsh(dense).min() > 0


def test_variable_coefficient_matches_constant():
    m = build_uniform_mesh(4)
    var = CoefficientField(lambda x, y: np.full(np.shape(x), 2.0), 2.0, 2.0)
    const = CoefficientField.constant(2.0)
    for asm in (assemble_stiffness, assemble_mass):
        diff = asm(m, var) - asm(m, const)
        assert abs(diff).max() < 1e-13


def test_variable_mass_by_quadrature():
    # entries sum to the integral of sigma = 1 + x
    m = build_uniform_mesh(2)
    sigma = CoefficientField(lambda x, y: 1.0 + x, 1.0, 2.0)
    M = assemble_mass(m, sigma).toarray()
    assert abs(M.sum() - 1.5) < 1e-13


@pytest.mark.parametrize("lower, upper", [(0.0, 1.0), (-1.0, 1.0), (2.0, 1.0)])
def test_coefficient_bounds_rejected(lower, upper):
    with pytest.raises(ValueError):
        CoefficientField(1.0, lower, upper)


def test_constant_coefficient_must_be_positive():
    with pytest.raises(ValueError):
        CoefficientField.constant(0.0)


def test_zero_load():
    m = build_uniform_mesh(3)
    b = assemble_load(m, lambda x, y: np.zeros_like(x), dmap=DirichletMap.from_mesh(m))
    assert np.all(b == 0.0)


def test_unit_load_is_lumped_area():
    m = build_uniform_mesh(3)
    b = assemble_load(m, lambda x, y: np.ones_like(x))
    valence = np.bincount(m.triangles.ravel(), minlength=m.n_nodes)
    np.testing.assert_allclose(b, valence * (1.0 / 18) / 3, rtol=1e-14)
    d = DirichletMap.from_mesh(m)
    np.testing.assert_allclose(b[d.interior], 1.0 / 9.0, rtol=1e-14)


def test_load_against_fine_rule():
    m = build_uniform_mesh(9)
    s = lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y)
    b = assemble_load(m, s, rule_for_degree(5))
    oracle = assemble_load(m, s, conical_rule(10))
    assert np.abs(b - oracle).max() / np.abs(oracle).max() < 1e-6


def test_l2_norms():
    m = build_uniform_mesh(9)
    rule = rule_for_degree(5)
    assert abs(l2_norm_on_mesh(lambda p: np.ones(p.shape[:2]), m, rule) - 1.0) < 1e-14
    sinsin = lambda p: np.sin(np.pi * p[..., 0]) * np.sin(np.pi * p[..., 1])
    assert abs(l2_norm_on_mesh(sinsin, m, rule) - 0.5) < 1e-8
    assert abs(l2_norm_on_mesh(lambda p: p[..., 0], m, rule) - 1 / np.sqrt(3)) < 1e-14


def test_p1_interpolation_exact_for_linear():
    m = build_uniform_mesh(4)
    rule = rule_for_degree(5)
    u = 2.0 * m.nodes[:, 0] - 3.0 * m.nodes[:, 1] + 0.5
    pts = rule.physical_points(m.vertex_coords)
    np.testing.assert_allclose(p1_at_quadrature(m, u, rule),
                               2 * pts[..., 0] - 3 * pts[..., 1] + 0.5, atol=1e-14)


def test_dirichlet_extend_restrict():
    m = build_uniform_mesh(4)
    d = DirichletMap.from_mesh(m)
    assert d.n_dofs == 9
    u = np.arange(1, 10, dtype=float)
    full = d.extend(u)
    assert np.all(full[m.boundary_node_flags] == 0)
    np.testing.assert_array_equal(full[d.interior], u)


_FRIEDRICHS = {}


def _system(n):
    if n not in _FRIEDRICHS:
        m = build_uniform_mesh(n)
        d = DirichletMap.from_mesh(m)
        _FRIEDRICHS[n] = (assemble_stiffness(m, ONE, d), assemble_mass(m, ONE, d))
    return _FRIEDRICHS[n]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 6, 9]), st.data())
def test_discrete_friedrichs_rayleigh(n, data):
    K, M = _system(n)
    v = data.draw(arrays(np.float64, K.shape[0],
                         elements=st.floats(-1, 1, allow_nan=False, allow_infinity=False)))
    if np.linalg.norm(v) < 1e-6:
        return
    assert v @ (K @ v) >= (v @ (M @ v)) / FRIEDRICHS_UNIT_SQUARE**2 * (1 - 1e-12)


@pytest.mark.parametrize("n", [2, 5, 12])
def test_discrete_friedrichs_eigenvalue(n):
    K, M = _system(n)
    lam = sla.eigh(K.toarray(), M.toarray(), eigvals_only=True)[0]
    assert lam >= 2 * np.pi**2
