from math import fsum, pi

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from mhfem import fourier
from mhfem.assembly import CoefficientField, DirichletMap, assemble_mass
from mhfem.fourier import (CoefficientPair, ProblemSpec, SeparableSource, harmonic,
                           harmonic_coefficients, parseval_defect, perp, remainder_EN,
                           time_fourier_coefficients)
from mhfem.mesh import build_uniform_mesh
from mhfem.problems import ex2_source_time, example1, example2, sinsin

vectors = arrays(np.float64, 7, elements=st.floats(-10, 10, allow_nan=False))


def _trapezoid_oracle(g, omega, k, samples=10**6):
    # periodic trapezoid rule: spectrally accurate for smooth periodic g
    T = 2 * pi / omega
    t = np.arange(samples) * (T / samples)
    gt = g(t)
    a0 = gt.mean()
    if k == 0:
        return a0
    return 2 * np.mean(gt * np.cos(k * omega * t)), 2 * np.mean(gt * np.sin(k * omega * t))


def test_cosine_coefficients():
    co = time_fourier_coefficients(np.cos, 1.0, 3)
    assert abs(co.a0) < 1e-14
    np.testing.assert_allclose(co.a_c, [1, 0, 0], atol=1e-13)
    np.testing.assert_allclose(co.a_s, 0, atol=1e-13)


def test_constant_coefficients():
    co = time_fourier_coefficients(lambda t: np.ones_like(t), 2.0, 4)
    assert abs(co.a0 - 1.0) < 1e-14
    assert np.abs(co.a_c).max() < 1e-13 and np.abs(co.a_s).max() < 1e-13


@pytest.mark.parametrize("kind, k", [("cos", 2), ("sin", 3), ("const", 0)])
def test_harmonic_coefficients_match_sampling(kind, k):
    g = harmonic(kind, k, 0.5)
    exact = harmonic_coefficients(g.harmonic, 6)
    sampled = time_fourier_coefficients(g, 0.5, 6)
    assert abs(exact.a0 - sampled.a0) < 1e-13
    np.testing.assert_allclose(exact.a_c, sampled.a_c, atol=1e-12)
    np.testing.assert_allclose(exact.a_s, sampled.a_s, atol=1e-12)


def test_example2_time_factor_against_oracle():
    g = ex2_source_time(1.0)
    co = time_fourier_coefficients(g, 1.0, 8)
    assert abs(co.a0 - _trapezoid_oracle(g, 1.0, 0)) < 1e-8
    for k in range(1, 9):
        c, s = _trapezoid_oracle(g, 1.0, k)
        assert abs(co.a_c[k - 1] - c) < 1e-8
        assert abs(co.a_s[k - 1] - s) < 1e-8


@pytest.mark.parametrize("samples", [15, 2, 30])
def test_rejects_too_few_samples(samples):
    with pytest.raises(ValueError):
        time_fourier_coefficients(np.cos, 1.0, 8, samples=samples)


def test_mode_lookup():
    co = harmonic_coefficients(("sin", 2), 3)
    assert co.mode(0) == (0.0, 0.0)
    assert co.mode(2) == (0.0, 1.0)
    assert co.mode(10) == (0.0, 0.0)


def test_perp_definition():
    e1 = np.array([1.0, 0.0])
    p = perp(CoefficientPair(e1, np.zeros(2)))
    np.testing.assert_array_equal(p.c, [0.0, 0.0])
    np.testing.assert_array_equal(p.s, e1)


@settings(max_examples=50)
@given(vectors, vectors)
def test_perp_identities(c, s):
    u = CoefficientPair(c, s)
    pp = perp(perp(u))
    np.testing.assert_array_equal(pp.c, -c)
    np.testing.assert_array_equal(pp.s, -s)
    # fsum is exact, so summation order cannot hide a difference
    assert fsum(perp(u).stacked() ** 2) == fsum(u.stacked() ** 2)


_M = {}


def _mass():
    if "M" not in _M:
        m = build_uniform_mesh(4)
        _M["M"] = assemble_mass(m, CoefficientField.constant(1.3), DirichletMap.from_mesh(m))
    return _M["M"]


def _inner(M, u, v):
    return u.c @ (M @ v.c) + u.s @ (M @ v.s)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 6), st.floats(0.1, 5))
def test_weighted_orthogonality(seed, k, omega):
    M = _mass()
    rng = np.random.default_rng(seed)
    u = CoefficientPair(*rng.standard_normal((2, M.shape[0])))
    v = CoefficientPair(*rng.standard_normal((2, M.shape[0])))
    scale = abs(_inner(M, u, u)) + 1.0
    assert abs(_inner(M, perp(u), u)) <= 1e-12 * scale
    lhs = k * omega * _inner(M, u, v)
    rhs = k * omega * _inner(M, perp(u), perp(v))
    assert abs(lhs - rhs) <= 1e-12 * (abs(lhs) + k * omega * scale)


def test_remainder_zero_for_harmonic_source():
    p = example1()
    for N in (1, 2, 5):
        assert remainder_EN(p.source, N, p.omega) == 0.0


def test_remainder_monotone():
    src = example2().source
    values = [remainder_EN(src, N, 1.0) for N in range(0, 12)]
    assert all(a >= b for a, b in zip(values, values[1:]))
    assert values[-1] > 0


def test_remainder_parseval_oracle():
    src = example2().source
    g = ex2_source_time(1.0)
    T = 2 * pi
    samples = 10**6
    t = np.arange(samples) * (T / samples)
    g_sq = T * np.mean(g(t) ** 2)
    head = T * _trapezoid_oracle(g, 1.0, 0) ** 2
    for k in range(1, 9):
        c, s = _trapezoid_oracle(g, 1.0, k)
        head += 0.5 * T * (c * c + s * s)
    oracle = 0.25 * (g_sq - head)  # ||sin(pi x) sin(pi y)||^2 = 1/4
    assert abs(remainder_EN(src, 8, 1.0) - oracle) <= 1e-8 * oracle


def test_parseval_defect_decreasing():
    g = ex2_source_time(1.0)
    d = [parseval_defect(g, 1.0, k) for k in range(0, 10)]
    assert all(v >= -1e-9 for v in d)
    assert all(a >= b for a, b in zip(d, d[1:]))


def test_mode_evaluators():
    p = example1()
    coeffs = fourier.source_coefficients(p.source, p.omega, 4)
    fc, fs = fourier.mode_evaluators(p.source, coeffs, 1)
    x, y = np.array([0.3, 0.5]), np.array([0.2, 0.5])
    np.testing.assert_allclose(fc(x, y), 2 * (x * (1 - x) + y * (1 - y)))
    np.testing.assert_allclose(fs(x, y), -x * (1 - x) * y * (1 - y))
    f0c, f0s = fourier.mode_evaluators(p.source, coeffs, 0)
    assert not f0c(x, y).any() and not f0s(x, y).any()


def test_spatial_gram():
    G = fourier.spatial_gram([sinsin(1, 1), sinsin(2, 1)])
    np.testing.assert_allclose(G, np.diag([0.25, 0.25]), atol=1e-12)


@pytest.mark.parametrize("omega", [0.5, 1.0, 2.0])
def test_period(omega):
    one = CoefficientField.constant(1.0)
    spec = ProblemSpec(omega, 2, one, one, SeparableSource(()))
    assert abs(spec.T * omega - 2 * pi) < 1e-15


def test_problem_spec_validation():
    one = CoefficientField.constant(1.0)
    with pytest.raises(ValueError):
        ProblemSpec(1.0, -1, one, one, SeparableSource(()))
    with pytest.raises(ValueError):
        ProblemSpec(0.0, 1, one, one, SeparableSource(()))


def test_half_order_seminorm():
    # mode 1 with ||u_1||^2 = 2 and omega = 1: (T/2 * 1 * 2)^(1/2) = sqrt(2 pi)
    assert abs(fourier.half_order_seminorm([5.0, 2.0], 1.0) - np.sqrt(2 * pi)) < 1e-14
