from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from mhfem.assembly import CoefficientField
from mhfem.fourier import ProblemSpec, SeparableSource, harmonic
from mhfem.majorant import ConstantsBundle
from mhfem.problems import example1, manufactured_source, poly, sinsin
from mhfem.solver import MultiharmonicSolver, solve


@pytest.fixture(scope="module")
def ex1_27():
    return solve(example1(), 27)


def test_example1_mode0_is_exactly_zero(ex1_27):
    m0 = ex1_27.mode(0)
    assert m0.r1 == 0.0 and m0.r2 == 0.0 and m0.error_semi == 0.0
    assert ex1_27.E_N == 0.0


def test_example1_bounds_hold(ex1_27):
    for m in ex1_27.modes[1:]:
        assert m.majorant_semi >= m.error_semi
        assert m.majorant_norm >= m.error_norm
    assert ex1_27.majorant_semi >= ex1_27.error_semi
    assert ex1_27.majorant_norm >= ex1_27.error_norm


def test_global_error_of_single_harmonic(ex1_27):
    # only mode 1 is present and the exact tail is empty
    m1 = ex1_27.mode(1)
    T = 2 * pi
    expected = sqrt(0.5 * T * (m1.error_semi ** 2 + m1.error_l2 ** 2))
    assert ex1_27.error_semi == pytest.approx(expected, rel=1e-12)


def test_global_majorant_equals_fused_formula(ex1_27):
    rep = ex1_27
    c = rep.constants
    T = rep.T
    R1 = sqrt(T * rep.modes[0].r1 ** 2 + 0.5 * T * sum(m.r1 ** 2 for m in rep.modes[1:]) + rep.E_N)
    R2 = sqrt(T * rep.modes[0].r2 ** 2 + 0.5 * T * sum(m.r2 ** 2 for m in rep.modes[1:]))
    assert rep.majorant_semi == pytest.approx((c.C_F * R1 + R2) / c.mu1_tilde, rel=1e-12)
    assert rep.majorant_norm == pytest.approx(sqrt(R1 ** 2 + R2 ** 2) / c.mu1, rel=1e-12)


def test_solver_tolerance_does_not_move_majorants(ex1_27):
    tight = solve(example1(), 27, rel_tol=1e-10)
    for a, b in zip(ex1_27.modes, tight.modes):
        assert a.majorant_semi == pytest.approx(b.majorant_semi, rel=1e-3, abs=1e-14)
    assert ex1_27.majorant_semi == pytest.approx(tight.majorant_semi, rel=1e-3)


def test_mode_solves_are_independent():
    spec = example1()
    a = MultiharmonicSolver(spec, 9)
    b = MultiharmonicSolver(spec, 9)
    sol_b1 = b.solve_mode(1)
    sol_a0, sol_a1 = a.solve_mode(0), a.solve_mode(1)
    np.testing.assert_array_equal(sol_a1.eta.c, sol_b1.eta.c)
    np.testing.assert_array_equal(sol_a1.eta.s, sol_b1.eta.s)
    assert sol_a0.eta.s is None


def test_zero_source_gives_zero_everything():
    one = CoefficientField.constant(1.0)
    spec = ProblemSpec(1.0, 2, one, one, SeparableSource(()), SeparableSource(()), name="zero")
    rep = solve(spec, 9)
    for m in rep.modes:
        assert m.r1 == m.r2 == m.majorant_semi == m.error_semi == 0.0
    assert rep.majorant_semi == 0.0 and rep.E_N == 0.0


def test_no_exact_solution_means_no_index():
    spec = example1()
    spec = ProblemSpec(spec.omega, spec.N, spec.sigma, spec.nu, spec.source, None, name="noex")
    rep = solve(spec, 9)
    assert rep.eff_index is None and all(m.eff_index is None for m in rep.modes)


def test_constants_follow_coefficients():
    rep = solve(example1(), 3)
    assert rep.constants == ConstantsBundle.from_coefficients(
        CoefficientField.constant(1.0), CoefficientField.constant(1.0), 1.0, 1)


_terms = st.lists(
    st.tuples(
        st.floats(-2.0, 2.0).filter(lambda v: abs(v) > 0.1),
        st.sampled_from([poly(1, 1), poly(2, 1), sinsin(1, 1), sinsin(2, 1)]),
        st.sampled_from([("const", 0), ("cos", 1), ("sin", 1), ("cos", 2), ("sin", 3)]),
    ),
    min_size=1, max_size=3)


@settings(max_examples=12, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(_terms, st.floats(0.5, 2.0), st.floats(0.5, 2.0), st.sampled_from([0.5, 1.0, 2.0]),
       st.integers(0, 3))
def test_majorant_is_guaranteed(terms, sigma, nu, omega, N):
    u = SeparableSource(tuple((c, s, harmonic(kind, k, omega)) for c, s, (kind, k) in terms))
    f = manufactured_source(u, sigma, nu, omega)
    spec = ProblemSpec(omega, N, CoefficientField.constant(sigma), CoefficientField.constant(nu),
                       f, u, name="mms")
    rep = solve(spec, 9)
    for m in rep.modes:
        assert m.majorant_semi >= m.error_semi * (1 - 1e-9)
        assert m.majorant_norm >= m.error_norm * (1 - 1e-9)
    assert rep.majorant_semi >= rep.error_semi * (1 - 1e-9)
    assert rep.majorant_norm >= rep.error_norm * (1 - 1e-9)
