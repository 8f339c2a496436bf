"""End-to-end pipeline: mesh, per-mode solves, flux reconstruction, majorants."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from math import sqrt

import numpy as np

from . import fourier
from .assembly import DirichletMap, assemble_load, assemble_mass, assemble_stiffness
from .flux import reconstruct_flux
from .fourier import CoefficientPair, ProblemSpec, TimeCoefficients
from .linalg import (DEFAULT_MAXITER, DEFAULT_TOL, BlockPreconditioner, build_mode_system,
                     factorize_spd, minres_solve, pcg_solve)
from .majorant import (ConstantsBundle, ExactMode, MajorantReport, ModeResult,
                       exact_error_squared, global_residual_norms, majorant_global,
                       majorant_norm_mode, majorant_seminorm_mode, residual1_squared,
                       residual2_squared, space_time_sq)
from .mesh import Mesh, build_uniform_mesh
from .quadrature import DEFAULT_DEGREE, rule_for_degree

log = logging.getLogger(__name__)


@dataclass
class ModeSolution:
    k: int
    eta: CoefficientPair  # nodal values including boundary zeros; s is None for k = 0
    iterations: int


def _combine(terms, coeffs, k, attr):
    """Cosine and sine evaluators of mode ``k`` built from ``attr`` of each factor."""
    parts = []
    for (c, s, _), co in zip(terms, coeffs):
        ac, as_ = co.mode(k)
        parts.append((c * ac, c * as_, getattr(s, attr)))

    def make(idx):
        def f(x1, x2):
            out = None
            for p in parts:
                w = p[idx]
                if w == 0.0:
                    continue
                v = w * np.asarray(p[2](x1, x2), dtype=float)
                out = v if out is None else out + v
            if out is None:
                shape = np.broadcast(x1, x2).shape + ((2,) if attr == "grad" else ())
                return np.zeros(shape)
            return out
        return f

    return make(0), make(1)


def exact_mode(solution, coeffs, k) -> ExactMode:
    uc, us = _combine(solution.terms, coeffs, k, "value")
    guc, gus = _combine(solution.terms, coeffs, k, "grad")
    return ExactMode(uc, us, guc, gus)


class MultiharmonicSolver:
    """Solves all modes ``k = 0..N`` of a problem on one mesh."""

    def __init__(self, problem: ProblemSpec, mesh: Mesh | int, rel_tol: float = DEFAULT_TOL,
                 quad_degree: int = DEFAULT_DEGREE, maxiter: int = DEFAULT_MAXITER,
                 samples: int = fourier.DEFAULT_SAMPLES, k_max: int = fourier.DEFAULT_KMAX):
        self.problem = problem
        self.mesh = mesh if isinstance(mesh, Mesh) else build_uniform_mesh(mesh)
        self.rel_tol = rel_tol
        self.maxiter = maxiter
        self.rule = rule_for_degree(quad_degree)
        self.samples = samples
        self.k_max = max(k_max, problem.N)
        self.dmap = DirichletMap.from_mesh(self.mesh)
        self.K = assemble_stiffness(self.mesh, problem.nu, self.dmap)
        self.M = assemble_mass(self.mesh, problem.sigma, self.dmap)
        self.source_coeffs = fourier.source_coefficients(
            problem.source, problem.omega, self.k_max, samples)
        self.constants = ConstantsBundle.from_coefficients(
            problem.sigma, problem.nu, problem.omega, problem.N)

    def mode_loads(self, k: int):
        fc, fs = fourier.mode_evaluators(self.problem.source, self.source_coeffs, k)
        return fc, fs

    def solve_mode(self, k: int) -> ModeSolution:
        fc, fs = self.mode_loads(k)
        load_c = assemble_load(self.mesh, fc, self.rule, self.dmap)
        if k == 0:
            if self.dmap.n_dofs == 0:
                return ModeSolution(0, CoefficientPair(np.zeros(self.mesh.n_nodes), None), 0)
            factor = factorize_spd(self.K.tocsc())
            res = pcg_solve(self.K, load_c, self.rel_tol, self.maxiter, precond=factor)
            return ModeSolution(0, CoefficientPair(self.dmap.extend(res.x), None), res.iterations)
        load_s = assemble_load(self.mesh, fs, self.rule, self.dmap)
        system = build_mode_system(k, self.problem.omega, self.M, self.K, load_c, load_s)
        if self.dmap.n_dofs == 0:
            zero = np.zeros(self.mesh.n_nodes)
            return ModeSolution(k, CoefficientPair(zero, zero.copy()), 0)
        res = minres_solve(system, BlockPreconditioner(system), self.rel_tol, self.maxiter)
        u_c, u_s = system.split(res.x)
        return ModeSolution(k, CoefficientPair(self.dmap.extend(u_c), self.dmap.extend(u_s)),
                            res.iterations)

    def evaluate_mode(self, sol: ModeSolution, exact_coeffs=None) -> ModeResult:
        p = self.problem
        k = sol.k
        tau_c = reconstruct_flux(self.mesh, sol.eta.c, p.nu)
        tau_s = None if sol.eta.s is None else reconstruct_flux(self.mesh, sol.eta.s, p.nu)
        f_k = self.mode_loads(k)
        r1_parts = residual1_squared(k, sol.eta, (tau_c, tau_s), f_k, p.omega, p.sigma,
                                     self.mesh, self.rule)
        r2_parts = residual2_squared(sol.eta, (tau_c, tau_s), p.nu, self.mesh, self.rule)
        r1, r2 = sqrt(sum(r1_parts)), sqrt(sum(r2_parts))
        result = ModeResult(
            k, r1, r2, r1_parts, r2_parts,
            majorant_semi=majorant_seminorm_mode(k, r1, r2, self.constants),
            majorant_norm=majorant_norm_mode(k, r1, r2, self.constants),
            iterations=sol.iterations,
        )
        if exact_coeffs is not None:
            semi, l2 = exact_error_squared(sol.eta, exact_mode(p.exact_solution, exact_coeffs, k),
                                           self.mesh, self.rule)
            result.error_semi = sqrt(semi)
            result.error_l2 = sqrt(l2)
            result.error_norm = sqrt(semi + l2)
        return result

    def run(self) -> MajorantReport:
        p = self.problem
        start = time.perf_counter()
        exact_coeffs = None
        if p.exact_solution is not None:
            exact_coeffs = fourier.source_coefficients(
                p.exact_solution, p.omega, self.k_max, self.samples)
        report = MajorantReport(p.name, self.mesh.cells_per_side, p.omega, p.N, self.constants)
        for k in range(p.N + 1):
            t0 = time.perf_counter()
            sol = self.solve_mode(k)
            mode = self.evaluate_mode(sol, exact_coeffs)
            mode.seconds = time.perf_counter() - t0
            log.info("level %d mode %d: %d iterations, %.2fs", report.level, k,
                     mode.iterations, mode.seconds)
            report.modes.append(mode)

        report.E_N = fourier.remainder_EN(p.source, p.N, p.omega, self.samples, self.k_max)
        r1_sq = [m.r1 ** 2 for m in report.modes]
        r2_sq = [m.r2 ** 2 for m in report.modes]
        report.r1, report.r2 = global_residual_norms(r1_sq, r2_sq, report.E_N, p.T)
        report.majorant_semi = majorant_global(r1_sq, r2_sq, report.E_N, p.T, self.constants)
        report.majorant_norm = majorant_global(r1_sq, r2_sq, report.E_N, p.T, self.constants,
                                               "norm")
        if exact_coeffs is not None:
            report.error_semi, report.error_norm = self._global_error(report, exact_coeffs)
        report.seconds = time.perf_counter() - start
        return report

    def _global_error(self, report: MajorantReport, exact_coeffs):
        """Space-time error in the ``H^{1,1/2}`` seminorm and norm.

        Modes beyond ``N`` are absent from ``eta`` and contribute the full
        energy of the exact solution's tail.
        """
        p = self.problem
        w = p.omega
        grad_sq = [m.error_semi ** 2 for m in report.modes]
        l2_sq = [m.error_l2 ** 2 for m in report.modes]
        half_sq = 0.5 * p.T * sum(k * w * l2_sq[k] for k in range(1, len(l2_sq)))
        scaled = [TimeCoefficients(c * co.a0, c * co.a_c, c * co.a_s)
                  for (c, _, _), co in zip(p.exact_solution.terms, exact_coeffs)]
        funcs = [s for _, s, _ in p.exact_solution.terms]
        G = fourier.spatial_gram([s.value for s in funcs])
        Gg = fourier.spatial_gram([s.grad for s in funcs])
        tail_grad = fourier.tail_energy(scaled, Gg, p.N, w)
        tail_l2 = fourier.tail_energy(scaled, G, p.N, w)
        tail_half = fourier.tail_energy(scaled, G, p.N, w, weight=lambda k: k * w)
        semi_sq = space_time_sq(grad_sq, p.T) + half_sq + tail_grad + tail_half
        norm_sq = semi_sq + space_time_sq(l2_sq, p.T) + tail_l2
        return sqrt(semi_sq), sqrt(norm_sq)


def solve(problem: ProblemSpec, level: int, **kwargs) -> MajorantReport:
    return MultiharmonicSolver(problem, level, **kwargs).run()
