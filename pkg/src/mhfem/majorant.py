"""Residual norms, guaranteed error majorants and efficiency indices.

For an approximation ``eta`` with an H(div) flux ``tau`` the two residuals
of mode ``k`` are::

    R1_k = k w sigma eta_k^perp + div tau_k + f_k
    R2_k = tau_k - nu grad eta_k

and every majorant is a fixed combination of their ``L2`` norms scaled by
an inf-sup constant.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import pi, sqrt
from typing import Callable, Optional, Sequence

import numpy as np

from .assembly import CoefficientField, p1_at_quadrature, p1_gradients, squared_norm_on_mesh
from .flux import RT0FluxField
from .mesh import Mesh
from .quadrature import QuadratureRule

FRIEDRICHS_UNIT_SQUARE = 1.0 / (sqrt(2.0) * pi)


@dataclass(frozen=True)
class ConstantsBundle:
    C_F: float
    mu1: float
    mu2: float
    mu1_tilde: float
    mu2_tilde: float
    c0_norm: float
    c0_semi: float
    c_k: tuple  # index k-1 holds the constant of mode k

    @classmethod
    def from_coefficients(cls, sigma: CoefficientField, nu: CoefficientField, omega: float,
                          N: int, C_F: float = FRIEDRICHS_UNIT_SQUARE) -> "ConstantsBundle":
        s_lo, s_hi = sigma.lower_bound, sigma.upper_bound
        n_lo, n_hi = nu.lower_bound, nu.upper_bound
        mu2 = max(s_hi, n_hi)
        return cls(
            C_F=C_F,
            mu1=min(n_lo / (C_F ** 2 + 1.0), s_lo) / sqrt(2.0),
            mu2=mu2,
            mu1_tilde=min(n_lo, s_lo) / sqrt(2.0),
            mu2_tilde=mu2,
            c0_norm=n_lo / (C_F ** 2 + 1.0),
            c0_semi=n_lo,
            c_k=tuple(min(n_lo, k * omega * s_lo) / sqrt(2.0) for k in range(1, N + 1)),
        )

    def mode_constant(self, k: int, which: str = "seminorm") -> float:
        if k == 0:
            return self.c0_semi if which == "seminorm" else self.c0_norm
        return self.c_k[k - 1]


@dataclass(frozen=True)
class ExactMode:
    """Exact Fourier coefficients ``u_k^c, u_k^s`` with their gradients."""

    uc: Callable
    us: Callable
    grad_uc: Callable
    grad_us: Callable


def _eta_parts(eta_pair):
    c = np.asarray(eta_pair.c, dtype=float)
    s = None if eta_pair.s is None else np.asarray(eta_pair.s, dtype=float)
    return c, s


def residual1_squared(k, eta_pair, tau_pair, f_k, omega, sigma: CoefficientField,
                      mesh: Mesh, rule: QuadratureRule) -> tuple[float, float]:
    """``(||R1_k^c||^2, ||R1_k^s||^2)``; the sine part is 0 for ``k = 0``."""
    tau_c, tau_s = tau_pair
    fc, fs = f_k
    eta_c, eta_s = _eta_parts(eta_pair)
    n_nodes = mesh.n_nodes
    if len(eta_c) != n_nodes or (eta_s is not None and len(eta_s) != n_nodes):
        raise ValueError("nodal vectors do not match the mesh")
    if tau_c.mesh is not mesh and tau_c.coeffs.shape[0] != mesh.n_triangles:
        raise ValueError("flux field does not match the mesh")
    pts = rule.physical_points(mesh.vertex_coords)
    x1, x2 = pts[..., 0], pts[..., 1]

    r_c = tau_c.divergence[:, None] + fc(x1, x2)
    if k == 0:
        return squared_norm_on_mesh(lambda p: r_c, mesh, rule), 0.0
    kw_sigma = k * omega * sigma(x1, x2)
    r_c = r_c - kw_sigma * p1_at_quadrature(mesh, eta_s, rule)
    r_s = kw_sigma * p1_at_quadrature(mesh, eta_c, rule) + tau_s.divergence[:, None] + fs(x1, x2)
    return (squared_norm_on_mesh(lambda p: r_c, mesh, rule),
            squared_norm_on_mesh(lambda p: r_s, mesh, rule))


def residual1_mode(k, eta_pair, tau_pair, f_k, omega, sigma, mesh, rule) -> float:
    """``||R1_k||`` over the unit square; for ``k = 0`` this is ``||div tau + f||``."""
    return sqrt(sum(residual1_squared(k, eta_pair, tau_pair, f_k, omega, sigma, mesh, rule)))


def residual2_squared(eta_pair, tau_pair, nu: CoefficientField, mesh: Mesh,
                      rule: QuadratureRule) -> tuple[float, float]:
    eta_c, eta_s = _eta_parts(eta_pair)
    pts = rule.physical_points(mesh.vertex_coords)
    nu_q = nu(pts[..., 0], pts[..., 1])[..., None]

    def part(eta, tau):
        if eta is None or tau is None:
            return 0.0
        g = p1_gradients(mesh, eta)[:, None, :]
        return squared_norm_on_mesh(lambda p: tau.at(p) - nu_q * g, mesh, rule)

    return part(eta_c, tau_pair[0]), part(eta_s, tau_pair[1])


def residual2_mode(eta_pair, tau_pair, nu, mesh, rule) -> float:
    """``||R2_k|| = (||tau^c - nu grad eta^c||^2 + ||tau^s - nu grad eta^s||^2)^(1/2)``."""
    return sqrt(sum(residual2_squared(eta_pair, tau_pair, nu, mesh, rule)))


def majorant_seminorm_mode(k: int, r1: float, r2: float, constants: ConstantsBundle) -> float:
    """Bound on ``|u_k - eta_k|_1``: ``(C_F r1 + r2) / c_k``."""
    return (constants.C_F * r1 + r2) / constants.mode_constant(k, "seminorm")


def majorant_norm_mode(k: int, r1: float, r2: float, constants: ConstantsBundle) -> float:
    """Bound on ``||u_k - eta_k||_1``: ``sqrt(r1^2 + r2^2) / c_k``."""
    return sqrt(r1 * r1 + r2 * r2) / constants.mode_constant(k, "norm")


def space_time_sq(per_mode_sq: Sequence[float], T: float) -> float:
    """``T q_0 + T/2 sum_{k>=1} q_k`` for squared per-mode quantities."""
    q = [float(v) for v in per_mode_sq]
    if not q:
        return 0.0
    return T * q[0] + 0.5 * T * sum(q[1:])


def majorant_global(r1_sq: Sequence[float], r2_sq: Sequence[float], E_N: float, T: float,
                    constants: ConstantsBundle, which: str = "seminorm") -> float:
    """Space-time majorant assembled from per-mode squared residual norms.

    ``r1_sq[k]`` and ``r2_sq[k]`` are ``||R1_k||^2`` and ``||R2_k||^2`` for
    ``k = 0..N``; ``E_N`` is the source energy beyond mode ``N``.
    """
    R1 = sqrt(space_time_sq(r1_sq, T) + E_N)
    R2 = sqrt(space_time_sq(r2_sq, T))
    if which == "seminorm":
        return (constants.C_F * R1 + R2) / constants.mu1_tilde
    if which == "norm":
        return sqrt(R1 * R1 + R2 * R2) / constants.mu1
    raise ValueError(f"which must be 'seminorm' or 'norm', got {which!r}")


def global_residual_norms(r1_sq, r2_sq, E_N, T) -> tuple[float, float]:
    return sqrt(space_time_sq(r1_sq, T) + E_N), sqrt(space_time_sq(r2_sq, T))


def exact_error_squared(eta_pair, exact: ExactMode, mesh: Mesh,
                        rule: QuadratureRule) -> tuple[float, float]:
    """``(|e_k|_1^2, ||e_k||^2)`` of the coefficient error, both parts summed."""
    eta_c, eta_s = _eta_parts(eta_pair)
    pts = rule.physical_points(mesh.vertex_coords)
    x1, x2 = pts[..., 0], pts[..., 1]
    semi = l2 = 0.0
    parts = [(eta_c, exact.uc, exact.grad_uc)]
    if eta_s is not None:
        parts.append((eta_s, exact.us, exact.grad_us))
    for eta, u, grad_u in parts:
        g = p1_gradients(mesh, eta)[:, None, :]
        gu = np.asarray(grad_u(x1, x2), dtype=float)
        semi += squared_norm_on_mesh(lambda p: gu - g, mesh, rule)
        uv = np.broadcast_to(np.asarray(u(x1, x2), dtype=float), x1.shape)
        l2 += squared_norm_on_mesh(lambda p: uv - p1_at_quadrature(mesh, eta, rule), mesh, rule)
    return semi, l2


def exact_error_mode(eta_pair, exact: ExactMode, mesh: Mesh, rule: QuadratureRule,
                     which: str = "seminorm") -> float:
    semi, l2 = exact_error_squared(eta_pair, exact, mesh, rule)
    if which == "seminorm":
        return sqrt(semi)
    if which == "norm":
        return sqrt(semi + l2)
    raise ValueError(f"which must be 'seminorm' or 'norm', got {which!r}")


def efficiency_index(majorant: float, exact_error: float) -> float:
    if exact_error == 0.0:
        raise ZeroDivisionError("efficiency index is undefined for a zero error")
    return majorant / exact_error


@dataclass
class ModeResult:
    k: int
    r1: float
    r2: float
    r1_parts: tuple = (0.0, 0.0)
    r2_parts: tuple = (0.0, 0.0)
    majorant_semi: float = 0.0
    majorant_norm: float = 0.0
    error_semi: Optional[float] = None
    error_norm: Optional[float] = None
    error_l2: Optional[float] = None
    iterations: int = 0
    seconds: float = 0.0

    @property
    def eff_index(self) -> Optional[float]:
        if not self.error_semi:
            return None
        return efficiency_index(self.majorant_semi, self.error_semi)

    @property
    def eff_index_norm(self) -> Optional[float]:
        if not self.error_norm:
            return None
        return efficiency_index(self.majorant_norm, self.error_norm)


@dataclass
class MajorantReport:
    problem: str
    level: int
    omega: float
    N: int
    constants: ConstantsBundle
    modes: list = field(default_factory=list)
    E_N: float = 0.0
    r1: float = 0.0
    r2: float = 0.0
    majorant_semi: float = 0.0
    majorant_norm: float = 0.0
    error_semi: Optional[float] = None
    error_norm: Optional[float] = None
    seconds: float = 0.0

    @property
    def T(self) -> float:
        return 2.0 * pi / self.omega

    @property
    def eff_index(self) -> Optional[float]:
        if not self.error_semi:
            return None
        return efficiency_index(self.majorant_semi, self.error_semi)

    @property
    def eff_index_norm(self) -> Optional[float]:
        if not self.error_norm:
            return None
        return efficiency_index(self.majorant_norm, self.error_norm)

    def mode(self, k: int) -> ModeResult:
        for m in self.modes:
            if m.k == k:
                return m
        raise KeyError(f"mode {k} not in report")
