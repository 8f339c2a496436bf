"""Fourier machinery in time for separable space-time data.

A function is expanded as ``v0 + sum_k (v_k^c cos(k w t) + v_k^s sin(k w t))``
on one period ``T = 2 pi / w``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import pi
from typing import Callable, Optional, Sequence

import numpy as np

from .assembly import CoefficientField

DEFAULT_SAMPLES = 2 ** 14
DEFAULT_KMAX = 256


@dataclass(frozen=True, eq=False)
class SpatialFunction:
    """A scalar field on the unit square with optional derivatives.

    ``grad`` returns an array with a trailing axis of length 2 and
    ``neg_laplacian`` returns ``-(d11 + d22)``; both are needed only where
    exact errors or manufactured sources are computed.
    """

    name: str
    value: Callable[[np.ndarray, np.ndarray], np.ndarray]
    grad: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    neg_laplacian: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None

    def __call__(self, x1, x2):
        return np.broadcast_to(np.asarray(self.value(x1, x2), dtype=float), np.shape(x1))


@dataclass(frozen=True, eq=False)
class TimeFactor:
    """A ``T``-periodic scalar function of time.

    ``harmonic`` marks pure harmonics as ``("const", 0)``, ``("cos", k)`` or
    ``("sin", k)``, which lets manufactured sources differentiate exactly.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    harmonic: Optional[tuple] = None

    def __call__(self, t):
        return np.broadcast_to(np.asarray(self.func(t), dtype=float), np.shape(t))


def harmonic(kind: str, k: int, omega: float) -> TimeFactor:
    if kind == "const" or k == 0:
        return TimeFactor("const", lambda t: np.ones_like(t, dtype=float), ("const", 0))
    if kind == "cos":
        return TimeFactor(f"cos({k})", lambda t: np.cos(k * omega * t), ("cos", k))
    if kind == "sin":
        return TimeFactor(f"sin({k})", lambda t: np.sin(k * omega * t), ("sin", k))
    raise ValueError(f"unknown harmonic kind {kind!r}")


@dataclass(frozen=True, eq=False)
class SeparableSource:
    """``f(x, t) = sum_j coef_j * s_j(x) * g_j(t)``."""

    terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(
            (float(c), s, g) for c, s, g in self.terms))

    def __call__(self, x1, x2, t):
        out = np.zeros(np.broadcast(x1, x2, t).shape)
        for c, s, g in self.terms:
            out = out + c * s(x1, x2) * g(t)
        return out

    @property
    def is_zero(self) -> bool:
        return all(c == 0.0 for c, _, _ in self.terms)


@dataclass(frozen=True)
class TimeCoefficients:
    """``a0`` plus cosine/sine coefficients for ``k = 1..K_max``."""

    a0: float
    a_c: np.ndarray
    a_s: np.ndarray

    @property
    def k_max(self) -> int:
        return len(self.a_c)

    def mode(self, k: int) -> tuple[float, float]:
        """``(cos, sin)`` coefficient of mode ``k``; mode 0 is ``(a0, 0)``."""
        if k == 0:
            return self.a0, 0.0
        if k > self.k_max:
            return 0.0, 0.0
        return float(self.a_c[k - 1]), float(self.a_s[k - 1])


@dataclass(frozen=True)
class CoefficientPair:
    """Cosine and sine parts of one mode."""

    c: np.ndarray
    s: np.ndarray

    def perp(self) -> "CoefficientPair":
        return perp(self)

    def stacked(self) -> np.ndarray:
        return np.concatenate([np.atleast_1d(self.c), np.atleast_1d(self.s)])


def perp(pair: CoefficientPair) -> CoefficientPair:
    """Quarter-period phase shift ``(c, s) -> (-s, c)``.

    A mode ``c cos + s sin`` becomes ``-s cos + c sin``, so applying it twice
    negates the pair.
    """
    return CoefficientPair(-np.asarray(pair.s), np.asarray(pair.c))


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    omega: float
    N: int
    sigma: CoefficientField
    nu: CoefficientField
    source: SeparableSource
    exact_solution: Optional[SeparableSource] = None
    name: str = "custom"

    def __post_init__(self):
        if self.omega <= 0.0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if int(self.N) != self.N or self.N < 0:
            raise ValueError(f"truncation index N must be a non-negative integer, got {self.N}")

    @property
    def T(self) -> float:
        return 2.0 * pi / self.omega


def _simpson_weights(samples: int, T: float) -> np.ndarray:
    w = np.ones(samples + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (T / samples / 3.0)


def time_fourier_coefficients(g: Callable, omega: float, k_max: int,
                              samples: int = DEFAULT_SAMPLES) -> TimeCoefficients:
    """Fourier coefficients of ``g`` on one period by composite Simpson."""
    if samples % 2 or samples < max(4 * k_max, 4):
        raise ValueError(
            f"samples must be even and at least 4*K_max = {4 * k_max}, got {samples}")
    T = 2.0 * pi / omega
    t = np.linspace(0.0, T, samples + 1)
    wg = _simpson_weights(samples, T) * np.asarray(g(t), dtype=float)
    a0 = float(wg.sum()) / T
    if k_max == 0:
        return TimeCoefficients(a0, np.zeros(0), np.zeros(0))
    kwt = np.outer(np.arange(1, k_max + 1) * omega, t)
    a_c = (2.0 / T) * (np.cos(kwt) @ wg)
    a_s = (2.0 / T) * (np.sin(kwt) @ wg)
    return TimeCoefficients(a0, a_c, a_s)


def time_l2_norm_sq(g: Callable, omega: float, samples: int = DEFAULT_SAMPLES) -> float:
    T = 2.0 * pi / omega
    t = np.linspace(0.0, T, samples + 1)
    return float(_simpson_weights(samples, T) @ np.asarray(g(t), dtype=float) ** 2)


def parseval_defect(g: Callable, omega: float, k: int, samples: int = DEFAULT_SAMPLES) -> float:
    """``||g||^2 - (T a0^2 + T/2 sum_{j<=k} (a_c^2 + a_s^2))`` on one period."""
    T = 2.0 * pi / omega
    co = time_fourier_coefficients(g, omega, k, samples)
    head = T * co.a0 ** 2 + 0.5 * T * float(np.sum(co.a_c ** 2 + co.a_s ** 2))
    return time_l2_norm_sq(g, omega, samples) - head


def source_coefficients(source: SeparableSource, omega: float, k_max: int,
                        samples: int = DEFAULT_SAMPLES) -> list[TimeCoefficients]:
    """Time coefficients of every term, in term order.

    Pure harmonics get their exact coefficients; other factors are sampled.
    """
    return [harmonic_coefficients(g.harmonic, k_max) if g.harmonic is not None
            else time_fourier_coefficients(g, omega, k_max, samples)
            for _, _, g in source.terms]


def harmonic_coefficients(harmonic_id, k_max: int) -> TimeCoefficients:
    """Exact coefficients of ``1``, ``cos(k w t)`` or ``sin(k w t)``."""
    kind, k = harmonic_id
    a_c, a_s = np.zeros(k_max), np.zeros(k_max)
    if kind == "const":
        return TimeCoefficients(1.0, a_c, a_s)
    if k > k_max:
        raise ValueError(f"harmonic {k} lies beyond k_max={k_max}")
    (a_c if kind == "cos" else a_s)[k - 1] = 1.0
    return TimeCoefficients(0.0, a_c, a_s)


def mode_evaluators(source: SeparableSource, coeffs: Sequence[TimeCoefficients], k: int):
    """Spatial evaluators ``(f_k^c, f_k^s)`` of mode ``k``."""
    weights = [(c * co.mode(k)[0], c * co.mode(k)[1], s)
               for (c, s, _), co in zip(source.terms, coeffs)]

    def fc(x1, x2):
        out = np.zeros(np.broadcast(x1, x2).shape)
        for wc, _, s in weights:
            if wc != 0.0:
                out = out + wc * s(x1, x2)
        return out

    def fs(x1, x2):
        out = np.zeros(np.broadcast(x1, x2).shape)
        for _, ws, s in weights:
            if ws != 0.0:
                out = out + ws * s(x1, x2)
        return out

    return fc, fs


def spatial_gram(functions: Sequence[Callable], mesh=None, rule=None) -> np.ndarray:
    """``G_ij = (s_i, s_j)`` in ``L2(0,1)^2`` by high-order quadrature.

    Functions may return scalars or vectors (trailing axis), for gradients.
    """
    from .mesh import build_uniform_mesh
    from .quadrature import conical_rule

    mesh = mesh or build_uniform_mesh(16)
    rule = rule or conical_rule(12)
    pts = rule.physical_points(mesh.vertex_coords)
    vals = [np.asarray(f(pts[..., 0], pts[..., 1]), dtype=float) for f in functions]
    wq = mesh.areas[:, None] * rule.weights[None, :]
    n = len(vals)
    G = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            prod = vals[i] * vals[j]
            if prod.ndim == 3:
                prod = prod.sum(axis=-1)
            G[i, j] = G[j, i] = float(np.sum(wq * prod))
    return G


def tail_energy(coeffs: Sequence[TimeCoefficients], gram: np.ndarray, N: int,
                omega: float, weight: Callable[[np.ndarray], np.ndarray] | None = None) -> float:
    """``T/2 sum_{k>N} weight(k) (a_k^c.G.a_k^c + a_k^s.G.a_k^s)`` up to ``K_max``."""
    if not coeffs:
        return 0.0
    T = 2.0 * pi / omega
    A_c = np.array([co.a_c for co in coeffs])  # terms x K_max
    A_s = np.array([co.a_s for co in coeffs])
    k = np.arange(1, A_c.shape[1] + 1)
    tail = k > N
    per_k = np.einsum("ik,ij,jk->k", A_c, gram, A_c) + np.einsum("ik,ij,jk->k", A_s, gram, A_s)
    w = np.ones_like(k, dtype=float) if weight is None else weight(k)
    return float(0.5 * T * np.sum((w * per_k)[tail]))


def remainder_EN(source: SeparableSource, N: int, omega: float,
                 samples: int = DEFAULT_SAMPLES, k_max: int = DEFAULT_KMAX,
                 gram: np.ndarray | None = None) -> float:
    """Energy of the source beyond mode ``N``: ``T/2 sum_{k>N} ||f_k||^2``.

    The time tail is summed up to ``k_max``; the spatial part is the Gram
    matrix of the term factors.
    """
    if source.is_zero:
        return 0.0
    coeffs = source_coefficients(source, omega, k_max, samples)
    scaled = [TimeCoefficients(c * co.a0, c * co.a_c, c * co.a_s)
              for (c, _, _), co in zip(source.terms, coeffs)]
    if gram is None:
        gram = spatial_gram([s for _, s, _ in source.terms])
    return max(tail_energy(scaled, gram, N, omega), 0.0)


def half_order_seminorm(mode_l2_sq: Sequence[float], omega: float) -> float:
    """``|u|_{H^{0,1/2}}`` from ``||u_k||^2`` listed for ``k = 0..N``."""
    T = 2.0 * pi / omega
    k = np.arange(len(mode_l2_sq))
    return float(np.sqrt(0.5 * T * np.sum(k * omega * np.asarray(mode_l2_sq, dtype=float))))
