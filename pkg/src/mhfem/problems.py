"""Named spatial/time factors and the benchmark problems.

Factors are referenced by name in run configurations, e.g. ``sinsin(2,1)``
or ``cos(3)``; no expression parsing happens at runtime.
"""
from __future__ import annotations

import re
from math import pi

import numpy as np

from .assembly import CoefficientField
from .fourier import ProblemSpec, SeparableSource, SpatialFunction, TimeFactor, harmonic


def _stack(a, b):
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    return np.stack([a, b], axis=-1)


def bubble() -> SpatialFunction:
    """``x1 (1 - x1) x2 (1 - x2)``."""
    return SpatialFunction(
        "bubble",
        lambda x, y: x * (1 - x) * y * (1 - y),
        lambda x, y: _stack((1 - 2 * x) * y * (1 - y), x * (1 - x) * (1 - 2 * y)),
        lambda x, y: 2.0 * (x * (1 - x) + y * (1 - y)),
    )


def lap_bubble() -> SpatialFunction:
    """``2 (x1 (1 - x1) + x2 (1 - x2))``, the negative Laplacian of the bubble."""
    return SpatialFunction(
        "lap_bubble",
        lambda x, y: 2.0 * (x * (1 - x) + y * (1 - y)),
        lambda x, y: _stack(2.0 * (1 - 2 * x), 2.0 * (1 - 2 * y)),
        lambda x, y: np.full(np.broadcast(x, y).shape, 8.0),
    )


def sinsin(m: int = 1, n: int = 1) -> SpatialFunction:
    """``sin(m pi x1) sin(n pi x2)``."""
    lam = (m * m + n * n) * pi * pi
    return SpatialFunction(
        f"sinsin({m},{n})",
        lambda x, y: np.sin(m * pi * x) * np.sin(n * pi * y),
        lambda x, y: _stack(m * pi * np.cos(m * pi * x) * np.sin(n * pi * y),
                            n * pi * np.sin(m * pi * x) * np.cos(n * pi * y)),
        lambda x, y: lam * np.sin(m * pi * x) * np.sin(n * pi * y),
    )


def _poly1d(a: int):
    # p(x) = x^a (1 - x) and its first two derivatives
    def p(x):
        return x ** a * (1 - x)

    def dp(x):
        return a * x ** (a - 1) - (a + 1) * x ** a if a >= 1 else -np.ones_like(x)

    def d2p(x):
        if a == 0:
            return np.zeros_like(x)
        lower = a * (a - 1) * x ** (a - 2) if a >= 2 else 0.0
        return lower - (a + 1) * a * x ** (a - 1)

    return p, dp, d2p


def poly(a: int = 1, b: int = 1) -> SpatialFunction:
    """``x1^a (1 - x1) x2^b (1 - x2)``, vanishing on the boundary for ``a, b >= 1``."""
    px, dpx, d2px = _poly1d(a)
    py, dpy, d2py = _poly1d(b)
    return SpatialFunction(
        f"poly({a},{b})",
        lambda x, y: px(x) * py(y),
        lambda x, y: _stack(dpx(x) * py(y), px(x) * dpy(y)),
        lambda x, y: -(d2px(x) * py(y) + px(x) * d2py(y)),
    )


def one() -> SpatialFunction:
    return SpatialFunction(
        "one",
        lambda x, y: np.ones(np.broadcast(x, y).shape),
        lambda x, y: _stack(np.zeros(np.broadcast(x, y).shape), 0.0),
        lambda x, y: np.zeros(np.broadcast(x, y).shape),
    )


def neg_laplacian_of(f: SpatialFunction) -> SpatialFunction:
    if f.neg_laplacian is None:
        raise ValueError(f"{f.name} has no Laplacian")
    return SpatialFunction(f"-lap[{f.name}]", f.neg_laplacian)


def ex2_source_time(omega: float = 1.0) -> TimeFactor:
    """``e^t sin^2 t ((1 + 2 pi^2) sin t + 3 cos t)``, with ``t`` scaled by ``omega``."""
    c = 1.0 + 2.0 * pi * pi

    def g(t):
        s = omega * np.asarray(t, dtype=float)
        return np.exp(s) * np.sin(s) ** 2 * (c * np.sin(s) + 3.0 * np.cos(s))

    return TimeFactor("ex2_source", g)


def exp_sin3(omega: float = 1.0) -> TimeFactor:
    """``e^t sin^3 t``, with ``t`` scaled by ``omega``."""
    def g(t):
        s = omega * np.asarray(t, dtype=float)
        return np.exp(s) * np.sin(s) ** 3

    return TimeFactor("exp_sin3", g)


SPATIAL_FACTORIES = {
    "bubble": bubble,
    "lap_bubble": lap_bubble,
    "sinsin": sinsin,
    "poly": poly,
    "one": one,
}

TIME_FACTORIES = {
    "const": lambda omega: harmonic("const", 0, omega),
    "cos": lambda omega, k=1: harmonic("cos", k, omega),
    "sin": lambda omega, k=1: harmonic("sin", k, omega),
    "ex2_source": ex2_source_time,
    "exp_sin3": exp_sin3,
}

_CALL = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\(([^)]*)\))?\s*$")


def _parse_call(text: str):
    m = _CALL.match(text)
    if not m:
        raise ValueError(f"cannot parse factor {text!r}")
    name, args = m.group(1), m.group(2)
    values = [int(a) for a in args.split(",")] if args and args.strip() else []
    return name, values


def spatial_factor(text: str) -> SpatialFunction:
    name, args = _parse_call(text)
    if name not in SPATIAL_FACTORIES:
        raise ValueError(f"unknown spatial factor {name!r}; known: {sorted(SPATIAL_FACTORIES)}")
    return SPATIAL_FACTORIES[name](*args)


def time_factor(text: str, omega: float) -> TimeFactor:
    name, args = _parse_call(text)
    if name not in TIME_FACTORIES:
        raise ValueError(f"unknown time factor {name!r}; known: {sorted(TIME_FACTORIES)}")
    return TIME_FACTORIES[name](omega, *args)


def manufactured_source(solution: SeparableSource, sigma: float, nu: float,
                        omega: float) -> SeparableSource:
    """Source of ``sigma u_t - nu lap u`` for harmonic-in-time ``u``, constant coefficients."""
    terms = []
    for c, s, g in solution.terms:
        if g.harmonic is None:
            raise ValueError(f"time factor {g.name} is not a pure harmonic")
        kind, k = g.harmonic
        terms.append((c * nu, neg_laplacian_of(s), g))
        if kind == "cos":
            terms.append((-c * sigma * k * omega, s, harmonic("sin", k, omega)))
        elif kind == "sin":
            terms.append((c * sigma * k * omega, s, harmonic("cos", k, omega)))
    return SeparableSource(tuple(terms))


def example1() -> ProblemSpec:
    """Time-harmonic benchmark: ``u = x1(x1-1)x2(x2-1) cos t``, one mode."""
    omega = 1.0
    source = SeparableSource((
        (1.0, lap_bubble(), harmonic("cos", 1, omega)),
        (-1.0, bubble(), harmonic("sin", 1, omega)),
    ))
    exact = SeparableSource(((1.0, bubble(), harmonic("cos", 1, omega)),))
    one_ = CoefficientField.constant(1.0)
    return ProblemSpec(omega, 1, one_, one_, source, exact, name="example1")


def example2(N: int = 8) -> ProblemSpec:
    """Time-analytic benchmark: ``u = e^t sin^3(t) sin(pi x1) sin(pi x2)``."""
    omega = 1.0
    source = SeparableSource(((1.0, sinsin(1, 1), ex2_source_time(omega)),))
    exact = SeparableSource(((1.0, sinsin(1, 1), exp_sin3(omega)),))
    one_ = CoefficientField.constant(1.0)
    return ProblemSpec(omega, N, one_, one_, source, exact, name="example2")
