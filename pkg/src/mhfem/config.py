"""Flat ``key = value`` run configurations.

Example::

    # same problem as the built-in example1
    name = example1
    omega = 1
    N = 1
    sigma = 1
    nu = 1
    levels = 9, 27, 81
    source.1 = 1 * lap_bubble * cos(1)
    source.2 = -1 * bubble * sin(1)
    exact.1 = 1 * bubble * cos(1)

Each ``source.<i>`` / ``exact.<i>`` line is one separable term
``coefficient * spatial_factor * time_factor`` using the names registered in
:mod:`mhfem.problems`. Terms are taken in ascending ``<i>`` order. Without
``exact.*`` lines no efficiency indices are reported.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .assembly import CoefficientField
from .fourier import ProblemSpec, SeparableSource
from .linalg import DEFAULT_TOL
from .problems import spatial_factor, time_factor
from .quadrature import DEFAULT_DEGREE

DEFAULT_LEVELS = (9, 27, 81, 243)

KNOWN_KEYS = {"name", "omega", "N", "sigma", "nu", "levels", "rel_tol", "quad_degree",
              "source", "exact"}


class ConfigError(ValueError):
    """Schema violation; the message names the offending field."""


@dataclass
class RunConfig:
    problem: str
    levels: tuple = DEFAULT_LEVELS
    N: int = 1
    omega: float = 1.0
    rel_tol: float = DEFAULT_TOL
    quad_degree: int = DEFAULT_DEGREE
    out: str | None = None
    fmt: str = "csv"
    spec: ProblemSpec | None = field(default=None, repr=False)

    def __post_init__(self):
        self.levels = parse_levels(self.levels)
        if self.N < 0:
            raise ConfigError(f"N: must be >= 0, got {self.N}")
        if not 0.0 < self.rel_tol < 1.0:
            raise ConfigError(f"rel_tol: must lie in (0, 1), got {self.rel_tol}")
        if self.fmt not in ("csv", "table"):
            raise ConfigError(f"format: expected csv or table, got {self.fmt!r}")


def parse_levels(levels) -> tuple:
    if isinstance(levels, str):
        try:
            levels = [int(v) for v in levels.replace(" ", "").split(",") if v]
        except ValueError as exc:
            raise ConfigError(f"levels: expected comma-separated integers, got {levels!r}") from exc
    levels = tuple(int(v) for v in levels)
    if not levels:
        raise ConfigError("levels: at least one level is required")
    if any(v < 1 for v in levels):
        raise ConfigError(f"levels: cells per side must be positive, got {levels}")
    return tuple(sorted(set(levels)))


def _float(key, text):
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from exc


def _int(key, text):
    try:
        return int(text)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from exc


def parse_term(key: str, text: str, omega: float):
    parts = [p.strip() for p in text.split("*")]
    if len(parts) != 3:
        raise ConfigError(f"{key}: expected 'coef * spatial * time', got {text!r}")
    coef = _float(key, parts[0])
    try:
        return coef, spatial_factor(parts[1]), time_factor(parts[2], omega)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{key}: {exc}") from exc


def parse_text(text: str) -> dict:
    """Raw ``key -> value`` mapping; ``source.<i>`` keys keep their suffix."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        base = key.split(".", 1)[0]
        if base not in KNOWN_KEYS:
            raise ConfigError(f"{key}: unknown key (line {lineno})")
        if base in ("source", "exact") and "." not in key:
            raise ConfigError(f"{key}: terms need an index, e.g. {key}.1 (line {lineno})")
        if key in out:
            raise ConfigError(f"{key}: duplicate key (line {lineno})")
        out[key] = value
    return out


def _terms(raw: dict, prefix: str, omega: float):
    keyed = []
    for key, value in raw.items():
        if key.startswith(prefix + "."):
            idx = _int(key, key.split(".", 1)[1])
            keyed.append((idx, key, value))
    keyed.sort()
    return tuple(parse_term(key, value, omega) for _, key, value in keyed)


def _positive(key, text):
    v = _float(key, text)
    if not v > 0.0:
        raise ConfigError(f"{key}: must be positive, got {v}")
    return v


def problem_from_mapping(raw: dict) -> ProblemSpec:
    omega = _positive("omega", raw.get("omega", "1"))
    N = _int("N", raw.get("N", "1"))
    if N < 0:
        raise ConfigError(f"N: must be >= 0, got {N}")
    sigma = CoefficientField.constant(_positive("sigma", raw.get("sigma", "1")))
    nu = CoefficientField.constant(_positive("nu", raw.get("nu", "1")))
    source = SeparableSource(_terms(raw, "source", omega))
    exact_terms = _terms(raw, "exact", omega)
    exact = SeparableSource(exact_terms) if exact_terms else None
    return ProblemSpec(omega, N, sigma, nu, source, exact, name=raw.get("name", "custom"))


def load_config(path, levels=None, rel_tol=None, out=None, fmt="csv") -> RunConfig:
    """Read a custom-problem file; command-line values override file values."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from exc
    raw = parse_text(text)
    spec = problem_from_mapping(raw)
    return RunConfig(
        problem="custom",
        levels=levels if levels is not None else raw.get("levels", DEFAULT_LEVELS),
        N=spec.N,
        omega=spec.omega,
        rel_tol=rel_tol if rel_tol is not None else _float("rel_tol", raw.get("rel_tol", str(DEFAULT_TOL))),
        quad_degree=_int("quad_degree", raw.get("quad_degree", str(DEFAULT_DEGREE))),
        out=out,
        fmt=fmt,
        spec=spec,
    )
