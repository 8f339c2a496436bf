"""Sparse solvers for the per-mode systems.

Mode ``k >= 1`` leads to the symmetric indefinite block system::

    [ -k w M    -K  ] [u_s]   [-f_c]
    [   -K    k w M ] [u_c] = [-f_s]

i.e. ``K u_c + k w M u_s = f_c`` and ``K u_s - k w M u_c = f_s``, the cosine
and sine parts of ``sigma u_t - div(nu grad u) = f``.

solved by MINRES with the block-diagonal preconditioner
``diag(k w M + K, k w M + K)``. Mode 0 is ``K u_c = f_c``, solved by
preconditioned conjugate gradients.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

DEFAULT_TOL = 1e-6
DEFAULT_MAXITER = 500


class ConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class FactorizationError(ValueError):
    """The matrix handed to :func:`factorize_spd` is not SPD."""


@dataclass
class SolveResult:
    x: np.ndarray
    iterations: int
    residuals: list = field(default_factory=list)
    converged: bool = True


class SPDFactorization:
    """Sparse LU of an SPD matrix with symmetric ordering and no row pivoting.

    Without pivoting the diagonal of ``U`` is the ``D`` of an ``LDL^T``
    factorization, so a non-positive entry proves the matrix is not SPD.
    """

    def __init__(self, A: sp.spmatrix):
        A = sp.csc_matrix(A)
        if A.shape[0] != A.shape[1]:
            raise FactorizationError(f"matrix is not square: {A.shape}")
        self.shape = A.shape
        try:
            self._lu = spla.splu(
                A,
                permc_spec="MMD_AT_PLUS_A",
                diag_pivot_thresh=0.0,
                options={"SymmetricMode": True},
            )
        except RuntimeError as exc:  # exactly singular
            raise FactorizationError(f"factorization broke down: {exc}") from exc
        pivots = self._lu.U.diagonal()
        if not np.all(pivots > 0.0):
            bad = int(np.argmin(pivots))
            raise FactorizationError(
                f"non-positive pivot {pivots[bad]:.3e} at step {bad}; matrix is not SPD"
            )

    def solve(self, b: np.ndarray) -> np.ndarray:
        return self._lu.solve(np.asarray(b, dtype=float))

    __call__ = solve


def factorize_spd(A: sp.spmatrix) -> SPDFactorization:
    return SPDFactorization(A)


@dataclass(eq=False)
class BlockSystem:
    """Saddle-point system of one mode; unknowns stacked as ``(u_s, u_c)``."""

    k: int
    omega: float
    M: sp.csr_matrix
    K: sp.csr_matrix
    rhs: np.ndarray

    @property
    def n(self) -> int:
        return self.M.shape[0]

    @property
    def shift(self) -> float:
        return self.k * self.omega

    def matvec(self, x: np.ndarray) -> np.ndarray:
        n = self.n
        xs, xc = x[:n], x[n:]
        Mxs, Mxc = self.M @ xs, self.M @ xc
        return np.concatenate([
            -self.shift * Mxs - self.K @ xc,
            -(self.K @ xs) + self.shift * Mxc,
        ])

    __matmul__ = matvec

    def as_sparse(self) -> sp.csr_matrix:
        kwM = self.shift * self.M
        return sp.bmat([[-kwM, -self.K], [-self.K, kwM]], format="csr")

    def split(self, x: np.ndarray):
        """Return ``(u_c, u_s)`` from a stacked solution vector."""
        return x[self.n:], x[:self.n]


def build_mode_system(k: int, omega: float, M, K, load_c, load_s) -> BlockSystem:
    if k < 1:
        raise ValueError(f"block systems exist for k >= 1 only, got k={k}")
    if M.shape != K.shape or M.shape[0] != M.shape[1]:
        raise ValueError(f"mass {M.shape} and stiffness {K.shape} must be square and equal")
    load_c = np.asarray(load_c, dtype=float)
    load_s = np.asarray(load_s, dtype=float)
    if load_c.shape != (M.shape[0],) or load_s.shape != (M.shape[0],):
        raise ValueError("load vectors do not match the matrix dimension")
    return BlockSystem(k, float(omega), sp.csr_matrix(M), sp.csr_matrix(K),
                       np.concatenate([-load_c, -load_s]))


class BlockPreconditioner:
    """``diag(S, S)^{-1}`` with ``S = k w M + K`` factorized once."""

    def __init__(self, system: BlockSystem, factorization: Optional[SPDFactorization] = None):
        self.n = system.n
        self.factor = factorization or factorize_spd(
            (system.shift * system.M + system.K).tocsc()
        )

    def __call__(self, r: np.ndarray) -> np.ndarray:
        z = self.factor.solve(np.column_stack([r[:self.n], r[self.n:]]))
        return np.concatenate([z[:, 0], z[:, 1]])


def minres_solve(system, precond: Callable[[np.ndarray], np.ndarray] | None = None,
                 rel_tol: float = DEFAULT_TOL, maxiter: int = DEFAULT_MAXITER,
                 rhs: np.ndarray | None = None) -> SolveResult:
    """Preconditioned MINRES from a zero initial guess.

    Stops once the preconditioned residual norm ``||b - Ax||_{P^{-1}}`` has
    dropped by ``rel_tol`` relative to its initial value. ``system`` is a
    :class:`BlockSystem` or anything with ``matvec``/``@`` and ``rhs``.
    """
    if not 0.0 < rel_tol < 1.0:
        raise ValueError(f"rel_tol must lie in (0, 1), got {rel_tol}")
    b = np.asarray(system.rhs if rhs is None else rhs, dtype=float)
    apply_A = system.matvec if hasattr(system, "matvec") else (lambda v: system @ v)
    apply_P = precond if precond is not None else (lambda v: v)

    x = np.zeros_like(b)
    r1 = b.copy()
    y = apply_P(r1)
    beta1 = float(r1 @ y)
    if beta1 < 0.0:
        raise ValueError("preconditioner is not positive definite")
    beta1 = np.sqrt(beta1)
    history = [beta1]
    if beta1 == 0.0:
        return SolveResult(x, 0, history)

    r2 = r1.copy()
    oldb, beta = 0.0, beta1
    dbar = epsln = 0.0
    phibar = beta1
    cs, sn = -1.0, 0.0
    w = np.zeros_like(b)
    w2 = np.zeros_like(b)
    eps = np.finfo(float).eps

    for itn in range(1, maxiter + 1):
        v = y / beta
        y = apply_A(v)
        if itn >= 2:
            y = y - (beta / oldb) * r1
        alfa = float(v @ y)
        y = y - (alfa / beta) * r2
        r1, r2 = r2, y
        y = apply_P(r2)
        oldb = beta
        beta = float(r2 @ y)
        if beta < 0.0:
            raise ValueError("preconditioner is not positive definite")
        beta = np.sqrt(beta)

        # QR update of the Lanczos tridiagonal matrix
        oldeps = epsln
        delta = cs * dbar + sn * alfa
        gbar = sn * dbar - cs * alfa
        epsln = sn * beta
        dbar = -cs * beta
        gamma = max(np.hypot(gbar, beta), eps)
        cs, sn = gbar / gamma, beta / gamma
        phi = cs * phibar
        phibar = sn * phibar

        w1, w2 = w2, w
        w = (v - oldeps * w1 - delta * w2) / gamma
        x = x + phi * w
        history.append(phibar)
        if phibar <= rel_tol * beta1 or beta == 0.0:
            return SolveResult(x, itn, history)

    result = SolveResult(x, maxiter, history, converged=False)
    raise ConvergenceError(
        f"MINRES did not reach rel_tol={rel_tol:g} in {maxiter} iterations "
        f"(reduction {phibar / beta1:.2e})", result)


def pcg_solve(K, rhs, rel_tol: float = DEFAULT_TOL, maxiter: int = DEFAULT_MAXITER,
              precond: Callable[[np.ndarray], np.ndarray] | None = None) -> SolveResult:
    """Preconditioned conjugate gradients, stopping at ``||r|| <= rel_tol ||b||``."""
    if not 0.0 < rel_tol < 1.0:
        raise ValueError(f"rel_tol must lie in (0, 1), got {rel_tol}")
    b = np.asarray(rhs, dtype=float)
    x = np.zeros_like(b)
    bnorm = float(np.linalg.norm(b))
    history = [bnorm]
    if bnorm == 0.0:
        return SolveResult(x, 0, history)
    apply_P = precond if precond is not None else (lambda v: v)
    r = b.copy()
    z = apply_P(r)
    p = z.copy()
    rz = float(r @ z)
    for itn in range(1, maxiter + 1):
        Ap = K @ p
        pAp = float(p @ Ap)
        if pAp <= 0.0:
            raise ValueError("matrix is not positive definite")
        alpha = rz / pAp
        x = x + alpha * p
        r = r - alpha * Ap
        rnorm = float(np.linalg.norm(r))
        history.append(rnorm)
        if rnorm <= rel_tol * bnorm:
            return SolveResult(x, itn, history)
        z = apply_P(r)
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    result = SolveResult(x, maxiter, history, converged=False)
    raise ConvergenceError(
        f"CG did not reach rel_tol={rel_tol:g} in {maxiter} iterations", result)
