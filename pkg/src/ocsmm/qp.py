"""Dual quadratic program of the one-class machine.

The problem solved here is

    minimize    1/2 alpha^T K alpha
    subject to  0 <= alpha_i <= 1/(nu * ell),  sum_i alpha_i = 1

over a precomputed Gram matrix K. The production path is a pairwise
coordinate solver (:func:`solve_smo`) that repeatedly optimizes the
maximal-violating pair under the simplex constraint. An independent
projected-gradient reference (:func:`brute_force_solve`) with exact
projection onto the box-constrained simplex serves as the oracle the
solver is certified against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverStalledError
from .kernels import GramMatrix

FEASIBLE_TOL = 1e-9


@dataclass(frozen=True)
class SolverSettings:
    """Tolerances and limits of the dual solver.

    max_iter defaults to 1e5 * ell, resolved when the problem size is known.
    bound_tol classifies coefficients as free vs at a box bound.
    """

    kkt_tol: float = 1e-6
    max_iter: int | None = None
    bound_tol: float = 1e-9

    def __post_init__(self):
        if not self.kkt_tol > 0:
            raise ValueError("kkt_tol must be positive")
        if self.max_iter is not None and not self.max_iter > 0:
            raise ValueError("max_iter must be positive")
        if not self.bound_tol > 0:
            raise ValueError("bound_tol must be positive")

    def resolve_max_iter(self, ell: int) -> int:
        return self.max_iter if self.max_iter is not None else 100_000 * ell


@dataclass(frozen=True)
class DualProblem:
    """A Gram matrix plus the outlier-fraction parameter nu in (0, 1]."""

    gram: GramMatrix
    nu: float

    def __post_init__(self):
        if not 0.0 < self.nu <= 1.0:
            raise ValueError(f"nu must be in (0, 1], got {self.nu}")

    @property
    def ell(self) -> int:
        return self.gram.ell

    @property
    def upper_bound(self) -> float:
        return 1.0 / (self.nu * self.ell)


@dataclass(frozen=True)
class DualSolution:
    """Optimal coefficients plus the offset and bookkeeping index sets.

    margin_sv holds indices with 0 < alpha_i < 1/(nu ell) (free support
    measures); bound_sv holds indices at the upper bound, i.e. the training
    groups flagged as outliers.
    """

    alpha: np.ndarray
    rho: float
    objective: float
    margin_sv: np.ndarray
    bound_sv: np.ndarray
    kkt_residual: float

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float).copy()
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        for name in ("margin_sv", "bound_sv"):
            idx = np.asarray(getattr(self, name), dtype=int).copy()
            idx.setflags(write=False)
            object.__setattr__(self, name, idx)

    @property
    def support(self) -> np.ndarray:
        """Indices with alpha_i above the zero threshold."""
        return np.flatnonzero(self.alpha > FEASIBLE_TOL)


def _feasible_start(ell: int, cap: float) -> np.ndarray:
    """Deterministic feasible point: fill the box from the left."""
    alpha = np.zeros(ell)
    k = min(int(np.floor(1.0 / cap)), ell)  # number of coefficients at the cap
    alpha[:k] = cap
    if k < ell:
        alpha[k] = 1.0 - k * cap
    else:
        alpha[ell - 1] = 1.0 - (ell - 1) * cap
    return alpha


def _check_feasible(alpha: np.ndarray, cap: float):
    if alpha.size == 0:
        raise ValueError("alpha is empty")
    if np.any(alpha < -FEASIBLE_TOL) or np.any(alpha > cap + FEASIBLE_TOL):
        raise ValueError("alpha violates box constraints")
    if abs(float(alpha.sum()) - 1.0) > FEASIBLE_TOL:
        raise ValueError("alpha does not sum to 1")


def compute_rho(alpha: np.ndarray, gram: GramMatrix, nu: float,
                bound_tol: float = 1e-9) -> float:
    """Offset recovered from the KKT conditions.

    If free support measures exist, rho is the mean of their decision values
    f_i = (K alpha)_i. Otherwise rho = (lo + hi) / 2 where lo is the largest
    f_i among coefficients at the upper bound and hi the smallest f_i among
    zero coefficients (hi falls back to lo when nothing is at zero).
    """
    alpha = np.asarray(alpha, dtype=float)
    if alpha.size == 0:
        raise ValueError("alpha is empty")
    cap = 1.0 / (nu * alpha.size)
    f = gram.entries @ alpha
    margin = (alpha > bound_tol) & (alpha < cap - bound_tol)
    if np.any(margin):
        return float(f[margin].mean())
    upper = alpha >= cap - bound_tol
    if not np.any(upper):
        raise ValueError("no support measures; alpha is not feasible")
    lo = float(f[upper].max())
    zero = alpha <= bound_tol
    hi = float(f[zero].min()) if np.any(zero) else lo
    return 0.5 * (lo + hi)


def _kkt_residual(k: np.ndarray, alpha: np.ndarray, rho: float, cap: float,
                  bound_tol: float) -> float:
    f = k @ alpha
    resid = np.zeros_like(f)
    zero = alpha <= bound_tol
    upper = alpha >= cap - bound_tol
    free = ~zero & ~upper
    resid[zero] = np.maximum(0.0, rho - f[zero])
    resid[upper] = np.maximum(0.0, f[upper] - rho)
    resid[free] = np.abs(f[free] - rho)
    return float(resid.max(initial=0.0))


def kkt_violation(problem: DualProblem, solution: DualSolution) -> float:
    """Largest violation of the sign conditions on f_i - rho.

    Zero coefficients require f_i >= rho, upper-bound coefficients require
    f_i <= rho, and free coefficients require f_i = rho; the return value is
    the largest one-sided residual, 0 for an exact solution.
    """
    return _kkt_residual(problem.gram.entries, solution.alpha, solution.rho,
                         problem.upper_bound, FEASIBLE_TOL)


def _finalize(problem: DualProblem, alpha: np.ndarray, bound_tol: float) -> DualSolution:
    cap = problem.upper_bound
    _check_feasible(alpha, cap)
    k = problem.gram.entries
    objective = 0.5 * float(alpha @ (k @ alpha))
    rho = compute_rho(alpha, problem.gram, problem.nu, bound_tol)
    return DualSolution(
        alpha=alpha,
        rho=rho,
        objective=objective,
        margin_sv=np.flatnonzero((alpha > bound_tol) & (alpha < cap - bound_tol)),
        bound_sv=np.flatnonzero(alpha >= cap - bound_tol),
        kkt_residual=_kkt_residual(k, alpha, rho, cap, bound_tol),
    )


def solve_smo(problem: DualProblem, settings: SolverSettings = SolverSettings()) -> DualSolution:
    """Solve the dual by maximal-violating-pair coordinate updates.

    Each step moves mass between the index freest to grow with the smallest
    gradient and the index freest to shrink with the largest gradient,
    which preserves both constraints exactly. Deterministic: ties in the
    working-pair selection break toward the lowest index.
    """
    k = problem.gram.entries
    ell = problem.ell
    cap = problem.upper_bound
    alpha = _feasible_start(ell, cap)
    grad = k @ alpha
    max_iter = settings.resolve_max_iter(ell)

    gap = np.inf
    for _ in range(max_iter):
        can_up = alpha < cap
        can_down = alpha > 0.0
        if not can_up.any() or not can_down.any():
            gap = 0.0
            break
        up_candidates = np.where(can_up, grad, np.inf)
        down_candidates = np.where(can_down, grad, -np.inf)
        i = int(np.argmin(up_candidates))
        j = int(np.argmax(down_candidates))
        gap = float(grad[j] - grad[i])
        if gap <= settings.kkt_tol:
            break
        room_i = cap - alpha[i]
        room_j = alpha[j]
        room = min(room_i, room_j)
        eta = k[i, i] - 2.0 * k[i, j] + k[j, j]
        t = room if eta <= 0.0 else min(room, gap / eta)
        alpha[i] += t
        alpha[j] -= t
        if t == room:
            # snap exactly to whichever bound was hit so the index leaves
            # the working set instead of lingering an ulp away
            if room == room_i:
                alpha[i] = cap
            if room == room_j:
                alpha[j] = 0.0
        alpha[i] = min(alpha[i], cap)
        alpha[j] = max(alpha[j], 0.0)
        grad += t * (k[:, i] - k[:, j])
    else:
        raise SolverStalledError(
            f"no convergence after {max_iter} iterations (gap {gap:g})",
            best_alpha=alpha,
            residual=gap,
        )
    return _finalize(problem, alpha, settings.bound_tol)


def project_to_capped_simplex(v: np.ndarray, cap: float) -> np.ndarray:
    """Exact Euclidean projection onto {a : sum a = 1, 0 <= a_i <= cap}.

    The projection is clip(v - lam, 0, cap) for the shift lam at which the
    coordinate sum equals 1; phi(lam) is piecewise linear and non-increasing,
    so lam is found by scanning its breakpoints.
    """
    v = np.asarray(v, dtype=float)
    bps = np.sort(np.concatenate([v, v - cap]))
    phi = np.clip(v[None, :] - bps[:, None], 0.0, cap).sum(axis=1)
    idx = int(np.searchsorted(-phi, -1.0, side="left"))  # first phi[idx] <= 1
    if idx == 0:
        # every coordinate capped; reachable sum is ell * cap
        return np.full(v.shape, cap)
    if idx == len(bps):
        lam = bps[-1]
    elif phi[idx - 1] == phi[idx]:
        lam = bps[idx]
    else:
        frac = (phi[idx - 1] - 1.0) / (phi[idx - 1] - phi[idx])
        lam = bps[idx - 1] + frac * (bps[idx] - bps[idx - 1])
    return np.clip(v - lam, 0.0, cap)


def brute_force_solve(problem: DualProblem, iters: int = 100_000) -> DualSolution:
    """Projected-gradient reference solver; independent of :func:`solve_smo`.

    Fixed step 1/L with L the largest Gram eigenvalue, which makes the
    objective sequence monotone non-increasing. Intended as a test oracle
    for small problems (ell <= 50).
    """
    if problem.ell > 50:
        raise ValueError("reference solver is limited to 50 groups")
    if not iters > 0:
        raise ValueError("iters must be positive")
    k = problem.gram.entries
    cap = problem.upper_bound
    lip = float(np.linalg.eigvalsh(k)[-1])
    step = 1.0 / lip if lip > 0 else 1.0
    alpha = np.full(problem.ell, 1.0 / problem.ell)
    for _ in range(iters):
        grad = k @ alpha
        nxt = project_to_capped_simplex(alpha - step * grad, cap)
        if float(np.max(np.abs(nxt - alpha))) <= 1e-14:
            alpha = nxt
            break
        alpha = nxt
    return _finalize(problem, alpha, bound_tol=1e-9)
