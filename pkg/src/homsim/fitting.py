"""Damped Gauss-Newton least squares with a Levenberg-style schedule.

Minimizes sum_i w_i * (model(x_i; theta) - y_i)^2 given the residual
vector and its analytic Jacobian.  Damping lambda starts at 1e-3, is
multiplied by 10 after a rejected step and divided by 10 after an
accepted one.  Convergence: relative parameter change below `tol`
(default 1e-8) or a fully stalled damping search; running out of
iterations raises, carrying the best iterate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


class FitConvergenceError(RuntimeError):
    """Fit did not converge; .best holds the last accepted FitResult."""

    def __init__(self, message: str, best: "FitResult"):
        super().__init__(message)
        self.best = best


@dataclass
class FitResult:
    params: np.ndarray
    covariance: np.ndarray
    residual_norm: float
    n_iterations: int
    converged: bool


def gauss_newton(residual: Callable[[np.ndarray], np.ndarray],
                 jacobian: Callable[[np.ndarray], np.ndarray],
                 theta0: np.ndarray,
                 tol: float = 1e-8,
                 max_iter: int = 200,
                 lambda0: float = 1e-3,
                 raise_on_maxiter: bool = True) -> FitResult:
    """Run the damped iteration from theta0.

    residual(theta) -> (m,) weighted residuals
    jacobian(theta) -> (m, n) weighted Jacobian d residual / d theta

    With raise_on_maxiter=False an iteration-capped run returns its best
    iterate (converged=False) instead of raising; useful for baseline
    fits of nearly degenerate models where parameters can drift along a
    flat valley indefinitely.
    """
    theta = np.asarray(theta0, dtype=float).copy()
    r = residual(theta)
    cost = float(r @ r)
    lam = lambda0
    converged = False
    plateau = 0
    it = 0
    # trial steps may wander into overflow territory; they are simply
    # rejected, so the numpy warnings carry no information
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for it in range(1, max_iter + 1):
            jac = jacobian(theta)
            grad = jac.T @ r
            hess = jac.T @ jac
            diag = np.diag(np.maximum(np.diag(hess), 1e-300))
            accepted = False
            step = None
            for _ in range(60):
                try:
                    step = np.linalg.solve(hess + lam * diag, -grad)
                except np.linalg.LinAlgError:
                    lam *= 10.0
                    continue
                cand = theta + step
                r_cand = residual(cand)
                cost_cand = float(r_cand @ r_cand)
                if math.isfinite(cost_cand) and cost_cand <= cost:
                    gain = cost - cost_cand
                    theta, r, cost = cand, r_cand, cost_cand
                    lam = max(lam / 10.0, 1e-15)
                    accepted = True
                    break
                lam *= 10.0
                if lam > 1e15:
                    break
            if not accepted:
                converged = True      # stationary: no descent direction left
                break
            rel = np.max(np.abs(step) / np.maximum(np.abs(theta), 1e-300))
            if rel < tol:
                converged = True
                break
            # plateau: steps keep accepted but the cost no longer moves
            plateau = plateau + 1 if gain <= 1e-14 * max(cost, 1e-300) else 0
            if plateau >= 3:
                converged = True
                break
        cov = _covariance(jacobian(theta), r, theta.size)
    result = FitResult(theta, cov, math.sqrt(cost), it, converged)
    if not converged and raise_on_maxiter:
        raise FitConvergenceError(
            f"no convergence after {max_iter} iterations "
            f"(residual norm {result.residual_norm:.3e})", result)
    return result


def _covariance(jac: np.ndarray, r: np.ndarray, n_params: int) -> np.ndarray:
    """sigma_hat^2 (J^T J)^-1 with sigma_hat^2 from the residuals."""
    m = r.size
    dof = max(m - n_params, 1)
    sigma2 = float(r @ r) / dof
    jtj = jac.T @ jac
    try:
        inv = np.linalg.inv(jtj)
    except np.linalg.LinAlgError:
        inv = np.linalg.pinv(jtj)
    cov = sigma2 * inv
    return 0.5 * (cov + cov.T)
