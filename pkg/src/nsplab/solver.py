"""l1-synthesis recovery: min ||x||_1 subject to ||y - B x||_2 <= eps.

Two routes: an exact LP reformulation for the noiseless case (basis
pursuit), and an operator-splitting iteration for any eps >= 0.  The
splitting alternates a cached least-squares update in x, a shrinkage step,
and a projection of the residual onto the eps-ball.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dictionary import Dictionary
from .errors import DomainError
from .numerics import as_matrix, as_vector, soft_threshold
from .simplex import LpProblem, solve_lp


@dataclass(frozen=True)
class RecoveryProblem:
    B: np.ndarray                  # sensing composition, m x n
    y: np.ndarray                  # measurements
    eps: float = 0.0               # noise radius
    D: Dictionary | None = None    # optional, for signal-space error reports

    def __post_init__(self):
        B = as_matrix(self.B)
        y = as_vector(self.y)
        if y.size != B.shape[0]:
            raise DomainError(f"y has length {y.size}, B has {B.shape[0]} rows")
        if self.eps < 0.0:
            raise DomainError("eps must be nonnegative")
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "y", y)


@dataclass(frozen=True)
class RecoveryResult:
    x_hat: np.ndarray | None
    z_hat: np.ndarray | None
    objective: float | None
    residual_norm: float | None
    iterations: int
    status: str                    # 'converged' | 'max_iter' | 'infeasible'


@dataclass(frozen=True)
class SplitParams:
    """Knobs of the splitting iteration.

    step is the initial penalty; it adapts by factors of 2 whenever the
    primal/dual residual ratio exceeds 10, but only during the first
    adapt_iters iterations so the penalty settles (perpetual rebalancing can
    cycle).  Convergence needs both residuals below tol_abs plus a
    tol_rel-scaled norm term; the defaults keep the l1 objective within
    about 1e-7 of the exact LP value on noiseless problems.
    """

    step: float = 1.0
    max_iter: int = 50_000
    tol_abs: float = 1e-11
    tol_rel: float = 1e-9
    adapt_iters: int = 1000


def best_s_term_error(x, s: int) -> float:
    """l1 distance to the nearest s-sparse vector: the n-s smallest |x_i| summed."""
    v = np.abs(as_vector(x))
    if not (0 <= s <= v.size):
        raise DomainError(f"s must lie in [0, {v.size}], got {s}")
    if s == 0:
        return float(v.sum())
    return float(np.sort(v)[: v.size - s].sum())


def solve_bp_lp(B, y, tol: float = 1e-9) -> RecoveryResult:
    """Noiseless basis pursuit by exact LP: split x = x+ - x-, minimize the sum.

    Reports infeasible when y is not in the range of B (within tol).
    """
    Bm = as_matrix(B)
    yv = as_vector(y)
    m, n = Bm.shape
    objective = -np.ones(2 * n)  # maximize the negated l1 mass
    constraints = np.hstack([Bm, -Bm])
    problem = LpProblem.build(objective, constraints, yv, ["="] * m)
    res = solve_lp(problem, tol=tol)
    if res.status != "optimal":
        return RecoveryResult(None, None, None, None, res.iterations, "infeasible")
    x = res.x[:n] - res.x[n:]
    return RecoveryResult(
        x_hat=x,
        z_hat=None,
        objective=float(np.abs(x).sum()),
        residual_norm=float(np.linalg.norm(yv - Bm @ x)),
        iterations=res.iterations,
        status="converged",
    )


def solve_l1_synthesis(p: RecoveryProblem, params: SplitParams = SplitParams()) -> RecoveryResult:
    """Operator-splitting solve of min ||x||_1 s.t. ||y - B x||_2 <= eps.

    Consensus form: z mirrors x for the shrinkage step, r mirrors y - B x
    for the ball projection.  The x update solves a fixed ridge system
    (I + B^T B), cached once; the penalty only enters the shrinkage.
    """
    B, y, eps = p.B, p.y, p.eps
    m, n = B.shape
    # Unreachable measurement ball: compare eps with the distance to range(B).
    x_ls, *_ = np.linalg.lstsq(B, y, rcond=None)
    dist = float(np.linalg.norm(y - B @ x_ls))
    if dist > eps + 1e-7 * max(1.0, float(np.linalg.norm(y))) + 1e-9:
        return RecoveryResult(None, None, None, None, 0, "infeasible")

    rho = params.step
    solve_ridge = np.linalg.inv(np.eye(n) + B.T @ B)  # small n: cache the inverse
    x = np.zeros(n)
    z = np.zeros(n)
    r = y.copy() if eps >= float(np.linalg.norm(y)) else np.zeros(m)
    u_z = np.zeros(n)
    u_r = np.zeros(m)
    sqrt_dims = math.sqrt(n + m)
    for it in range(1, params.max_iter + 1):
        x = solve_ridge @ ((z - u_z) + B.T @ (y - r + u_r))
        bx = B @ x
        z_old, r_old = z, r
        z = soft_threshold(x + u_z, 1.0 / rho)
        w = y - bx + u_r
        wn = float(np.linalg.norm(w))
        r = w if wn <= eps else (eps / wn) * w
        u_z = u_z + x - z
        u_r = u_r + (y - bx) - r

        pri = math.hypot(float(np.linalg.norm(x - z)), float(np.linalg.norm(y - bx - r)))
        dual = rho * math.hypot(
            float(np.linalg.norm(z - z_old)),
            float(np.linalg.norm(B.T @ (r - r_old))),
        )
        scale_pri = max(
            float(np.linalg.norm(x)),
            float(np.linalg.norm(z)),
            float(np.linalg.norm(r)),
            float(np.linalg.norm(bx)),
            1.0,
        )
        scale_dual = max(rho * math.hypot(float(np.linalg.norm(u_z)), float(np.linalg.norm(u_r))), 1.0)
        eps_pri = sqrt_dims * params.tol_abs + params.tol_rel * scale_pri
        eps_dual = sqrt_dims * params.tol_abs + params.tol_rel * scale_dual
        if pri < eps_pri and dual < eps_dual:
            return RecoveryResult(
                x_hat=x,
                z_hat=p.D.matrix @ x if p.D is not None else None,
                objective=float(np.abs(x).sum()),
                residual_norm=float(np.linalg.norm(y - bx)),
                iterations=it,
                status="converged",
            )
        if it % 10 == 0 and it <= params.adapt_iters:
            # residual balancing; scaled duals are rescaled with rho
            if pri > 10.0 * dual:
                rho *= 2.0
                u_z /= 2.0
                u_r /= 2.0
            elif dual > 10.0 * pri:
                rho /= 2.0
                u_z *= 2.0
                u_r *= 2.0
    return RecoveryResult(
        x_hat=x,
        z_hat=p.D.matrix @ x if p.D is not None else None,
        objective=float(np.abs(x).sum()),
        residual_norm=float(np.linalg.norm(y - B @ x)),
        iterations=params.max_iter,
        status="max_iter",
    )


def attach_signal(result: RecoveryResult, D: Dictionary) -> RecoveryResult:
    """Fill z_hat = D x_hat on a successful result."""
    if result.x_hat is None:
        return result
    return RecoveryResult(
        x_hat=result.x_hat,
        z_hat=D.matrix @ result.x_hat,
        objective=result.objective,
        residual_norm=result.residual_norm,
        iterations=result.iterations,
        status=result.status,
    )


@dataclass(frozen=True)
class RecoveryBoundInputs:
    gamma: float
    eta: float
    eps: float
    C: float
    sigma: float
    s: int

    def __post_init__(self):
        if not (0.0 < self.gamma < 1.0):
            raise DomainError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not (self.eta > 0.0):
            raise DomainError("eta must be positive")


@dataclass(frozen=True)
class RecoveryReport:
    err_x: float
    err_z: float
    sigma_s: float
    coefficient_bound: float
    signal_bound: float
    ok_x: bool
    ok_z: bool


def evaluate_recovery(
    x0, result: RecoveryResult, D: Dictionary, b: RecoveryBoundInputs, slack: float = 1e-6
) -> RecoveryReport:
    """Compare achieved errors against the certified worst-case bounds.

    coefficient bound: (2 gamma + 2)/(1 - gamma) sigma_s(x0) + 2 eps / (C sigma eta);
    signal bound: ||D||_2 times the coefficient bound.
    """
    x0v = as_vector(x0)
    if result.x_hat is None:
        raise DomainError("recovery result carries no solution")
    sigma_s = best_s_term_error(x0v, b.s)
    coeff_bound = (2.0 * b.gamma + 2.0) / (1.0 - b.gamma) * sigma_s + 2.0 * b.eps / (
        b.C * b.sigma * b.eta
    )
    signal_bound = D.op_norm * coeff_bound
    err_x = float(np.linalg.norm(result.x_hat - x0v))
    err_z = float(np.linalg.norm(D.matrix @ (result.x_hat - x0v)))
    return RecoveryReport(
        err_x=err_x,
        err_z=err_z,
        sigma_s=sigma_s,
        coefficient_bound=coeff_bound,
        signal_bound=signal_bound,
        ok_x=err_x <= coeff_bound + slack,
        ok_z=err_z <= signal_bound + slack,
    )


def recovery_result_to_json(result: RecoveryResult) -> dict:
    return {
        "status": result.status,
        "objective": result.objective,
        "residual_norm": result.residual_norm,
        "iterations": result.iterations,
        "x_hat": None if result.x_hat is None else result.x_hat.tolist(),
        "z_hat": None if result.z_hat is None else result.z_hat.tolist(),
    }
