"""Gaussian width machinery for the NSP-violating set.

w(S) = E sup_{x in S} <g, x> for standard Gaussian g.  For the violating set
S_gamma the supremum per draw reduces, via permutation and sign invariance,
to a maximization over the convex cone

    K = {u >= 0, sum_{l<=s} u_l >= gamma sum_{l>s} u_l}

intersected with the unit sphere, which equals the norm of the Euclidean
projection onto K of the rearranged vector.  A one-dimensional dual
surrogate gives a per-draw upper bound, and closed-form bounds cover the
same quantity deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dictionary import Dictionary
from .errors import DomainError
from .numerics import (
    as_matrix,
    as_vector,
    nonincreasing_rearrangement,
    operator_norm,
    soft_threshold,
)
from .rng import RngStream

DYKSTRA_TOL = 1e-10
DYKSTRA_MAX_SWEEPS = 100_000
_GOLDEN_TOL = 1e-8
_MC_BLOCK = 20_000
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ConeParams:
    """Cone K_{gamma,s} inside R^n."""

    gamma: float
    s: int
    n: int

    def __post_init__(self):
        if not (0.0 < self.gamma <= 1.0):
            raise DomainError(f"gamma must lie in (0, 1], got {self.gamma}")
        if not (1 <= self.s <= self.n):
            raise DomainError(f"need 1 <= s <= n, got s={self.s}, n={self.n}")

    def halfspace_normal(self) -> np.ndarray:
        a = np.full(self.n, -self.gamma)
        a[: self.s] = 1.0
        return a


@dataclass(frozen=True)
class WidthEstimate:
    mean: float
    std_error: float
    samples: int
    estimator: str           # cone_projection_exact | dual_upper_bound | empirical_width
    theory_bound: float | None = None

    def to_json(self) -> dict:
        return {
            "mean": self.mean,
            "std_error": self.std_error,
            "samples": self.samples,
            "estimator": self.estimator,
            "theory_bound": self.theory_bound,
        }


def unit_ball_width(n: int) -> float:
    """E ||g||_2 = sqrt(2) Gamma((n+1)/2) / Gamma(n/2)."""
    if n < 1:
        raise DomainError("n must be at least 1")
    return math.sqrt(2.0) * math.exp(math.lgamma((n + 1) / 2.0) - math.lgamma(n / 2.0))


def project_cone_batch(
    H, c: ConeParams, tol: float = DYKSTRA_TOL, max_sweeps: int = DYKSTRA_MAX_SWEEPS
) -> np.ndarray:
    """Row-wise Euclidean projection onto K via Dykstra's alternating scheme.

    Alternates between the nonnegative orthant and the halfspace
    {a @ u >= 0}; terminates when successive iterates move less than tol.
    """
    H = np.atleast_2d(np.asarray(H, dtype=float))
    a = c.halfspace_normal()
    asq = float(a @ a)
    X = H.copy()
    P = np.zeros_like(X)
    Q = np.zeros_like(X)
    for _ in range(max_sweeps):
        X_prev = X
        Y = np.maximum(X + P, 0.0)
        P = X + P - Y
        V = Y + Q
        dot = V @ a
        viol = dot < 0.0
        X = V.copy()
        if np.any(viol):
            X[viol] -= (dot[viol] / asq)[:, None] * a
        Q = V - X
        if np.max(np.abs(X - X_prev)) < tol:
            break
    return X


def project_onto_cone(h, c: ConeParams, tol: float = DYKSTRA_TOL) -> np.ndarray:
    """Euclidean projection of a single vector onto K_{gamma,s}."""
    v = as_vector(h)
    if v.size != c.n:
        raise DomainError(f"vector has length {v.size}, cone lives in R^{c.n}")
    return project_cone_batch(v[None, :], c, tol=tol)[0]


def cone_projection_values(Hstar, c: ConeParams, tol: float = DYKSTRA_TOL) -> np.ndarray:
    """Per-row sup over K cap sphere of <h*, u>: the projection norm."""
    return np.linalg.norm(project_cone_batch(Hstar, c, tol=tol), axis=1)


def dual_surrogate_values(Hstar, c: ConeParams, tol: float = _GOLDEN_TOL) -> np.ndarray:
    """Per-row upper bound on the cone supremum.

    min over t >= 0 of sqrt(sum_{head}(h + t)^2 + sum_{tail} S_{gamma t}(h)^2),
    found by golden-section search on [0, max(h)/gamma + 1]; the objective is
    convex in t, so the bracket suffices.
    """
    H = np.atleast_2d(np.asarray(Hstar, dtype=float))
    s, gamma = c.s, c.gamma
    head = H[:, :s]
    tail = H[:, s:]

    def objective(t):
        hv = ((head + t[:, None]) ** 2).sum(axis=1)
        if tail.shape[1] == 0:
            return hv
        shrunk = np.maximum(tail - gamma * t[:, None], 0.0)
        return hv + (shrunk**2).sum(axis=1)

    lo = np.zeros(H.shape[0])
    hi = H.max(axis=1) / gamma + 1.0
    iters = int(math.ceil(math.log(max(hi.max(), 1.0) / tol) / math.log(1.0 / _INVPHI))) + 1
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1 = objective(x1)
    f2 = objective(x2)
    for _ in range(iters):
        take_low = f1 < f2
        hi = np.where(take_low, x2, hi)
        lo = np.where(take_low, lo, x1)
        x1 = hi - _INVPHI * (hi - lo)
        x2 = lo + _INVPHI * (hi - lo)
        f1 = objective(x1)
        f2 = objective(x2)
        if np.max(hi - lo) < tol:
            break
    return np.sqrt(objective(0.5 * (lo + hi)))


def _mc_estimate(D, c: ConeParams, samples: int, rng: RngStream, per_draw) -> tuple:
    M = D.matrix if isinstance(D, Dictionary) else as_matrix(D)
    d = M.shape[0]
    vals = []
    done = 0
    while done < samples:
        block = min(_MC_BLOCK, samples - done)
        G = rng.normal((block, d))
        Hstar = nonincreasing_rearrangement(G @ M)
        vals.append(per_draw(Hstar, c))
        done += block
    v = np.concatenate(vals)
    mean = float(v.mean())
    se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return mean, se


def _theory_bound_or_zero(c: ConeParams, rho: float) -> float:
    return theory_width_bound(c, rho) if rho > 0.0 else 0.0


def width_DS_gamma_mc(D, c: ConeParams, samples: int, rng: RngStream) -> WidthEstimate:
    """Monte Carlo estimate of w(D S_gamma) via exact per-draw cone projection."""
    if samples < 100:
        raise DomainError("need at least 100 samples")
    rho = D.rho if isinstance(D, Dictionary) else float(np.max(np.sum(as_matrix(D) ** 2, axis=0)))
    mean, se = _mc_estimate(D, c, samples, rng, cone_projection_values)
    return WidthEstimate(mean, se, samples, "cone_projection_exact", _theory_bound_or_zero(c, rho))


def width_DS_gamma_dual(D, c: ConeParams, samples: int, rng: RngStream) -> WidthEstimate:
    """Monte Carlo upper bound on w(D S_gamma) via the dual surrogate."""
    if samples < 100:
        raise DomainError("need at least 100 samples")
    rho = D.rho if isinstance(D, Dictionary) else float(np.max(np.sum(as_matrix(D) ** 2, axis=0)))
    mean, se = _mc_estimate(D, c, samples, rng, dual_surrogate_values)
    return WidthEstimate(mean, se, samples, "dual_upper_bound", _theory_bound_or_zero(c, rho))


def theory_width_bound(c: ConeParams, rho: float) -> float:
    """Closed-form bound 6 gamma^{-1} sqrt(s rho log(sqrt(2) n / s))."""
    if not (rho > 0.0):
        raise DomainError(f"rho must be positive, got {rho}")
    arg = math.sqrt(2.0) * c.n / c.s
    if not (arg > 1.0):
        raise DomainError("log argument must exceed 1")
    return 6.0 / c.gamma * math.sqrt(c.s * rho * math.log(arg))


def crude_width_bound(D, n: int) -> float:
    """Operator-norm bound 2 ||D||_2 w(B_2^{n-1}): simple but carries sqrt(n)."""
    M = D.matrix if isinstance(D, Dictionary) else as_matrix(D)
    opn = D.op_norm if isinstance(D, Dictionary) else operator_norm(M)
    return 2.0 * opn * unit_ball_width(n)


@dataclass(frozen=True)
class MomentCheck:
    empirical: float
    bound: float
    std_error: float
    samples: int

    @property
    def ok(self) -> bool:
        return self.empirical <= self.bound + 3.0 * self.std_error


def check_soft_moment(sigma: float, t: float, samples: int, rng: RngStream) -> MomentCheck:
    """Second moment of the soft threshold of a N(0, sigma^2) draw against
    sigma^4 sqrt(2/(pi e)) t^{-2} exp(-t^2/(2 sigma^2))."""
    if not (sigma > 0.0 and t > 0.0):
        raise DomainError("sigma and t must be positive")
    v = soft_threshold(sigma * rng.normal(samples), t) ** 2
    bound = sigma**4 * math.sqrt(2.0 / (math.pi * math.e)) / t**2 * math.exp(
        -(t**2) / (2.0 * sigma**2)
    )
    return MomentCheck(
        float(v.mean()), bound, float(v.std(ddof=1) / math.sqrt(samples)), samples
    )


def check_lemma_key(D, s: int, samples: int, rng: RngStream) -> MomentCheck:
    """Root-mean-square of the s largest rearranged entries of D^T g against
    sqrt(4 rho log(sqrt(2) n / s))."""
    M = D.matrix if isinstance(D, Dictionary) else as_matrix(D)
    d, n = M.shape
    if not (1 <= s <= n):
        raise DomainError(f"need 1 <= s <= n, got s={s}")
    rho = D.rho if isinstance(D, Dictionary) else float(np.max(np.sum(M * M, axis=0)))
    vals = []
    done = 0
    while done < samples:
        block = min(_MC_BLOCK, samples - done)
        Hstar = nonincreasing_rearrangement(rng.normal((block, d)) @ M)
        vals.append(np.sqrt((Hstar[:, :s] ** 2).sum(axis=1) / s))
        done += block
    v = np.concatenate(vals)
    bound = math.sqrt(4.0 * rho * math.log(math.sqrt(2.0) * n / s))
    return MomentCheck(
        float(v.mean()), bound, float(v.std(ddof=1) / math.sqrt(samples)), samples
    )


@dataclass(frozen=True)
class SlepianCheck:
    lhs: float                  # estimated w(F S)
    rhs: float                  # ||F||_2 times estimated w(S)
    lhs_std_error: float
    rhs_std_error: float
    samples: int

    @property
    def ok(self) -> bool:
        slack = 3.0 * math.hypot(self.lhs_std_error, self.rhs_std_error)
        return self.lhs <= self.rhs + slack


def check_slepian_contraction(F, points, samples: int, rng: RngStream) -> SlepianCheck:
    """Contraction w(F S) <= ||F||_2 w(S) on the symmetrized finite set S.

    Draws are shared between the two sides when F is square, which makes the
    inequality hold draw by draw; otherwise the sides use independent streams.
    """
    Fm = as_matrix(F)
    pts = as_matrix(points)
    if pts.shape[1] != Fm.shape[1]:
        raise DomainError("points must live in the domain of F")
    pts = np.vstack([pts, -pts])  # enforce symmetry
    d, n = Fm.shape
    opn = operator_norm(Fm)
    fpts = pts @ Fm.T
    if d == n:
        G = rng.normal((samples, d))
        Gs = G
    else:
        G = rng.substream("lhs").normal((samples, d))
        Gs = rng.substream("rhs").normal((samples, n))
    lhs_vals = (G @ fpts.T).max(axis=1)
    rhs_vals = opn * (Gs @ pts.T).max(axis=1)
    return SlepianCheck(
        float(lhs_vals.mean()),
        float(rhs_vals.mean()),
        float(lhs_vals.std(ddof=1) / math.sqrt(samples)),
        float(rhs_vals.std(ddof=1) / math.sqrt(samples)),
        samples,
    )
