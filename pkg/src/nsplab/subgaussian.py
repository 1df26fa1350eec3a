"""Subgaussian row distributions: parameters, sampling, and empirical checks.

A row distribution is tagged with (alpha, sigma): alpha lower-bounds
E|<phi, z>| over unit z and sigma gives the Gaussian-type tail
Pr(|<phi, z>| >= t) <= 2 exp(-t^2 / (2 sigma^2)).  The empirical-width
constant C is 1 for Gaussian rows; for rademacher rows no universal value is
published, so C is a required explicit input there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .numerics import as_matrix, as_vector
from .rng import RngStream

KINDS = ("std_gaussian", "gaussian_sigma", "rademacher")

EIG_FLOOR = 1e-12  # below this, a covariance eigenvalue counts as non-positive

_SAMPLE_BLOCK = 200_000


@dataclass(frozen=True)
class SubgaussianSpec:
    kind: str
    dim: int
    alpha: float
    sigma: float
    width_constant: float           # the C in W_m(S) <= C sigma w(S)
    covariance: np.ndarray | None = None
    sqrt_covariance: np.ndarray | None = None


@dataclass(frozen=True)
class TailPoint:
    t: float
    empirical: float
    bound: float
    std_error: float
    ok: bool


@dataclass(frozen=True)
class TailReport:
    points: tuple
    samples: int

    @property
    def ok(self) -> bool:
        return all(p.ok for p in self.points)


def make_spec(kind, d, covariance=None, width_constant=None) -> SubgaussianSpec:
    """Build a row-distribution spec with its (alpha, sigma, C) parameters."""
    if kind not in KINDS:
        raise DomainError(f"unknown subgaussian kind {kind!r}")
    if d < 1:
        raise DomainError("dimension must be at least 1")
    if kind == "std_gaussian":
        if covariance is not None:
            raise DomainError("std_gaussian takes no covariance")
        return SubgaussianSpec(kind, d, math.sqrt(2.0 / math.pi), 1.0, 1.0)
    if kind == "rademacher":
        if covariance is not None:
            raise DomainError("rademacher takes no covariance")
        if width_constant is None or not (width_constant > 0):
            raise DomainError(
                "rademacher rows need an explicit positive width constant C"
            )
        # Khintchine lower constant 1/sqrt(2); Hoeffding tail gives sigma = 1.
        return SubgaussianSpec(kind, d, 1.0 / math.sqrt(2.0), 1.0, float(width_constant))
    # gaussian_sigma
    if covariance is None:
        raise DomainError("gaussian_sigma requires a covariance matrix")
    S = as_matrix(covariance)
    if S.shape != (d, d):
        raise DomainError(f"covariance has shape {S.shape}, expected {(d, d)}")
    if not np.allclose(S, S.T, atol=1e-10):
        raise DomainError("covariance must be symmetric")
    evals, evecs = np.linalg.eigh(0.5 * (S + S.T))
    if evals[0] <= EIG_FLOOR:
        raise DomainError(f"covariance must be positive definite (min eig {evals[0]:.3e})")
    sqrt_cov = (evecs * np.sqrt(evals)) @ evecs.T
    alpha = math.sqrt(evals[0]) * math.sqrt(2.0 / math.pi)
    sigma = math.sqrt(evals[-1])
    S = S.copy()
    S.flags.writeable = False
    sqrt_cov.flags.writeable = False
    return SubgaussianSpec(kind, d, alpha, sigma, 1.0, S, sqrt_cov)


def condition_number(spec: SubgaussianSpec) -> float:
    """kappa = sigma_max^2 / sigma_min^2 of the covariance (1 when isotropic)."""
    if spec.kind != "gaussian_sigma":
        return 1.0
    evals = np.linalg.eigvalsh(spec.covariance)
    return float(evals[-1] / evals[0])


def sample_measurement_matrix(spec: SubgaussianSpec, m, d, rng: RngStream) -> np.ndarray:
    """m x d matrix with rows drawn iid from the spec's distribution."""
    if m < 1 or d < 1:
        raise DomainError("m and d must be at least 1")
    if d != spec.dim:
        raise DomainError(f"spec is {spec.dim}-dimensional, requested d={d}")
    if spec.kind == "rademacher":
        return rng.signs((m, d))
    G = rng.normal((m, d))
    if spec.kind == "std_gaussian":
        return G
    return G @ spec.sqrt_covariance  # rows are Sigma^{1/2} g


def small_ball_lower_bound(spec: SubgaussianSpec, t: float) -> float:
    """Marginal small-ball bound (alpha - t)^2 / (4 sigma^2), valid for 0 < t < alpha."""
    if not (0.0 < t < spec.alpha):
        raise DomainError(f"t must lie in (0, alpha) = (0, {spec.alpha}), got {t}")
    return (spec.alpha - t) ** 2 / (4.0 * spec.sigma**2)


def verify_tail(spec: SubgaussianSpec, z, t_grid, samples, rng: RngStream) -> TailReport:
    """Empirical tail frequencies of <phi, z> against 2 exp(-t^2/(2 sigma^2)).

    Flags any grid point where the frequency exceeds the bound by more than
    three binomial standard errors.
    """
    zv = as_vector(z)
    if abs(np.linalg.norm(zv) - 1.0) > 1e-10:
        raise DomainError("z must be a unit vector")
    ts = as_vector(t_grid)
    counts = np.zeros(ts.size)
    done = 0
    while done < samples:
        block = min(_SAMPLE_BLOCK, samples - done)
        phi = sample_measurement_matrix(spec, block, spec.dim, rng)
        u = np.abs(phi @ zv)
        counts += (u[None, :] >= ts[:, None]).sum(axis=1)
        done += block
    points = []
    for t, cnt in zip(ts, counts):
        emp = cnt / samples
        bound = 2.0 * math.exp(-(t**2) / (2.0 * spec.sigma**2))
        se = math.sqrt(max(emp * (1.0 - emp), 0.0) / samples)
        points.append(TailPoint(float(t), float(emp), bound, se, emp <= bound + 3.0 * se))
    return TailReport(tuple(points), int(samples))


def spec_to_json(spec: SubgaussianSpec, covariance_path=None) -> dict:
    """Plain JSON object {kind, alpha, sigma, C, covariance_path}."""
    return {
        "kind": spec.kind,
        "alpha": spec.alpha,
        "sigma": spec.sigma,
        "C": spec.width_constant,
        "covariance_path": covariance_path,
    }
