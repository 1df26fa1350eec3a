"""Stable null space property certification and related quantities.

The stable NSP of order s holds for a matrix A when every nonzero kernel
vector x satisfies ||x_T||_1 < gamma ||x_{T^c}||_1 for all supports |T| <= s
and some gamma < 1.  At desk scale this is decided exactly: for each support
and sign pattern, a small LP over the kernel parametrization maximizes the
signed head mass subject to unit tail mass, and gamma_star is the largest
value found.  The violating set

    S_gamma = {x on the unit sphere : ||x_T||_1 >= gamma ||x_{T^c}||_1
              for some |T| <= s}

carries the equivalent formulation: A has the stable NSP iff ||Ax||_2 is
bounded away from zero on S_gamma.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dictionary import Dictionary, full_spark_check
from .errors import BudgetExceededError, DomainError, NotFullSparkError
from .numerics import as_matrix, as_vector, kernel_basis
from .rng import RngStream
from .simplex import LpProblem, solve_lp

LP_BUDGET = 10**6


@dataclass(frozen=True)
class SgammaParams:
    """Parameters (gamma, s) of the violating set S_gamma."""

    gamma: float
    s: int

    def __post_init__(self):
        if not (0.0 < self.gamma <= 1.0):
            raise DomainError(f"gamma must lie in (0, 1], got {self.gamma}")
        if self.s < 1:
            raise DomainError(f"s must be at least 1, got {self.s}")


@dataclass(frozen=True)
class NspCertificate:
    gamma_star: float
    verdict: str                     # 'holds' | 'fails'
    s: int
    tol: float
    witness_support: tuple | None    # support T achieving gamma_star
    witness: np.ndarray | None       # kernel vector with unit tail l1 mass
    per_support_values: tuple        # ((T, best value over sign patterns), ...)

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"


@dataclass(frozen=True)
class EtaEstimate:
    """Best found value of min ||D x||_2 over S_gamma: an UPPER bound on the
    true infimum (the problem is nonconvex)."""

    eta_upper: float
    witness: np.ndarray
    probes: int
    restarts: int


class DnspResult(NamedTuple):
    verdict: str
    route: str
    certificate: NspCertificate


def in_S_gamma(x, p: SgammaParams, tol: float = 1e-9) -> bool:
    """Membership in S_gamma: unit norm and head mass >= gamma * tail mass.

    The s largest magnitudes (ties to the lowest index) maximize the head
    mass, so checking that support alone decides membership.
    """
    v = as_vector(x)
    if abs(np.linalg.norm(v) - 1.0) > tol:
        return False
    a = np.abs(v)
    order = np.argsort(-a, kind="stable")
    head = float(a[order[: p.s]].sum())
    tail = float(a.sum() - head)
    return head >= p.gamma * tail - tol


def _support_lp(N, T, signs, n, tol):
    """Maximize sum_{i in T} signs_i x_i over x = N c with ||x_{T^c}||_1 <= 1."""
    k = N.shape[1]
    Tc = [j for j in range(n) if j not in T]
    nt = len(Tc)
    obj = np.concatenate([np.asarray(signs) @ N[list(T), :], np.zeros(nt)])
    rows = np.zeros((2 * nt + 1, k + nt))
    rhs = np.zeros(2 * nt + 1)
    for jj, j in enumerate(Tc):
        rows[2 * jj, :k] = N[j]
        rows[2 * jj, k + jj] = -1.0
        rows[2 * jj + 1, :k] = -N[j]
        rows[2 * jj + 1, k + jj] = -1.0
    rows[-1, k:] = 1.0
    rhs[-1] = 1.0
    bounds = [(None, None)] * k + [(0.0, None)] * nt
    problem = LpProblem.build(obj, rows, rhs, ["<="] * (2 * nt + 1), bounds=bounds)
    res = solve_lp(problem, tol=tol)
    if res.status != "optimal":
        raise RuntimeError(f"support LP ended with status {res.status}")
    return res.value, N @ res.x[:k]


def certify_nsp(A, s: int, tol: float = 1e-9, budget: int = LP_BUDGET) -> NspCertificate:
    """Exact stable-NSP certificate for A at sparsity s.

    gamma_star is the supremum of ||x_T||_1 / ||x_{T^c}||_1 over nonzero
    kernel vectors and |T| = s; the verdict holds iff gamma_star < 1 - tol.
    A kernel vector supported entirely inside some T makes the ratio
    infinite; that case is detected directly and wins immediately.
    """
    M = as_matrix(A)
    n = M.shape[1]
    if not (1 <= s <= n):
        raise DomainError(f"s must lie in [1, {n}], got {s}")
    cost = math.comb(n, s) * (2**s)
    if cost > budget:
        raise BudgetExceededError(f"certification needs {cost} LPs, budget is {budget}")
    N = kernel_basis(M)
    if N.shape[1] == 0:
        return NspCertificate(0.0, "holds", s, tol, None, None, ())

    gamma_star = 0.0
    witness = None
    witness_support = None
    per_support = []
    for T in itertools.combinations(range(n), s):
        Tc = [j for j in range(n) if j not in T]
        # Unbounded ray: a kernel direction vanishing on T^c.
        Z = kernel_basis(N[Tc, :])
        if Z.shape[1] > 0:
            x = N @ Z[:, 0]
            per_support.append((T, math.inf))
            return NspCertificate(
                math.inf, "fails", s, tol, T, x, tuple(per_support)
            )
        best_here = 0.0
        best_x = None
        for signs in itertools.product((1.0, -1.0), repeat=s):
            value, x = _support_lp(N, T, signs, n, tol)
            if value > best_here:
                best_here, best_x = value, x
        per_support.append((T, best_here))
        if best_here > gamma_star:
            gamma_star = best_here
            witness = best_x
            witness_support = T
    verdict = "holds" if gamma_star < 1.0 - tol else "fails"
    return NspCertificate(
        gamma_star, verdict, s, tol, witness_support, witness, tuple(per_support)
    )


def certificate_to_json(cert: NspCertificate) -> dict:
    return {
        "gamma_star": cert.gamma_star,
        "verdict": cert.verdict,
        "witness_support": list(cert.witness_support) if cert.witness_support else None,
        "witness_vector": cert.witness.tolist() if cert.witness is not None else None,
        "s": cert.s,
        "tol": cert.tol,
    }


def _restore_feasible(x, p: SgammaParams, T):
    """Push x back onto the unit sphere inside the fixed-support cone."""
    head = float(np.abs(x[T]).sum())
    tail = float(np.abs(x).sum() - head)
    if tail > 0.0 and head < p.gamma * tail:
        scale = head / (p.gamma * tail) if head > 0.0 else 0.0
        y = x.copy()
        mask = np.ones(x.size, dtype=bool)
        mask[T] = False
        y[mask] *= scale
        x = y
    nrm = np.linalg.norm(x)
    if nrm == 0.0:
        return None
    return x / nrm


def estimate_eta(
    D,
    p: SgammaParams,
    restarts: int,
    rng: RngStream,
    step: float = 1e-2,
    max_iter: int = 10_000,
    conv_tol: float = 1e-9,
) -> EtaEstimate:
    """Multistart projected gradient upper bound on inf ||D x||_2 over S_gamma.

    Each restart fixes a random support T of size s and minimizes ||D x||_2^2
    on the unit sphere intersected with {||x_T||_1 >= gamma ||x_{T^c}||_1},
    projecting by renormalization plus tail shrinkage toward x_T.  The result
    is the best feasible value found, an upper bound on the true infimum.
    """
    if restarts < 1:
        raise DomainError("restarts must be at least 1")
    M = D.matrix if isinstance(D, Dictionary) else as_matrix(D)
    n = M.shape[1]
    if p.s > n:
        raise DomainError(f"s = {p.s} exceeds the dictionary width {n}")
    G = M.T @ M
    best_val = math.inf
    best_x = None
    probes = 0
    for r in range(restarts):
        sub = rng.substream("eta-restart", r)
        T = np.sort(sub.permutation(n)[: p.s])
        x = np.zeros(n)
        x[T] = sub.normal(p.s)
        mask = np.ones(n, dtype=bool)
        mask[T] = False
        x[mask] = 0.1 * sub.normal(n - p.s)
        x = _restore_feasible(x, p, T)
        if x is None:
            continue
        f = float(x @ G @ x)
        eta_step = step
        for _ in range(max_iter):
            grad = 2.0 * (G @ x)
            rgrad = grad - (grad @ x) * x  # tangent to the sphere
            moved = None
            while eta_step > 1e-14:
                y = _restore_feasible(x - eta_step * rgrad, p, T)
                if y is None:
                    eta_step *= 0.5
                    continue
                fy = float(y @ G @ y)
                if fy <= f:
                    moved = (y, fy)
                    break
                eta_step *= 0.5
            if moved is None:
                break
            y, fy = moved
            shift = float(np.linalg.norm(y - x))
            x, f = y, fy
            probes += 1
            eta_step = min(eta_step * 1.5, step)
            if shift < conv_tol:
                break
        val = math.sqrt(max(f, 0.0))
        if val < best_val:
            best_val = val
            best_x = x
    return EtaEstimate(best_val, best_x, probes, restarts)


def eta_grid_oracle(D, p: SgammaParams, resolution: int = 2000) -> float:
    """Brute-force grid minimum of ||D x||_2 over S_gamma, for n = 2 or 3 only."""
    M = D.matrix if isinstance(D, Dictionary) else as_matrix(D)
    n = M.shape[1]
    if n == 2:
        theta = np.linspace(0.0, 2.0 * math.pi, resolution, endpoint=False)
        pts = np.column_stack([np.cos(theta), np.sin(theta)])
    elif n == 3:
        k = np.arange(resolution * resolution)
        golden = (1.0 + math.sqrt(5.0)) / 2.0
        z = 1.0 - 2.0 * (k + 0.5) / k.size
        r = np.sqrt(1.0 - z * z)
        phi = 2.0 * math.pi * ((k / golden) % 1.0)
        pts = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    else:
        raise DomainError("grid oracle supports n = 2 or 3 only")
    a = np.sort(np.abs(pts), axis=1)[:, ::-1]
    head = a[:, : p.s].sum(axis=1)
    tail = a.sum(axis=1) - head
    members = pts[head >= p.gamma * tail - 1e-12]
    vals = np.linalg.norm(members @ M.T, axis=1)
    return float(vals.min())


def recovery_error_bound(gamma: float, eta: float, sigma_s_x: float, eps: float) -> float:
    """Worst-case l1-recovery error (2 gamma + 2)/(1 - gamma) sigma_s + 2 eps / eta."""
    if not (0.0 < gamma < 1.0):
        raise DomainError(f"gamma must lie in (0, 1), got {gamma}")
    if not (eta > 0.0):
        raise DomainError(f"eta must be positive, got {eta}")
    if sigma_s_x < 0.0 or eps < 0.0:
        raise DomainError("sigma_s and eps must be nonnegative")
    return (2.0 * gamma + 2.0) / (1.0 - gamma) * sigma_s_x + 2.0 * eps / eta


def d_nsp_check(D: Dictionary, Phi, s: int, tol: float = 1e-9) -> DnspResult:
    """Dictionary-route NSP check: for full spark D, the dictionary NSP of Phi
    is equivalent to the plain NSP of Phi @ D, which is what gets certified."""
    if not isinstance(D, Dictionary):
        raise DomainError("d_nsp_check needs a Dictionary")
    P = as_matrix(Phi)
    if P.shape[1] != D.d:
        raise DomainError(f"Phi has {P.shape[1]} columns, dictionary lives in R^{D.d}")
    if not full_spark_check(D):
        raise NotFullSparkError(
            "dictionary is not full spark; the equivalence route does not apply"
        )
    cert = certify_nsp(P @ D.matrix, s, tol=tol)
    return DnspResult(cert.verdict, "full_spark_equivalence", cert)
