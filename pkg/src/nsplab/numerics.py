"""Dense linear-algebra primitives shared by every other module.

Everything operates on plain float64 numpy arrays.  All tolerances are
explicit arguments with documented defaults; nothing reads global state.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .errors import DomainError
from .rng import RngStream

RANK_TOL = 1e-10        # relative singular-value cutoff for rank decisions
POWER_TOL = 1e-12       # relative convergence tolerance for power iteration
POWER_MAX_ITER = 100_000


def as_matrix(a) -> np.ndarray:
    """Validate and return a 2-D float64 array with finite entries."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise DomainError(f"expected a 2-D array, got shape {m.shape}")
    if m.size and not np.isfinite(m).all():
        raise DomainError("matrix entries must be finite")
    return m


def as_vector(a) -> np.ndarray:
    """Validate and return a 1-D float64 array with finite entries."""
    v = np.asarray(a, dtype=float)
    if v.ndim != 1:
        raise DomainError(f"expected a 1-D array, got shape {v.shape}")
    if v.size and not np.isfinite(v).all():
        raise DomainError("vector entries must be finite")
    return v


def nonincreasing_rearrangement(x) -> np.ndarray:
    """Absolute values of x sorted in nonincreasing order."""
    v = np.abs(np.asarray(x, dtype=float))
    if v.ndim == 1:
        return np.sort(v)[::-1].copy()
    if v.ndim == 2:  # row-wise, used by the Monte Carlo width estimators
        return np.sort(v, axis=1)[:, ::-1].copy()
    raise DomainError(f"expected a 1-D or 2-D array, got shape {v.shape}")


def soft_threshold(u, t: float):
    """Shrink u toward zero by t, flattening the dead zone |u| <= t.

    Accepts scalars or arrays; t must be nonnegative.
    """
    if not (t >= 0.0):
        raise DomainError(f"threshold must be nonnegative, got {t}")
    a = np.asarray(u, dtype=float)
    out = np.sign(a) * np.maximum(np.abs(a) - t, 0.0)
    return float(out) if out.ndim == 0 else out


def operator_norm(a, tol: float = POWER_TOL, max_iter: int = POWER_MAX_ITER) -> float:
    """Largest singular value via power iteration on A^T A.

    Deterministic: the start vector comes from RngStream(0, 0) and is redrawn
    if it happens to be annihilated by A^T A.
    """
    if not (tol > 0.0):
        raise DomainError("tol must be positive")
    A = as_matrix(a)
    if A.size == 0 or not np.any(A):
        return 0.0
    n = A.shape[1]
    start = RngStream(0, 0)
    v = start.normal(n)
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(max_iter):
        w = A @ v
        sigma_new = float(np.linalg.norm(w))
        u = A.T @ w
        nu = float(np.linalg.norm(u))
        if nu == 0.0:
            # start vector was orthogonal to the row space; perturb and retry
            v = start.normal(n)
            v /= np.linalg.norm(v)
            continue
        v = u / nu
        if abs(sigma_new - sigma) <= tol * max(sigma_new, 1e-300):
            return sigma_new
        sigma = sigma_new
    return sigma


def kernel_basis(a, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis (n x k columns) of the null space of A.

    Rank is decided by singular values below tol times the largest one.
    A trivial kernel yields an n x 0 matrix; a zero matrix yields the identity.
    """
    A = as_matrix(a)
    n = A.shape[1]
    if A.size == 0:
        return np.eye(n)
    _, svals, vt = np.linalg.svd(A)
    if svals.size == 0 or svals[0] <= 0.0:
        rank = 0
    else:
        rank = int(np.sum(svals > tol * svals[0]))
    return np.ascontiguousarray(vt[rank:].T)


def gamma_fn(x: float) -> float:
    """Gamma function on the positive axis (Lanczos-backed, < 1e-10 relative error)."""
    if not (x > 0.0) or not math.isfinite(x):
        raise DomainError(f"gamma_fn requires x > 0, got {x}")
    return math.gamma(x)


def write_matrix_text(path, a) -> None:
    """Text format: '<rows> <cols>' then one space-separated row per line.

    Entries carry 17 significant digits so a read-back is bit-faithful.
    """
    A = as_matrix(a)
    lines = [f"{A.shape[0]} {A.shape[1]}"]
    for row in A:
        lines.append(" ".join(f"{v:.17g}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_matrix_text(path) -> np.ndarray:
    text = Path(path).read_text(encoding="ascii")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DomainError(f"{path}: empty matrix file")
    header = lines[0].split()
    if len(header) != 2:
        raise DomainError(f"{path}: first line must be '<rows> <cols>'")
    rows, cols = int(header[0]), int(header[1])
    if len(lines) - 1 != rows:
        raise DomainError(f"{path}: expected {rows} rows, found {len(lines) - 1}")
    data = np.empty((rows, cols))
    for i, line in enumerate(lines[1:]):
        vals = line.split()
        if len(vals) != cols:
            raise DomainError(f"{path}: row {i} has {len(vals)} entries, expected {cols}")
        data[i] = [float(v) for v in vals]
    return as_matrix(data)


def write_vector_text(path, v) -> None:
    write_matrix_text(path, as_vector(v)[None, :])


def read_vector_text(path) -> np.ndarray:
    A = read_matrix_text(path)
    if A.shape[0] == 1:
        return A[0].copy()
    if A.shape[1] == 1:
        return A[:, 0].copy()
    raise DomainError(f"{path}: expected a single row or column, got shape {A.shape}")
