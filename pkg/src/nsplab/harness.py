"""Reproducible experiment campaigns driven by JSON configs, emitting CSV.

Experiments:
  preserve_nsp     NSP frequency of Phi @ D across an m grid
  phase_transition recovery success rate versus m for planted sparse signals
  width_compare    Monte Carlo, dual, and closed-form width bounds on a grid
  bounds_table     the five measurement-count formulas for derived inputs

Every (experiment, m, trial) tuple gets its own RngStream keyed by a stable
hash, so trial results do not depend on execution order and identical
configs reproduce byte-identical CSV (modulo the timestamp header line).
The environment variable NSPLAB_THREADS caps worker threads (default:
hardware concurrency).
"""

from __future__ import annotations

import itertools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .dictionary import make_dictionary
from .errors import DomainError, NspRequiredError
from .nsp import SgammaParams, certify_nsp, estimate_eta
from .numerics import read_matrix_text
from .rng import RngStream, stable_stream_id
from .smallball import BoundInputs, bounds_table
from .solver import RecoveryProblem, solve_l1_synthesis
from .subgaussian import condition_number, make_spec, sample_measurement_matrix
from .width import ConeParams, crude_width_bound, width_DS_gamma_dual, width_DS_gamma_mc

EXPERIMENTS = ("preserve_nsp", "phase_transition", "width_compare", "bounds_table")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    d: int
    n: int
    s: int
    gamma: float
    seed: int
    dict_kind: str = "gaussian_unit_norm"
    spec_kind: str = "std_gaussian"
    covariance_path: str | None = None
    width_constant: float | None = None
    m_grid: tuple = ()
    trials: int = 1
    eps: float = 0.0
    output: str | None = None
    success_factor: float = 10.0       # noisy-recovery success threshold multiplier
    eta_restarts: int = 20             # for bounds_table
    n_grid: tuple | None = None        # width_compare sweeps; default singleton grids
    s_grid: tuple | None = None
    gamma_grid: tuple | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise DomainError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise DomainError("trials must be at least 1")
        if self.m_grid:
            grid = tuple(int(m) for m in self.m_grid)
            if list(grid) != sorted(grid):
                raise DomainError("m_grid must be ascending")
            object.__setattr__(self, "m_grid", grid)

    @staticmethod
    def from_json(path) -> "ExperimentConfig":
        raw = json.loads(Path(path).read_text())
        known = {f.name for f in ExperimentConfig.__dataclass_fields__.values()}
        unknown = set(raw) - known
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        for key in ("m_grid", "n_grid", "s_grid", "gamma_grid"):
            if raw.get(key) is not None:
                raw[key] = tuple(raw[key])
        return ExperimentConfig(**raw)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _thread_count() -> int:
    env = os.environ.get("NSPLAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _map_tasks(fn, args_list):
    workers = min(_thread_count(), max(len(args_list), 1))
    if workers == 1:
        return [fn(a) for a in args_list]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, args_list))


def _emit_csv(cfg: ExperimentConfig, header, rows) -> str:
    lines = [f"# generated {datetime.now(timezone.utc).isoformat()}"]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if cfg.output:
        Path(cfg.output).write_text(text, encoding="ascii", newline="")
    return text


def _build_dictionary(cfg: ExperimentConfig, label: str):
    rng = RngStream(cfg.seed, stable_stream_id(cfg.experiment, label))
    return make_dictionary(cfg.dict_kind, cfg.d, cfg.n, rng)


def _build_spec(cfg: ExperimentConfig, d: int):
    cov = read_matrix_text(cfg.covariance_path) if cfg.covariance_path else None
    return make_spec(cfg.spec_kind, d, covariance=cov, width_constant=cfg.width_constant)


def run_preserve_nsp(cfg: ExperimentConfig) -> str:
    """NSP preservation frequency of Phi @ D over the m grid.

    The base dictionary must itself certify (kernel containment makes its NSP
    necessary); otherwise the run aborts before any trial.
    """
    if not cfg.m_grid:
        raise DomainError("preserve_nsp needs a nonempty m_grid")
    D = _build_dictionary(cfg, "dictionary")
    base = certify_nsp(D.matrix, cfg.s)
    if not base.holds:
        raise NspRequiredError(
            f"base dictionary fails the NSP (gamma_star = {base.gamma_star}); "
            "no composition can satisfy it"
        )
    spec = _build_spec(cfg, cfg.d)

    def one(task):
        m, trial = task
        rng = RngStream(cfg.seed, stable_stream_id("preserve_nsp", m, trial))
        phi = sample_measurement_matrix(spec, m, cfg.d, rng)
        cert = certify_nsp(phi @ D.matrix, cfg.s)
        return (m, trial, cert.verdict, cert.gamma_star)

    tasks = [(m, t) for m in cfg.m_grid for t in range(cfg.trials)]
    rows = _map_tasks(one, tasks)
    rows.sort(key=lambda r: (r[0], r[1]))
    out = [list(r) for r in rows]
    for m in cfg.m_grid:
        holds = sum(1 for r in rows if r[0] == m and r[2] == "holds")
        out.append([m, "summary", "frequency", holds / cfg.trials])
    return _emit_csv(cfg, ["m", "trial", "verdict", "gamma_star"], out)


def run_phase_transition(cfg: ExperimentConfig) -> str:
    """Recovery success rate versus m for planted s-sparse coefficients.

    Success means ||x_hat - x0||_2 <= max(1e-6, success_factor * eps);
    solver non-convergence is recorded, not fatal.
    """
    if not cfg.m_grid:
        raise DomainError("phase_transition needs a nonempty m_grid")
    D = _build_dictionary(cfg, "dictionary")
    spec = _build_spec(cfg, cfg.d)
    threshold = max(1e-6, cfg.success_factor * cfg.eps)

    def one(task):
        m, trial = task
        rng = RngStream(cfg.seed, stable_stream_id("phase_transition", m, trial))
        phi = sample_measurement_matrix(spec, m, cfg.d, rng)
        B = phi @ D.matrix
        support = np.sort(rng.permutation(cfg.n)[: cfg.s])
        x0 = np.zeros(cfg.n)
        x0[support] = rng.normal(cfg.s)
        y = B @ x0
        if cfg.eps > 0.0:
            y = y + cfg.eps * rng.unit_vector(m)
        res = solve_l1_synthesis(RecoveryProblem(B, y, cfg.eps))
        if res.x_hat is None:
            return (m, trial, 0, math.inf, math.inf, 0.0, res.status)
        err_x = float(np.linalg.norm(res.x_hat - x0))
        err_z = float(np.linalg.norm(D.matrix @ (res.x_hat - x0)))
        success = int(res.status == "converged" and err_x <= threshold)
        return (m, trial, success, err_x, err_z, 0.0, res.status)

    tasks = [(m, t) for m in cfg.m_grid for t in range(cfg.trials)]
    rows = _map_tasks(one, tasks)
    rows.sort(key=lambda r: (r[0], r[1]))
    out = [list(r[:6]) for r in rows]
    for m in cfg.m_grid:
        rate = sum(r[2] for r in rows if r[0] == m) / cfg.trials
        out.append([m, "summary", rate, "", "", ""])
    return _emit_csv(cfg, ["m", "trial", "success", "err_x", "err_z", "sigma_s"], out)


def run_width_compare(cfg: ExperimentConfig) -> str:
    """Monte Carlo vs dual vs closed-form width bounds over an (n, s, gamma) grid.

    cfg.trials is the Monte Carlo sample count per row; the two estimators
    share their Gaussian draws so the per-sample dominance carries to means.
    """
    n_grid = cfg.n_grid or (cfg.n,)
    s_grid = cfg.s_grid or (cfg.s,)
    gamma_grid = cfg.gamma_grid or (cfg.gamma,)
    samples = max(cfg.trials, 100)
    rows = []
    for n in n_grid:
        rng_d = RngStream(cfg.seed, stable_stream_id("width_compare", "dict", n))
        D = make_dictionary(cfg.dict_kind, cfg.d, n, rng_d)
        crude = crude_width_bound(D, n)
        for s, gamma in itertools.product(s_grid, gamma_grid):
            cone = ConeParams(gamma, s, n)
            mc = width_DS_gamma_mc(
                D, cone, samples, RngStream(cfg.seed, stable_stream_id("width_compare", n, s, gamma))
            )
            dual = width_DS_gamma_dual(
                D, cone, samples, RngStream(cfg.seed, stable_stream_id("width_compare", n, s, gamma))
            )
            rows.append(
                [
                    n,
                    s,
                    gamma,
                    D.rho,
                    mc.mean,
                    mc.std_error,
                    dual.mean,
                    dual.std_error,
                    mc.theory_bound,
                    crude,
                ]
            )
    header = [
        "n",
        "s",
        "gamma",
        "rho",
        "mc_mean",
        "mc_se",
        "dual_mean",
        "dual_se",
        "theory_bound",
        "crude_bound",
    ]
    return _emit_csv(cfg, header, rows)


def run_bounds_table(cfg: ExperimentConfig) -> str:
    """Evaluate the five formulas for inputs derived from the config.

    (alpha, sigma, C) come from the row spec, rho from the dictionary, and
    eta from the multistart estimate over S_gamma; kappa is the covariance
    condition number.  prob_at_m uses the largest grid m when given.
    """
    D = _build_dictionary(cfg, "dictionary")
    spec = _build_spec(cfg, cfg.d)
    eta = estimate_eta(
        D,
        SgammaParams(cfg.gamma, cfg.s),
        cfg.eta_restarts,
        RngStream(cfg.seed, stable_stream_id("bounds_table", "eta")),
    )
    if not (eta.eta_upper > 0.0):
        raise NspRequiredError("estimated eta is zero: the dictionary fails the NSP")
    cone = ConeParams(cfg.gamma, cfg.s, cfg.n)
    width = width_DS_gamma_mc(
        D, cone, max(cfg.trials, 100), RngStream(cfg.seed, stable_stream_id("bounds_table", "width"))
    )
    b = BoundInputs(
        eta=eta.eta_upper,
        gamma=cfg.gamma,
        rho=D.rho,
        alpha=spec.alpha,
        sigma=spec.sigma,
        C=spec.width_constant,
        s=cfg.s,
        n=cfg.n,
        d=cfg.d,
        kappa=condition_number(spec),
    )
    at_m = max(cfg.m_grid) if cfg.m_grid else None
    rows = [
        [r["formula_id"], r["m_min"], r["rate"], r["prob_at_m"]]
        for r in bounds_table(b, width=width.mean, m=at_m)
    ]
    return _emit_csv(cfg, ["formula_id", "m_min", "rate", "prob_at_m"], rows)


_RUNNERS = {
    "preserve_nsp": run_preserve_nsp,
    "phase_transition": run_phase_transition,
    "width_compare": run_width_compare,
    "bounds_table": run_bounds_table,
}


def run_experiment(cfg: ExperimentConfig) -> str:
    return _RUNNERS[cfg.experiment](cfg)


def csv_body(text: str) -> str:
    """CSV content with comment lines stripped: the part that must reproduce."""
    return "\n".join(ln for ln in text.splitlines() if not ln.startswith("#")) + "\n"
