"""nsplab: null space property certification, Gaussian width estimation, and
sparse recovery experiments for dictionary-based compressed sensing.

The package certifies the stable null space property of sensing compositions
exactly at desk scale, estimates Gaussian widths of the NSP-violating set by
Monte Carlo, evaluates closed-form measurement-count bounds, and runs
reproducible preservation / phase-transition campaigns.
"""

from .dictionary import Dictionary, full_spark_check, make_dictionary
from .errors import (
    BudgetExceededError,
    DomainError,
    NotFullSparkError,
    NsplabError,
    NspRequiredError,
)
from .harness import (
    ExperimentConfig,
    run_bounds_table,
    run_experiment,
    run_phase_transition,
    run_preserve_nsp,
    run_width_compare,
)
from .nsp import (
    DnspResult,
    EtaEstimate,
    NspCertificate,
    SgammaParams,
    certify_nsp,
    d_nsp_check,
    estimate_eta,
    eta_grid_oracle,
    in_S_gamma,
    recovery_error_bound,
)
from .numerics import (
    gamma_fn,
    kernel_basis,
    nonincreasing_rearrangement,
    operator_norm,
    read_matrix_text,
    read_vector_text,
    soft_threshold,
    write_matrix_text,
    write_vector_text,
)
from .rng import RngStream, stable_stream_id
from .simplex import LpProblem, LpResult, solve_lp
from .smallball import (
    FORMULA_IDS,
    BoundInputs,
    MendelsonBound,
    bounds_table,
    estimate_Q,
    estimate_W,
    m_min,
    mendelson_lower_bound,
    success_probability,
    success_rate,
)
from .solver import (
    RecoveryBoundInputs,
    RecoveryProblem,
    RecoveryResult,
    SplitParams,
    best_s_term_error,
    evaluate_recovery,
    solve_bp_lp,
    solve_l1_synthesis,
)
from .subgaussian import (
    SubgaussianSpec,
    make_spec,
    sample_measurement_matrix,
    small_ball_lower_bound,
    verify_tail,
)
from .width import (
    ConeParams,
    WidthEstimate,
    check_lemma_key,
    check_slepian_contraction,
    check_soft_moment,
    crude_width_bound,
    project_onto_cone,
    theory_width_bound,
    unit_ball_width,
    width_DS_gamma_dual,
    width_DS_gamma_mc,
)

__version__ = "0.1.0"
