"""Double-sparsity regression toolkit.

Interpolating (epsilon, q) vector norms, the group-structured double-sparsity
penalty with its dual, proximal operators built on Minkowski-sum ball
projections, an accelerated proximal-gradient solver with duality-gap
certificates, closed-form rate calculators, and a Monte Carlo harness.
"""

from .dsnorm import (
    DsParams,
    GroupStructure,
    ds_dual_norm,
    ds_norm,
    ds_norm_groupwise,
    mixed_norm,
    params_from_json,
    params_to_json,
)
from .norms import (
    Decomposition,
    EpsQ,
    conjugate_exponent,
    epsq_ball_boundary,
    epsq_decompose,
    epsq_dual_norm,
    epsq_norm,
    lq_norm,
    soft_threshold,
)
from .prox import (
    IterationLimitError,
    ProxSettings,
    project_lq_ball,
    project_minkowski_sum,
    prox_ds,
    prox_group,
)
from .simulate import (
    ExperimentConfig,
    ExperimentRecord,
    InstanceSpec,
    TrialResult,
    gaussian_design,
    rate_fit,
    run_experiment,
    summarize,
)
from .solver import (
    DualCertificate,
    Problem,
    SolveResult,
    dual_feasible_point,
    dual_objective,
    primal_objective,
    solve,
)
from .theory import (
    CaseFormulas,
    DesignModel,
    SparsityLevel,
    TheoryReport,
    case_specialization,
    kappa1,
    kappa2,
    l2_error_bound,
    lambda_recommendation,
    noise_dual_bound,
)

__version__ = "0.1.0"
