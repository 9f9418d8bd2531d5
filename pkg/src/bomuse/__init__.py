"""Human-AI teaming Bayesian optimization: a batch loop pairing one expert
suggestion with one deliberately over-explorative AI suggestion per round,
plus baselines, synthetic benchmarks, regret reporting, theory audits, and
an HTTP service for live expert sessions."""

from .acquisition import (
    BetaSchedule,
    EcGpUcb,
    ExpectedImprovement,
    GpUcb,
    PureExploration,
    acquisition_value,
    bo_muse_beta,
    maximize,
    zeta_lower_bound,
)
from .agents import AgentSpec, suggest
from .benchmarks import ObjectiveSpec, builtin
from .engine import (
    BatchRecord,
    RegretTrace,
    Session,
    SessionConfig,
    compute_regret,
    default_config,
    export_csv,
    run_session,
)
from .gp import (
    GpPosterior,
    Observation,
    fit,
    fit_hyperparameters,
    information_gain_increment,
    posterior_mean,
    posterior_variance,
    rkhs_norm_estimate,
)
from .kernels import FeatureMap, KernelSpec, builtin_feature_map, gram, kernel_eval

__version__ = "0.1.0"
