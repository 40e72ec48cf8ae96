"""Correlated fractional counting processes on a finite horizon.

Exact pmf/pgf evaluation for two heavy-tailed count families, fractional
operator machinery to verify their governing equations, weighted-process
transforms, and a deterministic Monte Carlo cross-validator.
"""

from .errors import (
    CancellationLoss,
    CountingProcessError,
    DegenerateWeights,
    DomainError,
    InvalidProfile,
    InvalidSpec,
    NonConvergent,
    OutOfRange,
    QuadratureFailure,
    TailCutoffUnreachable,
    UnsupportedR,
)
from .fnegbin import (
    Example31Profile,
    F_negbin,
    NegBinParams,
    TableProfile,
    operator_residual_prop33,
    pgf_negbin,
    pmf_negbin_r1,
)
from .mcsim import (
    EmpiricalPmf,
    Estimate,
    PathBatch,
    PathSample,
    SimConfig,
    empirical_cov,
    empirical_joint_11,
    empirical_pmf,
    negbin_sim_config,
    sample_path,
    simulate_paths,
    stfp_sim_config,
    tv_distance,
)
from .pmftable import PmfTable
from .specfun import (
    DEFAULT_CONFIG,
    FoxWrightSpec,
    SeriesValue,
    SpecfunConfig,
    fox_wright,
    gen_binom,
    gen_mittag_leffler,
    mittag_leffler,
    recip_gamma_signed,
    stirling_first,
)
from .stfpoisson import (
    F_stfp,
    StfpParams,
    governing_residual,
    joint_prob_brb,
    joint_prob_kps,
    pgf,
    pmf,
)
from .weighted import (
    WeightFn,
    covariance_corrected,
    covariance_increment,
    q_kernel,
    weighted_pmf,
    weighted_process_pmf,
    weights_in_time,
)

__all__ = [
    "CancellationLoss",
    "CountingProcessError",
    "DegenerateWeights",
    "DomainError",
    "InvalidProfile",
    "InvalidSpec",
    "NonConvergent",
    "OutOfRange",
    "QuadratureFailure",
    "TailCutoffUnreachable",
    "UnsupportedR",
    "PmfTable",
    "DEFAULT_CONFIG",
    "FoxWrightSpec",
    "SeriesValue",
    "SpecfunConfig",
    "fox_wright",
    "gen_binom",
    "gen_mittag_leffler",
    "mittag_leffler",
    "recip_gamma_signed",
    "stirling_first",
    "StfpParams",
    "F_stfp",
    "pgf",
    "pmf",
    "joint_prob_kps",
    "joint_prob_brb",
    "governing_residual",
    "NegBinParams",
    "Example31Profile",
    "TableProfile",
    "F_negbin",
    "pgf_negbin",
    "pmf_negbin_r1",
    "operator_residual_prop33",
    "WeightFn",
    "weighted_pmf",
    "q_kernel",
    "weights_in_time",
    "weighted_process_pmf",
    "covariance_corrected",
    "covariance_increment",
    "PathSample",
    "PathBatch",
    "SimConfig",
    "Estimate",
    "EmpiricalPmf",
    "stfp_sim_config",
    "negbin_sim_config",
    "sample_path",
    "simulate_paths",
    "empirical_pmf",
    "empirical_cov",
    "empirical_joint_11",
    "tv_distance",
]

__version__ = "0.1.0"
