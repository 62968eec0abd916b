"""Joint communication-and-jamming beamforming toolkit.

A MIMO base station serves legitimate users while jamming unauthorized
UAV links with the same beamformer.  The design problem is a transmit
power minimization solved through a semidefinite relaxation whose
solution is driven toward rank 1 by cyclic-diagonal constraints swept
over a threshold grid, with a channel-inversion baseline and a
Monte-Carlo experiment harness alongside.
"""

from .baseline import CiBeamformer, ci_loading, pseudo_inverse, run_ci
from .channel import (
    ArrayGeometry,
    Scenario,
    ScenarioConfig,
    Terminal,
    channel_vector,
    dbm_to_mw,
    make_scenario,
    mw_to_dbm,
    sample_scenario,
    steering,
)
from .errors import (
    AllEtaInfeasibleError,
    ConfigError,
    ConvergenceError,
    DegenerateSolutionError,
    DimensionExceededError,
    HermitianViolationError,
    JcjBeamError,
    RankDeficientError,
    SeparationError,
    SolverStatusError,
)
from .experiment import (
    ExperimentConfig,
    ResultRow,
    ResultTable,
    emit_outputs,
    load_config,
    run_experiment,
    spot_check,
)
from .hermitian import eig_hermitian, hermitize, is_psd
from .jcj import (
    DEFAULT_PHI,
    Beamformer,
    CandidateSolution,
    EtaSweep,
    extract_candidate,
    run_jamming_only,
    run_jcj,
    score_candidate,
)
from .metrics import (
    CdfSeries,
    RealizationResult,
    achievable_rate,
    empirical_cdf,
    percentile,
    q_function,
    q_inverse,
    rate_error,
    realization_metrics,
    sinr_error_db,
    sinr_threshold_db,
    uav_sinr_db,
)
from .oracle import OracleResult, oracle_solve
from .problem import JcjProblem, build_problem, circshift_identity
from .sdp import (
    SdpSolution,
    SdpSpec,
    SdpStatus,
    SolverOptions,
    lower_bound_power,
    solve,
    solve_relaxation,
    spec_from_problem,
)

__version__ = "0.1.0"
