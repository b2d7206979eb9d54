"""Zeroth-order solvers for constrained nonconvex-concave minimax problems.

The library solves min over x of max over y of f(x, y) when only function
values of f are available: randomized two-point gradient estimates drive
alternating projected (or proximal) updates, with a decaying regularization
on the y side.  First-order twins of each solver, stationarity-gap
diagnostics with audited query accounting, parameter schedules (tuned and
theoretically grounded), and a data-poisoning benchmark round out the
package.
"""

__version__ = "0.1.0"

from .errors import ConfigurationError, OracleError
from .oracle import (
    PHASE_DIAG,
    PHASE_X,
    PHASE_Y,
    BlackBoxObjective,
    BlockPoint,
    QueryLedger,
    as_vector,
    evaluate_counted,
)
from .gradest import (
    DirectionSampler,
    EstimatorConfig,
    GradEstimate,
    estimate_grad_block,
    estimate_grad_x,
    estimate_grad_y,
    mc_smoothed_value,
    sample_unit_direction,
    stream_rng,
)
from .geometry import (
    Ball,
    Box,
    BoxGuard,
    FeasibleSet,
    L1Term,
    ProxTerm,
    Simplex,
    SquaredL2Term,
    SumTerm,
    ZeroTerm,
    project,
    prox,
    prox_block,
    prox_y,
)
from .schedules import (
    ConstantSchedule,
    DerivedConstants,
    IterationParams,
    MatchedSingleBlockSchedule,
    PracticalSchedule,
    ProblemConstants,
    TheoreticalSchedule,
    derived_constants,
    practical_params,
)
from .problem import MinimaxProblem
from .diagnostics import (
    AnalyticGapOracle,
    GapOracle,
    StationarityGap,
    SurrogateGapOracle,
    TraceRecord,
    read_trace_csv,
    regularized_stationarity_gap,
    stationarity_gap,
    summarize_trials,
    write_summary,
    write_trace,
)
from .solvers import (
    FOAGP,
    FOMinMax,
    RunResult,
    SOLVER_KINDS,
    SolverState,
    StopRule,
    ZOAGP,
    ZOBAPG,
    ZOMinMax,
    default_schedule,
    fo_agp_run,
    fo_agp_step,
    fo_minmax_run,
    run,
    step_query_cost,
    zo_agp_step,
    zo_bapg_step,
    zo_minmax_run,
)
from .config import RunConfig, parse_run_config, parse_seeds

__all__ = [
    "__version__",
    "ConfigurationError", "OracleError",
    "PHASE_X", "PHASE_Y", "PHASE_DIAG",
    "BlackBoxObjective", "BlockPoint", "QueryLedger", "as_vector",
    "evaluate_counted",
    "DirectionSampler", "EstimatorConfig", "GradEstimate",
    "estimate_grad_x", "estimate_grad_y", "estimate_grad_block",
    "mc_smoothed_value", "sample_unit_direction", "stream_rng",
    "FeasibleSet", "Box", "BoxGuard", "Ball", "Simplex",
    "ProxTerm", "ZeroTerm", "L1Term", "SquaredL2Term", "SumTerm",
    "project", "prox", "prox_block", "prox_y",
    "IterationParams", "ProblemConstants", "DerivedConstants",
    "TheoreticalSchedule", "PracticalSchedule", "ConstantSchedule",
    "MatchedSingleBlockSchedule", "derived_constants", "practical_params",
    "MinimaxProblem",
    "GapOracle", "AnalyticGapOracle", "SurrogateGapOracle",
    "StationarityGap", "TraceRecord", "stationarity_gap",
    "regularized_stationarity_gap", "write_trace", "read_trace_csv",
    "write_summary", "summarize_trials",
    "StopRule", "SolverState", "RunResult", "SOLVER_KINDS",
    "run", "step_query_cost", "zo_agp_step", "zo_bapg_step", "fo_agp_step",
    "zo_minmax_run", "fo_agp_run", "fo_minmax_run", "default_schedule",
    "ZOAGP", "ZOBAPG", "ZOMinMax", "FOAGP", "FOMinMax",
    "RunConfig", "parse_run_config", "parse_seeds",
]
