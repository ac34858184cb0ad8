"""Variable smoothing solver for difference-of-convex composite problems."""

from .errors import (
    DcSmoothError,
    DomainError,
    LineSearchFailure,
    NumericalFailure,
    OracleError,
    ParameterError,
)
from .penalties import (
    DcPenalty,
    ExcessL1,
    L1,
    Mcp,
    PenaltyPart,
    TopK,
    Zero,
    capped_l1_penalty,
    l1_penalty,
    mcp_penalty,
    penalty_from_config,
    project_box_l1,
    trimmed_l1_penalty,
)
from .smoothing import CompositeProblem, identity_problem
from .solver import (
    BacktrackingParams,
    IterationRecord,
    MuSchedule,
    ScheduleCertificate,
    SolveResult,
    StopCriteria,
    TerminationReason,
    backtrack,
    certify_schedule,
    replay_descent,
    solve,
    write_trace_csv,
)
from .phase_retrieval import (
    ExperimentSpec,
    PhaseRetrievalInstance,
    TrialOutcome,
    generate_instance,
    make_problem,
    relative_error,
    run_experiment,
    write_results_csv,
    write_summary_csv,
)
from .oracles import OracleConfig, dykstra_project, fd_grad, grid_min_1d, prox_1d_oracle

__version__ = "0.1.0"

__all__ = [
    "BacktrackingParams",
    "CompositeProblem",
    "DcPenalty",
    "DcSmoothError",
    "DomainError",
    "ExcessL1",
    "ExperimentSpec",
    "IterationRecord",
    "L1",
    "LineSearchFailure",
    "Mcp",
    "MuSchedule",
    "NumericalFailure",
    "OracleConfig",
    "OracleError",
    "ParameterError",
    "PenaltyPart",
    "PhaseRetrievalInstance",
    "ScheduleCertificate",
    "SolveResult",
    "StopCriteria",
    "TerminationReason",
    "TopK",
    "TrialOutcome",
    "Zero",
    "backtrack",
    "capped_l1_penalty",
    "certify_schedule",
    "dykstra_project",
    "fd_grad",
    "generate_instance",
    "grid_min_1d",
    "identity_problem",
    "l1_penalty",
    "make_problem",
    "mcp_penalty",
    "penalty_from_config",
    "project_box_l1",
    "prox_1d_oracle",
    "relative_error",
    "replay_descent",
    "run_experiment",
    "solve",
    "trimmed_l1_penalty",
    "write_results_csv",
    "write_summary_csv",
    "write_trace_csv",
]
