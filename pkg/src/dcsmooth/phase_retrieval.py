"""Robust phase retrieval benchmark: squared linear measurements with
heavy-tailed outliers, solved through the DC composite formulation.

The forward map is S(x) = (Ax) * (Ax) - b with adjoint
DS(x)^T v = 2 A^T ((Ax) * v); there is no smooth term h. Every random
draw goes through a counter-based generator keyed by an explicit 64-bit
seed, so instances and experiment sweeps are reproducible bit for bit.
"""
from __future__ import annotations

import hashlib
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import penalties
from .errors import DcSmoothError, ParameterError
from .smoothing import CompositeProblem
from .solver import BacktrackingParams, MuSchedule, SolveResult, StopCriteria, solve

#: a trial counts as successful below this relative estimation error
SUCCESS_THRESHOLD = 1e-3

#: uniform draws for outlier magnitudes are clamped to [0, 1 - 2**-32]
#: so the tangent stays finite
_U_MAX = 1.0 - 2.0**-32

RESULTS_CSV_HEADER = "penalty,omega,trial,seed,relative_error,success,iters,time_sec,termination"
SUMMARY_CSV_HEADER = "penalty,omega,success_rate_pct,mean_time_all_sec,mean_time_success_sec"

PAPER_PENALTIES: tuple[dict, ...] = (
    {"kind": "l1"},
    {"kind": "mcp", "lambda": 1.0, "beta": 2000.0},
    {"kind": "mcp", "lambda": 2.0, "beta": 500.0},
    {"kind": "capped_l1", "beta": 1000.0},
    {"kind": "trimmed_l1", "K": 5},
    {"kind": "trimmed_l1", "K": 10},
)

PAPER_OMEGAS: tuple[float, ...] = (10.0, 1000.0, 3000.0, 5000.0, 10000.0)


@dataclass(frozen=True, eq=False)
class PhaseRetrievalInstance:
    a_matrix: np.ndarray  # n x d sensing matrix
    b: np.ndarray  # measurements, outlier entries replaced
    x_star: np.ndarray  # +-1 ground-truth signal
    inliers: np.ndarray  # sorted indices with clean measurements
    outliers: np.ndarray  # sorted indices with heavy-tailed entries
    omega: float
    seed: int


def outlier_values(omega: float, u: np.ndarray) -> np.ndarray:
    """Map uniforms to heavy-tailed magnitudes omega * tan(pi * u / 2)."""
    if omega <= 0.0:
        raise ParameterError("omega must be positive")
    u = np.minimum(np.asarray(u, dtype=float), _U_MAX)
    return omega * np.tan(0.5 * np.pi * u)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed))


def generate_instance(d: int, n: int, n_out: int, omega: float, seed: int) -> PhaseRetrievalInstance:
    """Draw a random instance from the 64-bit seed.

    Draw order on the Philox stream (fixed; changing it breaks stored
    seeds): sensing matrix entries (n*d standard normals), the +-1 signal
    (d fair coin flips), the outlier positions (size-n_out subset of
    range(n)), then the outlier uniforms. Clean entries of b are the
    squared inner products; outlier entries are omega * tan(pi*u/2).
    """
    if d < 1 or n < 1:
        raise ParameterError("d and n must be at least 1")
    if not 0 <= n_out <= n:
        raise ParameterError(f"n_out must lie in [0, {n}], got {n_out}")
    rng = _rng(seed)
    a_matrix = rng.standard_normal((n, d))
    x_star = (2.0 * rng.integers(0, 2, size=d) - 1.0).astype(float)
    out_idx = np.sort(rng.choice(n, size=n_out, replace=False)) if n_out else np.empty(0, dtype=np.int64)
    u = rng.random(n_out)
    b = (a_matrix @ x_star) ** 2
    if n_out:
        b[out_idx] = outlier_values(omega, u)
    mask = np.ones(n, dtype=bool)
    mask[out_idx] = False
    return PhaseRetrievalInstance(
        a_matrix=a_matrix,
        b=b,
        x_star=x_star,
        inliers=np.nonzero(mask)[0],
        outliers=out_idx,
        omega=float(omega),
        seed=int(seed),
    )


def make_problem(inst: PhaseRetrievalInstance, penalty: penalties.DcPenalty) -> CompositeProblem:
    """Composite problem for the instance: h = 0, S(x) = (Ax)*(Ax) - b."""
    a_matrix = inst.a_matrix
    b = inst.b
    n, d = a_matrix.shape

    def s_value(x):
        ax = a_matrix @ x
        return ax * ax - b

    def s_adjoint(x, v):
        return (2.0 * ((a_matrix @ x) * v)) @ a_matrix

    return CompositeProblem(s_value=s_value, s_adjoint=s_adjoint, penalty=penalty, dim_in=d, dim_out=n)


def relative_error(x: np.ndarray, x_star: np.ndarray) -> float:
    """min{||x* - x||, ||x* + x||} / ||x*||, invariant to the sign flip."""
    x = np.asarray(x, dtype=float)
    x_star = np.asarray(x_star, dtype=float)
    if x.shape != x_star.shape:
        raise ParameterError("x and x_star must have equal shapes")
    denom = float(np.linalg.norm(x_star))
    if denom == 0.0:
        raise ParameterError("x_star must be nonzero")
    return min(float(np.linalg.norm(x_star - x)), float(np.linalg.norm(x_star + x))) / denom


@dataclass(frozen=True)
class ExperimentSpec:
    """Sweep definition: penalties x outlier scales x trials."""

    d: int = 50
    n: int = 200
    n_outliers: int = 10
    omegas: tuple[float, ...] = PAPER_OMEGAS
    penalties: tuple[dict, ...] = PAPER_PENALTIES
    trials: int = 50
    base_seed: int = 0
    mu1: float = 1.0
    alpha: float = 3.0
    backtracking: BacktrackingParams = BacktrackingParams()
    stop: StopCriteria = StopCriteria()

    def __post_init__(self):
        if self.trials < 1:
            raise ParameterError("trials must be at least 1")
        if not 0 <= self.n_outliers <= self.n:
            raise ParameterError("n_outliers must lie in [0, n]")


@dataclass(frozen=True)
class TrialOutcome:
    penalty: str
    omega: float
    trial: int
    seed: int
    relative_error: float
    success: bool
    iterations: int
    time_seconds: float
    termination: str


@dataclass(frozen=True)
class SummaryRow:
    penalty: str
    omega: float
    success_rate_pct: float
    mean_time_all_sec: float
    mean_time_success_sec: float


@dataclass
class ExperimentResult:
    outcomes: list[TrialOutcome]
    summary: list[SummaryRow] = field(default_factory=list)


def penalty_id(cfg: dict) -> str:
    """Stable CSV-safe label for a penalty config."""
    kind = cfg["kind"]
    if kind == "l1":
        return "l1"
    if kind == "mcp":
        return f"mcp_lambda{cfg['lambda']:g}_beta{cfg['beta']:g}"
    if kind == "capped_l1":
        return f"capped_l1_beta{cfg['beta']:g}"
    if kind == "trimmed_l1":
        return f"trimmed_l1_k{cfg['K']}"
    raise ParameterError(f"unknown penalty kind: {kind!r}")


def derive_seed(base_seed: int, role: str, pen_id: str, omega: float, trial: int) -> int:
    """64-bit stream key: base_seed xor blake2b of the labeled coordinates.

    Streams for distinct (role, penalty, omega, trial) tuples are
    independent, so sweep order and worker count cannot change a trial.
    """
    msg = f"{role}|{pen_id}|omega={float(omega)!r}|trial={trial}"
    digest = hashlib.blake2b(msg.encode(), digest_size=8).digest()
    return (int(base_seed) ^ int.from_bytes(digest, "little")) & (2**64 - 1)


def run_trial(spec: ExperimentSpec, pen_index: int, omega_index: int, trial: int) -> TrialOutcome:
    """One independent estimation: fresh instance, fresh init, one solve."""
    cfg = spec.penalties[pen_index]
    omega = spec.omegas[omega_index]
    pid = penalty_id(cfg)
    inst_seed = derive_seed(spec.base_seed, "instance", pid, omega, trial)
    init_seed = derive_seed(spec.base_seed, "init", pid, omega, trial)
    inst = generate_instance(spec.d, spec.n, spec.n_outliers, omega, inst_seed)
    pen = penalties.penalty_from_config(cfg)
    prob = make_problem(inst, pen)
    x1 = _rng(init_seed).standard_normal(spec.d)
    sched = MuSchedule.for_penalty(pen, spec.mu1, spec.alpha)
    t0 = time.perf_counter()
    try:
        res: SolveResult = solve(prob, x1, sched, spec.backtracking, spec.stop)
    except DcSmoothError as exc:
        label = {
            "LineSearchFailure": "line_search_failure",
            "NumericalFailure": "numerical_failure",
        }.get(type(exc).__name__, "solver_failure")
        return TrialOutcome(
            penalty=pid,
            omega=float(omega),
            trial=trial,
            seed=inst_seed,
            relative_error=float("inf"),
            success=False,
            iterations=getattr(exc, "iteration", None) or 0,
            time_seconds=time.perf_counter() - t0,
            termination=label,
        )
    err = relative_error(res.x, inst.x_star)
    return TrialOutcome(
        penalty=pid,
        omega=float(omega),
        trial=trial,
        seed=inst_seed,
        relative_error=err,
        success=err < SUCCESS_THRESHOLD,
        iterations=res.iterations,
        time_seconds=res.wall_time_seconds,
        termination=res.reason.value,
    )


def _run_trial_args(args) -> TrialOutcome:
    return run_trial(*args)


def summarize(outcomes: Sequence[TrialOutcome]) -> list[SummaryRow]:
    """Per (penalty, omega) success percentage and both time averages.

    Groups appear in first-seen order. The success-only time average is
    nan when a cell has no successful trial.
    """
    groups: dict[tuple[str, float], list[TrialOutcome]] = {}
    for out in outcomes:
        groups.setdefault((out.penalty, out.omega), []).append(out)
    rows = []
    for (pid, omega), outs in groups.items():
        times = [o.time_seconds for o in outs]
        succ_times = [o.time_seconds for o in outs if o.success]
        rows.append(
            SummaryRow(
                penalty=pid,
                omega=omega,
                success_rate_pct=100.0 * sum(o.success for o in outs) / len(outs),
                mean_time_all_sec=sum(times) / len(times),
                mean_time_success_sec=sum(succ_times) / len(succ_times) if succ_times else float("nan"),
            )
        )
    return rows


def run_experiment(spec: ExperimentSpec, threads: int | None = None) -> ExperimentResult:
    """Run the full sweep and aggregate.

    Trials are independent; with threads > 1 they are distributed over
    worker processes. Outcomes are ordered by (penalty, omega, trial)
    position regardless of worker scheduling, and every per-trial value is
    a pure function of (base_seed, penalty, omega, trial), so the result
    is identical at any thread count. Per-trial solver failures are
    recorded as unsuccessful outcomes, never raised.
    """
    tasks = [
        (spec, p, o, t)
        for p in range(len(spec.penalties))
        for o in range(len(spec.omegas))
        for t in range(spec.trials)
    ]
    if threads is not None and threads < 1:
        raise ParameterError("threads must be at least 1")
    if threads is None or threads == 1:
        outcomes = [run_trial(*args) for args in tasks]
    else:
        chunk = max(1, len(tasks) // (threads * 8))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(_run_trial_args, tasks, chunksize=chunk))
    return ExperimentResult(outcomes=outcomes, summary=summarize(outcomes))


def _fmt(value: float) -> str:
    return repr(float(value))


def write_results_csv(outcomes: Sequence[TrialOutcome], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(RESULTS_CSV_HEADER + "\n")
        for o in outcomes:
            fh.write(
                f"{o.penalty},{_fmt(o.omega)},{o.trial},{o.seed},"
                f"{_fmt(o.relative_error)},{str(o.success).lower()},"
                f"{o.iterations},{_fmt(o.time_seconds)},{o.termination}\n"
            )


def write_summary_csv(rows: Sequence[SummaryRow], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(SUMMARY_CSV_HEADER + "\n")
        for r in rows:
            fh.write(
                f"{r.penalty},{_fmt(r.omega)},{_fmt(r.success_rate_pct)},"
                f"{_fmt(r.mean_time_all_sec)},{_fmt(r.mean_time_success_sec)}\n"
            )
