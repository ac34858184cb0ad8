"""Gradient descent on a sequence of shrinking-mu smoothed surrogates.

Iteration k minimizes the mu_k-smoothed objective for one backtracked
gradient step, with mu_k following a power-law schedule that decays to
zero while its series diverges.
"""
from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import LineSearchFailure, NumericalFailure, ParameterError
from .smoothing import CompositeProblem

#: traces keep every iteration up to this count; beyond it they are strided
TRACE_DENSE_LIMIT = 10_000

TRACE_CSV_HEADER = "k,mu,gamma,grad_norm,surrogate,objective,backtracks"


class TerminationReason(enum.Enum):
    GRAD_TOL = "grad_tol"
    MAX_ITERS = "max_iters"


@dataclass(frozen=True)
class MuSchedule:
    """Power-law smoothing schedule mu_k = mu1 * k**(-1/alpha), k = 1, 2, ...

    With alpha >= 1 the sequence decays to zero, its series diverges, and
    consecutive ratios stay within [1, 2**(1/alpha)]. ``cap`` records the
    largest admissible value, 1/(2 eta) for an eta-weakly-convex penalty.
    """

    mu1: float = 1.0
    alpha: float = 3.0
    cap: float = math.inf

    def __post_init__(self):
        if self.mu1 <= 0.0:
            raise ParameterError("mu1 must be positive")
        if self.alpha < 1.0:
            raise ParameterError("alpha must be at least 1")
        if self.cap <= 0.0:
            raise ParameterError("cap must be positive")
        if self.mu1 > self.cap:
            raise ParameterError(f"mu1={self.mu1} exceeds cap={self.cap}")

    def mu_at(self, k: int) -> float:
        if k < 1:
            raise ParameterError("k starts at 1")
        return self.mu1 * float(k) ** (-1.0 / self.alpha)

    @classmethod
    def for_penalty(cls, penalty, mu1: float = 1.0, alpha: float = 3.0) -> "MuSchedule":
        """Schedule whose cap matches the penalty; mu1 is lowered to the cap if needed."""
        cap = penalty.mu_cap()
        return cls(min(mu1, cap), alpha, cap)


@dataclass(frozen=True)
class ScheduleCertificate:
    """Finite-prefix check of the schedule conditions plus the partial sum."""

    n_terms: int
    ratio_bound: float
    ratio_min: float
    ratio_max: float
    ratios_ok: bool
    partial_sum: float


def certify_schedule(sched: MuSchedule, n_terms: int) -> ScheduleCertificate:
    """Check 1 <= mu_k/mu_{k+1} <= 2**(1/alpha) for k < n_terms and sum the prefix."""
    if n_terms < 2:
        raise ParameterError("n_terms must be at least 2")
    mus = sched.mu1 * np.arange(1, n_terms + 1, dtype=float) ** (-1.0 / sched.alpha)
    ratios = mus[:-1] / mus[1:]
    bound = 2.0 ** (1.0 / sched.alpha)
    ok = bool(np.all(ratios >= 1.0 - 1e-12) and np.all(ratios <= bound + 1e-12))
    return ScheduleCertificate(
        n_terms=n_terms,
        ratio_bound=bound,
        ratio_min=float(ratios.min()),
        ratio_max=float(ratios.max()),
        ratios_ok=ok,
        partial_sum=float(mus.sum()),
    )


@dataclass(frozen=True)
class BacktrackingParams:
    gamma_initial: float = 1.0
    rho: float = 0.8
    c: float = 1e-4
    max_halvings: int = 200

    def __post_init__(self):
        if self.gamma_initial <= 0.0:
            raise ParameterError("gamma_initial must be positive")
        if not 0.0 < self.rho < 1.0:
            raise ParameterError("rho must lie in (0,1)")
        if not 0.0 < self.c < 1.0:
            raise ParameterError("c must lie in (0,1)")
        if self.max_halvings < 1:
            raise ParameterError("max_halvings must be at least 1")


@dataclass(frozen=True)
class StopCriteria:
    grad_tol: float = 1e-3
    max_iters: int = 10_000

    def __post_init__(self):
        if self.grad_tol <= 0.0:
            raise ParameterError("grad_tol must be positive")
        if self.max_iters < 1:
            raise ParameterError("max_iters must be at least 1")


@dataclass(frozen=True)
class IterationRecord:
    k: int
    mu: float
    gamma: float
    grad_norm: float
    surrogate: float
    objective: float
    backtracks: int


@dataclass
class SolveResult:
    x: np.ndarray
    reason: TerminationReason
    iterations: int
    grad_norm: float
    wall_time_seconds: float
    x_initial: np.ndarray
    trace: list[IterationRecord] = field(repr=False)
    trace_thinned: bool = False


def backtrack(prob: CompositeProblem, x, mu, grad, fx, params: BacktrackingParams):
    """Shrink the stepsize geometrically until the sufficient-decrease test holds.

    ``grad`` and ``fx`` must be the surrogate gradient and value at x for
    this mu. Returns (gamma, x_next, f_next, trials) where trials is the
    number of shrinkages and gamma = gamma_initial * rho**trials exactly.
    The stepsize restarts from gamma_initial on every call.
    """
    gnorm2 = float(grad @ grad)
    for j in range(params.max_halvings + 1):
        gamma = params.gamma_initial * params.rho**j
        x_trial = x - gamma * grad
        f_trial = prob.surrogate(x_trial, mu)
        if f_trial <= fx - params.c * gamma * gnorm2:
            return gamma, x_trial, f_trial, j
    raise LineSearchFailure(
        f"no stepsize in {params.max_halvings} shrinkages satisfied the "
        f"sufficient-decrease test (mu={mu}, |grad|^2={gnorm2:.3e})"
    )


def solve(
    prob: CompositeProblem,
    x1,
    sched: MuSchedule,
    bt: BacktrackingParams | None = None,
    stop: StopCriteria | None = None,
) -> SolveResult:
    """Run the variable smoothing iteration from x1.

    Each iteration evaluates the mu_k-smoothed surrogate and its gradient
    at x_k, stops with GRAD_TOL if the gradient norm is below tolerance
    (the reported iterate is the one that passed the test), and otherwise
    takes the backtracked step x_{k+1} = x_k - gamma_k * grad. MAX_ITERS
    reports x_{max_iters} without stepping further.

    Raises LineSearchFailure from the stepsize search and NumericalFailure
    if a non-finite value or gradient appears.
    """
    bt = BacktrackingParams() if bt is None else bt
    stop = StopCriteria() if stop is None else stop
    x = np.array(x1, dtype=float, copy=True)
    if x.shape != (prob.dim_in,):
        raise ParameterError(f"x1 must have shape ({prob.dim_in},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ParameterError("x1 must be finite")
    if sched.mu1 > prob.mu_cap():
        raise ParameterError(
            f"schedule starts at mu1={sched.mu1}, above the problem cap {prob.mu_cap()}"
        )
    x_initial = x.copy()

    stride = max(1, math.ceil(stop.max_iters / TRACE_DENSE_LIMIT))
    trace: list[IterationRecord] = []
    t0 = time.perf_counter()
    for k in range(1, stop.max_iters + 1):
        mu = sched.mu_at(k)
        fx, grad, obj = prob.surrogate_state(x, mu)
        if not (math.isfinite(fx) and np.all(np.isfinite(grad))):
            raise NumericalFailure(
                f"non-finite surrogate value or gradient at iteration {k}", iteration=k
            )
        gnorm = float(np.linalg.norm(grad))
        if gnorm < stop.grad_tol:
            trace.append(IterationRecord(k, mu, 0.0, gnorm, fx, obj, 0))
            reason = TerminationReason.GRAD_TOL
            break
        if k == stop.max_iters:
            trace.append(IterationRecord(k, mu, 0.0, gnorm, fx, obj, 0))
            reason = TerminationReason.MAX_ITERS
            break
        gamma, x_next, _, trials = backtrack(prob, x, mu, grad, fx, bt)
        if k <= TRACE_DENSE_LIMIT or k % stride == 0:
            trace.append(IterationRecord(k, mu, gamma, gnorm, fx, obj, trials))
        x = x_next
    return SolveResult(
        x=x,
        reason=reason,
        iterations=k,
        grad_norm=gnorm,
        wall_time_seconds=time.perf_counter() - t0,
        x_initial=x_initial,
        trace=trace,
        trace_thinned=stride > 1,
    )


def replay_descent(prob: CompositeProblem, result: SolveResult, c: float) -> float:
    """Re-run a recorded solve and return the worst relative Armijo violation.

    Replays x_{k+1} = x_k - gamma_k * grad from the recorded stepsizes and
    re-evaluates the sufficient-decrease inequality at every stepped
    iteration; a value <= 0 means every step passed with margin. Requires
    an unthinned trace.
    """
    if result.trace_thinned:
        raise ParameterError("cannot replay a thinned trace")
    x = result.x_initial.copy()
    worst = -math.inf
    for rec in result.trace:
        fx, grad, _ = prob.surrogate_state(x, rec.mu)
        gnorm = float(np.linalg.norm(grad))
        if not math.isclose(gnorm, rec.grad_norm, rel_tol=1e-9, abs_tol=1e-12):
            raise NumericalFailure(
                f"replay diverged from the trace at k={rec.k}: "
                f"|grad|={gnorm} vs recorded {rec.grad_norm}"
            )
        if rec.gamma == 0.0:
            continue  # terminal record, no step taken
        x_next = x - rec.gamma * grad
        f_next = prob.surrogate(x_next, rec.mu)
        bound = fx - c * rec.gamma * float(grad @ grad)
        worst = max(worst, (f_next - bound) / max(1.0, abs(fx)))
        x = x_next
    return worst


def write_trace_csv(result: SolveResult, path) -> None:
    """Write the per-iteration trace with the standard header."""
    with open(path, "w", newline="") as fh:
        fh.write(TRACE_CSV_HEADER + "\n")
        for r in result.trace:
            fh.write(
                f"{r.k},{r.mu!r},{r.gamma!r},{r.grad_norm!r},"
                f"{r.surrogate!r},{r.objective!r},{r.backtracks}\n"
            )
