"""Composite objective h + (f - g)(S(x)) and its smoothed surrogate.

The surrogate replaces f and g by their Moreau envelopes at a smoothing
level mu, which makes it continuously differentiable; its gradient is
grad h(x) + DS(x)^T (grad f_mu(S(x)) - grad g_mu(S(x))).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, ParameterError
from .penalties import DcPenalty


@dataclass
class CompositeProblem:
    """Problem data: smooth term h, smooth map S, and a DC penalty.

    The map S is given by a value callback x -> S(x) in R^dim_out and an
    adjoint callback (x, v) -> DS(x)^T v in R^dim_in. ``h_value``/``h_grad``
    of None mean h == 0. ``h_grad_lipschitz`` is declared, not checked.
    """

    s_value: Callable[[np.ndarray], np.ndarray]
    s_adjoint: Callable[[np.ndarray, np.ndarray], np.ndarray]
    penalty: DcPenalty
    dim_in: int
    dim_out: int
    h_value: Callable[[np.ndarray], float] | None = None
    h_grad: Callable[[np.ndarray], np.ndarray] | None = None
    h_grad_lipschitz: float = 0.0

    def mu_cap(self) -> float:
        return self.penalty.mu_cap()

    def _check_x(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim_in,):
            raise ParameterError(f"x must have shape ({self.dim_in},), got {x.shape}")
        return x

    def _check_mu(self, mu: float) -> float:
        mu = float(mu)
        if mu <= 0.0:
            raise ParameterError("mu must be positive")
        cap = self.mu_cap()
        if mu > cap:
            raise DomainError(f"mu={mu} exceeds the cap 1/(2 eta)={cap}")
        return mu

    def objective(self, x) -> float:
        """h(x) + f(S(x)) - g(S(x))."""
        x = self._check_x(x)
        hx = 0.0 if self.h_value is None else float(self.h_value(x))
        return hx + self.penalty.value(self.s_value(x))

    def surrogate(self, x, mu: float) -> float:
        """Smoothed objective h(x) + f_mu(S(x)) - g_mu(S(x))."""
        x = self._check_x(x)
        mu = self._check_mu(mu)
        s = self.s_value(x)
        hx = 0.0 if self.h_value is None else float(self.h_value(x))
        return hx + self.penalty.f.moreau_value(s, mu) - self.penalty.g.moreau_value(s, mu)

    def surrogate_grad(self, x, mu: float) -> np.ndarray:
        """Gradient of the smoothed objective via the adjoint of DS."""
        x = self._check_x(x)
        mu = self._check_mu(mu)
        s = self.s_value(x)
        w = self.penalty.f.moreau_grad(s, mu) - self.penalty.g.moreau_grad(s, mu)
        grad = self.s_adjoint(x, w)
        if self.h_grad is not None:
            grad = grad + self.h_grad(x)
        return grad

    def surrogate_state(self, x, mu: float) -> tuple[float, np.ndarray, float]:
        """Fused (surrogate value, surrogate gradient, raw objective) at x.

        Shares S(x) and both prox evaluations between the three outputs;
        this is the solver's per-iteration workhorse.
        """
        x = self._check_x(x)
        mu = self._check_mu(mu)
        f, g = self.penalty.f, self.penalty.g
        s = self.s_value(x)
        pf = f.prox(s, mu)
        pg = g.prox(s, mu)
        df = pf - s
        dg = pg - s
        fs = f.value(s)
        gs = g.value(s)
        env = f.value(pf) + 0.5 * float(df @ df) / mu - g.value(pg) - 0.5 * float(dg @ dg) / mu
        grad = self.s_adjoint(x, (pg - pf) / mu)
        if self.h_value is None:
            hx = 0.0
        else:
            hx = float(self.h_value(x))
            grad = grad + self.h_grad(x)
        return hx + env, grad, hx + fs - gs


def identity_problem(penalty: DcPenalty, dim: int) -> CompositeProblem:
    """Problem with S = Id and h = 0: minimize phi(x) directly."""
    return CompositeProblem(
        s_value=lambda x: x,
        s_adjoint=lambda x, v: v,
        penalty=penalty,
        dim_in=dim,
        dim_out=dim,
    )
