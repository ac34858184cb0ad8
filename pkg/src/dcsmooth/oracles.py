"""Independent brute-force verifiers: 1-D prox minimization, Dykstra
projection, and finite-difference gradients.

These deliberately avoid the closed forms they are used to check; they are
slow, simple, and shipped so the CLI can re-verify a build on demand.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import OracleError, ParameterError

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OracleConfig:
    section_tol: float = 1e-10
    fd_step: float = 1e-6
    dykstra_max_iters: int = 100_000
    dykstra_tol: float = 1e-10

    def __post_init__(self):
        if min(self.section_tol, self.fd_step, self.dykstra_tol) <= 0.0:
            raise ParameterError("oracle tolerances must be positive")
        if self.dykstra_max_iters < 1:
            raise ParameterError("dykstra_max_iters must be at least 1")


def prox_1d_oracle(
    phi: Callable[[float], float],
    t: float,
    mu: float,
    bracket: tuple[float, float],
    tol: float = 1e-10,
) -> float:
    """Minimize phi(w) + (w - t)^2 / (2 mu) over the bracket by golden section.

    The objective must be unimodal on the bracket and the bracket must
    contain the minimizer; a smaller value at either endpoint than in the
    interior raises OracleError. The golden-section result is refined by a
    local grid scan.
    """
    if mu <= 0.0:
        raise ParameterError("mu must be positive")
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ParameterError("bracket must satisfy lo < hi")

    def obj(w):
        return phi(w) + (w - t) ** 2 / (2.0 * mu)

    a, b = lo, hi
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = obj(x1), obj(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = obj(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = obj(x2)
    mid = 0.5 * (a + b)

    # local grid refinement around the golden-section midpoint
    span = max(4.0 * tol, 1e-14)
    grid = np.linspace(mid - span, mid + span, 401)
    grid = np.clip(grid, lo, hi)
    vals = np.array([obj(w) for w in grid])
    best = float(grid[int(np.argmin(vals))])
    fbest = float(vals.min())

    slack = 1e-12 * (1.0 + abs(fbest))
    if obj(lo) < fbest - slack or obj(hi) < fbest - slack:
        raise OracleError(
            f"minimum at a bracket endpoint: bracket ({lo}, {hi}) is too small"
        )
    return best


def grid_min_1d(
    phi: Callable[[np.ndarray], np.ndarray],
    t: float,
    mu: float,
    bracket: tuple[float, float],
    points: int = 20_001,
    refinements: int = 3,
) -> float:
    """Dense-grid minimizer of phi(w) + (w - t)^2 / (2 mu); phi is vectorized.

    Each refinement re-grids around the current argmin, shrinking the span
    by the grid resolution, so the final accuracy is about
    (span / points)^refinements relative to the initial span.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    best = None
    for _ in range(refinements):
        grid = np.linspace(lo, hi, points)
        vals = phi(grid) + (grid - t) ** 2 / (2.0 * mu)
        i = int(np.argmin(vals))
        best = float(grid[i])
        step = (hi - lo) / (points - 1)
        lo, hi = best - 2.0 * step, best + 2.0 * step
    return best


def project_l1_ball(v: np.ndarray, radius: float) -> np.ndarray:
    """Euclidean projection onto {w : ||w||_1 <= radius} (sorted-threshold form)."""
    if radius < 0.0:
        raise ParameterError("radius must be nonnegative")
    v = np.asarray(v, dtype=float)
    a = np.abs(v)
    if a.sum() <= radius:
        return v.copy()
    u = np.sort(a)[::-1]
    css = np.cumsum(u)
    j = np.arange(1, u.size + 1)
    rho = int(np.nonzero(u * j > css - radius)[0][-1])
    theta = (css[rho] - radius) / (rho + 1.0)
    return np.sign(v) * np.maximum(a - theta, 0.0)


def dykstra_project(
    z: np.ndarray,
    k: int,
    max_iters: int = 100_000,
    tol: float = 1e-10,
) -> np.ndarray:
    """Project z onto {||w||_inf <= 1} intersected with {||w||_1 <= k} by
    Dykstra's alternating algorithm (clip against the box, sorted-threshold
    against the l1 ball)."""
    if k < 1:
        raise ParameterError("projection requires k >= 1")
    z = np.asarray(z, dtype=float)
    x = z.copy()
    p = np.zeros_like(z)
    q = np.zeros_like(z)
    for _ in range(max_iters):
        y = np.clip(x + p, -1.0, 1.0)
        p = x + p - y
        x_new = project_l1_ball(y + q, float(k))
        q = y + q - x_new
        if np.max(np.abs(x_new - x)) <= tol and np.max(np.abs(x_new - y)) <= tol:
            return x_new
        x = x_new
    raise OracleError(f"dykstra projection did not converge in {max_iters} iterations")


def fd_grad(f: Callable[[np.ndarray], float], x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central-difference gradient (f(x + h e_i) - f(x - h e_i)) / (2h)."""
    if h <= 0.0:
        raise ParameterError("h must be positive")
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        hi = f(x + e)
        lo = f(x - e)
        if not (math.isfinite(hi) and math.isfinite(lo)):
            raise OracleError(f"non-finite evaluation on the stencil at coordinate {i}")
        grad[i] = (hi - lo) / (2.0 * h)
    return grad
