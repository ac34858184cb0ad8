"""Separable penalties with exact proximal maps and smoothed envelopes.

Each penalty piece exposes its value, its proximal map, a weak-convexity
modulus eta (value + eta/2 * ||.||^2 is convex), and a Lipschitz bound.
A difference-of-convex penalty pairs two pieces f and g as phi = f - g.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError


class PenaltyPart:
    """One prox-friendly piece of a difference-of-convex penalty."""

    #: weak-convexity modulus; 0 for convex pieces
    weak_modulus: float = 0.0

    def value(self, z: np.ndarray) -> float:
        raise NotImplementedError

    def prox(self, z: np.ndarray, mu: float) -> np.ndarray:
        """Minimizer of value(w) + ||w - z||^2 / (2 mu)."""
        raise NotImplementedError

    def lipschitz(self, dim: int) -> float:
        """A Lipschitz constant of value() on R^dim."""
        raise NotImplementedError

    def _check_mu(self, mu: float) -> float:
        mu = float(mu)
        if mu <= 0.0:
            raise ParameterError("mu must be positive")
        eta = self.weak_modulus
        if eta > 0.0 and mu >= 1.0 / eta:
            raise DomainError(
                f"mu={mu} is not below 1/eta={1.0 / eta}; the prox subproblem "
                "loses strong convexity"
            )
        return mu

    def moreau_value(self, z: np.ndarray, mu: float) -> float:
        """Envelope value min_w value(w) + ||w - z||^2 / (2 mu)."""
        mu = self._check_mu(mu)
        p = self.prox(z, mu)
        d = p - z
        return float(self.value(p) + 0.5 * float(d @ d) / mu)

    def moreau_grad(self, z: np.ndarray, mu: float) -> np.ndarray:
        """Gradient of the envelope: (z - prox(z, mu)) / mu."""
        mu = self._check_mu(mu)
        return (z - self.prox(z, mu)) / mu

    def moreau_grad_lipschitz(self, mu: float) -> float:
        """Lipschitz constant of the envelope gradient: max{1/mu, eta/(1 - eta*mu)}."""
        mu = self._check_mu(mu)
        eta = self.weak_modulus
        if eta == 0.0:
            return 1.0 / mu
        return max(1.0 / mu, eta / (1.0 - eta * mu))


@dataclass(frozen=True)
class L1(PenaltyPart):
    """Sum of absolute values."""

    def value(self, z):
        return float(np.abs(z).sum())

    def prox(self, z, mu):
        mu = self._check_mu(mu)
        return np.sign(z) * np.maximum(np.abs(z) - mu, 0.0)

    def lipschitz(self, dim):
        return math.sqrt(dim)


@dataclass(frozen=True)
class Mcp(PenaltyPart):
    """Minimax concave penalty, applied entrywise.

    Per entry: lam*|t| - t^2/(2*beta) for |t| <= beta*lam, else beta*lam^2/2.
    Weakly convex with modulus 1/beta; the prox (firm thresholding) needs
    mu < beta.
    """

    lam: float
    beta: float

    def __post_init__(self):
        if self.lam <= 0.0 or self.beta <= 0.0:
            raise ParameterError("mcp requires lam > 0 and beta > 0")

    @property
    def weak_modulus(self):
        return 1.0 / self.beta

    def value(self, z):
        a = np.abs(z)
        inner = self.lam * a - a * a / (2.0 * self.beta)
        return float(np.where(a <= self.beta * self.lam, inner, 0.5 * self.beta * self.lam**2).sum())

    def prox(self, z, mu):
        mu = self._check_mu(mu)
        a = np.abs(z)
        # firm threshold: dead zone, then linear rescale, then identity
        mid = np.sign(z) * (a - mu * self.lam) / (1.0 - mu / self.beta)
        out = np.where(a <= mu * self.lam, 0.0, mid)
        return np.where(a > self.beta * self.lam, z, out)

    def lipschitz(self, dim):
        return self.lam * math.sqrt(dim)


@dataclass(frozen=True)
class ExcessL1(PenaltyPart):
    """Sum of max(|t| - beta, 0): the l1 mass above the level beta."""

    beta: float

    def __post_init__(self):
        if self.beta <= 0.0:
            raise ParameterError("excess-l1 requires beta > 0")

    def value(self, z):
        return float(np.maximum(np.abs(z) - self.beta, 0.0).sum())

    def prox(self, z, mu):
        mu = self._check_mu(mu)
        a = np.abs(z)
        s = np.sign(z)
        # identity inside the flat zone, clamp to beta just past it,
        # then a soft shift by mu
        out = np.where(a <= self.beta, z, s * self.beta)
        return np.where(a > self.beta + mu, z - mu * s, out)

    def lipschitz(self, dim):
        return math.sqrt(dim)


@dataclass(frozen=True)
class TopK(PenaltyPart):
    """Sum of the k largest absolute entries."""

    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ParameterError("top-k requires k >= 0")

    def _check_dim(self, z):
        if self.k >= z.size:
            raise ParameterError(f"top-k with k={self.k} needs vectors of length > {self.k}")

    def value(self, z):
        self._check_dim(z)
        if self.k == 0:
            return 0.0
        a = np.abs(z)
        return float(np.partition(a, a.size - self.k)[a.size - self.k:].sum())

    def prox(self, z, mu):
        mu = self._check_mu(mu)
        self._check_dim(z)
        if self.k == 0:
            return np.asarray(z, dtype=float).copy()
        # Moreau decomposition against the dual-ball projection
        return z - mu * project_box_l1(z / mu, self.k)

    def lipschitz(self, dim):
        return math.sqrt(self.k)


@dataclass(frozen=True)
class Zero(PenaltyPart):
    """The zero function; its prox is the identity."""

    def value(self, z):
        return 0.0

    def prox(self, z, mu):
        self._check_mu(mu)
        return np.asarray(z, dtype=float)

    def lipschitz(self, dim):
        return 0.0


def project_box_l1(z: np.ndarray, k: int) -> np.ndarray:
    """Euclidean projection onto {w : ||w||_inf <= 1, ||w||_1 <= k}.

    The projection is sign(z) * clip(|z| - theta, 0, 1) for the smallest
    theta >= 0 that meets the l1 bound. The crossing equation
    sum_i clip(|z_i| - theta, 0, 1) = k is piecewise linear in theta, so
    theta is found exactly from the sorted breakpoints {|z_i|} U {|z_i|-1}.
    """
    if k < 1:
        raise ParameterError("projection requires k >= 1")
    z = np.asarray(z, dtype=float)
    a = np.abs(z)
    clipped = np.minimum(a, 1.0)
    if clipped.sum() <= k:
        return np.sign(z) * clipped

    asort = np.sort(a)
    prefix = np.concatenate(([0.0], np.cumsum(asort)))
    n = a.size

    def mass(theta):
        # sum_i clip(a_i - theta, 0, 1), vectorized over theta
        hi = np.searchsorted(asort, theta + 1.0, side="left")
        lo = np.searchsorted(asort, theta, side="right")
        return (n - hi) + (prefix[hi] - prefix[lo]) - (hi - lo) * theta

    bps = np.unique(np.concatenate((a, a - 1.0, [0.0])))
    bps = bps[(bps >= 0.0) & (bps <= asort[-1])]
    s_vals = mass(bps)
    # first breakpoint where the mass drops to k or below
    j = int(np.searchsorted(-s_vals, -float(k), side="left"))
    if s_vals[j] == k:
        theta = bps[j]
    else:
        drop = s_vals[j - 1] - s_vals[j]
        theta = bps[j - 1] + (s_vals[j - 1] - k) * (bps[j] - bps[j - 1]) / drop
    return np.sign(z) * np.clip(a - theta, 0.0, 1.0)


@dataclass(frozen=True)
class DcPenalty:
    """phi = f - g for two prox-friendly pieces."""

    f: PenaltyPart
    g: PenaltyPart

    @property
    def weak_modulus(self) -> float:
        return max(self.f.weak_modulus, self.g.weak_modulus)

    def value(self, z: np.ndarray) -> float:
        return self.f.value(z) - self.g.value(z)

    def mu_cap(self) -> float:
        """Largest smoothing parameter the solver accepts: 1/(2 eta), inf for eta = 0."""
        eta = self.weak_modulus
        return math.inf if eta == 0.0 else 0.5 / eta


def l1_penalty() -> DcPenalty:
    return DcPenalty(L1(), Zero())


def mcp_penalty(lam: float, beta: float) -> DcPenalty:
    return DcPenalty(Mcp(lam, beta), Zero())


def capped_l1_penalty(beta: float) -> DcPenalty:
    """min{|t|, beta} per entry, split as l1 minus the excess over beta."""
    return DcPenalty(L1(), ExcessL1(beta))


def trimmed_l1_penalty(k: int) -> DcPenalty:
    """l1 norm with the k largest absolute entries left out."""
    return DcPenalty(L1(), TopK(k))


def penalty_from_config(cfg: dict) -> DcPenalty:
    """Build a DC penalty from its config form.

    Grammar: {"kind": "l1" | "mcp" | "capped_l1" | "trimmed_l1",
              "lambda": ..., "beta": ..., "K": ...}.
    """
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise ParameterError("penalty config must be a dict with a 'kind' key")
    kind = cfg["kind"]
    keys = set(cfg) - {"kind"}
    if kind == "l1":
        extra = keys
        if extra:
            raise ParameterError(f"l1 takes no parameters, got {sorted(extra)}")
        return l1_penalty()
    if kind == "mcp":
        if keys != {"lambda", "beta"}:
            raise ParameterError("mcp requires exactly 'lambda' and 'beta'")
        return mcp_penalty(float(cfg["lambda"]), float(cfg["beta"]))
    if kind == "capped_l1":
        if keys != {"beta"}:
            raise ParameterError("capped_l1 requires exactly 'beta'")
        return capped_l1_penalty(float(cfg["beta"]))
    if kind == "trimmed_l1":
        if keys != {"K"}:
            raise ParameterError("trimmed_l1 requires exactly 'K'")
        k = cfg["K"]
        if not isinstance(k, int) or isinstance(k, bool):
            raise ParameterError("trimmed_l1 K must be an integer")
        return trimmed_l1_penalty(k)
    raise ParameterError(f"unknown penalty kind: {kind!r}")
