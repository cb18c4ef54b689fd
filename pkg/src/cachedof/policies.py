"""Symmetric reference delivery policies for a homogeneous instance.

Each policy fixes, for (K, gamma, L, G), the number of users served per
transmission (omega), the per-user parallel stream count (beta), the
placement and delivery split factors, and the resulting interval counts.
The opt policy needs a one-dimensional search; cmb and lin are closed
form.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .core import NonIntegerCacheGain, binom


class Policy(enum.Enum):
    OPT = "opt"
    CMB = "cmb"
    LIN = "lin"

    def __str__(self) -> str:  # CSV/report friendly
        return self.value

    @classmethod
    def parse(cls, text: str) -> "Policy":
        try:
            return cls(text.lower())
        except ValueError:
            raise ValueError(f"unknown policy {text!r}; expected opt, cmb, or lin")


class PolicyInfeasible(ValueError):
    """The policy's applicability condition fails for these parameters."""

    def __init__(self, message: str, policy: "Policy | None" = None):
        super().__init__(message)
        self.policy = policy


class LinInfeasible(PolicyInfeasible):
    """lin needs floor(L/G) >= K*gamma."""

    def __init__(self, message: str):
        super().__init__(message, Policy.LIN)


class CmbInfeasible(PolicyInfeasible):
    """cmb needs floor(L/G) >= 1."""

    def __init__(self, message: str):
        super().__init__(message, Policy.CMB)


@dataclass(frozen=True)
class PolicyOutcome:
    """One symmetric policy evaluation.

    theta = vartheta * phi is the final subpacketization; s_count the
    number of transmission intervals; lam the number of intervals that
    include any fixed user. All counts exact.
    """

    policy: Policy
    n_users: int
    cache_gain: int
    tx_gain: int
    rx_gain: int
    omega: int
    beta: int
    dof: Fraction
    theta: int
    s_count: int
    lam: int
    phi: int
    vartheta: int
    feasible: bool = True


def decodability_beta_bound(L: int, t: int, omega: int, delta: int) -> Optional[int]:
    """Max per-user streams a linear receiver can separate.

    For omega > t+1 returns floor((L-delta)/(omega-t-1)) clamped at 0
    (0 means the point is infeasible). For omega == t+1 the spatial
    constraint vanishes and None is returned; the caller caps by G.
    """
    if omega < t + 1:
        raise ValueError(f"omega={omega} below multicast minimum t+1={t+1}")
    if omega == t + 1:
        return None
    return max(0, (L - delta) // (omega - t - 1))


def stream_budget_limit(L: int, t: int, omega: int) -> Fraction:
    """Exact per-user stream limit of the opt construction at omega.

    L*C(omega-1,t) / (1 + (omega-t-1)*C(omega-1,t)); equals L at
    omega = t+1.
    """
    c = binom(omega - 1, t)
    return Fraction(L * c, 1 + (omega - t - 1) * c)


@lru_cache(maxsize=None)
def opt_delivery_params(K: int, gamma: Fraction, L: int, G: int) -> tuple[int, int]:
    """Line search for the DoF-optimal (omega, beta).

    Scans omega in [t+1, min(K, t+L)] with beta(omega) the floored
    min(G, stream-budget limit); returns the omega*beta maximizer,
    smallest omega on ties. beta(t+1) = min(G, L) >= 1, so a feasible
    point always exists.
    """
    t = _integral_gain(K, gamma)
    best: tuple[int, int] | None = None
    best_dof = 0
    for omega in range(t + 1, min(K, t + L) + 1):
        beta = min(G, int(stream_budget_limit(L, t, omega)))
        if beta < 1:
            continue
        if omega * beta > best_dof:
            best = (omega, beta)
            best_dof = omega * beta
    assert best is not None, "omega = t+1 always admits beta >= 1"
    return best


def _integral_gain(K: int, gamma: Fraction) -> int:
    t = K * Fraction(gamma)
    if t.denominator != 1:
        raise NonIntegerCacheGain(f"K*gamma = {K}*{gamma} = {t} is not an integer")
    t = int(t)
    if not (1 <= t < K):
        raise NonIntegerCacheGain(f"cache gain t={t} must satisfy 1 <= t < K={K}")
    return t


@lru_cache(maxsize=None)
def eval_policy(policy: Policy, K: int, gamma: Fraction, L: int, G: int) -> PolicyOutcome:
    """Evaluate one reference policy on a homogeneous (K, gamma, L, G).

    Raises LinInfeasible / CmbInfeasible when the closed-form policies
    do not apply; no numbers are fabricated for infeasible points.
    """
    t = _integral_gain(K, gamma)
    if policy is Policy.OPT:
        omega, beta = opt_delivery_params(K, gamma, L, G)
        vartheta = binom(K, t)
        phi = beta * binom(K - t - 1, omega - t - 1)
        s_count = binom(K, omega) * binom(omega - 1, t)
        lam = binom(K - 1, omega - 1) * binom(omega - 1, t)
        dof = Fraction(omega * beta)
    else:
        alpha = L // G
        if policy is Policy.LIN and alpha < t:
            raise LinInfeasible(
                f"lin needs floor(L/G) >= K*gamma: floor({L}/{G})={alpha} < {t}"
            )
        if alpha < 1:
            raise CmbInfeasible(f"cmb needs floor(L/G) >= 1: L={L} < G={G}")
        omega, beta = t + alpha, G
        dof = Fraction(G * t + G * alpha)
        if policy is Policy.CMB:
            vartheta = binom(K, t)
            phi = G * binom(K - t - 1, alpha - 1)
            s_count = binom(K, omega) * binom(omega - 1, t)
            lam = binom(K - 1, omega - 1) * binom(omega - 1, t)
        else:
            vartheta = K
            phi = G * (t + alpha)
            s_count = K * (K - t)
            lam = (K - t) * (t + alpha)
    return PolicyOutcome(
        policy=policy,
        n_users=K,
        cache_gain=t,
        tx_gain=L,
        rx_gain=G,
        omega=omega,
        beta=beta,
        dof=dof,
        theta=vartheta * phi,
        s_count=s_count,
        lam=lam,
        phi=phi,
        vartheta=vartheta,
    )
