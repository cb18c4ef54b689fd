"""Phantom delivery planning: multicast rounds plus a unicast cleanup.

Each multicast round pretends every targeted user has the round's
operating rx gain; streams that weaker users cannot decode are deferred,
either to a later round (re-multicast among the weak users) or to the
final unicast round running at L parallel streams per interval. The
single-round variant (one MC round, then unicast) admits a direct
closed form and a full operating grid.

All DoF arithmetic is exact rational; the general interval-counting
form and the per-policy closed forms must agree exactly, which the test
suite asserts.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .core import NetworkConfig, binom
from .policies import Policy, stream_budget_limit


class InfeasiblePair(ValueError):
    """(omega, beta) violates the stream-budget bound or policy rules."""


class PhantomError(ValueError):
    pass


@dataclass(frozen=True)
class PhantomRound:
    """One multicast round of the plan.

    `group_indices` are the 1-based original group positions served this
    round; `g_hat` is the largest rx gain among them, `beta` the round's
    operating per-user stream count (beta <= g_hat; for cmb/lin beta is
    the round's tuned operating gain). `phi` is the round's delivery
    split factor, `s_count`/`lam` the hypothetical network's interval
    counts, and `zeta`/`epsilon` the normalization factors that refer
    all rounds to the final subpacketization.
    """

    index: int
    group_indices: tuple[int, ...]
    k_hat: int
    g_hat: int
    omega: int
    beta: int
    phi: int
    s_count: int
    lam: int
    stream_sum: int
    zeta: int = 1
    epsilon: int = 1


@dataclass(frozen=True)
class PhantomPlan:
    policy: Policy
    config: NetworkConfig
    rounds: tuple[PhantomRound, ...]
    vartheta: int
    theta_final: int
    z_total: int
    z_mc: tuple[int, ...]
    z_uc: int
    uc_intervals: Fraction
    uc_intervals_packed: int
    uc_supply_binds: bool
    uc_exact_division: bool
    dof: Fraction
    dof_by_rounds: tuple[Fraction, ...]

    @property
    def n_rounds(self) -> int:
        return len(self.rounds)

    def streams_for(self, rnd: PhantomRound, rx_gain: int) -> int:
        return min(rnd.beta, rx_gain)


@dataclass(frozen=True)
class SphCell:
    omega: int
    beta: int
    dof: Optional[Fraction]
    feasible: bool
    reason: Optional[str] = None


@dataclass(frozen=True)
class SphResult:
    omega: int
    beta: int
    dof: Fraction
    grid: tuple[SphCell, ...]


def mc_weight(k_hat: int, K: int, t: int) -> Fraction:
    """Share of a user's missing labels that lie inside a k_hat-subset.

    Product form prod_{l<t} (k_hat-1-l)/(K-1-l); equals
    C(k_hat-1,t)/C(K-1,t).
    """
    out = Fraction(1)
    for l in range(t):
        out *= Fraction(k_hat - 1 - l, K - 1 - l)
    return out


def _pair_reason(
    policy: Policy, K: int, t: int, L: int, omega: int, beta: int
) -> Optional[str]:
    """None if (omega, beta) is a feasible operating point, else why not."""
    if beta < 1:
        return "beta must be >= 1"
    if policy is Policy.OPT:
        if not (t + 1 <= omega <= min(K, t + L)):
            return f"omega={omega} outside [{t + 1}, {min(K, t + L)}]"
        limit = stream_budget_limit(L, t, omega)
        if beta > limit:
            return f"stream budget allows beta <= {limit} at omega={omega}"
        return None
    alpha = L // beta
    if alpha < 1:
        return f"floor(L/{beta}) = 0"
    if policy is Policy.LIN and alpha < t:
        return f"lin needs floor(L/beta) >= t: {alpha} < {t}"
    if omega != t + alpha:
        return f"omega is forced to t+floor(L/beta) = {t + alpha}"
    if omega > K:
        return f"omega={omega} exceeds the {K} available users"
    return None


def sph_dof(cfg: NetworkConfig, policy: Policy, omega: int, beta: int) -> Fraction:
    """DoF of the single-round plan operated at (omega, beta).

    One multicast round serving all K users with beta streams each
    (users keep min(beta, G_k)), then unicast cleanup at L streams per
    interval.
    """
    K, L, t = cfg.n_users, cfg.tx_gain, cfg.cc_gain
    reason = _pair_reason(policy, K, t, L, omega, beta)
    if reason is not None:
        raise InfeasiblePair(f"({omega}, {beta}): {reason}")
    b_sum = cfg.stream_sum(beta)
    denom = 1 - Fraction(b_sum - Fraction(L * K, omega), K * beta)
    return Fraction(L) / denom


def _sph_grid_points(cfg: NetworkConfig, policy: Policy) -> Iterator[tuple[int, int]]:
    K, L, t = cfg.n_users, cfg.tx_gain, cfg.cc_gain
    for beta in range(1, cfg.max_rx_gain + 1):
        if policy is Policy.OPT:
            for omega in range(t + 1, min(K, t + L) + 1):
                yield omega, beta
        else:
            alpha = L // beta
            if alpha >= 1:
                yield t + alpha, beta


def sph_optimize(cfg: NetworkConfig, policy: Policy) -> SphResult:
    """Exhaustive scan of the single-round operating grid.

    Ties broken toward smaller beta, then smaller omega. The smallest-
    gain operating point is always feasible, so a maximizer exists.
    """
    K, L, t = cfg.n_users, cfg.tx_gain, cfg.cc_gain
    cells: list[SphCell] = []
    best: Optional[SphCell] = None
    for omega, beta in _sph_grid_points(cfg, policy):
        reason = _pair_reason(policy, K, t, L, omega, beta)
        if reason is None:
            dof = sph_dof(cfg, policy, omega, beta)
            cell = SphCell(omega, beta, dof, True)
            if best is None or dof > best.dof:
                best = cell
        else:
            cell = SphCell(omega, beta, None, False, reason)
        cells.append(cell)
    if best is None:
        raise PhantomError(f"no feasible single-round operating point ({policy})")
    return SphResult(best.omega, best.beta, best.dof, tuple(cells))


def _round_phi(policy: Policy, k_hat: int, t_phi: int, L: int, omega: int, beta: int) -> int:
    if policy is Policy.OPT:
        return beta * binom(k_hat - t_phi - 1, omega - t_phi - 1)
    alpha = L // beta
    if policy is Policy.CMB:
        return beta * binom(k_hat - t_phi - 1, alpha - 1)
    return beta * (t_phi + alpha)


def _round_counts(policy: Policy, k_hat: int, t: int, omega: int) -> tuple[int, int]:
    """(s_count, lam) of the round's hypothetical network."""
    if policy is Policy.LIN:
        return k_hat * (k_hat - t), (k_hat - t) * omega
    s = binom(k_hat, omega) * binom(omega - 1, t)
    lam = binom(k_hat - 1, omega - 1) * binom(omega - 1, t)
    return s, lam


def _round_term(
    policy: Policy, K: int, t: int, L: int,
    k_hat: int, omega: int, beta: int, b_sum: int,
) -> Fraction:
    """This round's additive contribution inside the closed-form DoF."""
    if policy is Policy.LIN:
        weight = Fraction(k_hat - t, K - t)
    else:
        weight = mc_weight(k_hat, K, t)
    return weight * Fraction(omega * b_sum - L * k_hat, K * omega * beta)


def _candidates(
    policy: Policy, k_hat: int, g_cap: int, t: int, L: int
) -> Iterator[tuple[int, int]]:
    """Feasible (omega, beta) pairs for a round, beta then omega ascending."""
    for beta in range(1, g_cap + 1):
        if policy is Policy.OPT:
            for omega in range(t + 1, min(k_hat, t + L) + 1):
                if beta <= stream_budget_limit(L, t, omega):
                    yield omega, beta
        else:
            alpha = L // beta
            if alpha < 1 or (policy is Policy.LIN and alpha < t):
                continue
            omega = t + alpha
            if omega <= k_hat:
                yield omega, beta


def _greedy_rounds(
    cfg: NetworkConfig, policy: Policy, first: tuple[int, int]
) -> list[tuple[tuple[int, ...], int, int, int, int]]:
    """Rounds as (group_indices, k_hat, g_hat, omega, beta).

    Round 1 is forced to `first`; each later round serves the groups the
    previous round's beta left undecodable and maximizes its own
    closed-form contribution (tie: smaller beta, then smaller omega).
    """
    K, L, t = cfg.n_users, cfg.tx_gain, cfg.cc_gain
    all_groups = tuple(range(1, cfg.n_groups + 1))
    rounds = [(all_groups, K, cfg.max_rx_gain, first[0], first[1])]
    beta_prev = first[1]
    while True:
        groups_i = tuple(
            j for j in all_groups if cfg.groups[j - 1].rx_gain < beta_prev
        )
        if not groups_i:
            break
        k_hat = sum(cfg.groups[j - 1].count for j in groups_i)
        g_hat = max(cfg.groups[j - 1].rx_gain for j in groups_i)
        if k_hat < t + 1:
            break
        best: Optional[tuple[int, int]] = None
        best_term: Optional[Fraction] = None
        for omega, beta in _candidates(policy, k_hat, g_hat, t, L):
            b_sum = sum(
                cfg.groups[j - 1].count * min(beta, cfg.groups[j - 1].rx_gain)
                for j in groups_i
            )
            term = _round_term(policy, K, t, L, k_hat, omega, beta, b_sum)
            if best_term is None or term > best_term:
                best, best_term = (omega, beta), term
        if best is None:
            break
        rounds.append((groups_i, k_hat, g_hat, best[0], best[1]))
        beta_prev = best[1]
    return rounds


def _closed_form_from_specs(
    cfg: NetworkConfig,
    policy: Policy,
    specs: Sequence[tuple[tuple[int, ...], int, int, int, int]],
) -> Fraction:
    K, L, t = cfg.n_users, cfg.tx_gain, cfg.cc_gain
    total = Fraction(0)
    for groups_i, k_hat, _g_hat, omega, beta in specs:
        b_sum = sum(
            cfg.groups[j - 1].count * min(beta, cfg.groups[j - 1].rx_gain)
            for j in groups_i
        )
        total += _round_term(policy, K, t, L, k_hat, omega, beta, b_sum)
    return Fraction(L) / (1 - total)


def phantom_plan(
    cfg: NetworkConfig, policy: Policy, per_round_cache_gain: bool = False
) -> PhantomPlan:
    """Build the full multi-round plan and its exact DoF.

    The first round's (omega, beta) is chosen by grid search over the
    single-round operating points, maximizing the DoF of the whole
    greedily-completed plan; later rounds maximize their own
    contribution. `per_round_cache_gain` switches the delivery split
    factor to use each round's own K_hat*gamma (sensitivity analysis
    only; requires integrality and breaks the closed-form identity).
    """
    K, L, t = cfg.n_users, cfg.tx_gain, cfg.cc_gain

    best_specs = None
    best_dof: Optional[Fraction] = None
    for first in _candidates(policy, K, cfg.max_rx_gain, t, L):
        specs = _greedy_rounds(cfg, policy, first)
        dof = _closed_form_from_specs(cfg, policy, specs)
        if best_dof is None or dof > best_dof:
            best_specs, best_dof = specs, dof
    if best_specs is None:
        raise PhantomError(f"no feasible multicast round ({policy})")

    # Annotated rounds with the counting quantities.
    raw: list[PhantomRound] = []
    phis: list[int] = []
    for idx, (groups_i, k_hat, g_hat, omega, beta) in enumerate(best_specs, start=1):
        if per_round_cache_gain:
            t_phi = k_hat * cfg.cache_ratio
            if t_phi.denominator != 1:
                raise PhantomError(
                    f"per-round cache gain {k_hat}*{cfg.cache_ratio} not an integer"
                )
            t_phi = int(t_phi)
        else:
            t_phi = t
        phi = _round_phi(policy, k_hat, t_phi, L, omega, beta)
        s_count, lam = _round_counts(policy, k_hat, t, omega)
        b_sum = sum(
            cfg.groups[j - 1].count * min(beta, cfg.groups[j - 1].rx_gain)
            for j in groups_i
        )
        raw.append(
            PhantomRound(
                index=idx,
                group_indices=groups_i,
                k_hat=k_hat,
                g_hat=g_hat,
                omega=omega,
                beta=beta,
                phi=phi,
                s_count=s_count,
                lam=lam,
                stream_sum=b_sum,
            )
        )
        phis.append(phi)

    n = len(raw)
    product = 1
    for p in phis:
        product *= p
    rounds = []
    eps = 1
    for i in range(n - 1, -1, -1):
        rnd = raw[i]
        rounds.append(replace(rnd, zeta=product // rnd.phi, epsilon=eps))
        eps *= rnd.phi
    rounds.reverse()

    vartheta = binom(K, t) if policy is not Policy.LIN else K
    theta_final = vartheta * product
    z_total = (K - t) * theta_final
    z_mc = tuple(r.zeta * r.lam * r.stream_sum for r in rounds)
    z_uc = z_total - sum(z_mc)
    if z_uc < 0:
        raise PhantomError(f"negative unicast residue {z_uc}; counting bug")

    mc_intervals = sum(r.zeta * r.s_count for r in rounds)
    dof = Fraction(z_total) / (mc_intervals + Fraction(z_uc, L))
    if not per_round_cache_gain:
        assert dof == best_dof, "interval counting and closed form must agree"

    # Unicast packing report: per-user leftovers with per-interval caps.
    ceil_ideal = -(-z_uc // L)
    per_user_max = 0
    for j, g in enumerate(cfg.groups, start=1):
        d = sum(
            r.zeta * r.lam * (r.beta - g.rx_gain)
            for r in rounds
            if j in r.group_indices and r.beta > g.rx_gain
        )
        per_user_max = max(per_user_max, -(-d // g.rx_gain))
    packed = max(ceil_ideal, per_user_max)

    truncations = tuple(
        _closed_form_from_specs(cfg, policy, best_specs[:i]) for i in range(1, n + 1)
    )

    return PhantomPlan(
        policy=policy,
        config=cfg,
        rounds=tuple(rounds),
        vartheta=vartheta,
        theta_final=theta_final,
        z_total=z_total,
        z_mc=z_mc,
        z_uc=z_uc,
        uc_intervals=Fraction(z_uc, L),
        uc_intervals_packed=packed,
        uc_supply_binds=packed > ceil_ideal,
        uc_exact_division=z_uc % L == 0,
        dof=dof,
        dof_by_rounds=truncations if not per_round_cache_gain else (dof,),
    )


def phantom_closed_form(
    cfg: NetworkConfig, policy: Policy, rounds: Sequence[PhantomRound]
) -> Fraction:
    """Policy-specific closed-form DoF for a fixed round schedule.

    Must equal the interval-counting value of :func:`phantom_plan`
    exactly (rational equality) under the default global cache gain.
    """
    K, L, t = cfg.n_users, cfg.tx_gain, cfg.cc_gain
    total = Fraction(0)
    if policy is Policy.LIN:
        for r in rounds:
            alpha = L // r.beta
            total += Fraction(r.k_hat - t, K * (K - t) * r.beta) * (
                Fraction(r.stream_sum) - Fraction(L * r.k_hat, alpha + t)
            )
    else:
        for r in rounds:
            total += (
                mc_weight(r.k_hat, K, t)
                * Fraction(r.omega * r.stream_sum - L * r.k_hat, r.omega * r.beta)
                / K
            )
    return Fraction(L) / (1 - total)
