"""min-G, Grouping, and Super-grouping over an asymmetric config.

Grouping serves each antenna-homogeneous group in orthogonal time and
aggregates harmonically; Super-grouping first merges consecutive groups
into equivalent sets (count summed, gain = block minimum) and then
applies Grouping across the sets. The Super-grouping search is
exhaustive over all consecutive-index partitions.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Optional

from .core import Group, NetworkConfig, harmonic_dof
from .policies import Policy, PolicyInfeasible, PolicyOutcome, eval_policy

MAX_PARTITION_GROUPS = 24


class StrategyError(ValueError):
    pass


class GroupCacheGainNonInteger(StrategyError):
    """Grouping needs K_j*gamma integral for every group."""


class TooManyGroups(StrategyError):
    pass


@dataclass(frozen=True)
class Partition:
    """Consecutive-index blocks over groups 1..J.

    `boundaries` is (0, J_1, ..., J) strictly increasing; block l covers
    group indices boundaries[l-1]+1 .. boundaries[l].
    """

    boundaries: tuple[int, ...]

    @property
    def n_blocks(self) -> int:
        return len(self.boundaries) - 1

    def blocks(self) -> tuple[tuple[int, ...], ...]:
        bs = self.boundaries
        return tuple(
            tuple(range(bs[i] + 1, bs[i + 1] + 1)) for i in range(self.n_blocks)
        )

    def label(self) -> str:
        return ",".join("{" + ",".join(map(str, blk)) + "}" for blk in self.blocks())


@dataclass(frozen=True)
class UnitResult:
    """One orthogonally-served unit (a group, an equivalent set, or the
    single merged set of min-G)."""

    label: str
    user_count: int
    rx_gain: int
    outcome: Optional[PolicyOutcome]
    feasible: bool
    reason: Optional[str] = None


@dataclass(frozen=True)
class StrategyReport:
    strategy: str
    policy: Policy
    dof: Optional[Fraction]
    per_unit: tuple[UnitResult, ...]
    max_theta: Optional[int]
    feasible: bool
    reason: Optional[str] = None
    partition: Optional[Partition] = None

    @property
    def s_total(self) -> Optional[int]:
        if not self.feasible:
            return None
        return sum(u.outcome.s_count for u in self.per_unit if u.outcome)


@dataclass(frozen=True)
class PartitionCell:
    partition: Partition
    dof: Optional[Fraction]
    feasible: bool
    reason: Optional[str] = None


@dataclass(frozen=True)
class SuperGroupingResult:
    best: Optional[Partition]
    report: StrategyReport
    grid: tuple[PartitionCell, ...]


def min_g(cfg: NetworkConfig, policy: Policy) -> StrategyReport:
    """Serve everyone as if all users had the smallest rx gain."""
    outcome = eval_policy(policy, cfg.n_users, cfg.cache_ratio, cfg.tx_gain, cfg.min_rx_gain)
    unit = UnitResult(
        label=f"all (G={cfg.min_rx_gain})",
        user_count=cfg.n_users,
        rx_gain=cfg.min_rx_gain,
        outcome=outcome,
        feasible=True,
    )
    return StrategyReport(
        strategy="min-g",
        policy=policy,
        dof=outcome.dof,
        per_unit=(unit,),
        max_theta=outcome.theta,
        feasible=True,
    )


def _check_group_gains(cfg: NetworkConfig, blocks: tuple[tuple[int, ...], ...]) -> None:
    for blk in blocks:
        count = sum(cfg.groups[j - 1].count for j in blk)
        t = count * cfg.cache_ratio
        if t.denominator != 1:
            raise GroupCacheGainNonInteger(
                f"block {blk}: {count}*{cfg.cache_ratio} = {t} not an integer"
            )


def _evaluate_blocks(
    cfg: NetworkConfig, policy: Policy, blocks: tuple[tuple[int, ...], ...], strategy: str
) -> StrategyReport:
    """Evaluate orthogonally-served equivalent sets and aggregate."""
    units = []
    for blk in blocks:
        members = [cfg.groups[j - 1] for j in blk]
        count = sum(g.count for g in members)
        gain = min(g.rx_gain for g in members)
        label = "{" + ",".join(map(str, blk)) + "}"
        try:
            outcome = eval_policy(policy, count, cfg.cache_ratio, cfg.tx_gain, gain)
        except PolicyInfeasible as exc:
            raise type(exc)(f"unit {label} (K={count}, G={gain}): {exc}") from exc
        units.append(UnitResult(label, count, gain, outcome, True))
    dof = harmonic_dof([(u.user_count, u.outcome.dof) for u in units])
    return StrategyReport(
        strategy=strategy,
        policy=policy,
        dof=dof,
        per_unit=tuple(units),
        max_theta=max(u.outcome.theta for u in units),
        feasible=True,
    )


def grouping(cfg: NetworkConfig, policy: Policy) -> StrategyReport:
    """Serve each group independently; aggregate DoF harmonically."""
    blocks = tuple((j,) for j in range(1, cfg.n_groups + 1))
    _check_group_gains(cfg, blocks)
    return _evaluate_blocks(cfg, policy, blocks, "grouping")


def enumerate_partitions(J: int, n_blocks: int) -> Iterator[Partition]:
    """All C(J-1, n_blocks-1) consecutive-index partitions, lexicographic."""
    if not (1 <= n_blocks <= J):
        raise ValueError(f"need 1 <= n_blocks <= J, got {n_blocks}, {J}")
    for splits in combinations(range(1, J), n_blocks - 1):
        yield Partition((0, *splits, J))


def all_partitions(J: int) -> Iterator[Partition]:
    for n_blocks in range(1, J + 1):
        yield from enumerate_partitions(J, n_blocks)


def super_grouping(cfg: NetworkConfig, policy: Policy) -> SuperGroupingResult:
    """Search every consecutive-group merge for the best aggregate DoF.

    Infeasible partitions (lin applicability) stay in the grid with a
    reason but are skipped by the search. Tie-break: fewer blocks, then
    lexicographically smallest boundaries -- both implied by the scan
    order, so the result does not depend on evaluation order.
    """
    J = cfg.n_groups
    if J > MAX_PARTITION_GROUPS:
        raise TooManyGroups(
            f"partition search is exhaustive over 2^(J-1); J={J} exceeds {MAX_PARTITION_GROUPS}"
        )
    _check_group_gains(cfg, tuple((j,) for j in range(1, J + 1)))

    cells: list[PartitionCell] = []
    best_cell: Optional[PartitionCell] = None
    best_report: Optional[StrategyReport] = None
    for part in all_partitions(J):
        try:
            report = _evaluate_blocks(cfg, policy, part.blocks(), "super-grouping")
            cell = PartitionCell(part, report.dof, True)
        except PolicyInfeasible as exc:
            cell = PartitionCell(part, None, False, str(exc))
            report = None
        cells.append(cell)
        if cell.feasible and (best_cell is None or cell.dof > best_cell.dof):
            best_cell, best_report = cell, report

    if best_report is None:
        report = StrategyReport(
            strategy="super-grouping",
            policy=policy,
            dof=None,
            per_unit=(),
            max_theta=None,
            feasible=False,
            reason="no feasible partition",
        )
        return SuperGroupingResult(None, report, tuple(cells))

    report = StrategyReport(
        strategy="super-grouping",
        policy=policy,
        dof=best_report.dof,
        per_unit=best_report.per_unit,
        max_theta=best_report.max_theta,
        feasible=True,
        partition=best_cell.partition,
    )
    return SuperGroupingResult(best_cell.partition, report, tuple(cells))


def _set_partitions(items: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], ...]]:
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for sub in _set_partitions(rest):
        yield ((first,), *sub)
        for i, blk in enumerate(sub):
            yield (*sub[:i], (first, *blk), *sub[i + 1 :])


def best_set_partition(cfg: NetworkConfig, policy: Policy) -> tuple[tuple[tuple[int, ...], ...], Fraction]:
    """Best DoF over arbitrary (not just consecutive) group partitions.

    Exponential in J; guarded to J <= 6. Exists to check empirically
    that non-consecutive merging never beats consecutive merging.
    """
    J = cfg.n_groups
    if J > 6:
        raise TooManyGroups("exhaustive set-partition mode is limited to J <= 6")
    best: Optional[tuple[tuple[tuple[int, ...], ...], Fraction]] = None
    for blocks in _set_partitions(tuple(range(1, J + 1))):
        canon = tuple(sorted(tuple(sorted(b)) for b in blocks))
        try:
            report = _evaluate_blocks(cfg, policy, canon, "set-partition")
        except PolicyInfeasible:
            continue
        if best is None or report.dof > best[1]:
            best = (canon, report.dof)
    if best is None:
        raise PolicyInfeasible("no feasible set partition", policy)
    return best
