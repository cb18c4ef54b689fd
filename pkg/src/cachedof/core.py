"""Domain types and exact arithmetic shared by every planner module.

All quantities are kept exact: cache ratios and DoF values as
`fractions.Fraction`, counting magnitudes (subpacketization, interval
counts) as arbitrary-precision ints. There is no floating-point fast
path anywhere in the package.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

# Contract aliases: DoF-like values are exact rationals, counting
# magnitudes are plain (unbounded) ints.
ExactRational = Fraction
BigCount = int

RatioLike = Union[str, int, Fraction]


class ConfigError(ValueError):
    """Invalid network description."""


class NonIntegerCacheGain(ConfigError):
    """K*gamma (or a per-group count times gamma) is not an integer."""


class EmptyGroup(ConfigError):
    """A user group with zero users."""


class UnsortedGroups(ConfigError):
    """Groups not listed in non-decreasing receive-gain order."""


def binom(n: int, k: int) -> int:
    """Binomial coefficient C(n, k), zero outside 0 <= k <= n."""
    if n < 0:
        raise ValueError(f"binom: n must be non-negative, got {n}")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def parse_ratio(value: RatioLike) -> Fraction:
    """Read an exact rational from "p/q" or decimal-string form.

    Floats are rejected: a decimal like 0.04 must arrive as a string so
    it converts to 1/25 exactly rather than to its binary approximation.
    """
    if isinstance(value, float):
        raise ConfigError(
            f"refusing float {value!r}; pass a string such as '0.04' or '1/25'"
        )
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a valid ratio: {value!r}") from exc


def format_ratio(value: Fraction, digits: int = 4) -> str:
    """Render an exact rational as a decimal string.

    Rounds half-to-even at `digits` fractional digits, then trims
    trailing zeros (so Fraction(46) renders as "46").
    """
    if digits < 0:
        raise ValueError("digits must be >= 0")
    n, d = value.numerator, value.denominator
    sign = "-" if n < 0 else ""
    n = abs(n)
    scale = 10**digits
    q, r = divmod(n * scale, d)
    if 2 * r > d or (2 * r == d and q % 2 == 1):
        q += 1
    whole, frac = divmod(q, scale)
    if digits == 0:
        return f"{sign}{whole}"
    text = f"{sign}{whole}.{frac:0{digits}d}".rstrip("0").rstrip(".")
    return text if text not in ("", "-") else "0"


@dataclass(frozen=True)
class Group:
    """A set of users sharing one receive spatial multiplexing gain."""

    count: int
    rx_gain: int


@dataclass(frozen=True)
class NetworkConfig:
    """Asymmetric downlink: Tx gain, cache ratio, and ordered user groups.

    Instances are immutable; run them through :func:`validate_config`
    before handing them to any planner (groups merged/checked, derived
    quantities guaranteed to exist).
    """

    tx_gain: int
    cache_ratio: Fraction
    groups: tuple[Group, ...]

    @property
    def n_users(self) -> int:
        return sum(g.count for g in self.groups)

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @property
    def cc_gain(self) -> int:
        """Coded-caching gain t = K*gamma; raises if not an integer."""
        t = self.n_users * self.cache_ratio
        if t.denominator != 1:
            raise NonIntegerCacheGain(
                f"K*gamma = {self.n_users}*{self.cache_ratio} = {t} is not an integer"
            )
        return int(t)

    @property
    def min_rx_gain(self) -> int:
        return self.groups[0].rx_gain

    @property
    def max_rx_gain(self) -> int:
        return self.groups[-1].rx_gain

    @property
    def rx_gains(self) -> tuple[int, ...]:
        return tuple(g.rx_gain for g in self.groups)

    def stream_sum(self, beta: int) -> int:
        """Sum over users of min(beta, G_k)."""
        return sum(g.count * min(beta, g.rx_gain) for g in self.groups)

    def user_ids_by_group(self) -> tuple[tuple[int, ...], ...]:
        """Users numbered 1..K in group order."""
        out = []
        start = 1
        for g in self.groups:
            out.append(tuple(range(start, start + g.count)))
            start += g.count
        return tuple(out)


def make_config(
    tx_gain: int,
    cache_ratio: RatioLike,
    groups: Iterable[tuple[int, int]],
) -> NetworkConfig:
    """Build and validate a config from plain (count, rx_gain) pairs."""
    cfg = NetworkConfig(
        tx_gain=int(tx_gain),
        cache_ratio=parse_ratio(cache_ratio),
        groups=tuple(Group(int(c), int(g)) for c, g in groups),
    )
    return validate_config(cfg)


def validate_config(cfg: NetworkConfig) -> NetworkConfig:
    """Check every invariant and return the canonical config.

    Groups must arrive in non-decreasing rx-gain order; equal-gain runs
    are merged (counts summed) so the result is strictly increasing.
    Idempotent: validating a validated config returns an equal config.
    """
    if cfg.tx_gain < 1:
        raise ConfigError(f"tx_gain must be >= 1, got {cfg.tx_gain}")
    if not (0 < cfg.cache_ratio < 1):
        raise ConfigError(f"cache_ratio must lie in (0,1), got {cfg.cache_ratio}")
    if not cfg.groups:
        raise EmptyGroup("at least one user group is required")
    for g in cfg.groups:
        if g.count < 1:
            raise EmptyGroup(f"group with rx_gain={g.rx_gain} has no users")
        if g.rx_gain < 1:
            raise ConfigError(f"rx_gain must be >= 1, got {g.rx_gain}")

    gains = [g.rx_gain for g in cfg.groups]
    if any(b < a for a, b in zip(gains, gains[1:])):
        raise UnsortedGroups(f"groups must be sorted by ascending rx gain: {gains}")

    merged: list[Group] = []
    for g in cfg.groups:
        if merged and merged[-1].rx_gain == g.rx_gain:
            merged[-1] = Group(merged[-1].count + g.count, g.rx_gain)
        else:
            merged.append(g)

    out = NetworkConfig(cfg.tx_gain, cfg.cache_ratio, tuple(merged))
    if out.n_users < 2:
        raise ConfigError(f"need at least 2 users, got {out.n_users}")
    if out.cc_gain < 1:  # raises NonIntegerCacheGain when fractional
        raise ConfigError("cache gain must be positive")
    return out


def harmonic_dof(parts: Sequence[tuple[int, Fraction]]) -> Fraction:
    """Aggregate DoF of units served in orthogonal time.

    `parts` holds (user_count, unit_dof) pairs; the aggregate is
    total_users / sum(user_count / unit_dof) -- a symmetric function of
    the parts, exact in rationals.
    """
    total = sum(c for c, _ in parts)
    denom = sum(Fraction(c) / d for c, d in parts)
    return Fraction(total) / denom
