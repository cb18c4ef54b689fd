"""Planning library for cache-aided asymmetric MIMO delivery.

Computes achievable DoF, subpacketization, and transmission schedules
for the min-G, Grouping, Super-grouping, and Phantom strategies under
the opt / cmb / lin reference policies, with an exhaustive counting
oracle for verification.
"""
from .core import (
    BigCount,
    ConfigError,
    EmptyGroup,
    ExactRational,
    Group,
    NetworkConfig,
    NonIntegerCacheGain,
    UnsortedGroups,
    binom,
    format_ratio,
    harmonic_dof,
    make_config,
    parse_ratio,
    validate_config,
)
from .policies import (
    CmbInfeasible,
    LinInfeasible,
    Policy,
    PolicyInfeasible,
    PolicyOutcome,
    decodability_beta_bound,
    eval_policy,
    opt_delivery_params,
    stream_budget_limit,
)
from .strategies import (
    GroupCacheGainNonInteger,
    Partition,
    PartitionCell,
    StrategyReport,
    SuperGroupingResult,
    UnitResult,
    all_partitions,
    best_set_partition,
    enumerate_partitions,
    grouping,
    min_g,
    super_grouping,
)
from .phantom import (
    InfeasiblePair,
    PhantomPlan,
    PhantomRound,
    SphCell,
    SphResult,
    mc_weight,
    phantom_closed_form,
    phantom_plan,
    sph_dof,
    sph_optimize,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
