"""Delay-minimizing computation allocation, communication ordering and node
selection for distributed computing over one shared wireless channel."""

from .allocation import (
    Allocation,
    GapProfile,
    allocate,
    delay_of_fixed_allocation,
    delays_of_allocations,
    equal_allocation,
    gap_profile,
    min_delay,
)
from .model import (
    CommPlan,
    Instance,
    InstanceError,
    InstanceSyntaxError,
    NodeSpec,
    Profile,
    default_instance,
    generate_instance,
    load_instance,
    parse_instance,
    render_instance,
    save_instance,
)
from .ordering import (
    Counterexample,
    Direction,
    GuardExceeded,
    counterexample,
    objective_v,
    order_by_rate,
    order_descending_delay,
    order_exact,
    order_exhaustive,
    order_greedy_prefix,
    order_identity,
    verify_ratio,
)
from .selection import (
    Method,
    RankBy,
    SelectionResult,
    plan_for,
    select_exhaustive,
    select_greedy,
    select_linear,
)
from .timeline import Feature, Timeline, build_canonical, render_gantt, sample_adversarial, validate

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "CommPlan",
    "Counterexample",
    "Direction",
    "Feature",
    "GapProfile",
    "GuardExceeded",
    "Instance",
    "InstanceError",
    "InstanceSyntaxError",
    "Method",
    "NodeSpec",
    "Profile",
    "RankBy",
    "SelectionResult",
    "Timeline",
    "allocate",
    "build_canonical",
    "counterexample",
    "default_instance",
    "delay_of_fixed_allocation",
    "delays_of_allocations",
    "equal_allocation",
    "gap_profile",
    "generate_instance",
    "load_instance",
    "min_delay",
    "objective_v",
    "order_by_rate",
    "order_descending_delay",
    "order_exact",
    "order_exhaustive",
    "order_greedy_prefix",
    "order_identity",
    "parse_instance",
    "plan_for",
    "render_gantt",
    "render_instance",
    "sample_adversarial",
    "save_instance",
    "select_exhaustive",
    "select_greedy",
    "select_linear",
    "validate",
    "verify_ratio",
]
