"""Which nodes should take part.

Each extra node adds its two communications to the channel but also adds
computing capacity, so past some point more nodes means more delay.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

from .allocation import min_delay
from .model import CommPlan, Instance, tol
from .ordering import (
    DEFAULT_ORDER_GUARD,
    Direction,
    GuardExceeded,
    best_values_all_subsets,
    order_by_rate,
    order_descending_delay,
    order_exact,
    order_exhaustive,
    order_greedy_prefix,
    order_identity,
)

DEFAULT_SUBSET_GUARD = 12

OrderFn = Callable[[Instance, Sequence[int], Direction], tuple]


class Method(str, Enum):
    LINEAR_UNIFORM = "LINEAR_UNIFORM"
    GREEDY = "GREEDY"
    EXHAUSTIVE = "EXHAUSTIVE"


class RankBy(str, Enum):
    COMM_DELAY = "COMM_DELAY"
    RATE = "RATE"


def order_policy(name: str, guard: int | None = DEFAULT_ORDER_GUARD) -> OrderFn:
    """Order function for a policy name.

    ``exhaustive`` (brute force, guarded), ``exact`` (subset DP),
    ``greedy:K``, ``ldf`` (by delay), ``rate`` (by rate) and ``aco``
    (ascending ids).
    """
    name = name.lower()
    if name == "exhaustive":
        return lambda inst, sel, dr: order_exhaustive(inst, sel, dr, guard)[0]
    if name == "exact":
        return lambda inst, sel, dr: order_exact(inst, sel, dr)[0]
    if name.startswith("greedy"):
        _, _, k = name.partition(":")
        k = int(k) if k else 1
        return lambda inst, sel, dr: order_greedy_prefix(inst, sel, dr, min(k, len(sel))).order
    if name == "ldf":
        return order_descending_delay
    if name == "rate":
        return order_by_rate
    if name == "aco":
        return order_identity
    raise ValueError(f"unknown order policy {name!r}")


def plan_for(instance: Instance, selected: Sequence[int], policy: OrderFn | str = "exact") -> CommPlan:
    if isinstance(policy, str):
        policy = order_policy(policy)
    selected = tuple(sorted(selected))
    return CommPlan(selected, policy(instance, selected, Direction.FORWARD),
                    policy(instance, selected, Direction.BACKWARD))


@dataclass(frozen=True)
class SelectionResult:
    selected: tuple[int, ...]
    plan: CommPlan
    delay: float
    method: Method
    trace: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"method": self.method.value, "selected": list(self.selected), "plan": self.plan.to_dict(),
                "delay": self.delay, "trace": [list(t) for t in self.trace]}


def rank_nodes(instance: Instance, rank_by: RankBy | str, key: str = "sum") -> list[int]:
    """Best-first node ranking; ``key`` picks ``sum``, ``fwd`` or ``bwd`` delay for COMM_DELAY."""
    rank_by = RankBy(rank_by)
    if rank_by is RankBy.RATE:
        return sorted(range(instance.n), key=lambda i: (-instance.nodes[i].rate, i))
    s, d = instance.fwd, instance.bwd
    score = {"sum": s + d, "fwd": s, "bwd": d}[key]
    return sorted(range(instance.n), key=lambda i: (score[i], i))


def select_linear(instance: Instance, rank_by: RankBy | str = RankBy.COMM_DELAY,
                  key: str = "sum") -> SelectionResult:
    """Try the best k nodes for every k, with the matching uniform-case orders."""
    rank_by = RankBy(rank_by)
    policy = order_descending_delay if rank_by is RankBy.COMM_DELAY else order_by_rate
    ranking = rank_nodes(instance, rank_by, key)
    trace = []
    best = None
    for k in range(1, instance.n + 1):
        plan = plan_for(instance, ranking[:k], policy)
        delay = min_delay(instance, plan)
        trace.append((k, delay))
        if best is None or delay < best[1] - tol(best[1]):
            best = (plan, delay)
    plan, delay = best
    return SelectionResult(plan.selected, plan, delay, Method.LINEAR_UNIFORM, trace)


def select_greedy(instance: Instance, policy: OrderFn | str = "exact") -> SelectionResult:
    """Grow the node set one node at a time while the delay strictly drops.

    Starts from the best single node, since an empty set cannot run any
    workload.
    """
    if isinstance(policy, str):
        policy = order_policy(policy)
    trace = []

    def evaluate(ids):
        plan = plan_for(instance, ids, policy)
        return plan, min_delay(instance, plan)

    current = None
    for i in range(instance.n):
        plan, delay = evaluate([i])
        trace.append((i, delay))
        if current is None or delay < current[1] - tol(current[1]):
            current = (plan, delay)

    while True:
        chosen = set(current[0].selected)
        step = None
        for i in range(instance.n):
            if i in chosen:
                continue
            plan, delay = evaluate(chosen | {i})
            trace.append((i, delay))
            if delay < current[1] - tol(current[1]) and (step is None or delay < step[1] - tol(step[1])):
                step = (plan, delay)
        if step is None:
            break
        current = step
    plan, delay = current
    return SelectionResult(plan.selected, plan, delay, Method.GREEDY, trace)


def select_exhaustive(instance: Instance, policy: OrderFn | str = "exact",
                      guard: int | None = DEFAULT_SUBSET_GUARD) -> SelectionResult:
    """Every non-empty subset; ties go to fewer nodes, then smaller ids.

    With the ``exact`` policy the optimal order values of all subsets come
    from one table, so the search costs O(2^N N) overall.
    """
    n = instance.n
    if guard is not None and n > guard:
        raise GuardExceeded(f"exhaustive selection over {n} nodes exceeds guard {guard}; "
                            f"set DECSCHED_GUARD or pass an override")
    fast = policy == "exact"
    if fast:
        v_fwd = best_values_all_subsets(instance, Direction.FORWARD)
        v_bwd = best_values_all_subsets(instance, Direction.BACKWARD)
        r, s, d = instance.rates, instance.fwd, instance.bwd
    elif isinstance(policy, str):
        policy = order_policy(policy)

    trace = []
    best = None
    for size in range(1, n + 1):
        size_best = None
        for ids in itertools.combinations(range(n), size):
            if fast:
                mask = sum(1 << i for i in ids)
                idx = list(ids)
                cap0 = v_fwd[mask] + v_bwd[mask]
                delay = float(s[idx].sum() + d[idx].sum() + max(0.0, (instance.workload - cap0) / r[idx].sum()))
            else:
                delay = min_delay(instance, plan_for(instance, ids, policy))
            if size_best is None or delay < size_best[1] - tol(size_best[1]):
                size_best = (ids, delay)
        trace.append((size, size_best[1]))
        if best is None or size_best[1] < best[1] - tol(best[1]):
            best = size_best
    ids, _ = best
    plan = plan_for(instance, ids, "exact" if fast else policy)
    return SelectionResult(plan.selected, plan, min_delay(instance, plan), Method.EXHAUSTIVE, trace)
