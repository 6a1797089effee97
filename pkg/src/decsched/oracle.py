"""Brute-force verification report for a single instance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .allocation import allocate, delay_of_fixed_allocation, min_delay
from .model import CommPlan, Instance, tol
from .ordering import (
    DEFAULT_ORDER_GUARD,
    Direction,
    objective_v,
    order_by_rate,
    order_descending_delay,
    order_exhaustive,
    order_greedy_prefix,
)
from .selection import plan_for
from .timeline import Feature, sample_adversarial, validate

PASS, FAIL, INFO = "PASS", "FAIL", "INFO"


@dataclass(frozen=True)
class Check:
    name: str
    status: str
    margin: float
    detail: str = ""

    def line(self) -> str:
        return f"{self.status:<4} {self.name:<28} margin={self.margin:.6g} {self.detail}".rstrip()


def _status(ok: bool) -> str:
    return PASS if ok else FAIL


def random_allocations(rng: np.random.Generator, workload: float, n: int, count: int) -> np.ndarray:
    """Random feasible splits, mixing flat and very uneven Dirichlet draws."""
    alpha = rng.choice([0.1, 0.5, 1.0, 5.0], size=count)
    draws = np.vstack([rng.dirichlet(np.full(n, a)) for a in alpha])
    return draws * workload


def ratio_checks(instance: Instance, guard: int | None = DEFAULT_ORDER_GUARD) -> list[Check]:
    ids = range(instance.n)
    n = instance.n
    out = []
    for direction in Direction:
        _, v_star = order_exhaustive(instance, ids, direction, guard)
        margins, prefixes = [], []
        for k in range(1, n + 1):
            g = order_greedy_prefix(instance, ids, direction, k)
            prefixes.append(g.prefix_v)
            margins.append(g.prefix_v - (k / n) * v_star + 1e-9 * v_star)
        out.append(Check(f"ratio k/N {direction.value.lower()}", _status(min(margins) >= 0), min(margins),
                         f"v*={v_star:.6g}"))
        steps = np.diff(prefixes) if n > 1 else np.zeros(1)
        out.append(Check(f"prefix monotone {direction.value.lower()}",
                         _status(bool(np.all(steps >= -tol(v_star)))), float(steps.min())))
    return out


def allocation_checks(instance: Instance, rng: np.random.Generator, samples: int) -> list[Check]:
    plan = plan_for(instance, range(instance.n), "aco")
    best = min_delay(instance, plan)
    own = delay_of_fixed_allocation(instance, plan, allocate(instance, plan))
    worst_gap = np.inf
    for a in random_allocations(rng, instance.workload, instance.n, samples):
        worst_gap = min(worst_gap, delay_of_fixed_allocation(instance, plan, a) - best)
    return [Check("allocation dominance", _status(worst_gap >= -tol(best)), float(worst_gap),
                  f"{samples} random splits"),
            Check("allocation attains minimum", _status(abs(own - best) <= tol(best)), float(best - own))]


def timeline_checks(instance: Instance, rng: np.random.Generator, samples: int) -> list[Check]:
    ids = tuple(range(instance.n))
    bound = min_delay(instance, plan_for(instance, ids, "exact"))
    features = [f for f in Feature if f is not Feature.INTERLEAVE or instance.n > 1]
    worst, invalid = np.inf, 0
    for k in range(samples):
        plan = CommPlan(ids, tuple(rng.permutation(ids)), tuple(rng.permutation(ids)))
        alloc = random_allocations(rng, instance.workload, instance.n, 1)[0]
        chosen = [f for f in features if rng.random() < 0.6] or [features[k % len(features)]]
        if Feature.PREEMPT in chosen and not any(instance.fwd) and not any(instance.bwd):
            chosen.remove(Feature.PREEMPT)
        tl = sample_adversarial(instance, plan, alloc, int(rng.integers(2**31)), chosen)
        invalid += bool(validate(tl, instance, dict(zip(ids, alloc))))
        worst = min(worst, tl.horizon - bound)
    return [Check("timeline dominance", _status(worst >= -tol(bound)), float(worst),
                  f"{samples} adversarial schedules"),
            Check("adversarial validity", _status(invalid == 0), float(-invalid))]


def uniform_checks(instance: Instance, guard: int | None = DEFAULT_ORDER_GUARD) -> list[Check]:
    ids = range(instance.n)
    out = []
    rules = []
    if instance.uniform_rates():
        rules.append(("delay rule optimal", order_descending_delay))
    if instance.uniform_delays():
        rules.append(("rate rule optimal", order_by_rate))
    for name, rule in rules:
        worst = np.inf
        for direction in Direction:
            v = objective_v(instance, ids, rule(instance, ids, direction), direction).v
            _, v_star = order_exhaustive(instance, ids, direction, guard)
            worst = min(worst, v - v_star + tol(v_star))
        out.append(Check(name, _status(worst >= 0), float(worst)))
    return out


def policy_ratio_info(instance: Instance, guard: int | None = DEFAULT_ORDER_GUARD) -> list[Check]:
    """How far the two uniform-case rules fall short on this instance (backward direction)."""
    ids = range(instance.n)
    _, v_star = order_exhaustive(instance, ids, Direction.BACKWARD, guard)
    out = []
    for name, rule in (("ldf", order_descending_delay), ("fcl", order_by_rate)):
        v = objective_v(instance, ids, rule(instance, ids, Direction.BACKWARD), Direction.BACKWARD).v
        ratio = v / v_star if v_star > 0 else 1.0
        out.append(Check(f"{name} v/v*", INFO, ratio, f"v={v:.6g} v*={v_star:.6g}"))
    return out


def run_oracle(instance: Instance, seed: int = 0, samples: int = 1000, timelines: int = 500,
               guard: int | None = DEFAULT_ORDER_GUARD) -> list[Check]:
    rng = np.random.default_rng(seed)
    checks = ratio_checks(instance, guard)
    checks += allocation_checks(instance, rng, samples)
    checks += timeline_checks(instance, rng, timelines)
    checks += uniform_checks(instance, guard)
    checks += policy_ratio_info(instance, guard)
    return checks
