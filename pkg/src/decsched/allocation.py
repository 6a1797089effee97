"""Optimal split of the workload for a fixed communication plan.

In the canonical schedule forward communications run back-to-back from time
0 and end at ``t1 = S``; backward communications run back-to-back and start
at ``t2 = D - B``.  A node can compute from the end of its own forward
communication until the start of its own backward communication, so its
window is ``pre_gap + (t2 - t1) + post_gap``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .model import CommPlan, Instance, InstanceError, REL_TOL, ABS_TOL


@dataclass(frozen=True)
class GapProfile:
    """Per-node idle windows of the canonical schedule, aligned with ``ids``."""

    ids: tuple[int, ...]
    pre_gap: np.ndarray
    post_gap: np.ndarray
    fwd_end: np.ndarray
    rates: np.ndarray
    S: float
    B: float
    R: float

    @property
    def cap0(self) -> float:
        """Workload that fits without stretching the schedule beyond S + B."""
        return float(np.dot(self.rates, self.pre_gap + self.post_gap))


def gap_profile(instance: Instance, plan: CommPlan) -> GapProfile:
    plan.check(instance)
    ids = plan.selected
    index = {i: k for k, i in enumerate(ids)}
    s = instance.fwd
    d = instance.bwd
    n = len(ids)

    pre = np.zeros(n)
    fwd_end = np.zeros(n)
    # suffix sums over forward positions
    f_delays = np.array([s[i] for i in plan.fwd_order])
    ends = np.cumsum(f_delays)
    S = float(ends[-1])
    for p, i in enumerate(plan.fwd_order):
        fwd_end[index[i]] = ends[p]
        pre[index[i]] = float(f_delays[p + 1:].sum())

    post = np.zeros(n)
    for p, i in enumerate(plan.bwd_order):
        post[index[i]] = float(sum(d[j] for j in plan.bwd_order[:p]))
    B = float(sum(d[i] for i in ids))

    rates = np.array([instance.nodes[i].rate for i in ids])
    return GapProfile(ids, pre, post, fwd_end, rates, S, B, float(rates.sum()))


def min_delay(instance: Instance, plan: CommPlan, gaps: GapProfile | None = None) -> float:
    """Smallest algorithm delay achievable with this plan (closed form)."""
    g = gaps or gap_profile(instance, plan)
    extra = max(0.0, (instance.workload - g.cap0) / g.R)
    return g.S + g.B + extra


@dataclass(frozen=True)
class Allocation:
    """Per-node workload, split by the phase that placed it."""

    ids: tuple[int, ...]
    phase1: np.ndarray
    phase2: np.ndarray
    phase3: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.phase1 + self.phase2 + self.phase3

    def as_dict(self) -> dict[int, float]:
        return {i: float(w) for i, w in zip(self.ids, self.total)}

    def to_dict(self, delay: float | None = None) -> dict:
        doc = {"per_node": [{"id": i, "w1": float(a), "w2": float(b), "w3": float(c), "total": float(a + b + c)}
                            for i, a, b, c in zip(self.ids, self.phase1, self.phase2, self.phase3)]}
        if delay is not None:
            doc["delay"] = delay
        return doc

    @classmethod
    def flat(cls, ids: Sequence[int], totals: Sequence[float]) -> "Allocation":
        """An allocation with no phase breakdown (everything in phase 3)."""
        z = np.zeros(len(ids))
        return cls(tuple(ids), z, z.copy(), np.asarray(totals, dtype=float))


def allocate(instance: Instance, plan: CommPlan) -> Allocation:
    """Three-phase optimal allocation.

    Phase 1 fills the time each node has between its forward communication
    and the end of the last one, walking forward positions first to
    second-to-last.  Phase 2 fills the time between the first backward
    communication and each node's own, walking backward positions last to
    second.  Whatever remains is spread in proportion to the rates, which
    stretches every node's middle window by the same amount.
    """
    g = gap_profile(instance, plan)
    index = {i: k for k, i in enumerate(g.ids)}
    n = len(g.ids)
    w1, w2, w3 = np.zeros(n), np.zeros(n), np.zeros(n)
    remaining = instance.workload

    for i in plan.fwd_order[:-1]:
        if remaining <= 0:
            break
        k = index[i]
        w1[k] = min(g.rates[k] * g.pre_gap[k], remaining)
        remaining -= w1[k]

    for i in reversed(plan.bwd_order[1:]):
        if remaining <= 0:
            break
        k = index[i]
        w2[k] = min(g.rates[k] * g.post_gap[k], remaining)
        remaining -= w2[k]

    if remaining > 0:
        w3 = remaining * g.rates / g.R
    return Allocation(g.ids, w1, w2, w3)


def equal_allocation(instance: Instance, plan: CommPlan) -> Allocation:
    n = len(plan.selected)
    return Allocation.flat(plan.selected, [instance.workload / n] * n)


def _totals(plan: CommPlan, alloc) -> np.ndarray:
    if isinstance(alloc, Allocation):
        if tuple(alloc.ids) != plan.selected:
            raise InstanceError(f"allocation covers {alloc.ids}, plan selects {plan.selected}")
        return alloc.total
    if isinstance(alloc, Mapping):
        if set(alloc) != set(plan.selected):
            raise InstanceError(f"allocation covers {sorted(alloc)}, plan selects {plan.selected}")
        return np.array([float(alloc[i]) for i in plan.selected])
    totals = np.asarray(alloc, dtype=float)
    if totals.shape != (len(plan.selected),):
        raise InstanceError(f"expected {len(plan.selected)} workloads, got shape {totals.shape}")
    return totals


def check_allocation(instance: Instance, plan: CommPlan, alloc) -> np.ndarray:
    """Workloads aligned with ``plan.selected``; raises if infeasible."""
    totals = _totals(plan, alloc)
    for i, w in zip(plan.selected, totals):
        if not np.isfinite(w) or w < 0:
            raise InstanceError(f"allocated workload must be >= 0, got {w}", i, "workload")
    total = float(totals.sum())
    if abs(total - instance.workload) > max(ABS_TOL, REL_TOL * abs(instance.workload)):
        raise InstanceError(f"allocation sums to {total}, expected workload {instance.workload}")
    return totals


def delay_of_fixed_allocation(instance: Instance, plan: CommPlan, alloc) -> float:
    """Minimum delay over canonical schedules when the per-node split is fixed.

    Each node's backward communication must start after it finishes
    computing; backward communications are packed so the binding node
    determines ``t2``.
    """
    totals = check_allocation(instance, plan, alloc)
    return float(_fixed_delays(gap_profile(instance, plan), totals[None, :])[0])


def _fixed_delays(g: GapProfile, totals: np.ndarray) -> np.ndarray:
    finish = g.fwd_end + totals / g.rates - g.post_gap
    return g.B + np.maximum(g.S, finish.max(axis=1))


def delays_of_allocations(instance: Instance, plan: CommPlan, allocs) -> np.ndarray:
    """``delay_of_fixed_allocation`` for each row of an (m, n) array."""
    allocs = np.atleast_2d(np.asarray(allocs, dtype=float))
    for row in allocs:
        check_allocation(instance, plan, row)
    return _fixed_delays(gap_profile(instance, plan), allocs)
