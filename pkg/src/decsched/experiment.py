"""Parameter sweeps comparing allocation, ordering and selection policies.

Policies
--------
OCA         optimal allocation, ascending-id orders
ECA         equal split ``w/N``, ascending-id orders
OCO         optimal orders; allocation is optimal in ORDER_VS_W, equal otherwise
ACO         ascending-id orders; allocation is optimal in ORDER_VS_W, equal otherwise
OCA-OCO     optimal orders and optimal allocation
LINEAR      linear node selection (by rate for UMDC, by delay otherwise)
GREEDY      greedy node selection
EXHAUSTIVE  best node subset

So ORDER_VS_W isolates the effect of the order under the best allocation,
and DELAY_VS_N compares OCA-only, OCO-only and both.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .allocation import delay_of_fixed_allocation, equal_allocation, min_delay
from .model import Instance, Profile, generate_instance
from .selection import RankBy, plan_for, select_exhaustive, select_greedy, select_linear

POLICIES = ("OCA", "ECA", "OCO", "ACO", "OCA-OCO", "LINEAR", "GREEDY", "EXHAUSTIVE")
COLUMNS = ("kind", "profile", "seed", "sweep_value", "policy", "delay")


class Kind(str, Enum):
    ALLOC_VS_W = "ALLOC_VS_W"
    ORDER_VS_W = "ORDER_VS_W"
    DELAY_VS_N = "DELAY_VS_N"


DEFAULT_POLICIES = {
    Kind.ALLOC_VS_W: ("OCA", "ECA"),
    Kind.ORDER_VS_W: ("OCO", "ACO"),
    Kind.DELAY_VS_N: ("OCA", "OCO", "OCA-OCO"),
}


@dataclass(frozen=True)
class ExperimentSpec:
    kind: Kind
    profile: Profile
    sweep: tuple[float, ...]
    seeds: tuple[int, ...] = tuple(range(20))
    policies: tuple[str, ...] = ()
    n: int = 3  # nodes, for the workload sweeps
    workload: float = 10.0  # for DELAY_VS_N

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "profile", Profile(self.profile))
        object.__setattr__(self, "sweep", tuple(float(x) for x in self.sweep))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        policies = tuple(p.upper() for p in self.policies) or DEFAULT_POLICIES[self.kind]
        object.__setattr__(self, "policies", policies)
        if not self.sweep:
            raise ValueError("sweep must not be empty")
        if any(x < 0 for x in self.sweep):
            raise ValueError("sweep values must be >= 0")
        if self.kind is Kind.DELAY_VS_N and any(x < 1 or x != int(x) for x in self.sweep):
            raise ValueError("DELAY_VS_N sweeps node counts, which must be integers >= 1")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        unknown = [p for p in policies if p not in POLICIES]
        if unknown:
            raise ValueError(f"unknown policy {unknown[0]!r}; choose from {', '.join(POLICIES)}")

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentSpec":
        return cls(**doc)

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["kind"] = self.kind.value
        doc["profile"] = self.profile.value
        return doc


def policy_delay(instance: Instance, policy: str, kind: Kind | str = Kind.ALLOC_VS_W,
                 profile: Profile | str | None = None) -> float:
    kind = Kind(kind)
    ids = range(instance.n)
    optimal_alloc = kind is Kind.ORDER_VS_W
    if policy == "OCA":
        return min_delay(instance, plan_for(instance, ids, "aco"))
    if policy == "ECA":
        plan = plan_for(instance, ids, "aco")
        return delay_of_fixed_allocation(instance, plan, equal_allocation(instance, plan))
    if policy in ("OCO", "ACO"):
        plan = plan_for(instance, ids, "exact" if policy == "OCO" else "aco")
        if optimal_alloc:
            return min_delay(instance, plan)
        return delay_of_fixed_allocation(instance, plan, equal_allocation(instance, plan))
    if policy == "OCA-OCO":
        return min_delay(instance, plan_for(instance, ids, "exact"))
    if policy == "LINEAR":
        rank = RankBy.RATE if profile is not None and Profile(profile) is Profile.UMDC else RankBy.COMM_DELAY
        return select_linear(instance, rank).delay
    if policy == "GREEDY":
        return select_greedy(instance, "exact").delay
    if policy == "EXHAUSTIVE":
        return select_exhaustive(instance, "exact").delay
    raise ValueError(f"unknown policy {policy!r}")


def _instance(spec: ExperimentSpec, seed: int, value: float) -> Instance:
    if spec.kind is Kind.DELAY_VS_N:
        # nested node sets: the first N nodes of one draw
        full = generate_instance(int(max(spec.sweep)), seed, spec.profile, spec.workload, mean_one=True)
        return full.subset(range(int(value)))
    return generate_instance(spec.n, seed, spec.profile, value, mean_one=True)


def _rows_for(spec: ExperimentSpec, seed: int, value: float) -> list[dict]:
    instance = _instance(spec, seed, value)
    return [{"kind": spec.kind.value, "profile": spec.profile.value, "seed": seed,
             "sweep_value": int(value) if spec.kind is Kind.DELAY_VS_N else value,
             "policy": p, "delay": policy_delay(instance, p, spec.kind, spec.profile)}
            for p in spec.policies]


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> list[dict]:
    """One row per (sweep value, seed, policy), in a fixed order."""
    grid = [(seed, value) for value in spec.sweep for seed in spec.seeds]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = list(pool.map(_rows_for, [spec] * len(grid), *zip(*grid)))
    else:
        chunks = [_rows_for(spec, seed, value) for seed, value in grid]
    rank = {p: k for k, p in enumerate(spec.policies)}
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda r: (r["sweep_value"], r["seed"], rank[r["policy"]]))
    return rows


def write_csv(rows: Sequence[dict], path_or_file) -> None:
    if hasattr(path_or_file, "write"):
        _write(rows, path_or_file)
        return
    with open(path_or_file, "w", newline="", encoding="utf-8") as fh:
        _write(rows, fh)


def _write(rows, fh) -> None:
    writer = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({**row, "delay": repr(float(row["delay"]))})


def read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        row["seed"] = int(row["seed"])
        row["sweep_value"] = float(row["sweep_value"])
        row["delay"] = float(row["delay"])
    return rows


def load_spec(path) -> ExperimentSpec:
    with open(path, encoding="utf-8") as fh:
        return ExperimentSpec.from_dict(json.load(fh))


# -- summaries --------------------------------------------------------------

def pivot(rows: Sequence[dict]) -> dict[tuple[int, float], dict[str, float]]:
    """``{(seed, sweep_value): {policy: delay}}``."""
    out: dict = {}
    for row in rows:
        out.setdefault((row["seed"], float(row["sweep_value"])), {})[row["policy"]] = float(row["delay"])
    return out


def mean_gap(rows: Sequence[dict], worse: str, better: str) -> float:
    """Average of ``delay(worse) - delay(better)`` over all grid points."""
    table = pivot(rows)
    return float(np.mean([cell[worse] - cell[better] for cell in table.values()]))


def mean_curve(rows: Sequence[dict], policy: str) -> dict[float, float]:
    acc: dict = {}
    for row in rows:
        if row["policy"] == policy:
            acc.setdefault(float(row["sweep_value"]), []).append(float(row["delay"]))
    return {x: float(np.mean(v)) for x, v in sorted(acc.items())}
