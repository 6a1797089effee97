"""Problem instances: worker nodes, total workload and communication plans.

A node is described by its computation rate and the delays of its forward
(input delivery) and backward (result return) communications.  The source
and sink computations carry no workload and are not modelled.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

REL_TOL = 1e-9
ABS_TOL = 1e-12

DIVERSE_RANGE = (0.5, 5.0)


def isclose(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=REL_TOL, abs_tol=ABS_TOL)


def tol(*values: float) -> float:
    """Absolute slack for comparisons between quantities of these magnitudes."""
    return max(ABS_TOL, REL_TOL * max((abs(v) for v in values), default=0.0))


class InstanceError(ValueError):
    """Invalid instance content.  ``node`` and ``field`` locate the problem."""

    def __init__(self, message: str, node: int | None = None, field: str | None = None):
        where = []
        if node is not None:
            where.append(f"node {node}")
        if field is not None:
            where.append(f"field '{field}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.node = node
        self.field = field


class InstanceSyntaxError(InstanceError):
    """The document is not well-formed JSON of the expected shape."""


class Profile(str, Enum):
    """Uniform/diverse communication delays (xM) and computation rates (xC)."""

    UMUC = "UMUC"
    UMDC = "UMDC"
    DMUC = "DMUC"
    DMDC = "DMDC"

    @property
    def diverse_delays(self) -> bool:
        return self.value[0] == "D"

    @property
    def diverse_rates(self) -> bool:
        return self.value[2] == "D"


def _check_number(value, name: str, node: int | None, *, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InstanceError(f"{name} must be a number, got {value!r}", node, name)
    value = float(value)
    if not math.isfinite(value):
        raise InstanceError(f"{name} must be finite", node, name)
    if positive and value <= 0:
        raise InstanceError(f"{name} must be > 0", node, name)
    if not positive and value < 0:
        raise InstanceError(f"{name} must be >= 0", node, name)
    return value


@dataclass(frozen=True)
class NodeSpec:
    id: int
    rate: float
    fwd_delay: float
    bwd_delay: float

    def __post_init__(self):
        if isinstance(self.id, bool) or not isinstance(self.id, (int, np.integer)) or self.id < 0:
            raise InstanceError(f"id must be a non-negative integer, got {self.id!r}", None, "id")
        object.__setattr__(self, "id", int(self.id))
        object.__setattr__(self, "rate", _check_number(self.rate, "rate", self.id, positive=True))
        object.__setattr__(self, "fwd_delay", _check_number(self.fwd_delay, "fwd_delay", self.id))
        object.__setattr__(self, "bwd_delay", _check_number(self.bwd_delay, "bwd_delay", self.id))


@dataclass(frozen=True)
class Instance:
    """Total divisible workload plus the candidate worker nodes."""

    workload: float
    nodes: tuple[NodeSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "workload", _check_number(self.workload, "workload", None))
        nodes = tuple(self.nodes)
        if not nodes:
            raise InstanceError("at least one node is required", None, "nodes")
        for pos, node in enumerate(nodes):
            if node.id != pos:
                raise InstanceError(f"node ids must be 0..N-1 in order; position {pos} holds id {node.id}",
                                    node.id, "id")
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def from_arrays(cls, workload: float, rates: Sequence[float], fwd: Sequence[float],
                    bwd: Sequence[float]) -> "Instance":
        if not len(rates) == len(fwd) == len(bwd):
            raise InstanceError("rates, fwd and bwd must have equal length")
        return cls(workload, tuple(NodeSpec(i, r, s, d) for i, (r, s, d) in enumerate(zip(rates, fwd, bwd))))

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def rates(self) -> np.ndarray:
        return np.array([nd.rate for nd in self.nodes])

    @property
    def fwd(self) -> np.ndarray:
        return np.array([nd.fwd_delay for nd in self.nodes])

    @property
    def bwd(self) -> np.ndarray:
        return np.array([nd.bwd_delay for nd in self.nodes])

    def with_workload(self, workload: float) -> "Instance":
        return replace(self, workload=workload)

    def subset(self, ids: Iterable[int]) -> "Instance":
        """Re-indexed instance restricted to ``ids`` (in the given order)."""
        ids = list(ids)
        return Instance(self.workload, tuple(NodeSpec(k, self.nodes[i].rate, self.nodes[i].fwd_delay,
                                                      self.nodes[i].bwd_delay) for k, i in enumerate(ids)))

    def uniform_rates(self) -> bool:
        return all(nd.rate == self.nodes[0].rate for nd in self.nodes)

    def uniform_delays(self) -> bool:
        first = self.nodes[0]
        return all(nd.fwd_delay == first.fwd_delay and nd.bwd_delay == first.bwd_delay for nd in self.nodes)


def _check_perm(order: Sequence[int], selected: tuple[int, ...], name: str) -> tuple[int, ...]:
    order = tuple(int(i) for i in order)
    if len(order) != len(selected) or set(order) != set(selected):
        raise InstanceError(f"{name} {order} is not a permutation of selected nodes {selected}", None, name)
    return order


@dataclass(frozen=True)
class CommPlan:
    """A node subset with the order of its forward and backward communications."""

    selected: tuple[int, ...]
    fwd_order: tuple[int, ...]
    bwd_order: tuple[int, ...]

    def __post_init__(self):
        selected = tuple(sorted(int(i) for i in self.selected))
        if not selected:
            raise InstanceError("a plan needs at least one selected node", None, "selected")
        if len(set(selected)) != len(selected):
            raise InstanceError(f"duplicate ids in selected {selected}", None, "selected")
        object.__setattr__(self, "selected", selected)
        object.__setattr__(self, "fwd_order", _check_perm(self.fwd_order, selected, "fwd_order"))
        object.__setattr__(self, "bwd_order", _check_perm(self.bwd_order, selected, "bwd_order"))

    @classmethod
    def identity(cls, ids: Iterable[int]) -> "CommPlan":
        ids = tuple(sorted(ids))
        return cls(ids, ids, ids)

    def check(self, instance: Instance) -> None:
        if self.selected[-1] >= instance.n:
            raise InstanceError(f"plan references node {self.selected[-1]} but instance has {instance.n} nodes",
                                self.selected[-1], "selected")

    def to_dict(self) -> dict:
        return {"selected": list(self.selected), "fwd_order": list(self.fwd_order),
                "bwd_order": list(self.bwd_order)}


# -- file I/O ---------------------------------------------------------------

def instance_from_dict(doc) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceSyntaxError("instance document must be a JSON object")
    for key in ("workload", "nodes"):
        if key not in doc:
            raise InstanceError(f"missing field '{key}'", None, key)
    if not isinstance(doc["nodes"], list):
        raise InstanceSyntaxError("'nodes' must be an array", None, "nodes")
    nodes = []
    for i, entry in enumerate(doc["nodes"]):
        if not isinstance(entry, dict):
            raise InstanceSyntaxError("node entry must be an object", i)
        if "id" in entry and entry["id"] != i:
            raise InstanceError(f"ids must be dense and in order, found {entry['id']!r} at position {i}", i, "id")
        for key in ("rate", "fwd_delay", "bwd_delay"):
            if key not in entry:
                raise InstanceError("missing field", i, key)
        nodes.append(NodeSpec(i, entry["rate"], entry["fwd_delay"], entry["bwd_delay"]))
    return Instance(doc["workload"], tuple(nodes))


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceSyntaxError(f"malformed JSON: {exc}") from exc
    return instance_from_dict(doc)


def instance_to_dict(instance: Instance) -> dict:
    return {"workload": instance.workload,
            "nodes": [{"rate": nd.rate, "fwd_delay": nd.fwd_delay, "bwd_delay": nd.bwd_delay}
                      for nd in instance.nodes]}


def render_instance(instance: Instance, indent: int | None = 2) -> str:
    # float repr is the shortest string that round-trips bit-exactly
    return json.dumps(instance_to_dict(instance), indent=indent)


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def save_instance(instance: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_instance(instance) + "\n")


# -- generation -------------------------------------------------------------

def generate_instance(n: int, seed: int, profile: Profile | str, workload: float = 10.0,
                      symmetric: bool = True, mean_one: bool = False) -> Instance:
    """Random instance of ``n`` nodes for one of the four diversity profiles.

    Uniform dimensions are fixed at 1.0; diverse ones are drawn uniformly from
    ``DIVERSE_RANGE``.  With ``symmetric`` each node gets one delay used for
    both directions, otherwise forward and backward delays are independent.
    ``mean_one`` divides diverse draws by the range midpoint so that they
    average 1.0 like the uniform dimensions.

    The random stream depends on ``(seed, n)`` only, so two profiles with the
    same seed share their diverse draws (paired comparisons).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    profile = Profile(profile)
    rng = np.random.default_rng([seed, n])
    lo, hi = DIVERSE_RANGE
    draws = rng.uniform(lo, hi, (3, n))
    if mean_one:
        draws /= (lo + hi) / 2
    rates = draws[0] if profile.diverse_rates else np.ones(n)
    if profile.diverse_delays:
        fwd = draws[1]
        bwd = fwd if symmetric else draws[2]
    else:
        fwd = bwd = np.ones(n)
    return Instance.from_arrays(workload, rates.tolist(), fwd.tolist(), bwd.tolist())


def default_instance(workload: float = 10.0, n: int = 3) -> Instance:
    """Unit rates and delays; ``n=3, workload=10`` is the reference setting."""
    return Instance.from_arrays(workload, [1.0] * n, [1.0] * n, [1.0] * n)
