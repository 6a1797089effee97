"""Communication orders and the workload they let the nodes absorb.

For a fixed plan the delay depends on the orders only through the workload
that fits in the idle windows,

    cap0 = v(fwd_order, FORWARD) + v(bwd_order, BACKWARD)

so each direction is optimized independently by maximizing ``v``.  The
backward value weights each delay by the rates of the nodes scheduled after
it (they keep computing while it is on the channel); the forward value
weights each delay by the rates of the nodes scheduled before it.  The
forward problem is the time reversal of the backward one.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .model import Instance, InstanceError, tol

DEFAULT_ORDER_GUARD = 9


class Direction(str, Enum):
    BACKWARD = "BACKWARD"
    FORWARD = "FORWARD"


class GuardExceeded(RuntimeError):
    """An enumeration would exceed its size guard."""


def resolve_guard(default: int, override: bool = False) -> int | None:
    """Effective guard: ``None`` when disabled, else env ``DECSCHED_GUARD`` or ``default``."""
    if override:
        return None
    env = os.environ.get("DECSCHED_GUARD")
    if env:
        return int(env)
    return default


def _delays(instance: Instance, direction: Direction) -> np.ndarray:
    return instance.bwd if Direction(direction) is Direction.BACKWARD else instance.fwd


def _check_order(order: Sequence[int], selected: Sequence[int]) -> tuple[int, ...]:
    order = tuple(int(i) for i in order)
    if len(order) != len(selected) or set(order) != set(selected):
        raise InstanceError(f"order {order} is not a permutation of {tuple(selected)}", None, "order")
    return order


@dataclass(frozen=True)
class OrderValue:
    v: float
    terms: tuple[float, ...]


def objective_v(instance: Instance, selected: Sequence[int], order: Sequence[int],
                direction: Direction | str) -> OrderValue:
    """Value of ``order`` and its per-position terms."""
    direction = Direction(direction)
    order = _check_order(order, selected)
    r = instance.rates[list(order)]
    t = _delays(instance, direction)[list(order)]
    if direction is Direction.BACKWARD:
        weight = np.concatenate([np.cumsum(r[::-1])[::-1][1:], [0.0]])
    else:
        weight = np.concatenate([[0.0], np.cumsum(r)[:-1]])
    terms = t * weight
    return OrderValue(float(terms.sum()), tuple(float(x) for x in terms))


def _sorted_by(selected: Sequence[int], key) -> tuple[int, ...]:
    return tuple(sorted(selected, key=lambda i: (key(i), i)))


def order_identity(instance: Instance, selected: Sequence[int], direction=None) -> tuple[int, ...]:
    return tuple(sorted(selected))


def order_descending_delay(instance: Instance, selected: Sequence[int],
                           direction: Direction | str) -> tuple[int, ...]:
    """Longest backward communication first; mirrored, shortest forward first.

    Optimal when all rates are equal.
    """
    if Direction(direction) is Direction.BACKWARD:
        d = instance.bwd
        return _sorted_by(selected, lambda i: -d[i])
    s = instance.fwd
    return _sorted_by(selected, lambda i: s[i])


def order_by_rate(instance: Instance, selected: Sequence[int], direction: Direction | str) -> tuple[int, ...]:
    """Fastest node's backward communication last, and its forward one first.

    Optimal when all delays are equal.
    """
    r = instance.rates
    if Direction(direction) is Direction.BACKWARD:
        return _sorted_by(selected, lambda i: r[i])
    return _sorted_by(selected, lambda i: -r[i])


@dataclass(frozen=True)
class GreedyResult:
    order: tuple[int, ...]
    v: float
    prefix_v: float


def order_greedy_prefix(instance: Instance, selected: Sequence[int], direction: Direction | str,
                        k: int, suffix: str = "ascending") -> GreedyResult:
    """Best first-``k`` backward positions by enumeration, rest filled arbitrarily.

    The ``k`` fixed positions are the ones whose terms do not depend on how
    the other nodes are arranged: the first ``k`` backward slots or, by time
    reversal, the last ``k`` forward slots.  ``suffix`` picks how the free
    slots are filled: ``"ascending"`` ids or ``"heuristic"`` (longest delay
    first in the backward sense).
    """
    direction = Direction(direction)
    ids = sorted(selected)
    n = len(ids)
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in 1..{n}, got {k}")
    r = instance.rates
    t = _delays(instance, direction)
    total_rate = float(sum(r[i] for i in ids))

    best_val = -1.0
    best: tuple[int, ...] = ()
    # permutations() yields tuples in lexicographic order; strict improvement keeps the smallest
    for cand in itertools.permutations(ids, k):
        rest = total_rate
        val = 0.0
        for i in cand:
            rest -= r[i]
            val += t[i] * rest
        if val > best_val + tol(best_val):
            best_val, best = val, cand

    free = [i for i in ids if i not in best]
    if suffix == "heuristic":
        free.sort(key=lambda i: (-t[i], i))
    elif suffix != "ascending":
        raise ValueError(f"unknown suffix rule {suffix!r}")
    backward_sense = list(best) + free
    if direction is Direction.BACKWARD:
        order = tuple(backward_sense)
    else:
        # free slots keep their fill order at the front; the fixed k are reversed into the tail
        order = tuple(free + list(reversed(best)))
    return GreedyResult(order, objective_v(instance, ids, order, direction).v, float(best_val))


def _check_guard(n: int, guard: int | None, what: str) -> None:
    if guard is not None and n > guard:
        raise GuardExceeded(f"{what} over {n} nodes exceeds guard {guard}; "
                            f"set DECSCHED_GUARD or pass an override")


def order_exhaustive(instance: Instance, selected: Sequence[int], direction: Direction | str,
                     guard: int | None = DEFAULT_ORDER_GUARD) -> tuple[tuple[int, ...], float]:
    """Brute force over all permutations; ties go to the lexicographically smallest."""
    direction = Direction(direction)
    ids = sorted(selected)
    n = len(ids)
    _check_guard(n, guard, "exhaustive order search")
    perms = np.array(list(itertools.permutations(ids)), dtype=np.intp)
    r = instance.rates[perms]
    t = _delays(instance, direction)[perms]
    if direction is Direction.BACKWARD:
        weight = np.cumsum(r[:, ::-1], axis=1)[:, ::-1] - r
    else:
        weight = np.cumsum(r, axis=1) - r
    values = (t * weight).sum(axis=1)
    vmax = float(values.max())
    first = int(np.flatnonzero(values >= vmax - tol(vmax))[0])
    return tuple(int(i) for i in perms[first]), float(values[first])


def exact_table(rates: Sequence[float], delays: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Best backward value for every subset of the given nodes (bitmask DP).

    ``best[mask]`` is the optimal value over orders of the nodes in ``mask``;
    ``first[mask]`` is the local index scheduled first in a maximizing
    order (smallest index among ties).  Scheduling node ``i`` first earns
    ``delay_i`` times the rate of everything after it, and the rest is the
    same problem on the smaller set.
    """
    n = len(rates)
    size = 1 << n
    rate_sum = np.zeros(size)
    for mask in range(1, size):
        low = mask & -mask
        rate_sum[mask] = rate_sum[mask ^ low] + rates[low.bit_length() - 1]
    best = np.zeros(size)
    first = np.full(size, -1, dtype=np.int64)
    for mask in range(1, size):
        top = -1.0
        arg = -1
        m = mask
        while m:
            low = m & -m
            i = low.bit_length() - 1
            rest = mask ^ low
            val = delays[i] * rate_sum[rest] + best[rest]
            if val > top + tol(top):
                top, arg = val, i
            m ^= low
        best[mask] = top
        first[mask] = arg
    return best, first


def _unwind(first: np.ndarray, mask: int) -> list[int]:
    seq = []
    while mask:
        i = int(first[mask])
        seq.append(i)
        mask ^= 1 << i
    return seq


def order_exact(instance: Instance, selected: Sequence[int],
                direction: Direction | str) -> tuple[tuple[int, ...], float]:
    """Optimal order by dynamic programming over subsets, O(2^n n)."""
    direction = Direction(direction)
    ids = sorted(selected)
    rates = instance.rates[ids]
    delays = _delays(instance, direction)[ids]
    full = (1 << len(ids)) - 1
    best, first = exact_table(rates, delays)
    seq = [ids[i] for i in _unwind(first, full)]
    if direction is Direction.FORWARD:
        # the forward objective of an order is the backward objective of its reverse
        seq.reverse()
    return tuple(seq), float(best[full])


def best_values_all_subsets(instance: Instance, direction: Direction | str) -> np.ndarray:
    """Optimal ``v`` for every subset of the instance's nodes, indexed by bitmask."""
    direction = Direction(direction)
    best, _ = exact_table(instance.rates, _delays(instance, direction))
    return best


# -- counterexamples and ratio checks ---------------------------------------

class Counterexample(str, Enum):
    LDF = "LDF"  # largest delay first
    FCL = "FCL"  # fastest computing node last


def counterexample(kind: Counterexample | str, n: int, scale: float, workload: float = 0.0) -> Instance:
    """Instance on which a uniform-case ordering rule is arbitrarily bad.

    LDF: backward delays n, n-1, ..., 1 with node 0 ``scale`` times faster
    than the rest.  Largest-delay-first sends node 0 first, wasting the fast
    node while the others communicate.  FCL: rates 1..n with the fastest
    node's backward delay equal to ``scale``.  Fastest-last sends that long
    communication last, when nobody else is left computing.  In both cases
    the rule's ``v`` stays bounded while the optimum grows with ``scale``.
    """
    kind = Counterexample(kind)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not scale >= 1:
        raise ValueError(f"scale must be >= 1, got {scale}")
    if kind is Counterexample.LDF:
        rates = [float(scale)] + [1.0] * (n - 1)
        bwd = [float(n - i) for i in range(n)]
    else:
        rates = [float(i + 1) for i in range(n)]
        bwd = [1.0] * (n - 1) + [float(scale)]
    return Instance.from_arrays(workload, rates, [1.0] * n, bwd)


def counterexample_policy(kind: Counterexample | str):
    return order_descending_delay if Counterexample(kind) is Counterexample.LDF else order_by_rate


@dataclass(frozen=True)
class RatioCheck:
    k: int
    n: int
    prefix_v: float
    v: float
    v_star: float
    bound_holds: bool

    @property
    def ratio(self) -> float:
        return self.prefix_v / self.v_star if self.v_star > 0 else 1.0


def verify_ratio(instance: Instance, selected: Sequence[int], direction: Direction | str, k: int,
                 guard: int | None = DEFAULT_ORDER_GUARD) -> RatioCheck:
    """Compare the greedy prefix value against the brute-force optimum."""
    n = len(selected)
    greedy = order_greedy_prefix(instance, selected, direction, k)
    _, v_star = order_exhaustive(instance, selected, direction, guard)
    holds = greedy.prefix_v >= (k / n) * v_star - 1e-9 * v_star
    return RatioCheck(k, n, greedy.prefix_v, greedy.v, v_star, bool(holds))


def n_prefix_candidates(n: int, k: int) -> int:
    return math.perm(n, k)
