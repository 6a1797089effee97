"""Explicit schedules: who holds the channel when, and when each node computes.

A timeline is a plain geometric object that can be checked against the
model's rules independently of how it was produced.  ``build_canonical``
makes the schedule the closed-form delay assumes; ``sample_adversarial``
makes valid but deliberately worse-structured ones (split communications,
idle channel time, backward communications mixed in among forward ones).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

import numpy as np

from .allocation import check_allocation, delay_of_fixed_allocation, gap_profile
from .model import CommPlan, Instance, tol

FWD = "FWD"
BWD = "BWD"


@dataclass(frozen=True)
class ChannelInterval:
    node: int
    direction: str
    start: float
    end: float

    @property
    def length(self) -> float:
        return self.end - self.start


@dataclass(frozen=True)
class Timeline:
    channel: tuple[ChannelInterval, ...]
    compute: dict[int, tuple[tuple[float, float], ...]] = field(default_factory=dict)

    @property
    def horizon(self) -> float:
        ends = [iv.end for iv in self.channel]
        ends += [e for ivs in self.compute.values() for _, e in ivs]
        return max(ends, default=0.0)

    @property
    def nodes(self) -> tuple[int, ...]:
        return tuple(sorted({iv.node for iv in self.channel} | set(self.compute)))

    def to_dict(self) -> dict:
        return {"horizon": self.horizon,
                "channel": [{"node": iv.node, "direction": iv.direction, "start": iv.start, "end": iv.end}
                            for iv in self.channel],
                "compute": {str(i): [[s, e] for s, e in ivs] for i, ivs in sorted(self.compute.items())}}

    @classmethod
    def from_dict(cls, doc: dict) -> "Timeline":
        channel = tuple(ChannelInterval(int(c["node"]), c["direction"], float(c["start"]), float(c["end"]))
                        for c in doc["channel"])
        compute = {int(i): tuple((float(s), float(e)) for s, e in ivs) for i, ivs in doc.get("compute", {}).items()}
        return cls(channel, compute)


def build_canonical(instance: Instance, plan: CommPlan, alloc) -> Timeline:
    """Forward communications packed from 0, backward ones packed against the end."""
    totals = check_allocation(instance, plan, alloc)
    horizon = delay_of_fixed_allocation(instance, plan, alloc)
    g = gap_profile(instance, plan)
    s, d = instance.fwd, instance.bwd
    work = dict(zip(plan.selected, totals))

    channel = []
    compute = {}
    t = 0.0
    for i in plan.fwd_order:
        channel.append(ChannelInterval(i, FWD, t, t + s[i]))
        t += s[i]
        if work[i] > 0:
            compute[i] = ((t, t + work[i] / instance.nodes[i].rate),)
    t = horizon - g.B
    for i in plan.bwd_order:
        channel.append(ChannelInterval(i, BWD, t, t + d[i]))
        t += d[i]
    return Timeline(tuple(channel), compute)


@dataclass(frozen=True)
class Violation:
    code: str  # OVERLAP, PRECEDENCE, BUDGET or WORKLOAD
    message: str
    indices: tuple[int, ...] = ()
    node: int | None = None


def _alloc_map(timeline: Timeline, alloc) -> dict[int, float]:
    if alloc is None:
        return {}
    if hasattr(alloc, "as_dict"):
        return alloc.as_dict()
    if isinstance(alloc, dict):
        return {int(k): float(v) for k, v in alloc.items()}
    nodes = timeline.nodes
    return {i: float(w) for i, w in zip(nodes, alloc)}


def validate(timeline: Timeline, instance: Instance, alloc=None) -> list[Violation]:
    """Every broken scheduling rule, as data.  An empty list means valid."""
    out: list[Violation] = []
    work = _alloc_map(timeline, alloc)
    chan = timeline.channel
    nodes = sorted(set(timeline.nodes) | set(work))

    for k, iv in enumerate(chan):
        if iv.end < iv.start - tol(iv.start):
            out.append(Violation("BUDGET", f"channel interval {k} ends before it starts", (k,), iv.node))

    # one transmitter at a time
    order = sorted(range(len(chan)), key=lambda k: (chan[k].start, chan[k].end))
    reach, holder = -np.inf, None
    for k in order:
        iv = chan[k]
        if holder is not None and iv.start < reach - tol(reach) and iv.length > 0:
            out.append(Violation("OVERLAP", f"channel intervals {holder} and {k} overlap by {reach - iv.start:g}s",
                                 (holder, k), iv.node))
        if iv.end > reach:
            reach, holder = iv.end, k

    for i in nodes:
        if i >= instance.n:
            out.append(Violation("BUDGET", f"node {i} is not in the instance", (), i))
            continue
        spec = instance.nodes[i]
        fwd = [k for k, iv in enumerate(chan) if iv.node == i and iv.direction == FWD]
        bwd = [k for k, iv in enumerate(chan) if iv.node == i and iv.direction == BWD]
        comp = sorted(timeline.compute.get(i, ()))
        for direction, idx, need in ((FWD, fwd, spec.fwd_delay), (BWD, bwd, spec.bwd_delay)):
            got = sum(chan[k].length for k in idx)
            if abs(got - need) > tol(need, got):
                out.append(Violation("BUDGET", f"node {i} {direction} channel time {got:g}s, needs {need:g}s",
                                     tuple(idx), i))
        fwd_end = max((chan[k].end for k in fwd), default=0.0)
        for s, e in comp:
            if e < s - tol(s):
                out.append(Violation("BUDGET", f"node {i} compute interval ({s:g}, {e:g}) is reversed", (), i))
            if s < fwd_end - tol(fwd_end):
                out.append(Violation("PRECEDENCE", f"node {i} computes at {s:g}s before its input arrives "
                                                   f"at {fwd_end:g}s", tuple(fwd), i))
        for (s1, e1), (s2, e2) in zip(comp, comp[1:]):
            if s2 < e1 - tol(e1):
                out.append(Violation("OVERLAP", f"node {i} compute intervals overlap at {s2:g}s", (), i))
        ready = max([fwd_end] + [e for _, e in comp])
        for k in bwd:
            if chan[k].start < ready - tol(ready):
                out.append(Violation("PRECEDENCE", f"node {i} sends its result at {chan[k].start:g}s before "
                                                   f"it is ready at {ready:g}s", (k,), i))
        need = work.get(i, 0.0)
        done = spec.rate * sum(e - s for s, e in comp)
        # interval endpoints carry rounding relative to the clock, not to the span
        slack = tol(need) + spec.rate * sum(tol(s, e) for s, e in comp)
        if done < need - slack:
            out.append(Violation("WORKLOAD", f"node {i} computes {done:g} of its {need:g} units", (), i))
    return out


# -- adversarial sampling ---------------------------------------------------

class Feature(str, Enum):
    PREEMPT = "PREEMPT"
    IDLE = "IDLE"
    INTERLEAVE = "INTERLEAVE"


MAX_SPLITS = 3


def _split(rng: np.random.Generator, length: float, pieces: int) -> list[float]:
    if pieces <= 1 or length <= 0:
        return [length]
    cuts = np.sort(rng.uniform(0.0, length, pieces - 1))
    edges = np.concatenate([[0.0], cuts, [length]])
    return [float(x) for x in np.diff(edges)]


def _merge(rng: np.random.Generator, queues: list[list]) -> list:
    """Random interleaving that keeps each queue's internal order."""
    queues = [list(q) for q in queues if q]
    out = []
    while queues:
        k = int(rng.integers(len(queues)))
        out.append(queues[k].pop(0))
        if not queues[k]:
            queues.pop(k)
    return out


def _interleaved(tokens: list) -> bool:
    seen_bwd = False
    for _, direction, _ in tokens:
        if direction == BWD:
            seen_bwd = True
        elif seen_bwd:
            return True
    return False


def sample_adversarial(instance: Instance, plan: CommPlan, alloc, seed: int,
                       features: Iterable[Feature | str] = ()) -> Timeline:
    """A valid, deliberately non-canonical timeline, reproducible per ``seed``.

    PREEMPT splits communications into up to four pieces; IDLE inserts channel
    and compute pauses (at most twice the total communication time overall);
    INTERLEAVE lets backward communications go before other nodes' forward
    ones.  Everything is placed as early as the rules allow after that.
    """
    features = {Feature(f) for f in features}
    if not features:
        return build_canonical(instance, plan, alloc)
    totals = check_allocation(instance, plan, alloc)
    work = dict(zip(plan.selected, totals))
    ids = plan.selected
    if Feature.INTERLEAVE in features and len(ids) < 2:
        raise ValueError("INTERLEAVE needs at least two selected nodes")
    rng = np.random.default_rng(seed)
    s, d, r = instance.fwd, instance.bwd, instance.rates

    pieces = {}
    for i in ids:
        for direction, length in ((FWD, s[i]), (BWD, d[i])):
            count = int(rng.integers(1, MAX_SPLITS + 2)) if Feature.PREEMPT in features else 1
            pieces[i, direction] = _split(rng, float(length), count)
    if Feature.PREEMPT in features:
        splittable = [(i, FWD) for i in ids if s[i] > 0] or [(i, BWD) for i in ids if d[i] > 0]
        if not splittable:
            raise ValueError("PREEMPT needs a communication with positive delay")
        if not any(len(pieces[key]) > 1 for key in splittable):
            key = splittable[int(rng.integers(len(splittable)))]
            length = s[key[0]] if key[1] == FWD else d[key[0]]
            pieces[key] = _split(rng, float(length), 2)

    def queue(i, direction):
        return [(i, direction, p) for p in pieces[i, direction]]

    if Feature.INTERLEAVE in features:
        tokens = _topological(rng, ids, queue)
        if not _interleaved(tokens):
            first = ids[int(rng.integers(len(ids)))]
            rest = [t for t in tokens if t[0] != first]
            tokens = queue(first, FWD) + queue(first, BWD) + rest
    elif Feature.PREEMPT in features:
        tokens = _merge(rng, [queue(i, FWD) for i in plan.fwd_order])
        tokens += _merge(rng, [queue(i, BWD) for i in plan.bwd_order])
    else:
        tokens = [t for i in plan.fwd_order for t in queue(i, FWD)]
        tokens += [t for i in plan.bwd_order for t in queue(i, BWD)]

    gaps = np.zeros(len(tokens))
    compute_pause = {i: (0.0, 0.0) for i in ids}
    if Feature.IDLE in features:
        comm = float(sum(s[i] + d[i] for i in ids))
        budget = 2.0 * comm if comm > 0 else 1.0
        share = rng.dirichlet(np.ones(len(tokens) + 2 * len(ids))) * budget * rng.uniform(0.2, 1.0)
        mask = rng.random(len(share)) < 0.4
        mask[1 if len(tokens) > 1 else 0] = True
        share = np.where(mask, share, 0.0)
        gaps = share[:len(tokens)]
        extra = share[len(tokens):]
        compute_pause = {i: (float(extra[2 * k]), float(extra[2 * k + 1])) for k, i in enumerate(ids)}

    remaining = {(i, direction): len(pieces[i, direction]) for i in ids for direction in (FWD, BWD)}
    compute_end = {}
    compute = {}
    channel = []
    cursor = 0.0
    for (i, direction, length), gap in zip(tokens, gaps):
        start = cursor + gap
        if direction == BWD:
            start = max(start, compute_end[i])
        channel.append(ChannelInterval(i, direction, start, start + length))
        cursor = start + length
        remaining[i, direction] -= 1
        if direction == FWD and remaining[i, FWD] == 0:
            delay_start, pause = compute_pause[i]
            t0 = cursor + delay_start
            span = work[i] / r[i]
            if span <= 0:
                compute_end[i] = cursor
                continue
            if Feature.IDLE in features and pause > 0:
                cut = float(rng.uniform(0.0, span))
                compute[i] = ((t0, t0 + cut), (t0 + cut + pause, t0 + span + pause))
            else:
                compute[i] = ((t0, t0 + span),)
            compute_end[i] = compute[i][-1][1]
    return Timeline(tuple(channel), compute)


def _topological(rng: np.random.Generator, ids, queue) -> list:
    fwd = {i: queue(i, FWD) for i in ids}
    bwd = {i: queue(i, BWD) for i in ids}
    out = []
    while any(fwd.values()) or any(bwd.values()):
        ready = [("F", i) for i in ids if fwd[i]] + [("B", i) for i in ids if not fwd[i] and bwd[i]]
        kind, i = ready[int(rng.integers(len(ready)))]
        out.append((fwd if kind == "F" else bwd)[i].pop(0))
    return out


# -- text rendering ---------------------------------------------------------

_GLYPHS = "0123456789abcdefghijklmnopqrstuvwxyz"


def render_gantt(timeline: Timeline, width: int = 60) -> str:
    """Plain-text chart: one channel row plus one row per node.

    Node rows show ``>`` for forward, ``#`` for computing and ``<`` for
    backward; the channel row shows which node is transmitting.
    """
    horizon = timeline.horizon
    scale = width / horizon if horizon > 0 else 0.0

    def cells(start, end):
        a = int(round(start * scale))
        b = max(a + (end > start), int(round(end * scale)))
        return range(a, min(b, width))

    chan_row = ["."] * width
    rows = {i: ["."] * width for i in timeline.nodes}
    for iv in timeline.channel:
        glyph = ">" if iv.direction == FWD else "<"
        for c in cells(iv.start, iv.end):
            chan_row[c] = _GLYPHS[iv.node % len(_GLYPHS)]
            rows[iv.node][c] = glyph
    for i, ivs in timeline.compute.items():
        for s, e in ivs:
            for c in cells(s, e):
                rows[i][c] = "#"
    label = max(7, len(f"node {max(rows, default=0)}"))
    lines = [f"{'channel':<{label}} |{''.join(chan_row)}|"]
    lines += [f"{'node ' + str(i):<{label}} |{''.join(row)}|" for i, row in sorted(rows.items())]
    lines.append(f"{'':<{label}}  0{'':>{width - len(f'{horizon:g}') - 1}}{horizon:g}")
    return "\n".join(lines)
