"""Synthetic event streams from small block-structured process trees.

A process tree is built from five node types:

``"A"``
    a single activity;
``{"seq": [n1, n2, ...]}``
    children in order;
``{"xor": [n1, n2, ...], "weights": [w1, w2, ...]}``
    exactly one child, picked with probability proportional to its weight
    (uniform when ``weights`` is omitted);
``{"and": [n1, n2, ...]}``
    every child, interleaved: each step emits the next activity of a
    branch chosen uniformly among those with activities left;
``{"loop": n, "p": 0.3}``
    the body once, then again with probability ``p`` after each run.

A :class:`StreamPlan` lists segments of ``(tree, number of cases)``. Cases
run concurrently (up to ``max_concurrent``) and the scheduler emits the next
event of a uniformly chosen active case. A segment starts only once every
case of the previous segment has finished, so no case spans two process
versions.

>>> spec = parse_spec({"seq": ["A", {"and": ["B1", "B2"]}, "C", "D"]})
>>> sorted(trace_distribution(spec).items())
[(('A', 'B1', 'B2', 'C', 'D'), 0.5), (('A', 'B2', 'B1', 'C', 'D'), 0.5)]
"""
from __future__ import annotations

import json
import random
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Sequence

from .events import Event, write_line_file

__all__ = [
    "Activity",
    "And",
    "Loop",
    "Seq",
    "StreamPlan",
    "Xor",
    "expected_successions",
    "generate",
    "generate_with_boundaries",
    "load_spec",
    "parse_spec",
    "sample_trace",
    "spec_activities",
    "trace_distribution",
    "write_stream",
]


@dataclass(frozen=True)
class Activity:
    name: str


@dataclass(frozen=True)
class Seq:
    children: tuple


@dataclass(frozen=True)
class Xor:
    children: tuple
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.weights) != len(self.children):
            raise ValueError("xor needs one weight per branch")
        if any(w <= 0 for w in self.weights):
            raise ValueError("xor weights must be positive")


@dataclass(frozen=True)
class And:
    children: tuple


@dataclass(frozen=True)
class Loop:
    body: Any
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p < 1.0:
            raise ValueError("loop repeat probability must lie in [0, 1)")


def parse_spec(doc) -> Any:
    """Build a process tree from its JSON form."""
    if isinstance(doc, str):
        if not doc:
            raise ValueError("empty activity name")
        return Activity(doc)
    if not isinstance(doc, dict):
        raise ValueError(f"cannot parse process node {doc!r}")
    if "activity" in doc:
        return parse_spec(doc["activity"])
    if "seq" in doc:
        return Seq(tuple(parse_spec(c) for c in _nonempty(doc["seq"])))
    if "xor" in doc:
        kids = tuple(parse_spec(c) for c in _nonempty(doc["xor"]))
        weights = tuple(float(w) for w in doc.get("weights", [1.0] * len(kids)))
        return Xor(kids, weights)
    if "and" in doc:
        return And(tuple(parse_spec(c) for c in _nonempty(doc["and"])))
    if "loop" in doc:
        return Loop(parse_spec(doc["loop"]), float(doc.get("p", 0.0)))
    raise ValueError(f"unknown process node keys {sorted(doc)}")


def _nonempty(items):
    if not items:
        raise ValueError("block needs at least one child")
    return items


def spec_to_json(node) -> Any:
    if isinstance(node, Activity):
        return node.name
    if isinstance(node, Seq):
        return {"seq": [spec_to_json(c) for c in node.children]}
    if isinstance(node, Xor):
        return {"xor": [spec_to_json(c) for c in node.children], "weights": list(node.weights)}
    if isinstance(node, And):
        return {"and": [spec_to_json(c) for c in node.children]}
    return {"loop": spec_to_json(node.body), "p": node.p}


def load_spec(path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(json.load(fh))


def spec_activities(node) -> set[str]:
    if isinstance(node, Activity):
        return {node.name}
    if isinstance(node, Loop):
        return spec_activities(node.body)
    out: set[str] = set()
    for c in node.children:
        out |= spec_activities(c)
    return out


def _merge(rng: random.Random, parts: list[list[str]]) -> list[str]:
    pos = [0] * len(parts)
    live = [i for i, p in enumerate(parts) if p]
    out = []
    while live:
        k = rng.randrange(len(live))
        i = live[k]
        out.append(parts[i][pos[i]])
        pos[i] += 1
        if pos[i] == len(parts[i]):
            live.pop(k)
    return out


def sample_trace(node, rng: random.Random) -> list[str]:
    if isinstance(node, Activity):
        return [node.name]
    if isinstance(node, Seq):
        out = []
        for c in node.children:
            out.extend(sample_trace(c, rng))
        return out
    if isinstance(node, Xor):
        child = rng.choices(node.children, weights=node.weights)[0]
        return sample_trace(child, rng)
    if isinstance(node, And):
        return _merge(rng, [sample_trace(c, rng) for c in node.children])
    out = sample_trace(node.body, rng)
    while rng.random() < node.p:
        out.extend(sample_trace(node.body, rng))
    return out


@lru_cache(maxsize=None)
def _merge_dist(parts: tuple[tuple[str, ...], ...]) -> dict[tuple[str, ...], float]:
    live = [i for i, p in enumerate(parts) if p]
    if not live:
        return {(): 1.0}
    out: dict[tuple[str, ...], float] = defaultdict(float)
    share = 1.0 / len(live)
    for i in live:
        rest = parts[:i] + (parts[i][1:],) + parts[i + 1 :]
        for tail, p in _merge_dist(rest).items():
            out[(parts[i][0],) + tail] += share * p
    return dict(out)


def trace_distribution(node, max_repeats: int = 3) -> dict[tuple[str, ...], float]:
    """Exact probability of every trace the tree can produce.

    Loops are unrolled at most ``max_repeats`` extra times, so for trees
    with loops the probabilities sum to less than one.
    """
    if isinstance(node, Activity):
        return {(node.name,): 1.0}
    if isinstance(node, Seq):
        dist = {(): 1.0}
        for c in node.children:
            dist = _concat(dist, trace_distribution(c, max_repeats))
        return dist
    if isinstance(node, Xor):
        total = sum(node.weights)
        out: dict[tuple[str, ...], float] = defaultdict(float)
        for c, w in zip(node.children, node.weights):
            for t, p in trace_distribution(c, max_repeats).items():
                out[t] += p * w / total
        return dict(out)
    if isinstance(node, And):
        out = defaultdict(float)
        branch_dists = [trace_distribution(c, max_repeats) for c in node.children]

        def rec(i, chosen, prob):
            if i == len(branch_dists):
                for t, p in _merge_dist(tuple(chosen)).items():
                    out[t] += prob * p
                return
            for t, p in branch_dists[i].items():
                rec(i + 1, chosen + [t], prob * p)

        rec(0, [], 1.0)
        return dict(out)
    body = trace_distribution(node.body, max_repeats)
    out = defaultdict(float)
    current = body
    for k in range(max_repeats + 1):
        stop = 1.0 - node.p
        for t, p in current.items():
            out[t] += p * stop
        current = {t: p * node.p for t, p in _concat(current, body).items()}
    return dict(out)


def _concat(left, right):
    out: dict[tuple[str, ...], float] = defaultdict(float)
    for t1, p1 in left.items():
        for t2, p2 in right.items():
            out[t1 + t2] += p1 * p2
    return dict(out)


def expected_successions(dist: dict[tuple[str, ...], float]) -> tuple[dict, dict]:
    """Expected and maximal number of direct successions per trace.

    Returns ``(expected, xi)`` keyed by activity pair, where ``expected``
    is the mean count of the pair in a random trace and ``xi`` the largest
    count any trace of the distribution has.
    """
    expected: dict[tuple[str, str], float] = defaultdict(float)
    xi: dict[tuple[str, str], float] = defaultdict(float)
    for trace, p in dist.items():
        local: dict[tuple[str, str], int] = defaultdict(int)
        for a, b in zip(trace, trace[1:]):
            local[(a, b)] += 1
        for pair, n in local.items():
            expected[pair] += p * n
            xi[pair] = max(xi[pair], n)
    return dict(expected), dict(xi)


@dataclass
class StreamPlan:
    segments: Sequence[tuple[Any, int]]
    max_concurrent: int = 1
    seed: int = 0
    case_prefix: str = "case_"

    def __post_init__(self):
        if not self.segments:
            raise ValueError("a plan needs at least one segment")
        if self.max_concurrent < 1:
            raise ValueError("max_concurrent must be >= 1")
        for _, n in self.segments:
            if n < 1:
                raise ValueError("every segment needs at least one case")


def generate_with_boundaries(plan: StreamPlan) -> tuple[list[Event], list[int]]:
    """Generate the stream and the index of the first event of each segment."""
    rng = random.Random(plan.seed)
    events: list[Event] = []
    starts: list[int] = []
    next_case = 0
    for spec, n_cases in plan.segments:
        starts.append(len(events))
        pending = n_cases
        active: list[list] = []
        while pending or active:
            while pending and len(active) < plan.max_concurrent:
                active.append([f"{plan.case_prefix}{next_case}", sample_trace(spec, rng), 0])
                next_case += 1
                pending -= 1
            k = rng.randrange(len(active))
            case = active[k]
            events.append(Event(len(events), case[0], case[1][case[2]]))
            case[2] += 1
            if case[2] == len(case[1]):
                active.pop(k)
    return events, starts


def generate(plan: StreamPlan) -> list[Event]:
    return generate_with_boundaries(plan)[0]


def write_stream(path, plan: StreamPlan) -> list[Event]:
    events = generate(plan)
    write_line_file(path, events)
    return events
