"""Heuristics Miner counters, measures and causal-model construction.

The measures are defined over plain mappings so that the same code serves
the batch miner (integer counts from :func:`count_log`) and the streaming
miners (real-valued queue weights or lossy frequencies).
"""
from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .events import Event

__all__ = [
    "CausalModel",
    "SuccessionCounts",
    "Thresholds",
    "and_measure",
    "count_log",
    "dependency_measure",
    "export_dot",
    "generate_model",
    "join_and_measure",
    "long_distance_measure",
    "loop_measures",
    "mine_log",
    "model_from_json",
    "model_to_json",
]

Pair = tuple[str, str]


@dataclass
class SuccessionCounts:
    """Frequencies gathered from a log.

    ``direct[(a, b)]`` is the number of times ``b`` directly follows ``a``
    in a case, ``two_step[(a, b)]`` counts ``a, b, a`` patterns and
    ``indirect[(a, b)]`` counts ``a`` eventually followed by ``b`` with no
    other ``a`` or ``b`` in between.
    """

    activity_count: dict[str, float] = field(default_factory=dict)
    direct: dict[Pair, float] = field(default_factory=dict)
    two_step: dict[Pair, float] = field(default_factory=dict)
    indirect: dict[Pair, float] = field(default_factory=dict)
    num_cases: int = 0


@dataclass(frozen=True)
class Thresholds:
    dependency: float = 0.9
    and_threshold: float = 0.1
    long_distance: float = 0.9
    loop_one: float = 0.9
    loop_two: float = 0.9
    relative_to_best: float = 0.0

    def __post_init__(self):
        for name in ("dependency", "and_threshold", "long_distance", "loop_one", "loop_two", "relative_to_best"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"threshold {name} must be finite")
        if not -1.0 <= self.dependency <= 1.0:
            raise ValueError("dependency threshold must lie in [-1, 1]")
        if not 0.0 <= self.and_threshold <= 1.0:
            raise ValueError("AND threshold must lie in [0, 1]")
        if self.relative_to_best < 0:
            raise ValueError("relative_to_best must be >= 0")


def _traces(log: Iterable[Event]) -> dict[str, list[str]]:
    traces: dict[str, list[str]] = {}
    for e in sorted(log, key=lambda ev: ev.seq_no):
        traces.setdefault(e.case_id, []).append(e.activity)
    return traces


def count_log(log: Iterable[Event]) -> SuccessionCounts:
    """Count activities and successions over the cases of ``log``."""
    activity = defaultdict(int)
    direct = defaultdict(int)
    two_step = defaultdict(int)
    indirect = defaultdict(int)
    traces = _traces(log)
    for trace in traces.values():
        for i, a in enumerate(trace):
            activity[a] += 1
            if i + 1 < len(trace):
                direct[(a, trace[i + 1])] += 1
            if i + 2 < len(trace) and trace[i + 2] == a:
                two_step[(a, trace[i + 1])] += 1
        # last position of each activity seen so far; a pair (i, j) counts
        # when no a or b occurs strictly between them
        last_seen: dict[str, int] = {}
        for j, b in enumerate(trace):
            prev_b = last_seen.get(b, -1)
            for a, i in last_seen.items():
                if a != b and i > prev_b:
                    indirect[(a, b)] += 1
            last_seen[b] = j
    return SuccessionCounts(
        activity_count=dict(activity),
        direct=dict(direct),
        two_step=dict(two_step),
        indirect=dict(indirect),
        num_cases=len(traces),
    )


def dependency_measure(direct: Mapping[Pair, float], a: str, b: str) -> float:
    ab = direct.get((a, b), 0.0)
    ba = direct.get((b, a), 0.0)
    return (ab - ba) / (ab + ba + 1.0)


def and_measure(direct: Mapping[Pair, float], a: str, b: str, c: str) -> float:
    """AND measure of the split ``a -> {b, c}``."""
    bc = direct.get((b, c), 0.0) + direct.get((c, b), 0.0)
    return bc / (direct.get((a, b), 0.0) + direct.get((a, c), 0.0) + 1.0)


def join_and_measure(direct: Mapping[Pair, float], a: str, b: str, c: str) -> float:
    """AND measure of the join ``{b, c} -> a``."""
    bc = direct.get((b, c), 0.0) + direct.get((c, b), 0.0)
    return bc / (direct.get((b, a), 0.0) + direct.get((c, a), 0.0) + 1.0)


def long_distance_measure(indirect: Mapping[Pair, float], activity_count: Mapping[str, float], a: str, b: str) -> float:
    return indirect.get((a, b), 0.0) / (activity_count.get(b, 0.0) + 1.0)


def loop_measures(direct: Mapping[Pair, float], two_step: Mapping[Pair, float], a: str, b: str) -> tuple[float, float]:
    aa = direct.get((a, a), 0.0)
    l2 = two_step.get((a, b), 0.0) + two_step.get((b, a), 0.0)
    return aa / (aa + 1.0), l2 / (l2 + 1.0)


@dataclass(frozen=True)
class CausalModel:
    """A dependency graph annotated with split/join semantics.

    ``splits[a]`` partitions the targets of ``a``'s outgoing edges into
    groups: members of one group are in AND relation, distinct groups are
    XOR alternatives. ``joins`` does the same for incoming edges.
    """

    activities: Mapping[str, float] = field(default_factory=dict)
    edges: Mapping[Pair, float] = field(default_factory=dict)
    splits: Mapping[str, tuple[tuple[str, ...], ...]] = field(default_factory=dict)
    joins: Mapping[str, tuple[tuple[str, ...], ...]] = field(default_factory=dict)
    self_loops: frozenset[str] = frozenset()
    two_loops: frozenset[Pair] = frozenset()
    long_edges: frozenset[Pair] = frozenset()

    @property
    def edge_set(self) -> frozenset[Pair]:
        return frozenset(self.edges)

    def successors(self, a: str) -> list[str]:
        return sorted(b for (x, b) in self.edges if x == a)

    def predecessors(self, b: str) -> list[str]:
        return sorted(a for (a, y) in self.edges if y == b)

    def split_kind(self, a: str) -> str | None:
        """``"AND"``, ``"XOR"`` or ``"MIXED"``; ``None`` without a split."""
        return _kind(self.splits.get(a))

    def join_kind(self, a: str) -> str | None:
        return _kind(self.joins.get(a))

    def edge_label(self, a: str, b: str) -> str | None:
        groups = self.splits.get(a)
        if not groups:
            return None
        for g in groups:
            if b in g:
                return "AND" if len(g) > 1 else "XOR"
        return None


def _kind(groups) -> str | None:
    if not groups:
        return None
    if len(groups) == 1:
        return "AND"
    if all(len(g) == 1 for g in groups):
        return "XOR"
    return "MIXED"


def _group(anchor: str, others: list[str], measure, counts, threshold: float) -> tuple[tuple[str, ...], ...]:
    groups: list[list[str]] = []
    for b in others:
        for g in groups:
            if all(measure(counts, anchor, b, c) >= threshold for c in g):
                g.append(b)
                break
        else:
            groups.append([b])
    return tuple(tuple(g) for g in groups)


def generate_model(
    activity_counts: Mapping[str, float],
    relation_counts: Mapping[Pair, float],
    thresholds: Thresholds | None = None,
    two_step: Mapping[Pair, float] | None = None,
    indirect: Mapping[Pair, float] | None = None,
) -> CausalModel:
    """Build a :class:`CausalModel` from activity and direct-succession counts.

    ``two_step`` and ``indirect`` are optional; only the batch miner has
    them, so streaming models never carry length-two loops or
    long-distance edges.
    """
    th = thresholds or Thresholds()
    activities = {a: float(v) for a, v in activity_counts.items()}
    direct = {p: float(v) for p, v in relation_counts.items() if v > 0}
    for a, b in direct:
        activities.setdefault(a, 0.0)
        activities.setdefault(b, 0.0)

    candidates: dict[Pair, float] = {}
    for (a, b) in direct:
        if a == b:
            continue
        dep = dependency_measure(direct, a, b)
        if dep >= th.dependency:
            candidates[(a, b)] = dep

    if th.relative_to_best > 0 and candidates:
        best: dict[str, float] = {}
        for (a, b), dep in candidates.items():
            best[a] = max(best.get(a, -1.0), dep)
        candidates = {p: d for p, d in candidates.items() if best[p[0]] - d <= th.relative_to_best}

    edges = {p: candidates[p] for p in sorted(candidates)}

    self_loops = frozenset(
        a for (a, b) in direct if a == b and loop_measures(direct, {}, a, a)[0] >= th.loop_one
    )

    two_loops: set[Pair] = set()
    if two_step:
        for (a, b) in two_step:
            if a == b or a in self_loops or b in self_loops:
                continue
            if loop_measures(direct, two_step, a, b)[1] >= th.loop_two:
                two_loops.add((min(a, b), max(a, b)))

    long_edges: set[Pair] = set()
    if indirect:
        for (a, b) in indirect:
            if a == b or (a, b) in edges:
                continue
            if long_distance_measure(indirect, activities, a, b) >= th.long_distance:
                long_edges.add((a, b))

    out: dict[str, list[str]] = defaultdict(list)
    inc: dict[str, list[str]] = defaultdict(list)
    for (a, b) in edges:
        out[a].append(b)
        inc[b].append(a)
    splits = {
        a: _group(a, sorted(bs), and_measure, direct, th.and_threshold)
        for a, bs in sorted(out.items())
        if len(bs) >= 2
    }
    joins = {
        b: _group(b, sorted(as_), join_and_measure, direct, th.and_threshold)
        for b, as_ in sorted(inc.items())
        if len(as_) >= 2
    }
    return CausalModel(
        activities=dict(sorted(activities.items())),
        edges=edges,
        splits=splits,
        joins=joins,
        self_loops=self_loops,
        two_loops=frozenset(two_loops),
        long_edges=frozenset(long_edges),
    )


def mine_log(log: Iterable[Event], thresholds: Thresholds | None = None, *, long_range: bool = True) -> CausalModel:
    """Batch Heuristics Miner over a finite log."""
    counts = count_log(log)
    if not long_range:
        return generate_model(counts.activity_count, counts.direct, thresholds)
    return generate_model(counts.activity_count, counts.direct, thresholds, counts.two_step, counts.indirect)


def _dot_id(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(model: CausalModel) -> str:
    """Deterministic Graphviz rendering of ``model``."""
    lines = ["digraph {"]
    for a in sorted(model.activities):
        lines.append(f"  {_dot_id(a)};")
    for a in sorted(model.self_loops):
        lines.append(f"  {_dot_id(a)} -> {_dot_id(a)};")
    for (a, b) in sorted(model.edges):
        attrs = [f'weight="{model.edges[(a, b)]:.6f}"']
        label = model.edge_label(a, b)
        if label:
            attrs.append(f'label="{label}"')
        lines.append(f"  {_dot_id(a)} -> {_dot_id(b)} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def model_to_json(model: CausalModel) -> str:
    doc = {
        "activities": dict(model.activities),
        "edges": [{"source": a, "target": b, "dependency": v} for (a, b), v in sorted(model.edges.items())],
        "splits": {a: [list(g) for g in groups] for a, groups in model.splits.items()},
        "joins": {a: [list(g) for g in groups] for a, groups in model.joins.items()},
        "self_loops": sorted(model.self_loops),
        "two_loops": [list(p) for p in sorted(model.two_loops)],
        "long_edges": [list(p) for p in sorted(model.long_edges)],
    }
    return json.dumps(doc, sort_keys=True, indent=2)


def model_from_json(text: str) -> CausalModel:
    doc = json.loads(text)
    return CausalModel(
        activities=doc["activities"],
        edges={(e["source"], e["target"]): e["dependency"] for e in doc["edges"]},
        splits={a: tuple(tuple(g) for g in groups) for a, groups in doc["splits"].items()},
        joins={a: tuple(tuple(g) for g in groups) for a, groups in doc["joins"].items()},
        self_loops=frozenset(doc["self_loops"]),
        two_loops=frozenset(tuple(p) for p in doc["two_loops"]),
        long_edges=frozenset(tuple(p) for p in doc["long_edges"]),
    )
