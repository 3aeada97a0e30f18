"""Sliding evaluation window, fitness/precision proxies and metric series.

Both metrics look only at adjacent same-case pairs inside the window:

* fitness is the share of those pairs the model can replay (an edge
  ``a -> b``, or a self-loop when ``a == b``);
* precision is the share of model edges exercised by at least one pair.

These are coverage proxies. Their absolute values are not comparable with
alignment-based fitness or escaping-edges precision.
"""
from __future__ import annotations

import csv
import io
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .events import Event
from .heuristics import CausalModel

__all__ = [
    "CSV_HEADER",
    "EvalWindow",
    "MetricSeries",
    "Sample",
    "read_metrics_csv",
    "record_sample",
    "window_fitness",
    "window_pairs",
    "window_precision",
]

CSV_HEADER = ("seq_no", "fitness", "precision", "alpha", "entries", "micros_per_event")


class EvalWindow:
    """The last ``x`` events of the stream, oldest first."""

    def __init__(self, x: int = 200, events: Iterable[Event] = ()):
        if x < 1:
            raise ValueError("window size must be >= 1")
        self.x = x
        self._events: deque[Event] = deque(maxlen=x)
        self._events.extend(events)

    def push(self, event: Event) -> None:
        self._events.append(event)

    @property
    def events(self) -> tuple[Event, ...]:
        return tuple(self._events)

    def __len__(self) -> int:
        return len(self._events)

    def __iter__(self) -> Iterator[Event]:
        return iter(self._events)


def window_pairs(events: Iterable[Event]) -> list[tuple[str, str]]:
    """Adjacent same-case activity pairs, in order of the second event."""
    last: dict[str, str] = {}
    pairs = []
    for e in events:
        prev = last.get(e.case_id)
        if prev is not None:
            pairs.append((prev, e.activity))
        last[e.case_id] = e.activity
    return pairs


def _replayable(model: CausalModel, a: str, b: str) -> bool:
    if a == b:
        return a in model.self_loops or (a, b) in model.edges
    return (a, b) in model.edges


def window_fitness(window: Iterable[Event], model: CausalModel) -> float:
    pairs = window_pairs(window)
    if not pairs:
        return 1.0
    return sum(_replayable(model, a, b) for a, b in pairs) / len(pairs)


def window_precision(window: Iterable[Event], model: CausalModel) -> float:
    if not model.edges:
        return 1.0
    seen = set(window_pairs(window))
    return sum(1 for p in model.edges if p in seen) / len(model.edges)


@dataclass(frozen=True)
class Sample:
    seq_no: int
    fitness: float
    precision: float
    alpha: float
    entries: int
    micros_per_event: float


@dataclass
class MetricSeries:
    samples: list[Sample] = field(default_factory=list)

    def record(
        self,
        seq_no: int,
        model: CausalModel,
        window: Iterable[Event],
        *,
        alpha: float = 1.0,
        entries: int = 0,
        micros_per_event: float = 0.0,
    ) -> Sample:
        if self.samples and seq_no <= self.samples[-1].seq_no:
            raise ValueError("samples must be recorded with ascending seq_no")
        events = tuple(window)
        sample = Sample(
            seq_no=seq_no,
            fitness=window_fitness(events, model),
            precision=window_precision(events, model),
            alpha=alpha,
            entries=entries,
            micros_per_event=micros_per_event,
        )
        self.samples.append(sample)
        return sample

    def __len__(self) -> int:
        return len(self.samples)

    def column(self, name: str) -> list[float]:
        return [getattr(s, name) for s in self.samples]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for s in self.samples:
            writer.writerow([s.seq_no, repr(s.fitness), repr(s.precision), repr(s.alpha), s.entries, repr(s.micros_per_event)])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())


def read_metrics_csv(path) -> MetricSeries:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"unexpected metrics header: {reader.fieldnames}")
        samples = [
            Sample(
                seq_no=int(row["seq_no"]),
                fitness=float(row["fitness"]),
                precision=float(row["precision"]),
                alpha=float(row["alpha"]),
                entries=int(row["entries"]),
                micros_per_event=float(row["micros_per_event"]),
            )
            for row in reader
        ]
    return MetricSeries(samples)


def record_sample(series: MetricSeries, miner, window: Iterable[Event], seq_no: int, model: CausalModel, micros_per_event: float = 0.0) -> Sample:
    """Append the current state of ``miner`` to ``series``.

    Miners without an aging factor report ``alpha = 1.0``.
    """
    return series.record(
        seq_no,
        model,
        window,
        alpha=float(getattr(miner, "alpha", 1.0)),
        entries=miner.entries_retained(),
        micros_per_event=micros_per_event,
    )
