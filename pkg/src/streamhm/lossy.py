"""Heuristics Miner over Lossy Counting tables.

The stream is split into buckets of ``w = ceil(1 / epsilon)`` events.
Three tables are maintained: activities (``D_A``), cases with their last
activity (``D_C``) and direct successions (``D_R``). Each entry carries
its estimated frequency ``f`` and the maximum undercount ``delta`` fixed
when it was inserted. Whenever the event counter is a multiple of ``w``
every entry with ``f + delta <= b_current`` is dropped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Mapping

from .events import Event
from .heuristics import CausalModel, Thresholds, generate_model

__all__ = ["GuaranteeReport", "LossyConfig", "LossyMiner", "LossyTable", "frequency_guarantee_check"]


class LossyTable:
    """Entries ``key -> [f, delta, payload]``.

    ``max_entries`` is an optional hard cap. It is not part of Lossy
    Counting: when exceeded, the entry with the smallest ``f + delta`` is
    dropped so memory stays bounded even for adversarial streams.
    """

    def __init__(self, max_entries: int | None = None):
        self._d: dict[Hashable, list] = {}
        self.max_entries = max_entries
        self.peak = 0

    def __len__(self) -> int:
        return len(self._d)

    def __contains__(self, key) -> bool:
        return key in self._d

    def get(self, key):
        return self._d.get(key)

    def add(self, key, bucket: int, payload=None) -> list | None:
        """Count one occurrence of ``key``; returns the previous entry or ``None``."""
        entry = self._d.get(key)
        if entry is not None:
            entry[0] += 1
            old_payload = entry[2]
            entry[2] = payload
            return [entry[0] - 1, entry[1], old_payload]
        self._d[key] = [1, bucket - 1, payload]
        if self.max_entries is not None and len(self._d) > self.max_entries:
            victim = min((k for k in self._d if k != key), key=lambda k: self._d[k][0] + self._d[k][1])
            del self._d[victim]
        if len(self._d) > self.peak:
            self.peak = len(self._d)
        return None

    def cleanup(self, bucket: int) -> int:
        doomed = [k for k, (f, delta, _) in self._d.items() if f + delta <= bucket]
        for k in doomed:
            del self._d[k]
        return len(doomed)

    def frequencies(self) -> dict:
        return {k: v[0] for k, v in self._d.items()}

    def entries(self) -> dict:
        return {k: (v[0], v[1]) for k, v in self._d.items()}


@dataclass(frozen=True)
class LossyConfig:
    epsilon: float = 0.01

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")

    @property
    def width(self) -> int:
        return math.ceil(1.0 / self.epsilon)


def accept_all(event: Event) -> bool:
    return True


class LossyMiner:
    def __init__(
        self,
        epsilon: float = 0.01,
        mine_every: int = 50,
        thresholds: Thresholds | None = None,
        max_entries: int | None = None,
        analyze: Callable[[Event], bool] = accept_all,
    ):
        if mine_every < 1:
            raise ValueError("mine_every must be >= 1")
        self.config = LossyConfig(epsilon)
        self.w = self.config.width
        self.N = 1
        self.da = LossyTable(max_entries)
        self.dc = LossyTable(max_entries)
        self.dr = LossyTable(max_entries)
        self.mine_every = mine_every
        self.thresholds = thresholds or Thresholds()
        self.analyze = analyze
        self.accepted = 0
        self.model: CausalModel | None = None
        self.last_relation: tuple[str, str] | None = None
        self.cleaned = False
        self.peak_entries = 0

    kind = "lossy"

    @property
    def epsilon(self) -> float:
        return self.config.epsilon

    @property
    def events_seen(self) -> int:
        return self.N - 1

    @property
    def bucket(self) -> int:
        """Bucket id of the next event to be observed."""
        return math.ceil(self.N / self.w)

    def observe(self, event: Event) -> CausalModel | None:
        if not self.analyze(event):
            return None
        b_current = math.ceil(self.N / self.w)
        a_i = event.activity
        self.da.add(a_i, b_current)
        prev = self.dc.add(event.case_id, b_current, a_i)
        if prev is not None:
            rel = (prev[2], a_i)
            self.dr.add(rel, b_current)
            self.last_relation = rel
        else:
            self.last_relation = None
        n = len(self.da) + len(self.dc) + len(self.dr)
        if n > self.peak_entries:
            self.peak_entries = n
        self.cleaned = self.N % self.w == 0
        if self.cleaned:
            self.da.cleanup(b_current)
            self.dc.cleanup(b_current)
            self.dr.cleanup(b_current)
        self.N += 1
        self.accepted += 1
        if self.accepted % self.mine_every == 0:
            return self.mine()
        return None

    def build_model(self) -> CausalModel:
        return generate_model(self.da.frequencies(), self.dr.frequencies(), self.thresholds)

    def mine(self) -> CausalModel:
        self.model = self.build_model()
        return self.model

    def snapshot_counters(self):
        return self.da.frequencies(), self.dr.frequencies()

    def entries_retained(self) -> int:
        return len(self.da) + len(self.dc) + len(self.dr)


@dataclass
class GuaranteeReport:
    checked: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def frequency_guarantee_check(miner: LossyMiner, oracle_counts: Mapping, table: str = "activities") -> GuaranteeReport:
    """Check the Lossy Counting guarantee for every key retained by ``miner``.

    ``table`` selects ``"activities"``, ``"cases"`` or ``"relations"``. For
    each retained key ``f <= true`` and ``true - f <= epsilon * N`` must
    hold, where ``true`` comes from an exact counter run alongside and
    ``N`` is the number of events observed.
    """
    tab = {"activities": miner.da, "cases": miner.dc, "relations": miner.dr}[table]
    report = GuaranteeReport()
    bound = miner.epsilon * miner.events_seen
    for key, (f, _delta) in tab.entries().items():
        true = oracle_counts.get(key, 0)
        report.checked += 1
        if f > true:
            report.violations.append(f"{key!r}: estimate {f} exceeds true count {true}")
        elif true - f > bound + 1e-9:
            report.violations.append(f"{key!r}: undercount {true - f} exceeds {bound:g}")
    return report
