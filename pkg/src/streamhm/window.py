"""Baseline miners: batch Heuristics Miner rerun over a bounded event buffer.

With the ``"shift"`` policy the buffer is a sliding window over the most
recent events; with ``"reset"`` it is emptied whenever it fills up
(periodic resets). Every mining trigger re-counts the whole buffer from
scratch, so each event is processed once on arrival and again at every
trigger while it stays in memory.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .events import RESET, SHIFT, Event, ObservationPeriod
from .heuristics import CausalModel, Thresholds, count_log, generate_model

__all__ = ["WindowMiner", "WindowMinerConfig"]


def accept_all(event: Event) -> bool:
    return True


@dataclass(frozen=True)
class WindowMinerConfig:
    capacity: int = 100
    policy: str = SHIFT
    mine_every: int = 50
    thresholds: Thresholds = field(default_factory=Thresholds)

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")
        if self.mine_every < 1:
            raise ValueError("mine_every must be >= 1")
        if self.policy not in (RESET, SHIFT):
            raise ValueError(f"unknown memory policy {self.policy!r}")


class WindowMiner:
    def __init__(self, config: WindowMinerConfig | None = None, analyze: Callable[[Event], bool] = accept_all):
        self.config = config or WindowMinerConfig()
        self.analyze = analyze
        self.buffer = ObservationPeriod(self.config.capacity)
        self.accepted = 0
        self.model: CausalModel | None = None

    @property
    def kind(self) -> str:
        return "reset" if self.config.policy == RESET else "window"

    def observe(self, event: Event) -> CausalModel | None:
        if not self.analyze(event):
            return None
        self.buffer.push(event, self.config.policy)
        self.accepted += 1
        if self.accepted % self.config.mine_every == 0:
            return self.mine()
        return None

    def build_model(self) -> CausalModel:
        counts = count_log(self.buffer)
        return generate_model(counts.activity_count, counts.direct, self.config.thresholds, counts.two_step, counts.indirect)

    def mine(self) -> CausalModel:
        self.model = self.build_model()
        return self.model

    def entries_retained(self) -> int:
        return len(self.buffer)
