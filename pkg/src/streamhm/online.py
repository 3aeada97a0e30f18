"""Online Heuristics Miner over three bounded most-recently-used queues.

``Q_A`` maps activities to weights, ``Q_C`` maps each recent case to its
last activity and ``Q_R`` maps direct-succession pairs to weights. Each
queue keeps its entries in recency order and evicts the least recently
observed one when full. A weight policy decides how weights evolve:

* ``stationary``: the front entry gains 1, nothing else changes, so with
  large enough queues the weights are exact counts;
* ``aging``: every weight is multiplied by ``alpha`` before the front entry
  gains 1;
* ``self_adapting``: aging whose ``alpha`` is nudged down when fitness on
  the recent window drops and up otherwise.
"""
from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from typing import Callable, Hashable

from .evaluation import EvalWindow, window_fitness
from .events import Event
from .heuristics import CausalModel, Thresholds, generate_model

__all__ = [
    "ActivityQueue",
    "CaseQueue",
    "OnlineMiner",
    "RelationQueue",
    "WeightPolicy",
    "adapt_alpha",
    "update_weights_aging",
    "update_weights_stationary",
]


class MRUQueue:
    """Bounded map ordered by recency; ``capacity=None`` means unbounded.

    Internally the most recent entry is the *last* item of the
    ``OrderedDict``; :attr:`entries` presents it first.
    """

    def __init__(self, capacity: int | None = None):
        if capacity is not None and capacity < 1:
            raise ValueError("queue capacity must be >= 1 or None")
        self.capacity = capacity
        self._d: OrderedDict = OrderedDict()
        self.evicted = 0

    def __len__(self) -> int:
        return len(self._d)

    def __contains__(self, key) -> bool:
        return key in self._d

    def get(self, key, default=None):
        return self._d.get(key, default)

    def touch(self, key, fresh):
        """Move ``key`` to the front, inserting ``fresh`` if absent.

        Returns the evicted ``(key, value)`` or ``None``.
        """
        d = self._d
        if key in d:
            d.move_to_end(key)
            return None
        victim = None
        if self.capacity is not None and len(d) >= self.capacity:
            victim = d.popitem(last=False)
            self.evicted += 1
        d[key] = fresh
        return victim

    @property
    def front(self):
        return next(reversed(self._d)) if self._d else None

    @property
    def entries(self) -> list[tuple]:
        return list(reversed(self._d.items()))

    def as_dict(self) -> dict:
        return dict(self._d)


class ActivityQueue(MRUQueue):
    pass


class RelationQueue(MRUQueue):
    pass


class CaseQueue(MRUQueue):
    def replace(self, case_id: Hashable, activity: str):
        """Record ``activity`` as the latest of ``case_id`` and move it to the front."""
        victim = self.touch(case_id, activity)
        self._d[case_id] = activity
        return victim


def update_weights_stationary(queue: MRUQueue) -> None:
    key = queue.front
    if key is not None:
        queue._d[key] += 1.0


def update_weights_aging(queue: MRUQueue, alpha: float) -> None:
    d = queue._d
    for k in d:
        d[k] *= alpha
    key = queue.front
    if key is not None:
        d[key] += 1.0


def adapt_alpha(
    alpha: float,
    fitness_now: float,
    fitness_prev: float | None,
    step_down: float = 0.02,
    step_up: float = 0.005,
    tolerance: float = 0.01,
) -> float:
    """One constant-step update of the aging factor.

    A fitness drop larger than ``tolerance`` lowers ``alpha`` by
    ``step_down``; an unchanged or improved fitness raises it by
    ``step_up``. The result is clamped to ``[0, 1]``. Without a previous
    fitness value ``alpha`` is returned unchanged.
    """
    if fitness_prev is None:
        return alpha
    if fitness_now - fitness_prev < -tolerance:
        return max(0.0, alpha - step_down)
    return min(1.0, alpha + step_up)


STATIONARY = "stationary"
AGING = "aging"
SELF_ADAPTING = "self_adapting"


@dataclass
class WeightPolicy:
    kind: str = STATIONARY
    alpha: float = 1.0
    step_down: float = 0.02
    step_up: float = 0.005
    tolerance: float = 0.01

    def __post_init__(self):
        if self.kind not in (STATIONARY, AGING, SELF_ADAPTING):
            raise ValueError(f"unknown weight policy {self.kind!r}")
        if self.kind == STATIONARY:
            self.alpha = 1.0
        if self.kind == AGING and not 0.0 <= self.alpha < 1.0:
            raise ValueError("aging factor must lie in [0, 1)")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.step_down <= 0 or self.step_up <= 0:
            raise ValueError("alpha steps must be positive")
        if self.tolerance < 0:
            raise ValueError("tolerance must be >= 0")

    @classmethod
    def stationary(cls) -> "WeightPolicy":
        return cls(STATIONARY)

    @classmethod
    def aging(cls, alpha: float) -> "WeightPolicy":
        return cls(AGING, alpha)

    @classmethod
    def self_adapting(cls, alpha: float = 1.0, step_down: float = 0.02, step_up: float = 0.005, tolerance: float = 0.01) -> "WeightPolicy":
        return cls(SELF_ADAPTING, alpha, step_down, step_up, tolerance)

    def apply(self, queue: MRUQueue) -> None:
        if self.kind == STATIONARY:
            update_weights_stationary(queue)
        else:
            update_weights_aging(queue, self.alpha)


def accept_all(event: Event) -> bool:
    return True


class OnlineMiner:
    """Fully online Heuristics Miner.

    Parameters
    ----------
    max_qa, max_qc, max_qr:
        Queue capacities; ``None`` leaves a queue unbounded.
    policy:
        Weight update policy, see :class:`WeightPolicy`.
    mine_every:
        A model is generated every ``mine_every`` accepted events.
    window:
        Size of the fitness window used by the self-adapting policy. The
        window is only kept for that policy.
    """

    def __init__(
        self,
        max_qa: int | None = 100,
        max_qc: int | None = 100,
        max_qr: int | None = 100,
        policy: WeightPolicy | None = None,
        mine_every: int = 50,
        thresholds: Thresholds | None = None,
        window: int | EvalWindow = 200,
        analyze: Callable[[Event], bool] = accept_all,
    ):
        if mine_every < 1:
            raise ValueError("mine_every must be >= 1")
        self.qa = ActivityQueue(max_qa)
        self.qc = CaseQueue(max_qc)
        self.qr = RelationQueue(max_qr)
        self.policy = policy or WeightPolicy()
        self.mine_every = mine_every
        self.thresholds = thresholds or Thresholds()
        self.analyze = analyze
        self.accepted = 0
        self.model: CausalModel | None = None
        self.last_relation: tuple[str, str] | None = None
        self.fitness_prev: float | None = None
        self.window = None
        if self.policy.kind == SELF_ADAPTING:
            self.window = window if isinstance(window, EvalWindow) else EvalWindow(window)
        self.alpha_history: list[float] = []
        self.peak_entries = 0

    @property
    def kind(self) -> str:
        if self.policy.kind == STATIONARY:
            return "online"
        if self.policy.kind == AGING:
            return "aging"
        return "self_adapting"

    @property
    def alpha(self) -> float:
        return self.policy.alpha

    @property
    def cases_seen(self) -> int:
        """``|Q_C| + cases evicted so far``."""
        return len(self.qc) + self.qc.evicted

    def observe(self, event: Event) -> CausalModel | None:
        if not self.analyze(event):
            return None
        a_i = event.activity
        policy = self.policy

        self.qa.touch(a_i, 0.0)
        policy.apply(self.qa)

        prev = self.qc.get(event.case_id)
        if prev is not None:
            rel = (prev, a_i)
            self.qr.touch(rel, 0.0)
            policy.apply(self.qr)
            self.last_relation = rel
        else:
            self.last_relation = None
        self.qc.replace(event.case_id, a_i)

        if self.window is not None:
            self.window.push(event)
        n = self.entries_retained()
        if n > self.peak_entries:
            self.peak_entries = n

        self.accepted += 1
        if self.accepted % self.mine_every == 0:
            return self.mine()
        return None

    def build_model(self) -> CausalModel:
        acts, rels = self.snapshot_counters()
        return generate_model(acts, rels, self.thresholds)

    def mine(self) -> CausalModel:
        model = self.model = self.build_model()
        if self.window is not None:
            fitness = window_fitness(self.window, model)
            p = self.policy
            p.alpha = adapt_alpha(p.alpha, fitness, self.fitness_prev, p.step_down, p.step_up, p.tolerance)
            self.fitness_prev = fitness
            self.alpha_history.append(p.alpha)
        return model

    def snapshot_counters(self) -> tuple[dict[str, float], dict[tuple[str, str], float]]:
        return self.qa.as_dict(), self.qr.as_dict()

    def entries_retained(self) -> int:
        n = len(self.qa) + len(self.qc) + len(self.qr)
        if self.window is not None:
            n += len(self.window)
        return n


def snapshot_counters(miner: OnlineMiner):
    return miner.snapshot_counters()
