"""Hoeffding error intervals for the online dependency and AND measures.

On a stationary stream, let ``rho_ab`` be the number of ``a -> b``
successions in a random trace, bounded by ``xi_ab``. After ``nc`` cases the
online measures are ratios of sample means, and Hoeffding's inequality
brackets each mean within ``eps`` of its expectation with probability
``1 - delta``. The intervals below follow from substituting those brackets
into numerator and denominator.

Expected values and ranges are inputs: they describe the trace
distribution, they are not estimated from the stream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

__all__ = [
    "BoundQuery",
    "VacuousBoundError",
    "and_bounds",
    "dependency_bounds",
    "epsilon_pair",
    "epsilon_triple",
    "hoeffding_epsilon",
]

Pair = tuple[str, str]


class VacuousBoundError(ValueError):
    """The upper-bound denominator is not positive, so no finite bound exists."""


@dataclass(frozen=True)
class BoundQuery:
    delta: float
    nc: float
    xi: Mapping[Pair, float] = field(default_factory=dict)
    expected: Mapping[Pair, float] = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.nc < 1:
            raise ValueError("nc must be >= 1")
        if any(v < 0 for v in self.xi.values()):
            raise ValueError("ranges xi must be non-negative")

    def with_nc(self, nc: float) -> "BoundQuery":
        return BoundQuery(self.delta, nc, self.xi, self.expected)

    def r(self, a: str, b: str) -> float:
        return self.xi.get((a, b), 0.0)

    def e(self, a: str, b: str) -> float:
        return self.expected.get((a, b), 0.0)


def hoeffding_epsilon(value_range: float, delta: float, n: float) -> float:
    return math.sqrt(value_range * value_range * math.log(2.0 / delta) / (2.0 * n))


def epsilon_pair(q: BoundQuery, a: str, b: str) -> float:
    return hoeffding_epsilon(q.r(a, b) + q.r(b, a), q.delta, q.nc)


def epsilon_triple(q: BoundQuery, a: str, b: str, c: str) -> float:
    return hoeffding_epsilon(q.r(a, b) + q.r(a, c), q.delta, q.nc)


def _interval(ex: float, ey: float, eps_x: float, eps_y: float, nc: float) -> tuple[float, float]:
    lower = (ex - eps_x) / (ey + eps_y + 1.0 / nc)
    den = ey - eps_y + 1.0 / nc
    if den <= 0:
        raise VacuousBoundError(f"upper bound undefined: denominator {den:.6g} <= 0 at nc={nc}")
    return lower, (ex + eps_x) / den


def dependency_bounds(q: BoundQuery, a: str, b: str) -> tuple[float, float]:
    """Interval holding the online ``a => b`` measure with probability ``1 - delta``."""
    ex = q.e(a, b) - q.e(b, a)
    ey = q.e(a, b) + q.e(b, a)
    eps = epsilon_pair(q, a, b)
    return _interval(ex, ey, eps, eps, q.nc)


def and_bounds(q: BoundQuery, a: str, b: str, c: str) -> tuple[float, float]:
    """Interval for the online ``a => (b and c)`` measure."""
    ex = q.e(b, c) + q.e(c, b)
    ey = q.e(a, b) + q.e(a, c)
    return _interval(ex, ey, epsilon_pair(q, b, c), epsilon_triple(q, a, b, c), q.nc)
