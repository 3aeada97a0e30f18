"""
How far can the online dependency measure drift from its limit?
===============================================================

Traces are <a,b> nine times out of ten and <b,a> otherwise, so the
dependency a => b tends to 0.8 as cases accumulate.
"""

import random

from streamhm import BoundQuery, Event, OnlineMiner, dependency_bounds, epsilon_pair
from streamhm.bounds import VacuousBoundError
from streamhm.heuristics import dependency_measure
from streamhm.synth import expected_successions, parse_spec, sample_trace, trace_distribution

spec = parse_spec({"xor": [{"seq": ["a", "b"]}, {"seq": ["b", "a"]}], "weights": [9, 1]})
expected, xi = expected_successions(trace_distribution(spec))

for nc in (10, 100, 1000, 10_000):
    q = BoundQuery(0.05, nc, xi, expected)
    try:
        lo, hi = dependency_bounds(q, "a", "b")
        print(f"nc={nc:6d} eps={epsilon_pair(q, 'a', 'b'):.4f} interval=[{lo:.3f}, {hi:.3f}]")
    except VacuousBoundError as exc:
        print(f"nc={nc:6d} no finite bound yet ({exc})")

# one simulated stream, for comparison
rng = random.Random(0)
miner = OnlineMiner(None, None, None)
seq = 0
for k in range(1000):
    for act in sample_trace(spec, rng):
        miner.observe(Event(seq, f"c{k}", act))
        seq += 1
print("online measure after 1000 cases:", dependency_measure(miner.qr.as_dict(), "a", "b"))
