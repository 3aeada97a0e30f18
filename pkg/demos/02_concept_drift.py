"""
Forgetting an old process
=========================

A stream switches from one process to another halfway through. The plain
online miner keeps everything it has ever seen; aging and lossy counting
let the old branches fade, and the self-adapting miner lowers its aging
factor when fitness drops.
"""

from streamhm import LossyMiner, OnlineMiner, WeightPolicy, mine_log
from streamhm.synth import StreamPlan, generate_with_boundaries, parse_spec

tail = [f"T{i}" for i in range(6)]
before = parse_spec({"seq": ["A", {"xor": [f"X{i}" for i in range(40)]}] + tail})
after = parse_spec({"seq": ["A", "Y0", "Y1", "Y2", "Y3"] + tail})
events, starts = generate_with_boundaries(StreamPlan([(before, 500), (after, 500)], max_concurrent=5, seed=0))
shift = starts[1]
print(len(events), "events, drift at", shift)

target = mine_log(events[shift:], long_range=False).edge_set
old_only = mine_log(events[:shift], long_range=False).edge_set - target

miners = {
    "online": OnlineMiner(None, None, None, WeightPolicy.stationary()),
    "aging": OnlineMiner(100, 100, 100, WeightPolicy.aging(0.997)),
    "lossy": LossyMiner(0.01),
}
for e in events[: shift + 300]:
    for m in miners.values():
        m.observe(e)

# 300 events after the drift
for name, m in miners.items():
    edges = m.build_model().edge_set
    print(f"{name:7s} matches new process: {edges == target}   old edges left: {len(edges & old_only)}")

# fitness falls right after the drift and alpha follows it down. Note the
# price: an edge needs weight >= 9 to reach dependency 0.9, and with alpha
# near 0.92 no relation can accumulate that much, so the model empties
# until alpha has climbed back towards 1.
adaptive = OnlineMiner(100, 100, 100, WeightPolicy.self_adapting(tolerance=0.05))
for i, e in enumerate(events[: shift + 1000]):
    if adaptive.observe(e) is not None and i > shift - 200:
        print(f"seq {i - shift:+5d}  fitness {adaptive.fitness_prev:.3f}  alpha {adaptive.alpha:.3f}")
