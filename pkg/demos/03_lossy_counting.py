"""
Lossy counting keeps approximate counts in little memory
========================================================
"""

import random
from collections import Counter

from streamhm import Event, LossyMiner
from streamhm.lossy import frequency_guarantee_check

rng = random.Random(1)
acts = [f"a{k}" for k in range(200)]
weights = [1 / (k + 1) for k in range(200)]
events = [Event(i, f"c{rng.randrange(50)}", rng.choices(acts, weights)[0]) for i in range(20_000)]

miner = LossyMiner(epsilon=0.01)
truth = Counter()
for e in events:
    miner.observe(e)
    truth[e.activity] += 1

print("bucket width", miner.w, "events", miner.events_seen)
print("activities kept", len(miner.da), "of", len(truth))
print("peak entries over all three tables", miner.peak_entries)

# estimates never exceed the truth and undercount by at most eps * N
for a, (f, delta) in sorted(miner.da.entries().items(), key=lambda kv: -kv[1][0])[:5]:
    print(a, "estimate", f, "true", truth[a], "delta", delta)
print(frequency_guarantee_check(miner, truth))
