"""
The batch Heuristics Miner on a tiny log
========================================

Ten cases: five run A, B1, B2, C, D and five swap the two B activities.
"""

from streamhm import Event, Thresholds, count_log, export_dot, mine_log
from streamhm.heuristics import and_measure, dependency_measure

traces = [["A", "B1", "B2", "C", "D"]] * 5 + [["A", "B2", "B1", "C", "D"]] * 5
log = []
for k, trace in enumerate(traces):
    for activity in trace:
        log.append(Event(len(log), f"case_{k}", activity))

# direct successions are the raw material for every measure
counts = count_log(log)
for pair in [("A", "B1"), ("B1", "B2"), ("C", "D")]:
    print(pair, counts.direct[pair])

# the dependency measure is antisymmetric and stays inside (-1, 1)
print("A => B1", dependency_measure(counts.direct, "A", "B1"))
print("B1 => A", dependency_measure(counts.direct, "B1", "A"))
print("C => D ", dependency_measure(counts.direct, "C", "D"))

# B1 and B2 follow each other as often as A precedes them: an AND split
print("A => B1 and B2", and_measure(counts.direct, "A", "B1", "B2"))

# 5/6 is below the usual 0.9 threshold, so lower it to keep the A edges
model = mine_log(log, Thresholds(dependency=0.8, and_threshold=0.1))
print(sorted(model.edges))
print("split at A:", model.split_kind("A"), "join at C:", model.join_kind("C"))
print(export_dot(model))
