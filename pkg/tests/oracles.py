"""Slow, obviously-correct reference implementations used by the tests."""
from collections import Counter

from streamhm.events import Event


def traces_of(events):
    out = {}
    for e in sorted(events, key=lambda e: e.seq_no):
        out.setdefault(e.case_id, []).append(e.activity)
    return out


def brute_direct(events):
    # quadratic scan: e2 directly follows e1 if no event of the same case lies between them
    events = list(events)
    counts = Counter()
    for e1 in events:
        for e2 in events:
            if e1.case_id != e2.case_id or e2.seq_no <= e1.seq_no:
                continue
            between = any(e.case_id == e1.case_id and e1.seq_no < e.seq_no < e2.seq_no for e in events)
            if not between:
                counts[(e1.activity, e2.activity)] += 1
    return counts


def brute_activities(events):
    return Counter(e.activity for e in events)


def brute_two_step(events):
    counts = Counter()
    for t in traces_of(events).values():
        for i in range(len(t) - 2):
            if t[i] == t[i + 2]:
                counts[(t[i], t[i + 1])] += 1
    return counts


def brute_indirect(events):
    # a at i, b at j > i, and neither a nor b strictly between
    counts = Counter()
    for t in traces_of(events).values():
        for i, a in enumerate(t):
            for j in range(i + 1, len(t)):
                b = t[j]
                if a == b:
                    continue
                if all(x not in (a, b) for x in t[i + 1 : j]):
                    counts[(a, b)] += 1
    return counts


def brute_edges(direct, threshold):
    acts = {x for pair in direct for x in pair}
    edges = set()
    for a in acts:
        for b in acts:
            if a == b:
                continue
            ab, ba = direct.get((a, b), 0), direct.get((b, a), 0)
            if ab and (ab - ba) / (ab + ba + 1) >= threshold:
                edges.add((a, b))
    return edges


def log_from_traces(traces, prefix="c"):
    """Events for ``traces``, one case after the other."""
    events = []
    for k, t in enumerate(traces):
        for act in t:
            events.append(Event(len(events), f"{prefix}{k}", act))
    return events


def and_split_log():
    w = [["A", "B1", "B2", "C", "D"]] * 5 + [["A", "B2", "B1", "C", "D"]] * 5
    return log_from_traces(w)
