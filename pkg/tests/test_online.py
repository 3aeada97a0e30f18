import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from streamhm.events import Event
from streamhm.heuristics import Thresholds, mine_log
from streamhm.online import (
    ActivityQueue,
    CaseQueue,
    MRUQueue,
    OnlineMiner,
    RelationQueue,
    WeightPolicy,
    adapt_alpha,
    snapshot_counters,
    update_weights_aging,
    update_weights_stationary,
)

from oracles import brute_activities, brute_direct


def test_hand_trace_two_events():
    m = OnlineMiner(policy=WeightPolicy.stationary())
    m.observe(Event(0, "c1", "A"))
    m.observe(Event(1, "c1", "B"))
    assert m.qa.entries == [("B", 1.0), ("A", 1.0)]
    assert m.qr.entries == [(("A", "B"), 1.0)]
    assert m.qc.entries == [("c1", "B")]


def test_activity_eviction():
    m = OnlineMiner(max_qa=2)
    for i, a in enumerate("ABC"):
        m.observe(Event(i, f"c{i}", a))
    assert [k for k, _ in m.qa.entries] == ["C", "B"]
    assert m.qa.evicted == 1


def test_first_event_records_no_relation():
    m = OnlineMiner()
    m.observe(Event(0, "c", "A"))
    assert len(m.qr) == 0 and m.last_relation is None


def test_evicted_entry_comes_back_with_zero_weight():
    q = ActivityQueue(1)
    q.touch("A", 0.0)
    update_weights_stationary(q)
    q.touch("B", 0.0)
    q.touch("A", 0.0)
    assert q.get("A") == 0.0


def test_case_queue_replace():
    q = CaseQueue(2)
    q.replace("c1", "A")
    q.replace("c2", "B")
    q.replace("c1", "C")
    assert q.entries == [("c1", "C"), ("c2", "B")]
    victim = q.replace("c3", "D")
    assert victim == ("c2", "B")


def test_stationary_update():
    q = RelationQueue()
    q.touch("A", 3.0)
    q.touch("B", 5.0)
    q.touch("A", 3.0)
    update_weights_stationary(q)
    assert q.as_dict() == {"A": 4.0, "B": 5.0}
    update_weights_stationary(MRUQueue())
    q = MRUQueue()
    q.touch("A", 0.0)
    update_weights_stationary(q)
    assert q.as_dict() == {"A": 1.0}


def test_aging_update():
    q = MRUQueue()
    q.touch("B", 4.0)
    q.touch("A", 2.0)
    update_weights_aging(q, 0.5)
    assert q.as_dict() == {"A": 2.0, "B": 2.0}
    update_weights_aging(q, 0.0)
    assert q.as_dict() == {"A": 1.0, "B": 0.0}


@pytest.mark.parametrize("alpha", [0.5, 0.997, 0.9985])
def test_aging_decay_law(alpha):
    q = MRUQueue()
    q.touch("A", 0.0)
    update_weights_aging(q, alpha)
    q.touch("B", 0.0)
    for t in range(1, 501):
        update_weights_aging(q, alpha)
        assert math.isclose(q.get("A"), alpha**t, rel_tol=1e-9)


def test_adapt_alpha_rules():
    assert adapt_alpha(1.0, 0.7, 0.9) == pytest.approx(0.98)
    assert adapt_alpha(1.0, 0.5, 0.5) == 1.0
    assert adapt_alpha(0.99, 0.8, 0.5) == pytest.approx(0.995)
    assert adapt_alpha(0.7, 0.1, None) == 0.7
    assert adapt_alpha(0.01, 0.0, 1.0) == 0.0
    # within tolerance counts as unchanged
    assert adapt_alpha(0.9, 0.895, 0.9) == pytest.approx(0.905)


@given(st.lists(st.floats(0, 1), min_size=1, max_size=80))
def test_alpha_stays_in_unit_interval(fits):
    alpha, prev = 1.0, None
    for f in fits:
        alpha = adapt_alpha(alpha, f, prev)
        prev = f
        assert 0.0 <= alpha <= 1.0


def test_alpha_converges_on_constant_fitness():
    alpha0, step = 0.8, 0.005
    alpha, prev = alpha0, None
    for _ in range(math.ceil((1 - alpha0) / step) + 1):
        alpha = adapt_alpha(alpha, 0.6, prev, step_up=step)
        prev = 0.6
    assert alpha == 1.0


def test_policy_validation():
    with pytest.raises(ValueError):
        WeightPolicy.aging(1.0)
    with pytest.raises(ValueError):
        WeightPolicy("random")
    with pytest.raises(ValueError):
        WeightPolicy.self_adapting(step_down=0)
    with pytest.raises(ValueError):
        WeightPolicy.self_adapting(tolerance=-1)
    with pytest.raises(ValueError):
        MRUQueue(0)
    assert WeightPolicy.stationary().alpha == 1.0


def random_stream(rng, n_acts, n_events, n_cases):
    acts = [chr(65 + i) for i in range(n_acts)]
    return [Event(i, f"c{rng.randrange(n_cases)}", rng.choice(acts)) for i in range(n_events)]


@pytest.mark.parametrize("seed", range(30))
def test_stationary_unbounded_equals_counts(seed):
    rng = random.Random(seed)
    log = random_stream(rng, rng.randint(2, 8), rng.randint(1, 200), rng.randint(1, 10))
    m = OnlineMiner(None, None, None)
    for e in log:
        m.observe(e)
    acts, rels = snapshot_counters(m)
    assert acts == dict(brute_activities(log))
    assert rels == dict(brute_direct(log))
    assert m.build_model().edge_set == mine_log(log, long_range=False).edge_set


def test_aging_weights_below_counts():
    rng = random.Random(1)
    log = random_stream(rng, 4, 200, 3)
    st_m, ag_m = OnlineMiner(None, None, None), OnlineMiner(None, None, None, WeightPolicy.aging(0.99))
    for e in log:
        st_m.observe(e)
        ag_m.observe(e)
    for k, w in ag_m.qr.as_dict().items():
        assert w < st_m.qr.get(k)


def test_fresh_miner_is_empty():
    assert snapshot_counters(OnlineMiner()) == ({}, {})


def test_memory_bounded():
    rng = random.Random(2)
    log = random_stream(rng, 26, 3000, 500)
    m = OnlineMiner(10, 20, 30, WeightPolicy.self_adapting(), window=40)
    for e in log:
        m.observe(e)
        assert len(m.qa) <= 10 and len(m.qc) <= 20 and len(m.qr) <= 30
    assert m.peak_entries <= 10 + 20 + 30 + 40
    assert m.cases_seen == len(m.qc) + m.qc.evicted


def test_self_adapting_records_alpha_per_trigger():
    m = OnlineMiner(policy=WeightPolicy.self_adapting(), mine_every=10, window=20)
    for i in range(100):
        m.observe(Event(i, f"c{i % 3}", "ABC"[i % 3]))
    assert len(m.alpha_history) == 10
    assert m.alpha_history[0] == 1.0
    assert m.kind == "self_adapting"


def test_window_only_for_self_adapting():
    assert OnlineMiner().window is None
    assert OnlineMiner(policy=WeightPolicy.aging(0.9)).window is None
    assert OnlineMiner(policy=WeightPolicy.self_adapting(), window=5).window.x == 5
