import socket
import time
import warnings

import pytest

from streamhm.events import DecodeError, Event
from streamhm.net import (
    MergeSpec,
    StreamDecodeWarning,
    StreamServer,
    StreamSourceConfig,
    encode_stream,
    iter_decode,
    merge_logs,
    read_stream,
)
from streamhm.synth import StreamPlan, generate, parse_spec


def transcript(address, timeout=5.0):
    with socket.create_connection(address, timeout=timeout) as s:
        chunks = []
        while True:
            data = s.recv(4096)
            if not data:
                return b"".join(chunks)
            chunks.append(data)


EVENTS = [Event(0, "c1", "A"), Event(1, "c1", "B"), Event(2, "c,2", "C")]


def test_three_lines_then_eof():
    with StreamServer(EVENTS, StreamSourceConfig()) as srv:
        data = transcript(srv.address)
    assert data.decode().splitlines() == ["0,c1,A", "1,c1,B", "2,c%2C2,C"]


@pytest.mark.parametrize("codec", ["line", "xes"])
def test_two_clients_identical(codec):
    events = generate(StreamPlan([(parse_spec({"seq": ["A", {"and": ["B", "C"]}, "D"]}), 40)], 3, 1))
    with StreamServer(events, StreamSourceConfig(codec=codec), max_clients=2) as srv:
        a = transcript(srv.address)
        b = transcript(srv.address)
        assert srv.wait(5)
    assert a == b == encode_stream(events, codec)


def test_pacing():
    with StreamServer(EVENTS, StreamSourceConfig(inter_event_delay=0.01)) as srv:
        t0 = time.perf_counter()
        transcript(srv.address)
        assert time.perf_counter() - t0 >= 0.02


def test_client_reads_events():
    with StreamServer(EVENTS, StreamSourceConfig(codec="xes")) as srv:
        got = list(read_stream(*srv.address, codec="xes"))
    assert got == EVENTS


def test_loop_renumbers():
    with StreamServer(EVENTS, StreamSourceConfig(loop=True)) as srv:
        with socket.create_connection(srv.address, timeout=5) as s:
            buf = b""
            while buf.count(b"\n") < 7:
                buf += s.recv(4096)
    lines = buf.decode().splitlines()[:7]
    assert lines[3] == "3,c1,A" and lines[6] == "6,c1,A"


def test_bind_failure():
    with StreamServer(EVENTS) as srv:
        with pytest.raises(OSError):
            StreamServer(EVENTS, StreamSourceConfig(port=srv.address[1]))


def test_dropped_client_does_not_affect_others():
    events = [Event(i, f"c{i % 7}", "A") for i in range(20_000)]
    with StreamServer(events, max_clients=2) as srv:
        s = socket.create_connection(srv.address)
        s.recv(10)
        s.close()
        assert transcript(srv.address) == encode_stream(events)


def test_config_validation():
    with pytest.raises(ValueError):
        StreamSourceConfig(codec="json")
    with pytest.raises(ValueError):
        StreamSourceConfig(inter_event_delay=-1)


def test_decode_valid_lines():
    got = list(iter_decode(["9,c,A\n5,c,B\n", "7,c,C"]))
    assert [e.seq_no for e in got] == [0, 1, 2]
    assert [e.activity for e in got] == ["A", "B", "C"]


def test_decode_split_across_chunks():
    text = encode_stream(EVENTS, "xes").decode()
    chunks = [text[i : i + 7] for i in range(0, len(text), 7)]
    assert list(iter_decode(chunks, "xes")) == EVENTS


def test_skip_mode_warns():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        got = list(iter_decode(["0,c,A\nbroken\n2,c,B\n"], on_error="skip"))
    assert len(got) == 2
    assert sum(issubclass(w.category, StreamDecodeWarning) for w in caught) == 1


def test_abort_mode_raises():
    it = iter_decode(["0,c,A\nbroken\n2,c,B\n"], on_error="abort")
    assert next(it).activity == "A"
    with pytest.raises(DecodeError):
        next(it)


def _seg(prefix, n):
    return [Event(i, f"{prefix}{i}", f"{prefix.upper()}{i}") for i in range(n)]


def test_merge_hard_shift():
    merged = merge_logs(MergeSpec([_seg("a", 4), _seg("b", 4)]))
    assert [e.activity for e in merged] == ["A0", "A1", "A2", "A3", "B0", "B1", "B2", "B3"]
    assert [e.seq_no for e in merged] == list(range(8))


def test_merge_overlap_half():
    merged = merge_logs(MergeSpec([_seg("a", 4), _seg("b", 4)], 0.5))
    assert [e.activity for e in merged] == ["A0", "A1", "A2", "B0", "A3", "B1", "B2", "B3"]


def test_merge_identity_and_renaming():
    one = _seg("a", 3)
    assert merge_logs(MergeSpec([one])) == one
    merged = merge_logs(MergeSpec([one, one]))
    ids = [e.case_id for e in merged]
    assert len(set(ids)) == 6
    assert ids[3:] == ["a0~1", "a1~1", "a2~1"]


def test_merge_errors():
    with pytest.raises(ValueError):
        MergeSpec([])
    with pytest.raises(ValueError):
        MergeSpec([_seg("a", 2), _seg("b", 2)], 1.0)
    with pytest.raises(ValueError):
        MergeSpec([_seg("a", 2), _seg("b", 2)], [0.1, 0.2])
