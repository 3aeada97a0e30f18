"""Events, observation periods and the two wire codecs.

An event is a ``(seq_no, case_id, activity)`` triplet. ``seq_no`` is a
progressive counter rather than a wall-clock time: the miner only cares
about the order in which events arrive.

Two codecs are supported:

* the compact line codec, ``<seq_no>,<case_id>,<activity>`` with ids
  percent-encoded for ``%``, ``,`` and newlines;
* single-event XES fragments (a ``<log>`` with one ``<trace>`` holding one
  ``<event>``), separated by a blank line on the wire.
"""
from __future__ import annotations

import datetime as _dt
import xml.etree.ElementTree as ET
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence
from urllib.parse import quote, unquote

__all__ = [
    "DecodeError",
    "Event",
    "ObservationPeriod",
    "case_time_scope",
    "decode_line",
    "decode_xes_fragment",
    "encode_line",
    "encode_xes_fragment",
    "push_bounded",
    "read_line_file",
    "write_line_file",
]

RESET = "reset"
SHIFT = "shift"
_POLICIES = (RESET, SHIFT)

XES_NS = "http://www.xes-standard.org/"
_ID_SAFE = "".join(chr(c) for c in range(0x20, 0x7F) if chr(c) not in "%,")


class DecodeError(ValueError):
    """Raised when a wire record cannot be turned into an :class:`Event`."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


@dataclass(frozen=True, slots=True)
class Event:
    seq_no: int
    case_id: str
    activity: str


def _encode_id(text: str) -> str:
    return quote(text, safe=_ID_SAFE)


def encode_line(event: Event) -> str:
    """Encode ``event`` in the compact line codec (no trailing newline)."""
    return f"{event.seq_no},{_encode_id(event.case_id)},{_encode_id(event.activity)}"


def decode_line(text: str) -> Event:
    """Decode one line of the compact codec.

    Raises
    ------
    DecodeError
        If the line does not have exactly three fields, the sequence number
        is not a non-negative integer, or an id decodes to the empty string.
    """
    line = text.rstrip("\r\n")
    parts = line.split(",")
    if len(parts) != 3:
        raise DecodeError(f"expected 3 fields, got {len(parts)}: {line!r}", field="line")
    raw_seq, raw_case, raw_act = parts
    try:
        seq_no = int(raw_seq)
    except ValueError:
        raise DecodeError(f"seq_no is not an integer: {raw_seq!r}", field="seq_no") from None
    if seq_no < 0:
        raise DecodeError(f"seq_no must be non-negative: {seq_no}", field="seq_no")
    case_id = unquote(raw_case, errors="strict")
    activity = unquote(raw_act, errors="strict")
    if not case_id:
        raise DecodeError("empty case_id", field="case_id")
    if not activity:
        raise DecodeError("empty activity", field="activity")
    return Event(seq_no, case_id, activity)


def _xes_time(seq_no: int, base: _dt.datetime) -> str:
    stamp = base + _dt.timedelta(seconds=seq_no)
    return stamp.isoformat(timespec="milliseconds")


_XES_BASE_TIME = _dt.datetime(2012, 4, 23, 10, 33, 4, tzinfo=_dt.timezone(_dt.timedelta(hours=2)))


def encode_xes_fragment(event: Event, timestamp: str | None = None) -> str:
    """Render ``event`` as a one-event OpenXES document.

    The timestamp defaults to a fixed base time plus ``seq_no`` seconds so
    that the output is deterministic.
    """
    if timestamp is None:
        timestamp = _xes_time(event.seq_no, _XES_BASE_TIME)
    esc = _xml_attr
    return (
        '<log openxes.version="1.0RC7" xes.features="nested-attributes" '
        f'xes.version="1.0" xmlns="{XES_NS}">\n'
        "\t<trace>\n"
        f'\t\t<string key="concept:name" value="{esc(event.case_id)}" />\n'
        "\t\t<event>\n"
        f'\t\t\t<date key="time:timestamp" value="{esc(timestamp)}" />\n'
        f'\t\t\t<string key="concept:name" value="{esc(event.activity)}" />\n'
        '\t\t\t<string key="lifecycle:transition" value="Task_Execution" />\n'
        "\t\t</event>\n"
        "\t</trace>\n"
        "</log>"
    )


def _xml_attr(value: str) -> str:
    return (
        value.replace("&", "&amp;")
        .replace('"', "&quot;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace("\n", "&#10;")
    )


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _attribute(element: ET.Element, key: str) -> str | None:
    for child in element:
        if child.get("key") == key and _local(child.tag) != "event":
            return child.get("value")
    return None


def decode_xes_fragment(text: str, seq_no: int = 0) -> Event:
    """Decode a one-event XES fragment.

    The caller supplies ``seq_no`` (normally the arrival index); the
    fragment's ``time:timestamp`` is parsed for validation only.
    """
    try:
        root = ET.fromstring(text.strip())
    except ET.ParseError as exc:
        raise DecodeError(f"malformed XML: {exc}", field="xml") from None
    if _local(root.tag) != "log":
        raise DecodeError(f"root element is <{_local(root.tag)}>, expected <log>", field="log")
    traces = [child for child in root if _local(child.tag) == "trace"]
    if len(traces) != 1:
        raise DecodeError(f"expected exactly one trace, found {len(traces)}", field="trace")
    trace = traces[0]
    case_id = _attribute(trace, "concept:name")
    if not case_id:
        raise DecodeError("trace has no concept:name", field="case_id")
    events = [child for child in trace if _local(child.tag) == "event"]
    if not events:
        raise DecodeError("empty trace: no <event> element", field="event")
    if len(events) > 1:
        raise DecodeError(f"multi-event fragment ({len(events)} events)", field="event")
    activity = _attribute(events[0], "concept:name")
    if not activity:
        raise DecodeError("event has no concept:name", field="activity")
    stamp = _attribute(events[0], "time:timestamp")
    if stamp is not None:
        try:
            _dt.datetime.fromisoformat(stamp)
        except ValueError:
            raise DecodeError(f"bad time:timestamp {stamp!r}", field="timestamp") from None
    return Event(seq_no, case_id, activity)


class ObservationPeriod:
    """A bounded, ordered buffer of events.

    ``push`` applies one of two policies once the buffer is full: ``"reset"``
    drops everything before inserting, ``"shift"`` drops only the oldest
    event.
    """

    def __init__(self, capacity: int, events: Iterable[Event] = ()):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._events: deque[Event] = deque()
        for e in events:
            self.push(e, SHIFT)

    def push(self, event: Event, policy: str = SHIFT) -> None:
        if policy not in _POLICIES:
            raise ValueError(f"unknown policy {policy!r}")
        if len(self._events) >= self.capacity:
            if policy == RESET:
                self._events.clear()
            else:
                self._events.popleft()
        self._events.append(event)

    def clear(self) -> None:
        self._events.clear()

    @property
    def events(self) -> tuple[Event, ...]:
        return tuple(self._events)

    def __len__(self) -> int:
        return len(self._events)

    def __iter__(self) -> Iterator[Event]:
        return iter(self._events)

    def __repr__(self) -> str:
        return f"ObservationPeriod(capacity={self.capacity}, size={len(self)})"


def push_bounded(buffer: ObservationPeriod, event: Event, policy: str) -> None:
    buffer.push(event, policy)


def case_time_scope(log: Iterable[Event], case_id: str) -> tuple[int, int]:
    """Return ``(t_start, t_end)`` of ``case_id`` within ``log``."""
    stamps = [e.seq_no for e in log if e.case_id == case_id]
    if not stamps:
        raise KeyError(f"case {case_id!r} not in log")
    return min(stamps), max(stamps)


def read_line_file(path) -> list[Event]:
    """Read a line-codec file, skipping blank lines."""
    with open(path, encoding="utf-8", newline="") as fh:
        return [decode_line(line) for line in fh if line.strip()]


def write_line_file(path, events: Sequence[Event]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for e in events:
            fh.write(encode_line(e))
            fh.write("\n")
