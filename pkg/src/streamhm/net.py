"""Network stream source and client, plus the log merger.

The transport is a plain TCP stream. With the ``line`` codec each event is
one newline-terminated line; with the ``xes`` codec each event is a
one-event XES document followed by a blank line. Every client that
connects receives the whole log from the start, in log order.
"""
from __future__ import annotations

import codecs
import logging
import math
import socket
import socketserver
import threading
import time
import warnings
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .events import DecodeError, Event, decode_line, decode_xes_fragment, encode_line, encode_xes_fragment

__all__ = [
    "MergeSpec",
    "StreamDecodeWarning",
    "StreamServer",
    "StreamSourceConfig",
    "encode_stream",
    "iter_decode",
    "merge_logs",
    "read_stream",
    "serve_stream",
]

log = logging.getLogger(__name__)

CODECS = ("line", "xes")


class StreamDecodeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class StreamSourceConfig:
    host: str = "127.0.0.1"
    port: int = 0
    codec: str = "line"
    inter_event_delay: float = 0.0
    loop: bool = False

    def __post_init__(self):
        if self.codec not in CODECS:
            raise ValueError(f"unknown codec {self.codec!r}")
        if self.inter_event_delay < 0:
            raise ValueError("inter_event_delay must be >= 0")


def encode_record(event: Event, codec: str) -> bytes:
    if codec == "line":
        return (encode_line(event) + "\n").encode("utf-8")
    return (encode_xes_fragment(event) + "\n\n").encode("utf-8")


def encode_stream(events: Iterable[Event], codec: str = "line") -> bytes:
    return b"".join(encode_record(e, codec) for e in events)


class _Handler(socketserver.BaseRequestHandler):
    def handle(self):
        srv: StreamServer = self.server.owner  # type: ignore[attr-defined]
        cfg = srv.config
        sent = 0
        try:
            while True:
                for i, e in enumerate(srv.events):
                    if srv.stopping.is_set():
                        return
                    if cfg.inter_event_delay and (i or sent):
                        time.sleep(cfg.inter_event_delay)
                    if cfg.loop and sent >= len(srv.events):
                        e = Event(sent, e.case_id, e.activity)
                    self.request.sendall(encode_record(e, cfg.codec))
                    sent += 1
                if not cfg.loop:
                    break
        except OSError as exc:
            log.info("client %s dropped: %s", self.client_address, exc)
        finally:
            srv._client_done()


class _TCPServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


class StreamServer:
    """Replays ``events`` to every client that connects.

    Use as a context manager or call :meth:`start` / :meth:`stop`.
    ``max_clients`` makes :meth:`wait` return once that many clients have
    been served in full.
    """

    def __init__(self, events: Sequence[Event], config: StreamSourceConfig | None = None, max_clients: int = 0):
        self.events = list(events)
        self.config = config or StreamSourceConfig()
        self.max_clients = max_clients
        self.stopping = threading.Event()
        self._finished = threading.Condition()
        self._served = 0
        self._server = _TCPServer((self.config.host, self.config.port), _Handler)
        self._server.owner = self
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        host, port = self._server.server_address[:2]
        return host, port

    def _client_done(self):
        with self._finished:
            self._served += 1
            self._finished.notify_all()

    def start(self) -> "StreamServer":
        self._thread = threading.Thread(target=self._server.serve_forever, name="stream-server", daemon=True)
        self._thread.start()
        return self

    def wait(self, timeout: float | None = None) -> bool:
        with self._finished:
            return self._finished.wait_for(lambda: self.max_clients and self._served >= self.max_clients, timeout)

    def stop(self) -> None:
        self.stopping.set()
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()


def serve_stream(events: Sequence[Event], config: StreamSourceConfig | None = None, max_clients: int = 0) -> None:
    """Serve ``events`` until ``max_clients`` clients have been served.

    With ``max_clients=0`` this blocks until interrupted.
    """
    server = StreamServer(events, config, max_clients)
    host, port = server.address
    log.info("serving %d events on %s:%d", len(server.events), host, port)
    server.start()
    try:
        if max_clients:
            server.wait()
        else:
            while True:
                time.sleep(3600)
    finally:
        server.stop()


def _records(chunks: Iterable[str], codec: str) -> Iterator[str]:
    buf = ""
    sep = "\n" if codec == "line" else "\n\n"
    for chunk in chunks:
        buf += chunk.replace("\r\n", "\n")
        while True:
            idx = buf.find(sep)
            if idx < 0:
                break
            rec, buf = buf[:idx], buf[idx + len(sep) :]
            if rec.strip():
                yield rec
    if buf.strip():
        yield buf


def iter_decode(chunks: Iterable[str], codec: str = "line", on_error: str = "skip") -> Iterator[Event]:
    """Decode text chunks into events numbered by arrival.

    ``on_error="skip"`` emits a :class:`StreamDecodeWarning` and drops the
    record; ``"abort"`` re-raises the :class:`DecodeError`.
    """
    if codec not in CODECS:
        raise ValueError(f"unknown codec {codec!r}")
    if on_error not in ("skip", "abort"):
        raise ValueError("on_error must be 'skip' or 'abort'")
    seq = 0
    for rec in _records(chunks, codec):
        try:
            if codec == "line":
                e = decode_line(rec)
                e = Event(seq, e.case_id, e.activity)
            else:
                e = decode_xes_fragment(rec, seq)
        except DecodeError as exc:
            if on_error == "abort":
                raise
            warnings.warn(f"skipping undecodable record ({exc})", StreamDecodeWarning, stacklevel=2)
            continue
        seq += 1
        yield e


def _socket_chunks(sock: socket.socket, size: int = 65536) -> Iterator[str]:
    decoder = codecs.getincrementaldecoder("utf-8")()
    while True:
        data = sock.recv(size)
        if not data:
            tail = decoder.decode(b"", final=True)
            if tail:
                yield tail
            return
        yield decoder.decode(data)


def read_stream(host: str, port: int, codec: str = "line", on_error: str = "skip", timeout: float | None = 10.0) -> Iterator[Event]:
    """Connect to a stream source and yield its events as they arrive."""
    sock = socket.create_connection((host, port), timeout=timeout)
    try:
        yield from iter_decode(_socket_chunks(sock), codec, on_error)
    finally:
        sock.close()


@dataclass(frozen=True)
class MergeSpec:
    segments: Sequence[Sequence[Event]]
    overlap: Sequence[float] | float = 0.0

    def __post_init__(self):
        if not self.segments:
            raise ValueError("merge needs at least one segment")
        for p in self.overlaps():
            if not 0.0 <= p < 1.0:
                raise ValueError("overlap fractions must lie in [0, 1)")

    def overlaps(self) -> list[float]:
        n = max(len(self.segments) - 1, 0)
        if isinstance(self.overlap, (int, float)):
            return [float(self.overlap)] * n
        ov = [float(p) for p in self.overlap]
        if len(ov) != n:
            raise ValueError(f"expected {n} overlap fractions, got {len(ov)}")
        return ov


def _fraction(p: float, n: int) -> int:
    return min(n, math.floor(p * n + 0.5))


def merge_logs(spec: MergeSpec) -> list[Event]:
    """Concatenate segments, optionally interleaving each boundary.

    With overlap ``p`` the last ``p`` fraction of segment ``k`` is
    interleaved round-robin with the first ``p`` fraction of segment
    ``k + 1``. Case ids that collide with an earlier segment are renamed,
    and sequence numbers are reassigned from 0.
    """
    used: set[str] = set()
    renamed: list[list[Event]] = []
    for k, seg in enumerate(spec.segments):
        mapping: dict[str, str] = {}
        for e in seg:
            if e.case_id not in mapping:
                new = e.case_id
                n = k
                while new in used:
                    new = f"{e.case_id}~{n}"
                    n += 1
                mapping[e.case_id] = new
        used.update(mapping.values())
        ordered = sorted(seg, key=lambda ev: ev.seq_no)
        renamed.append([Event(e.seq_no, mapping[e.case_id], e.activity) for e in ordered])

    merged = list(renamed[0])
    for p, (prev, nxt) in zip(spec.overlaps(), zip(renamed, renamed[1:])):
        n_tail = min(_fraction(p, len(prev)), len(merged))
        n_head = _fraction(p, len(nxt))
        tail = merged[len(merged) - n_tail :]
        head = nxt[:n_head]
        mixed = []
        for i in range(max(len(tail), len(head))):
            if i < len(tail):
                mixed.append(tail[i])
            if i < len(head):
                mixed.append(head[i])
        merged = merged[: len(merged) - n_tail] + mixed + nxt[n_head:]
    return [Event(i, e.case_id, e.activity) for i, e in enumerate(merged)]
