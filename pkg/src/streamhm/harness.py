"""Experiment driver: run one miner over one stream and compare runs.

A run consumes the input exactly once. At every mining trigger it scores
the fresh model against the last ``x`` events and appends a row to
``metrics.csv``; every ``dot_every`` triggers it also writes
``model_<seq>.dot``. At the end it writes ``model.json`` and
``summary.json``.
"""
from __future__ import annotations

import csv
import io
import json
import os
import queue
import threading
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .evaluation import EvalWindow, MetricSeries, read_metrics_csv, record_sample
from .events import RESET, SHIFT, Event
from .heuristics import Thresholds, export_dot, model_to_json
from .lossy import LossyMiner
from .net import iter_decode, read_stream
from .online import OnlineMiner, WeightPolicy
from .window import WindowMiner, WindowMinerConfig

__all__ = ["MINER_KINDS", "RunConfig", "RunSummary", "compare", "make_miner", "run"]

MINER_KINDS = ("reset", "window", "online", "aging", "self_adapting", "lossy")
ONLINE_KINDS = ("online", "aging", "self_adapting")
OUTPUT_ENV = "STREAMHM_OUTPUT_DIR"

# aging presets used for the stationary-stream experiments
ALPHA_PRESETS = (0.9985, 0.997)


@dataclass
class RunConfig:
    miner: str = "online"
    input_path: str | None = None
    endpoint: str | None = None
    codec: str = "line"
    output_dir: str | None = None
    queue_size: int = 100
    max_qa: int | None = None
    max_qc: int | None = None
    max_qr: int | None = None
    capacity: int = 100
    epsilon: float = 0.01
    alpha: float = ALPHA_PRESETS[0]
    step_down: float = 0.02
    step_up: float = 0.005
    tolerance: float = 0.01
    mine_every: int = 50
    x: int = 200
    dependency: float = 0.9
    and_threshold: float = 0.1
    dot_every: int = 10
    on_error: str = "skip"
    deterministic: bool = False
    pipeline_size: int = 1024

    def validate(self) -> None:
        if self.miner not in MINER_KINDS:
            raise ValueError(f"unknown miner {self.miner!r}; choose from {', '.join(MINER_KINDS)}")
        if (self.input_path is None) == (self.endpoint is None):
            raise ValueError("exactly one of input_path and endpoint is required")
        if self.endpoint is not None:
            _split_endpoint(self.endpoint)
        for name in ("queue_size", "capacity", "mine_every", "x", "dot_every", "pipeline_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.miner == "aging" and not 0.0 <= self.alpha < 1.0:
            raise ValueError("aging factor must lie in [0, 1)")
        if self.miner == "lossy" and not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")

    @property
    def thresholds(self) -> Thresholds:
        return Thresholds(dependency=self.dependency, and_threshold=self.and_threshold)

    def queue_sizes(self) -> tuple[int, int, int]:
        q = self.queue_size
        return (self.max_qa or q, self.max_qc or q, self.max_qr or q)


def _split_endpoint(endpoint: str) -> tuple[str, int]:
    host, sep, port = endpoint.rpartition(":")
    if not sep or not host:
        raise ValueError(f"endpoint must be host:port, got {endpoint!r}")
    try:
        return host, int(port)
    except ValueError:
        raise ValueError(f"bad port in endpoint {endpoint!r}") from None


def make_miner(cfg: RunConfig):
    th = cfg.thresholds
    if cfg.miner in ("reset", "window"):
        policy = RESET if cfg.miner == "reset" else SHIFT
        return WindowMiner(WindowMinerConfig(cfg.capacity, policy, cfg.mine_every, th))
    if cfg.miner == "lossy":
        return LossyMiner(cfg.epsilon, cfg.mine_every, th)
    qa, qc, qr = cfg.queue_sizes()
    if cfg.miner == "online":
        policy = WeightPolicy.stationary()
    elif cfg.miner == "aging":
        policy = WeightPolicy.aging(cfg.alpha)
    else:
        policy = WeightPolicy.self_adapting(1.0, cfg.step_down, cfg.step_up, cfg.tolerance)
    return OnlineMiner(qa, qc, qr, policy, cfg.mine_every, th, window=cfg.x)


@dataclass
class RunSummary:
    miner: str
    events: int = 0
    triggers: int = 0
    elapsed_s: float = 0.0
    events_per_sec: float = 0.0
    mean_micros_per_event: float = 0.0
    peak_entries: int = 0
    memory_bound: int | None = None
    config: dict = field(default_factory=dict)


def _file_events(path: str, codec: str, on_error: str) -> Iterator[Event]:
    with open(path, encoding="utf-8", newline="") as fh:
        yield from iter_decode(fh, codec, on_error)


_DONE = object()


def _pipelined(source: Iterable[Event], size: int) -> Iterator[Event]:
    """Read ``source`` on a thread; a full hand-off queue blocks the reader."""
    handoff: queue.Queue = queue.Queue(maxsize=size)

    def pump():
        try:
            for e in source:
                handoff.put(e)
        except BaseException as exc:  # re-raised on the consumer side
            handoff.put(exc)
        handoff.put(_DONE)

    t = threading.Thread(target=pump, name="stream-reader", daemon=True)
    t.start()
    while True:
        item = handoff.get()
        if item is _DONE:
            break
        if isinstance(item, BaseException):
            raise item
        yield item
    t.join()


def open_source(cfg: RunConfig) -> Iterator[Event]:
    if cfg.input_path is not None:
        return _file_events(cfg.input_path, cfg.codec, cfg.on_error)
    host, port = _split_endpoint(cfg.endpoint)
    return _pipelined(read_stream(host, port, cfg.codec, cfg.on_error), cfg.pipeline_size)


def default_output_dir() -> str:
    return os.environ.get(OUTPUT_ENV, "streamhm-run")


def run(cfg: RunConfig, events: Iterable[Event] | None = None) -> RunSummary:
    """Mine one stream and write the run artifacts.

    ``events`` overrides the configured input, which is convenient in
    tests and notebooks.
    """
    if events is None:
        cfg.validate()
        source = open_source(cfg)
    else:
        source = iter(events)
    out = Path(cfg.output_dir or default_output_dir())
    out.mkdir(parents=True, exist_ok=True)

    miner = make_miner(cfg)
    own_window = getattr(miner, "window", None)
    window = own_window if own_window is not None else EvalWindow(cfg.x)
    bound = None
    if cfg.miner in ONLINE_KINDS:
        bound = sum(cfg.queue_sizes()) + cfg.x

    series = MetricSeries()
    stored = {k: v for k, v in asdict(cfg).items() if k != "output_dir"}
    summary = RunSummary(miner=cfg.miner, memory_bound=bound, config=stored)
    busy = 0.0
    busy_since_sample = 0.0
    since_sample = 0
    peak = 0
    t_start = time.perf_counter()
    clock = time.perf_counter
    for e in source:
        if own_window is None:
            window.push(e)
        t0 = clock()
        model = miner.observe(e)
        dt = clock() - t0
        busy += dt
        busy_since_sample += dt
        since_sample += 1
        summary.events += 1
        retained = miner.entries_retained() + (0 if own_window is not None else len(window))
        if retained > peak:
            peak = retained
            if bound is not None and peak > bound:
                raise RuntimeError(f"memory bound violated: {peak} entries > {bound}")
        if model is None:
            continue
        summary.triggers += 1
        micros = 0.0 if cfg.deterministic else 1e6 * busy_since_sample / since_sample
        record_sample(series, miner, window, e.seq_no, model, micros)
        busy_since_sample = 0.0
        since_sample = 0
        if summary.triggers % cfg.dot_every == 0:
            (out / f"model_{e.seq_no}.dot").write_text(export_dot(model), encoding="utf-8")

    elapsed = time.perf_counter() - t_start
    summary.peak_entries = peak
    if not cfg.deterministic:
        summary.elapsed_s = elapsed
        summary.events_per_sec = summary.events / elapsed if elapsed > 0 else 0.0
        summary.mean_micros_per_event = 1e6 * busy / summary.events if summary.events else 0.0

    series.write_csv(out / "metrics.csv")
    (out / "model.json").write_text(model_to_json(miner.build_model()) + "\n", encoding="utf-8")
    (out / "summary.json").write_text(json.dumps(asdict(summary), sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return summary


COMPARE_HEADER = ("miner", "runs", "samples", "fitness_mean", "fitness_var", "precision_mean", "precision_var")


def compare(run_dirs: Sequence[str | os.PathLike]) -> str:
    """Mean and variance of fitness and precision per miner kind.

    Series are first aligned on the ``seq_no`` values present in every run;
    variance is the population variance of all aligned samples of a miner.
    """
    if not run_dirs:
        raise ValueError("compare needs at least one run directory")
    runs = []
    for d in run_dirs:
        d = Path(d)
        summary = json.loads((d / "summary.json").read_text(encoding="utf-8"))
        series = read_metrics_csv(d / "metrics.csv")
        runs.append((summary["miner"], {s.seq_no: s for s in series.samples}))
    common = set.intersection(*(set(s) for _, s in runs))
    grouped: dict[str, list] = {}
    for kind, samples in runs:
        grouped.setdefault(kind, []).append([samples[k] for k in sorted(common)])

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COMPARE_HEADER)
    for kind in sorted(grouped):
        flat = [s for run_samples in grouped[kind] for s in run_samples]
        fit = np.array([s.fitness for s in flat], dtype=float)
        prec = np.array([s.precision for s in flat], dtype=float)
        if len(flat):
            stats = [fit.mean(), fit.var(), prec.mean(), prec.var()]
        else:
            stats = [float("nan")] * 4
        writer.writerow([kind, len(grouped[kind]), len(flat)] + [repr(float(v)) for v in stats])
    return buf.getvalue()
