"""Command line entry point: ``streamhm <subcommand> ...``.

Subcommands: ``generate``, ``merge``, ``serve``, ``mine``, ``compare`` and
``bounds``. ``mine`` also accepts ``--config file.json`` whose keys are the
``RunConfig`` field names; explicit flags take precedence over the file.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import fields

from . import bounds as hb
from .events import read_line_file, write_line_file
from .harness import MINER_KINDS, RunConfig, compare, default_output_dir, run
from .net import MergeSpec, StreamSourceConfig, merge_logs, serve_stream
from .synth import StreamPlan, expected_successions, load_spec, parse_spec, trace_distribution, write_stream

log = logging.getLogger("streamhm")


def _segment(text: str):
    path, sep, cases = text.rpartition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"segment must be SPEC.json:CASES, got {text!r}")
    return path, int(cases)


def cmd_generate(args) -> int:
    if args.plan:
        with open(args.plan, encoding="utf-8") as fh:
            doc = json.load(fh)
        segments = [(parse_spec(s["spec"]), int(s["cases"])) for s in doc["segments"]]
        plan = StreamPlan(segments, int(doc.get("max_concurrent", args.concurrent)), int(doc.get("seed", args.seed)))
    else:
        if not args.segment:
            raise ValueError("give --plan or at least one --segment SPEC.json:CASES")
        plan = StreamPlan([(load_spec(p), n) for p, n in args.segment], args.concurrent, args.seed)
    events = write_stream(args.output, plan)
    log.info("wrote %d events to %s", len(events), args.output)
    return 0


def cmd_merge(args) -> int:
    segments = [read_line_file(p) for p in args.logs]
    overlap = args.overlap if len(args.overlap) != 1 else args.overlap[0]
    merged = merge_logs(MergeSpec(segments, overlap))
    write_line_file(args.output, merged)
    log.info("merged %d logs into %d events", len(segments), len(merged))
    return 0


def cmd_serve(args) -> int:
    events = read_line_file(args.log)
    cfg = StreamSourceConfig(args.host, args.port, args.codec, args.delay, args.loop)
    serve_stream(events, cfg, args.clients)
    return 0


_RUN_FLAGS = {f.name for f in fields(RunConfig)}


def cmd_mine(args) -> int:
    values: dict = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            doc = json.load(fh)
        unknown = set(doc) - _RUN_FLAGS
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        values.update(doc)
    for name in _RUN_FLAGS:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    values.setdefault("output_dir", default_output_dir())
    cfg = RunConfig(**values)
    summary = run(cfg)
    print(json.dumps({"events": summary.events, "triggers": summary.triggers, "events_per_sec": summary.events_per_sec, "peak_entries": summary.peak_entries}))
    return 0


def cmd_compare(args) -> int:
    text = compare(args.runs)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_bounds(args) -> int:
    if args.spec:
        dist = trace_distribution(load_spec(args.spec), args.max_repeats)
        expected, xi = expected_successions(dist)
    else:
        a, b = "a", "b"
        args.pair = [a, b]
        expected = {(a, b): args.e_ab, (b, a): args.e_ba}
        xi = {(a, b): args.xi_ab, (b, a): args.xi_ba}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if args.split:
        a, b, c = args.split
        w.writerow(["nc", "epsilon_bc", "epsilon_abc", "lower", "upper"])
    else:
        a, b = args.pair
        w.writerow(["nc", "epsilon", "lower", "upper"])
    for nc in args.nc:
        q = hb.BoundQuery(args.delta, nc, xi, expected)
        try:
            lo, hi = hb.and_bounds(q, a, b, c) if args.split else hb.dependency_bounds(q, a, b)
        except hb.VacuousBoundError:
            lo, hi = float("nan"), float("nan")
        if args.split:
            w.writerow([nc, repr(hb.epsilon_pair(q, b, c)), repr(hb.epsilon_triple(q, a, b, c)), repr(lo), repr(hi)])
        else:
            w.writerow([nc, repr(hb.epsilon_pair(q, a, b)), repr(lo), repr(hi)])
    sys.stdout.write(buf.getvalue())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="streamhm", description="Heuristics Miner variants for event streams.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a synthetic stream from process trees")
    g.add_argument("--plan", help="JSON plan with segments, max_concurrent and seed")
    g.add_argument("--segment", action="append", type=_segment, metavar="SPEC.json:CASES")
    g.add_argument("--concurrent", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_generate)

    m = sub.add_parser("merge", help="concatenate logs, optionally overlapping at the boundaries")
    m.add_argument("logs", nargs="+")
    m.add_argument("--overlap", type=float, nargs="+", default=[0.0])
    m.add_argument("-o", "--output", required=True)
    m.set_defaults(func=cmd_merge)

    s = sub.add_parser("serve", help="replay a log over TCP")
    s.add_argument("log")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=9999)
    s.add_argument("--codec", choices=("line", "xes"), default="line")
    s.add_argument("--delay", type=float, default=0.0, help="seconds between events")
    s.add_argument("--loop", action="store_true")
    s.add_argument("--clients", type=int, default=0, help="exit after serving this many clients (0 = never)")
    s.set_defaults(func=cmd_serve)

    r = sub.add_parser("mine", help="run one miner over a file or a network stream")
    r.add_argument("--config")
    r.add_argument("--miner", choices=MINER_KINDS)
    src = r.add_mutually_exclusive_group()
    src.add_argument("--input", dest="input_path")
    src.add_argument("--connect", dest="endpoint", metavar="HOST:PORT")
    r.add_argument("--codec", choices=("line", "xes"))
    r.add_argument("--out", dest="output_dir")
    r.add_argument("--queue-size", dest="queue_size", type=int)
    r.add_argument("--max-qa", dest="max_qa", type=int)
    r.add_argument("--max-qc", dest="max_qc", type=int)
    r.add_argument("--max-qr", dest="max_qr", type=int)
    r.add_argument("--capacity", type=int)
    r.add_argument("--epsilon", type=float)
    r.add_argument("--alpha", type=float)
    r.add_argument("--step-down", dest="step_down", type=float)
    r.add_argument("--step-up", dest="step_up", type=float)
    r.add_argument("--tolerance", type=float)
    r.add_argument("--mine-every", dest="mine_every", type=int)
    r.add_argument("--window", dest="x", type=int, help="evaluation window size")
    r.add_argument("--dependency", type=float)
    r.add_argument("--and-threshold", dest="and_threshold", type=float)
    r.add_argument("--dot-every", dest="dot_every", type=int)
    r.add_argument("--on-error", dest="on_error", choices=("skip", "abort"))
    r.add_argument("--deterministic", action="store_const", const=True, help="write zero timings")
    r.set_defaults(func=cmd_mine)

    c = sub.add_parser("compare", help="mean/variance of metrics per miner across run directories")
    c.add_argument("runs", nargs="+")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_compare)

    b = sub.add_parser("bounds", help="Hoeffding intervals for the online measures")
    b.add_argument("--delta", type=float, default=0.05)
    b.add_argument("--nc", type=int, nargs="+", default=[100, 1000, 10000])
    b.add_argument("--spec", help="process tree whose trace distribution gives E[rho] and xi")
    b.add_argument("--max-repeats", type=int, default=3)
    b.add_argument("--pair", nargs=2, metavar=("A", "B"))
    b.add_argument("--split", nargs=3, metavar=("A", "B", "C"))
    b.add_argument("--e-ab", type=float, default=0.0)
    b.add_argument("--e-ba", type=float, default=0.0)
    b.add_argument("--xi-ab", type=float, default=1.0)
    b.add_argument("--xi-ba", type=float, default=1.0)
    b.set_defaults(func=cmd_bounds)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "bounds" and args.spec and not (args.pair or args.split):
        parser.error("bounds --spec needs --pair or --split")
    if args.command == "bounds" and not args.spec and args.split:
        parser.error("bounds --split needs --spec")
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"streamhm {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
