"""
Mining a stream served over TCP
===============================

A server replays a generated log; the harness connects as a client, mines
it with the aging miner and writes metrics and models to a directory.
"""

import tempfile
from pathlib import Path

from streamhm.harness import RunConfig, run
from streamhm.net import StreamServer, StreamSourceConfig
from streamhm.synth import StreamPlan, generate, parse_spec

spec = parse_spec({"seq": ["register", {"and": ["check", "pay"]}, {"xor": ["ship", "cancel"]}, "close"]})
events = generate(StreamPlan([(spec, 300)], max_concurrent=8, seed=4))
out = Path(tempfile.mkdtemp(prefix="streamhm-demo-"))

with StreamServer(events, StreamSourceConfig(codec="xes")) as server:
    host, port = server.address
    summary = run(RunConfig(miner="aging", alpha=0.997, endpoint=f"{host}:{port}", codec="xes", output_dir=str(out)))

print(summary.events, "events,", summary.triggers, "models, peak entries", summary.peak_entries, "of", summary.memory_bound)
print((out / "metrics.csv").read_text().splitlines()[-1])
print(sorted(p.name for p in out.iterdir())[:5])
