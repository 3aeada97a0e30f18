import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from streamhm.cli import main
from streamhm.evaluation import read_metrics_csv
from streamhm.events import write_line_file
from streamhm.harness import MINER_KINDS, RunConfig, compare, make_miner, run
from streamhm.net import StreamServer
from streamhm.synth import StreamPlan, generate, parse_spec

SPEC = {"seq": ["A", {"xor": ["B", "C"]}, {"and": ["D", "E"]}, "F"]}


@pytest.fixture(scope="module")
def log_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "log.txt"
    events = generate(StreamPlan([(parse_spec(SPEC), 120)], 4, 0))
    write_line_file(path, events)
    return path, events


@pytest.mark.parametrize("kind", MINER_KINDS)
def test_rows_per_trigger(kind, log_file, tmp_path):
    path, events = log_file
    summary = run(RunConfig(miner=kind, input_path=str(path), output_dir=str(tmp_path)))
    series = read_metrics_csv(tmp_path / "metrics.csv")
    assert len(series) == len(events) // 50 == summary.triggers
    assert series.samples[0].seq_no == 49
    assert (tmp_path / "model.json").exists()
    assert len(list(tmp_path.glob("model_*.dot"))) == summary.triggers // 10
    if summary.memory_bound is not None:
        assert summary.peak_entries <= summary.memory_bound


def test_deterministic_outputs(log_file, tmp_path):
    path, _ = log_file
    outs = []
    for name in ("a", "b"):
        cfg = RunConfig(miner="self_adapting", input_path=str(path), output_dir=str(tmp_path / name), deterministic=True)
        run(cfg)
        outs.append({p.name: p.read_bytes() for p in sorted((tmp_path / name).iterdir())})
    assert outs[0] == outs[1]


def test_config_validation():
    for kwargs in ({"miner": "nope", "input_path": "x"}, {}, {"input_path": "x", "endpoint": "h:1"}, {"endpoint": "nohost"}, {"input_path": "x", "x": 0}):
        with pytest.raises(ValueError):
            RunConfig(**kwargs).validate()


def test_make_miner_kinds():
    for kind in MINER_KINDS:
        assert make_miner(RunConfig(miner=kind)).kind == kind


def test_run_over_network(log_file, tmp_path):
    _, events = log_file
    with StreamServer(events) as srv:
        host, port = srv.address
        summary = run(RunConfig(miner="online", endpoint=f"{host}:{port}", output_dir=str(tmp_path)))
    assert summary.events == len(events)


def _fake_run(d, miner, fitness, precision):
    d.mkdir()
    (d / "summary.json").write_text(json.dumps({"miner": miner}))
    rows = ["seq_no,fitness,precision,alpha,entries,micros_per_event"]
    rows += [f"{49 + 50 * i},{f},{p},1.0,0,0.0" for i, (f, p) in enumerate(zip(fitness, precision))]
    (d / "metrics.csv").write_text("\n".join(rows) + "\n")


def _parse(text):
    return {r["miner"]: r for r in csv.DictReader(io.StringIO(text))}


def test_compare_single_and_identical(tmp_path):
    _fake_run(tmp_path / "r1", "aging", [0.5, 1.0], [1.0, 0.5])
    _fake_run(tmp_path / "r2", "aging", [0.5, 1.0], [1.0, 0.5])
    one = _parse(compare([tmp_path / "r1"]))["aging"]
    assert float(one["fitness_mean"]) == 0.75 and float(one["precision_mean"]) == 0.75
    two = _parse(compare([tmp_path / "r1", tmp_path / "r2"]))["aging"]
    assert int(two["runs"]) == 2 and int(two["samples"]) == 4
    # the same run twice: across-run spread is zero, pooled variance unchanged
    assert float(two["fitness_var"]) == float(one["fitness_var"])


def test_compare_statistics(tmp_path):
    rng = np.random.default_rng(0)
    data = {}
    dirs = []
    for k in range(5):
        kind = "online" if k % 2 else "lossy"
        f, p = rng.random(6).round(4), rng.random(6).round(4)
        _fake_run(tmp_path / f"r{k}", kind, f, p)
        data.setdefault(kind, []).append((f, p))
        dirs.append(tmp_path / f"r{k}")
    got = _parse(compare(dirs))
    for kind, runs in data.items():
        fit = [x for f, _ in runs for x in f]
        prec = [x for _, p in runs for x in p]
        mean = sum(fit) / len(fit)
        var = sum((x - mean) ** 2 for x in fit) / len(fit)
        pm = sum(prec) / len(prec)
        pv = sum((x - pm) ** 2 for x in prec) / len(prec)
        row = got[kind]
        assert float(row["fitness_mean"]) == pytest.approx(mean, abs=1e-12)
        assert float(row["fitness_var"]) == pytest.approx(var, abs=1e-12)
        assert float(row["precision_mean"]) == pytest.approx(pm, abs=1e-12)
        assert float(row["precision_var"]) == pytest.approx(pv, abs=1e-12)


def test_compare_needs_runs():
    with pytest.raises(ValueError):
        compare([])


def test_cli_generate_and_mine(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps(SPEC))
    log = tmp_path / "log.txt"
    assert main(["generate", "--segment", f"{spec}:50", "--concurrent", "3", "--seed", "1", "-o", str(log)]) == 0
    assert main(["mine", "--miner", "lossy", "--input", str(log), "--out", str(tmp_path / "run"), "--epsilon", "0.05"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["events"] == len(log.read_text().splitlines())
    summary = json.loads((tmp_path / "run" / "summary.json").read_text())
    assert summary["config"]["epsilon"] == 0.05


def test_cli_config_file_and_override(tmp_path, log_file):
    path, _ = log_file
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"miner": "aging", "alpha": 0.99, "input_path": str(path)}))
    assert main(["mine", "--config", str(cfg), "--alpha", "0.997", "--out", str(tmp_path / "o")]) == 0
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert summary["miner"] == "aging" and summary["config"]["alpha"] == 0.997
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["mine", "--config", str(cfg)]) == 2


def test_cli_merge(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    a.write_text("0,c1,A\n1,c1,B\n")
    b.write_text("0,c1,X\n1,c1,Y\n")
    assert main(["merge", str(a), str(b), "--overlap", "0.5", "-o", str(tmp_path / "m.txt")]) == 0
    assert (tmp_path / "m.txt").read_text() == "0,c1,A\n1,c1,B\n2,c1~1,X\n3,c1~1,Y\n"


def test_cli_bounds(capsys, tmp_path):
    assert main(["bounds", "--nc", "1000", "--e-ab", "0.9", "--e-ba", "0.1"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert float(rows[0]["epsilon"]) == pytest.approx(0.085894, abs=1e-6)
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"seq": ["A", {"and": ["B", "C"]}]}))
    assert main(["bounds", "--spec", str(spec), "--split", "A", "B", "C", "--nc", "100", "400"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert float(rows[0]["epsilon_bc"]) == pytest.approx(2 * float(rows[1]["epsilon_bc"]))


def test_cli_compare(tmp_path, log_file, capsys):
    path, _ = log_file
    for k in range(2):
        run(RunConfig(miner="online", input_path=str(path), output_dir=str(tmp_path / f"r{k}"), deterministic=True))
    out = tmp_path / "cmp.csv"
    assert main(["compare", str(tmp_path / "r0"), str(tmp_path / "r1"), "-o", str(out)]) == 0
    assert out.read_text().startswith("miner,runs,samples")


def test_cli_bad_port_exits_nonzero(tmp_path):
    with socket_free_port() as port:
        pass
    code = main(["mine", "--miner", "online", "--connect", f"127.0.0.1:{port}", "--out", str(tmp_path)])
    assert code != 0
    assert main(["mine", "--miner", "online", "--connect", "127.0.0.1:notaport", "--out", str(tmp_path)]) == 2


def test_cli_missing_input(tmp_path):
    assert main(["mine", "--input", str(tmp_path / "missing.txt"), "--out", str(tmp_path)]) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "streamhm", "bounds", "--nc", "1000"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("nc,epsilon")


class socket_free_port:
    def __enter__(self):
        import socket

        self.s = socket.socket()
        self.s.bind(("127.0.0.1", 0))
        return self.s.getsockname()[1]

    def __exit__(self, *exc):
        self.s.close()
