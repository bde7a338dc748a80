import json
from fractions import Fraction

import numpy as np
import pytest

from privclust import cli, runner
from privclust.formats import dump_instance
from privclust.generate import random_instance
from privclust.ledger import VARIANT_IDS

I3 = {"points": ["p0", "p1", "p2", "p3"], "metric": {"euclidean": [[0], [1], [2], [100]]}, "k": 1, "ell": 3, "outliers": 1}


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_solve_private_outliers_on_i3(tmp_path):
    inp = write(tmp_path, "i3.json", I3)
    out, rep, trace = tmp_path / "sol.json", tmp_path / "rep.json", tmp_path / "trace.jsonl"
    code = cli.main(["solve", "--variant", "private-outliers", "--input", inp, "--output", str(out),
                     "--report", str(rep), "--tau-trace", str(trace), "--oracle"])
    assert code == cli.EXIT_OK
    sol = json.loads(out.read_text())
    assert sol["radius"] == "1" and sol["outliers"] == ["p3"]
    report = json.loads(rep.read_text())
    assert report["feasible"] is True and report["oracle"] == "1" and report["ratio"] == "1"
    assert "wall_time" not in report
    records = [json.loads(x) for x in trace.read_text().splitlines()]
    assert records and {"tau", "iteration", "clusters", "outliers", "k2", "result"} <= set(records[0])


def test_timing_is_opt_in(tmp_path):
    inp = write(tmp_path, "i3.json", I3)
    rep = tmp_path / "rep.json"
    cli.main(["solve", "--variant", "private-outliers", "--input", inp, "--output", str(tmp_path / "s"),
              "--report", str(rep), "--timing"])
    assert isinstance(json.loads(rep.read_text())["wall_time"], float)


def test_solve_infeasible_writes_no_solution(tmp_path):
    inp = write(tmp_path, "bad.json", {**I3, "ell": 5})
    out = tmp_path / "sol.json"
    assert cli.main(["solve", "--variant", "private-outliers", "--input", inp, "--output", str(out)]) == cli.EXIT_INFEASIBLE
    assert not out.exists()


def test_solve_size_cap(tmp_path):
    doc = {"points": [f"p{i}" for i in range(50)], "metric": {"euclidean": [[i] for i in range(50)]}, "k": 2, "ell": 2}
    inp = write(tmp_path, "big.json", doc)
    code = cli.main(["solve", "--variant", "private", "--underlying", "exact", "--input", inp,
                     "--output", str(tmp_path / "s")])
    assert code == cli.EXIT_SIZE_CAP


def test_malformed_instance(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{oops")
    assert cli.main(["solve", "--variant", "private", "--input", str(path)]) == cli.EXIT_MALFORMED
    inp = write(tmp_path, "extra.json", {**I3, "colour": "red"})
    assert cli.main(["solve", "--variant", "private", "--input", inp]) == cli.EXIT_MALFORMED


def test_unknown_variant_is_a_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        cli.main(["solve", "--variant", "nope", "--input", "x"])
    assert exc.value.code == cli.EXIT_USAGE


def solve_to(tmp_path, variant="private-outliers", doc=I3):
    inp = write(tmp_path, "inst.json", doc)
    out = tmp_path / "sol.json"
    assert cli.main(["solve", "--variant", variant, "--input", inp, "--output", str(out)]) == 0
    return inp, out


def test_verify_accepts_solver_output(tmp_path):
    inp, out = solve_to(tmp_path)
    verdict = tmp_path / "v.json"
    code = cli.main(["verify", "--variant", "private-outliers", "--input", inp, "--solution", str(out),
                     "--output", str(verdict)])
    assert code == cli.EXIT_OK
    assert json.loads(verdict.read_text()) == {"feasible": True, "violations": []}


def test_verify_catches_a_wrong_radius(tmp_path):
    inp, out = solve_to(tmp_path)
    doc = json.loads(out.read_text())
    doc["radius"] = "1/2"
    bad = write(tmp_path, "bad.json", doc)
    verdict = tmp_path / "v.json"
    code = cli.main(["verify", "--variant", "private-outliers", "--input", inp, "--solution", bad,
                     "--output", str(verdict)])
    assert code == cli.EXIT_VERIFY
    assert "radius" in json.loads(verdict.read_text())["violations"][0]


def test_verify_catches_a_short_cluster(tmp_path):
    inp, out = solve_to(tmp_path)
    doc = json.loads(out.read_text())
    moved = doc["clusters"][0]["members"].pop()
    doc["outliers"].append(moved)
    doc["radius"] = "1"
    bad = write(tmp_path, "bad.json", doc)
    verdict = tmp_path / "v.json"
    code = cli.main(["verify", "--variant", "private-outliers", "--input", inp, "--solution", bad,
                     "--output", str(verdict)])
    assert code == cli.EXIT_VERIFY
    assert any(v.startswith("privacy") for v in json.loads(verdict.read_text())["violations"])


def test_verify_rejects_unknown_ids(tmp_path):
    inp, out = solve_to(tmp_path)
    doc = json.loads(out.read_text())
    doc["clusters"][0]["members"].append("stranger")
    bad = write(tmp_path, "bad.json", doc)
    assert cli.main(["verify", "--variant", "private-outliers", "--input", inp, "--solution", bad]) == cli.EXIT_MALFORMED


def test_oracle_command(tmp_path, capsys):
    inp = write(tmp_path, "i3.json", I3)
    assert cli.main(["oracle", "--variant", "private-outliers", "--input", inp]) == 0
    assert json.loads(capsys.readouterr().out)["optimum"] == "1"


def test_factors_command(capsys):
    assert cli.main(["factors"]) == 0
    text = capsys.readouterr().out
    for value in ("225", "325", "40", "41", "2*gamma+1"):
        assert value in text


def test_bench_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert cli.main(["bench", "--variant", "private", "--trials", "15", "--seed", "4", "--output", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_bench_without_oracle_on_larger_instances(tmp_path):
    out = tmp_path / "b.json"
    code = cli.main(["bench", "--variant", "private", "--trials", "5", "--max-n", "30", "--no-oracle",
                     "--output", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["worst_ratio"] is None


def test_bench_breach_saves_a_replay(tmp_path, monkeypatch):
    monkeypatch.setattr(runner, "declared_factor", lambda *a, **k: Fraction(1, 2))
    replay = tmp_path / "replay"
    code = cli.main(["bench", "--variant", "private", "--trials", "3", "--seed", "2",
                     "--output", str(tmp_path / "b.json"), "--replay-dir", str(replay)])
    assert code == cli.EXIT_BREACH
    files = sorted(replay.iterdir())
    assert files and json.loads(files[0].read_text())["format"] == "privclust-instance"


def test_bench_config_file(tmp_path):
    cfg = write(tmp_path, "cfg.json", {"n_points": [3, 5], "k": [1, 2], "ell": [1, 2]})
    assert cli.main(["bench", "--variant", "private", "--trials", "4", "--config", cfg,
                     "--output", str(tmp_path / "b.json")]) == 0
    bad = write(tmp_path, "bad.json", {"n_pointz": [3, 5]})
    assert cli.main(["bench", "--variant", "private", "--config", bad]) == cli.EXIT_MALFORMED


@pytest.mark.parametrize("variant", sorted(VARIANT_IDS))
def test_solve_then_verify_for_every_variant(tmp_path, variant):
    cfg = runner.BENCH_CONFIGS[variant]
    checked = 0
    for seed in range(6):
        inst = random_instance(np.random.default_rng([11, seed]), cfg)
        inp = tmp_path / f"i{seed}.json"
        inp.write_text(dump_instance(inst))
        out = tmp_path / f"s{seed}.json"
        code = cli.main(["solve", "--variant", variant, "--input", str(inp), "--output", str(out)])
        if code == cli.EXIT_INFEASIBLE:
            continue
        assert code == 0
        again = tmp_path / f"t{seed}.json"
        cli.main(["solve", "--variant", variant, "--input", str(inp), "--output", str(again)])
        assert out.read_bytes() == again.read_bytes()
        assert cli.main(["verify", "--variant", variant, "--input", str(inp), "--solution", str(out),
                         "--output", str(tmp_path / "v.json")]) == 0
        checked += 1
    assert checked


def test_module_entry_point():
    import subprocess
    import sys

    got = subprocess.run([sys.executable, "-m", "privclust.cli", "factors"], capture_output=True, text=True)
    assert got.returncode == 0 and "strongly-private" in got.stdout
