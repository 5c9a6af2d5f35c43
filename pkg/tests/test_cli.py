import json
import subprocess
import sys

import pytest

from gbsclique.cli import EXIT_CAP, EXIT_CONFIG, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_perm_matrix(capsys):
    code, out, _ = run(capsys, "perm", "--matrix", "110;011;101")
    assert code == 0 and json.loads(out)["permanent"] == 2


def test_gen_then_weights_and_detect(tmp_path, capsys):
    code, out, _ = run(capsys, "gen", "--n", "8", "--k", "3", "--seed", "4", "--out", str(tmp_path / "g"))
    assert code == 0
    path = out.strip()
    assert path.endswith("g.gen.json")
    assert len(json.load(open(path))["a0"]) == 3
    code, out, _ = run(capsys, "weights", "--graph", path, "--m", "2")
    assert code == 0 and out.splitlines()[0] == "node,side,value,stderr,method,samples"
    assert len(out.splitlines()) == 9
    code, out, _ = run(capsys, "detect", "--graph", path, "--m", "2", "--t", "200", "--seed", "1")
    doc = json.loads(out)
    assert code == 0 and doc["t_used"] == 200 and len(doc["z_left"]) == 8


def test_sample_and_theory(capsys):
    code, out, _ = run(capsys, "sample", "--n", "8", "--m", "2", "--t", "5", "--seed", "2")
    assert code == 0 and out.splitlines()[0] == "trial,a_indices,b_indices" and len(out.splitlines()) == 6
    code, out, _ = run(capsys, "theory", "--n", "100", "--m", "5", "--k", "10")
    assert code == 0 and abs(json.loads(out)["weight_bias"] - 0.543656) < 1e-6


def test_experiment_to_files(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"experiment": "haf_moment", "n": [2], "p": [0.5], "trials": 500}))
    for fmt in ("csv", "json"):
        code, out, _ = run(capsys, "experiment", "haf_moment", "--config", str(cfg), "--seed", "3",
                           "--format", fmt, "--out", str(tmp_path / "r"))
        assert code == 0 and out.strip().endswith(f"r.haf_moment.{fmt}")
    doc = json.loads((tmp_path / "r.haf_moment.json").read_text())
    assert doc["config"]["seed"] == 3


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"experiment": "lognormal", "foo": 1}')
    code, _, err = run(capsys, "experiment", "lognormal", "--config", str(bad))
    assert code == EXIT_CONFIG and "foo" in err
    bad.write_text("{oops")
    assert run(capsys, "experiment", "lognormal", "--config", str(bad))[0] == EXIT_CONFIG
    assert run(capsys, "weights", "--n", "5", "--m", "6")[0] == EXIT_CONFIG
    assert run(capsys, "gen", "--n", "5", "--seed", str(2**64))[0] == EXIT_CONFIG
    assert run(capsys, "sample", "--n", "30", "--m", "8", "--t", "1")[0] == EXIT_CAP


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gbsclique", "perm", "--matrix", "11;11"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["permanent"] == 2
    with pytest.raises(subprocess.CalledProcessError) as exc:
        subprocess.run([sys.executable, "-m", "gbsclique", "experiment", "lognormal", "--config", "/nonexistent"],
                       capture_output=True, text=True, check=True)
    assert exc.value.returncode == EXIT_CONFIG
