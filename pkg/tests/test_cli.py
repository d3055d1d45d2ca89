import json

import numpy as np
import pytest

from bergmanlab import cli
from bergmanlab.toeplitz import read_matrix_csv

ONE = {"family": "standard", "alpha": 0.0}


def run_task(tmp_path, task, cfg, name="out"):
    out = tmp_path / name
    code = cli.run(task, cfg, out)
    return code, json.loads((out / "summary.json").read_text()), out


def check_vocabulary(summary):
    for key, v in summary["verdicts"].items():
        assert v in cli.VERDICTS, key


def test_classify_identity_example(tmp_path):
    code, s, out = run_task(tmp_path, "compose-classify",
                            {"map": {"form": "identity"}, "weight": ONE, "p": 2, "q": 2})
    assert code == cli.EXIT_OK
    assert s["values"]["verdict"] == "bounded, not compact"
    assert s["values"]["profile_limit"] == pytest.approx(1.0, abs=0.1)
    assert s["verdicts"]["bounded"] == "true" and s["verdicts"]["compact"] == "false"
    check_vocabulary(s)
    assert (out / "profile.csv").read_text().startswith("ring,radius,pointwise")
    assert (out / "run.log").exists()


def test_toeplitz_identity_example(tmp_path):
    code, s, out = run_task(tmp_path, "toeplitz-schatten", {"weight": ONE, "dim": 32})
    assert code == cli.EXIT_OK
    assert s["verdicts"]["matrix_is_identity"] == "true"
    assert s["values"]["identity_deviation"] < 1e-8
    assert np.allclose(read_matrix_csv(out / "matrix.csv"), np.eye(32))
    check_vocabulary(s)


def test_compose_schatten_example(tmp_path):
    code, s, _ = run_task(tmp_path, "compose-schatten",
                          {"map": {"form": "affine", "s": 0.5}, "weight": ONE, "p": [2]})
    assert code == cli.EXIT_OK
    assert s["values"]["S2_squared"] == pytest.approx(4 / 3, abs=1e-6)
    assert s["verdicts"]["p=2.criterion_finite"] == "true"
    assert s["verdicts"]["truncation_evidence"] == "evidence-only"


@pytest.mark.parametrize("task, cfg", [
    ("toeplitz-criterion", {"measure": {"form": "atoms", "atoms": [[0.7, 0, 1]]}, "weight": ONE,
                            "p": [1, 2]}),
    ("compose-angular", {"map": {"form": "affine", "s": 0.5, "c": 0.5}, "weight": ONE}),
    ("weights-check", {"weights": [ONE, {"family": "log_minus"}]}),
])
def test_outputs_are_byte_reproducible(tmp_path, task, cfg):
    code1, _, out1 = run_task(tmp_path, task, cfg, "a")
    code2, _, out2 = run_task(tmp_path, task, cfg, "b")
    assert code1 == code2 == cli.EXIT_OK
    tables = sorted(p.name for p in out1.glob("*.csv"))
    assert tables and tables == sorted(p.name for p in out2.glob("*.csv"))
    for name in tables:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


@pytest.mark.parametrize("task, cfg", [
    ("toeplitz-criterion", {"measure": {"form": "atoms", "atoms": [[0.7, 0, 1]]}, "weight": ONE,
                            "alpha": 0.6, "p": [2]}),
    ("toeplitz-schatten", {"weight": ONE, "alpha": 1.0}),
    ("compose-classify", {"map": {"form": "affine", "s": 0.9, "c": 0.2}, "weight": ONE}),
    ("compose-classify", {"weight": ONE}),
    ("compose-essnorm", {"map": {"form": "identity"}, "weight": {"family": "gaussian"}}),
    ("kernel-verify", {"weight": ONE, "p": -1}),
    ("weights-check", {"task": "kernel-verify", "weights": [ONE]}),
])
def test_validation_errors_exit_2(tmp_path, task, cfg):
    code, s, _ = run_task(tmp_path, task, cfg)
    assert code == cli.EXIT_INVALID
    assert s["status"].startswith("invalid")


def test_numerical_failure_exits_3(tmp_path):
    # the kernel series cannot be certified this close to the boundary
    code, s, out = run_task(tmp_path, "kernel-verify",
                            {"weight": ONE, "p": 2, "N": 1, "a_grid": [0.5, 0.999999999]})
    assert code == cli.EXIT_NUMERIC
    assert s["status"].startswith("numerical failure")
    assert "KernelSeries" in (out / "run.log").read_text()


def test_main_argument_handling(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"weights": [ONE]}))
    assert cli.main(["weights-check", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    assert cli.main(["weights-check", "--out", str(tmp_path / "o")]) == cli.EXIT_INVALID
    assert cli.main(["no-such-task"]) == cli.EXIT_INVALID
    assert cli.main(["weights-check", "--config", str(tmp_path / "missing.json")]) == 2


def test_suite_mode(tmp_path, monkeypatch):
    monkeypatch.setenv("LAB_THREADS", "2")
    suite = {"experiments": [
        {"name": "w", "task": "weights-check", "config": {"weights": [ONE]}},
        {"name": "bad", "task": "toeplitz-schatten", "config": {"weight": ONE, "alpha": 2}},
    ]}
    path = tmp_path / "suite.json"
    path.write_text(json.dumps(suite))
    code = cli.main(["suite", "--file", str(path), "--out", str(tmp_path / "s")])
    assert code == cli.EXIT_INVALID
    index = json.loads((tmp_path / "s" / "suite.json").read_text())
    assert index == {"w": 0, "bad": 2}


def test_bundled_suite_names_every_task():
    suite = cli.bundled_suite()
    tasks = {e["task"] for e in suite["experiments"]}
    assert tasks == set(cli.TASKS)
    names = [e["name"] for e in suite["experiments"]]
    assert len(names) == len(set(names))
