import json

import numpy as np
import pytest

from jade import cli


def test_statdim_text(capsys):
    assert cli.main(["statdim", "--rho", "0.1", "--M", "2", "--N", "100"]) == 0
    out = capsys.readouterr().out
    assert "delta_seq=24.48" in out


def test_statdim_table(tmp_path):
    out = tmp_path / "t.csv"
    rc = cli.main(["statdim", "--rho", "0.1", "0.2", "--M", "1", "2", "--mu", "0", "1",
                   "--table", "--output", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "rho,M,mu,tau_star,delta,delta_seq"
    assert len(lines) == 9


def test_predict(capsys):
    assert cli.main(["predict", "--N", "100", "--M", "2", "--S", "10", "--L", "50",
                     "--gamma1", "0.5"]) == 0
    out = capsys.readouterr().out
    assert "L_success=" in out and "worst_case_ratio=" in out and "planned_L=" in out


def test_instance_round_trip(tmp_path):
    Q = np.arange(12.0).reshape(3, 4)
    Y = np.arange(6.0).reshape(3, 2) / 7
    path = tmp_path / "i.txt"
    cli.write_instance(path, Q, Y)
    Q2, Y2 = cli.read_instance(path)
    np.testing.assert_array_equal(Q, Q2)
    np.testing.assert_array_equal(Y, Y2)


@pytest.mark.parametrize("text", ["", "2 4", "1 2 1\n1 2", "1 3 1\n1 2 3 4", "a b c"])
def test_bad_instance(tmp_path, text):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    assert cli.main(["solve", str(path), "--mu", "0.1", "--epsilon", "0.1"]) == 1


def test_solve_exit_codes(tmp_path):
    inst = tmp_path / "inst.txt"
    assert cli.main(["make-instance", "--N", "20", "--M", "2", "--L", "16", "--S", "2",
                     "--sigma2", "0.01", "--output", str(inst)]) == 0
    prefix = tmp_path / "out" / "sol"
    assert cli.main(["solve", str(inst), "--mu", "0.01", "--epsilon", "0.2",
                     "--output", str(prefix)]) == 0
    theta = np.loadtxt(f"{prefix}.theta.csv", delimiter=",", skiprows=1)
    assert theta.shape == (40, 2)
    trace = (tmp_path / "out" / "sol.trace.csv").read_text().splitlines()
    assert trace[0] == "iter,gap,dual_objective,elapsed_ns"
    assert cli.main(["solve", str(inst), "--mu", "0.01", "--epsilon", "0.2", "--max-iter", "2",
                     "--output", str(prefix)]) == 2


def test_experiment_config_errors(tmp_path, capsys):
    assert cli.main(["experiment", "phase_map", "--config", str(tmp_path / "x.json")]) == 1
    assert "cannot read config" in capsys.readouterr().err
    assert cli.main(["experiment", "phase_map"]) == 1
    assert cli.main(["experiment", "noisy_error", "--preset", "fig2"]) == 1


def test_experiment_writes_csv(tmp_path):
    cfg = tmp_path / "fig2.json"
    out = tmp_path / "res" / "fig2.csv"
    cfg.write_text(json.dumps({"experiment": "phase_map", "N": 30, "M": 2, "S_values": [3],
                               "L_values": [10, 20], "trials": 2, "output": str(out)}))
    assert cli.main(["experiment", "phase_map", "--config", str(cfg), "--seed", "4"]) == 0
    text = out.read_text().splitlines()
    assert text[0].startswith("# experiment=phase_map") and "master_seed=4" in text[0]
    assert text[1].startswith("ensemble,mu,S,L,trials")
    assert (tmp_path / "res" / "fig2.trials.csv").exists()
