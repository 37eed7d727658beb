import csv
import json

import numpy as np
import pytest

from minpulse import cli


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestConfigLoading:
    def test_missing_file(self, tmp_path):
        rc = cli.run(["optimize", "--config", str(tmp_path / "nope.json"),
                      "--out", str(tmp_path / "o")])
        assert rc == 2

    def test_invalid_json(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text("{not json")
        rc = cli.run(["optimize", "--config", str(cfg),
                      "--out", str(tmp_path / "o")])
        assert rc == 2
        assert "invalid JSON" in capsys.readouterr().err

    def test_missing_required_key(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({
            "system": {"levels": [2], "freq_ghz": [5.0], "kerr_ghz": [0.0],
                       "rot_freq_ghz": 5.0},
            "gate": {"matrix": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]},
        }))
        rc = cli.run(["optimize", "--config", str(cfg), "--t0", "5",
                      "--out", str(tmp_path / "o")])
        assert rc == 2
        assert "knot_spacing_ns" in capsys.readouterr().err

    def test_non_unitary_gate_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({
            "system": {"levels": [2], "freq_ghz": [5.0], "kerr_ghz": [0.0],
                       "rot_freq_ghz": 5.0},
            "gate": {"matrix": [[[1, 0], [0.3, 0]], [[0, 0], [1, 0]]]},
            "knot_spacing_ns": 0.5,
        }))
        rc = cli.run(["optimize", "--config", str(cfg), "--t0", "5",
                      "--out", str(tmp_path / "o")])
        assert rc == 2
        assert "gate" in capsys.readouterr().err

    def test_dimension_mismatch_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({
            "system": {"levels": [3], "freq_ghz": [5.0], "kerr_ghz": [0.3],
                       "rot_freq_ghz": 5.0},
            "gate": {"matrix": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]},
            "knot_spacing_ns": 0.5,
        }))
        rc = cli.run(["optimize", "--config", str(cfg), "--t0", "5",
                      "--out", str(tmp_path / "o")])
        assert rc == 2

    def test_unknown_case(self, tmp_path):
        rc = cli.run(["optimize", "--case", "BOGUS", "--t0", "5",
                      "--out", str(tmp_path / "o")])
        assert rc == 2

    def test_bad_duration_spec(self, tmp_path, capsys):
        rc = cli.run(["cmax-scan", "--case", "SWAP02",
                      "--durations", "10-20-5",
                      "--out", str(tmp_path / "o")])
        assert rc == 2
        assert "durations" in capsys.readouterr().err


class TestCheck:
    def test_check_passes(self, capsys):
        assert cli.run(["check"]) == 0
        out = capsys.readouterr().out
        assert out.count("PASS") == 5
        assert "FAIL" not in out


@pytest.fixture(scope="module")
def run_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("opt")
    rc = cli.run(["optimize", "--case", "SWAP02", "--t0", "12",
                  "--seed", "4", "--out", str(out)])
    assert rc == 0
    return out


class TestOptimizeArtifacts:
    def test_history_csv(self, run_dir):
        rows = read_csv(run_dir / "history.csv")
        assert rows[0] == ["iter", "objective", "grad_norm", "step_length"]
        assert len(rows) > 2
        values = [float(r[1]) for r in rows[1:]]
        assert values[-1] <= values[0]

    def test_csv_round_trips_floats(self, run_dir):
        rows = read_csv(run_dir / "history.csv")
        summary = json.loads((run_dir / "summary.json").read_text())
        # 17 significant digits: the last objective row equals the total
        assert float(rows[-1][1]) == summary["result"]["total"]

    def test_summary_echoes_config(self, run_dir):
        summary = json.loads((run_dir / "summary.json").read_text())
        cfg = summary["config"]
        assert cfg["case"] == "SWAP02"
        assert cfg["seed"] == 4
        assert cfg["t0_ns"] == 12.0
        assert cfg["bmax_ghz"] == 0.040
        assert "gamma" in cfg["weights"]
        assert summary["result"]["infidelity"] >= 0

    def test_pulse_json(self, run_dir):
        pulse = json.loads((run_dir / "pulse.json").read_text())
        assert len(pulse) == 1  # one qudit
        entry = pulse[0]
        assert entry["duration_ns"] == 12.0
        assert len(entry["alpha_real_rad_per_ns"]) == entry["num_basis"]
        assert len(entry["alpha_imag_rad_per_ns"]) == entry["num_basis"]

    def test_deterministic_given_seed(self, run_dir, tmp_path):
        out2 = tmp_path / "again"
        rc = cli.run(["optimize", "--case", "SWAP02", "--t0", "12",
                      "--seed", "4", "--out", str(out2)])
        assert rc == 0
        p1 = json.loads((run_dir / "pulse.json").read_text())
        p2 = json.loads((out2 / "pulse.json").read_text())
        assert p1 == p2


class TestMinTimeArtifacts:
    def test_min_time_run(self, tmp_path):
        out = tmp_path / "mt"
        rc = cli.run(["min-time", "--case", "SWAP02", "--t0", "15",
                      "--seed", "1", "--out", str(out)])
        assert rc == 0
        rows = read_csv(out / "history.csv")
        assert rows[0][:4] == ["k", "T_ns", "cmax_ghz", "s"]
        summary = json.loads((out / "summary.json").read_text())
        assert summary["result"]["status"] == "converged"
        assert 0.035 <= summary["result"]["final_cmax_ghz"] <= 0.040 + 1e-12
        assert rows[-1][-1] == "in-band"

    def test_requires_t0(self, tmp_path, capsys):
        rc = cli.run(["min-time", "--case", "SWAP02",
                      "--out", str(tmp_path / "o")])
        assert rc == 2
        assert "t0" in capsys.readouterr().err


class TestSweepArtifacts:
    def test_sweep_run(self, tmp_path):
        out = tmp_path / "sw"
        rc = cli.run(["sweep", "--case", "SWAP02", "--durations", "8:14:6",
                      "--restarts", "2", "--seed", "2", "--out", str(out)])
        assert rc == 0
        rows = read_csv(out / "history.csv")
        assert rows[0] == ["T_ns", "restart", "infidelity", "cmax_ghz",
                           "iterations", "termination", "feasible"]
        assert len(rows) == 1 + 2 * 2
        summary = json.loads((out / "summary.json").read_text())
        assert set(summary["result"]["per_duration"]) == {"8.0", "14.0"}

    def test_cmax_scan_run(self, tmp_path):
        out = tmp_path / "scan"
        rc = cli.run(["cmax-scan", "--case", "SWAP02",
                      "--durations", "10:20:10", "--seed", "2",
                      "--out", str(out)])
        assert rc == 0
        rows = read_csv(out / "history.csv")
        assert rows[0] == ["T_ns", "cmax_ghz", "infidelity", "iterations",
                           "target_reached"]
        assert len(rows) == 3
        summary = json.loads((out / "summary.json").read_text())
        assert np.isfinite(summary["result"]["loglog_slope"])


class TestCustomConfigRun:
    def test_full_round_trip(self, tmp_path):
        # a custom 2-level system driven to an X gate
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({
            "system": {"levels": [2], "freq_ghz": [5.0], "kerr_ghz": [0.0],
                       "rot_freq_ghz": 5.0},
            "gate": {"name": "X",
                     "matrix": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]},
            "knot_spacing_ns": 0.5,
            "weights": {"gamma": 0.05, "gamma1": 1e-4, "gamma2": 0.0},
            "seed": 9,
        }))
        out = tmp_path / "x"
        rc = cli.run(["optimize", "--config", str(cfg), "--t0", "8",
                      "--out", str(out)])
        assert rc == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["config"]["weights"]["gamma"] == 0.05
        assert summary["config"]["seed"] == 9
        assert summary["result"]["infidelity"] < 1e-3

    def test_flag_overrides_config(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"case": "SWAP02", "seed": 1,
                                   "t0_ns": 10.0}))
        out = tmp_path / "o"
        rc = cli.run(["optimize", "--config", str(cfg), "--seed", "3",
                      "--gamma", "0.2", "--out", str(out)])
        assert rc == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["config"]["seed"] == 3
        assert summary["config"]["weights"]["gamma"] == 0.2
