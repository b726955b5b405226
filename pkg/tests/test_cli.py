import json

import numpy as np
import pytest

from qdchain.cli import main


def read_csv(path):
    return np.loadtxt(path, delimiter=",", skiprows=1)


class TestTransport:
    def test_optimal_1e_run(self, tmp_path):
        rc = main([
            "transport-1e", "--n", "20", "--profile", "optimal",
            "--tau-max", "6.4", "--samples", "257", "--out", str(tmp_path),
        ])
        assert rc == 0
        data = read_csv(tmp_path / "transport-1e.csv")
        assert data.shape == (257, 22)
        header = (tmp_path / "transport-1e.csv").read_text().splitlines()[0]
        assert header == "tau," + ",".join(f"dot_{j}" for j in range(1, 21)) + ",norm2"
        # periodic end-to-end exchange on a fine grid
        occ_n = data[:, 20]
        tau = data[:, 0]
        assert np.allclose(occ_n, np.sin(tau) ** 38, atol=1e-9)
        meta = json.loads((tmp_path / "transport-1e.meta.json").read_text())
        assert meta["kind"] == "transport-1e"
        assert len(meta["chain"]["couplings"]) == 19

    def test_transport_2e_start_flag(self, tmp_path):
        rc = main([
            "transport-2e", "--n", "6", "--v", "0.75", "--start", "2,3",
            "--tau-max", "4", "--samples", "41", "--out", str(tmp_path),
        ])
        assert rc == 0
        data = read_csv(tmp_path / "transport-2e.csv")
        assert data.shape == (41, 8)
        # two electrons: dots sum to 2 at tau = 0
        assert data[0, 1:7].sum() == pytest.approx(2.0)

    def test_stepping_method(self, tmp_path):
        rc = main([
            "transport-1e", "--n", "5", "--method", "stepping",
            "--tau-max", "3", "--samples", "31", "--out", str(tmp_path),
        ])
        assert rc == 0


class TestMonteCarloCommands:
    def test_mc_1e_outputs(self, tmp_path):
        rc = main([
            "mc-1e", "--n", "3", "--gamma", "0.2", "--trajectories", "300",
            "--tau-max", "30", "--bins", "15", "--seed", "5",
            "--out", str(tmp_path),
        ])
        assert rc == 0
        data = read_csv(tmp_path / "mc-1e.csv")
        assert data.shape == (15, 3)
        assert np.all(data[:, 1] >= 0)
        header = (tmp_path / "mc-1e.csv").read_text().splitlines()[0]
        assert header == "tau_mid,signal,stderr"
        meta = json.loads((tmp_path / "mc-1e.meta.json").read_text())
        assert meta["trajectories"] == 300 and meta["seed"] == 5

    def test_mc_rerun_from_metadata_is_identical(self, tmp_path):
        argv = [
            "mc-2e", "--n", "4", "--gamma", "0.3", "--delta-eps", "0.1",
            "--delta-t", "0.05", "--trajectories", "60", "--tau-max", "20",
            "--bins", "10", "--seed", "12", "--out",
        ]
        assert main(argv + [str(tmp_path / "a")]) == 0
        assert main(argv + [str(tmp_path / "b")]) == 0
        a = (tmp_path / "a" / "mc-2e.csv").read_bytes()
        b = (tmp_path / "b" / "mc-2e.csv").read_bytes()
        assert a == b


class TestEntangleCommand:
    def test_ideal_run(self, tmp_path):
        rc = main([
            "entangle", "--n", "8", "--gamma", "0", "--sample-dt", "0.1",
            "--out", str(tmp_path),
        ])
        assert rc == 0
        data = read_csv(tmp_path / "entangle.csv")
        assert data.shape[1] == 5
        meta = json.loads((tmp_path / "entangle.meta.json").read_text())
        assert meta["fidelity_mean"] == pytest.approx(1.0, abs=1e-6)
        # final row carries the phi3 trace endpoint
        assert data[-1, 4] == pytest.approx(1.0, abs=1e-6)


class TestOracleAndSpectra:
    def test_oracle_check_report(self, tmp_path, capsys):
        rc = main(["oracle-check", "--n", "6", "--tau-max", "10",
                   "--samples", "101", "--out", str(tmp_path)])
        assert rc == 0
        report = json.loads((tmp_path / "oracle-check.json").read_text())
        assert report["uniform_1e_max_deviation"] < 1e-8
        assert report["optimal_1e_max_deviation"] < 1e-8
        assert report["optimal_2e_max_deviation"] < 1e-8

    def test_spectra_listing(self, tmp_path, capsys):
        rc = main(["spectra", "--kind", "optimal-2e", "--n", "20",
                   "--out", str(tmp_path)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "37 eigenvalues" in out
        vals = read_csv(tmp_path / "spectrum-optimal-2e.csv")
        assert len(np.atleast_1d(vals)) == 37


class TestConfigAndErrors:
    def test_config_file(self, tmp_path):
        config = {
            "n": 5, "t0": 1.0, "coupling_profile": "optimal", "gamma": 0.0,
        }
        cfg = tmp_path / "chain.json"
        cfg.write_text(json.dumps(config))
        rc = main(["transport-1e", "--config", str(cfg), "--tau-max", "3",
                   "--samples", "31", "--out", str(tmp_path)])
        assert rc == 0
        meta = json.loads((tmp_path / "transport-1e.meta.json").read_text())
        assert meta["chain"]["n"] == 5

    def test_invalid_config_gives_error_json(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"n": 3, "coupling_profile": "nonsense"}))
        rc = main(["transport-1e", "--config", str(cfg), "--out", str(tmp_path)])
        assert rc == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "ValueError"
        assert "nonsense" in err["message"]

    def test_missing_n_gives_error_json(self, tmp_path, capsys):
        rc = main(["transport-1e", "--out", str(tmp_path)])
        assert rc == 2
        err = json.loads(capsys.readouterr().err)
        assert "required" in err["message"]
