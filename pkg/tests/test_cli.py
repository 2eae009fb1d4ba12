import json
import subprocess
import sys

import numpy as np

from isingbridge import cli, spins


def run_cli(*argv):
    return cli.main(list(argv))


def load_report(tmp_path, name):
    return json.loads((tmp_path / name).read_text())


class TestBridgeCheck:
    def test_heatbath_chain_passes(self, tmp_path):
        code = run_cli("bridge-check", "--chain", "6", "--K", "0.5",
                       "--rule", "heatbath", "--out", str(tmp_path))
        assert code == 0
        report = load_report(tmp_path, "bridge_check.json")
        assert all(report["checks"].values())
        assert report["spectrum_deviation"] <= 1e-9
        assert (tmp_path / "spectrum_generator.csv").exists()
        assert (tmp_path / "spectrum_hamiltonian.json").exists()

    def test_metropolis_chain_passes(self, tmp_path):
        assert run_cli("bridge-check", "--chain", "6", "--K", "1.0",
                       "--rule", "metropolis", "--out", str(tmp_path)) == 0

    def test_oversized_model_file_is_usage_error(self, tmp_path):
        model = spins.chain_model(13, [1.0] * 13)
        path = tmp_path / "big.json"
        spins.save_model(model, path)
        code = run_cli("bridge-check", "--model", str(path), "--out", str(tmp_path))
        assert code == 2

    def test_model_and_chain_are_exclusive(self, tmp_path):
        assert run_cli("bridge-check", "--out", str(tmp_path)) == 2

    def test_dump_hamiltonian(self, tmp_path):
        run_cli("bridge-check", "--chain", "4", "--K", "0.3",
                "--dump-hamiltonian", "--out", str(tmp_path))
        text = (tmp_path / "hamiltonian.txt").read_text()
        header, first_row = text.splitlines()[:2]
        assert header.startswith("# n_spins=4 provenance=mapped-from-W")
        assert len(first_row.split()) == 16

    def test_unknown_rule_is_usage_error(self, tmp_path):
        assert run_cli("bridge-check", "--chain", "4", "--rule", "glauber",
                       "--out", str(tmp_path)) == 2


class TestFermionCheck:
    def test_uniform_chain(self, tmp_path):
        code = run_cli("fermion-check", "--chain", "8", "--K", "0.5",
                       "--out", str(tmp_path))
        assert code == 0
        report = load_report(tmp_path, "fermion_check.json")
        assert abs(report["gap_formula"] - (1 - np.tanh(1.0))) <= 1e-12
        assert report["gap_deviation"] <= 1e-9
        lines = (tmp_path / "dispersion.csv").read_text().splitlines()
        assert lines[0] == "sector,p,epsilon"
        assert len(lines) == 17  # header + both 8-momentum grids

    def test_infinite_temperature_gap_is_one(self, tmp_path):
        run_cli("fermion-check", "--chain", "8", "--K", "0", "--out", str(tmp_path))
        report = load_report(tmp_path, "fermion_check.json")
        assert report["gap_measured"] == 1.0

    def test_random_couplings(self, tmp_path):
        code = run_cli("fermion-check", "--chain", "6", "--K", "0.5",
                       "--random-couplings", "--seed", "3", "--out", str(tmp_path))
        assert code == 0
        report = load_report(tmp_path, "fermion_check.json")
        assert report["checks"]["spectrum-plusminus-symmetric"]
        assert (tmp_path / "single_particle.csv").exists()

    def test_odd_chain_is_usage_error(self, tmp_path):
        assert run_cli("fermion-check", "--chain", "7", "--out", str(tmp_path)) == 2


class TestReverse:
    def test_transverse_chain_locality_profile(self, tmp_path):
        code = run_cli("reverse", "--tfield", "6", "--gamma", "0.7",
                       "--out", str(tmp_path))
        assert code == 0
        profile = load_report(tmp_path, "locality_profile.json")
        assert profile["4"] > 1e-6 and profile["6"] > 1e-6
        rows = (tmp_path / "couplings.csv").read_text().splitlines()
        assert rows[0] == "order,sites,coefficient"
        assert len(rows) == 65

    def test_roundtrip_mode(self, tmp_path):
        code = run_cli("reverse", "--chain", "4", "--K", "1.0",
                       "--rule", "heatbath", "--out", str(tmp_path))
        assert code == 0
        report = load_report(tmp_path, "reverse.json")
        assert report["roundtrip_generator_deviation"] <= 1e-10
        assert max(report["condition_residuals"].values()) <= 1e-9


class TestAnneal:
    def test_master_imaginary_consistency(self, tmp_path):
        code = run_cli("anneal", "--chain", "4", "--engines", "master,imaginary",
                       "--schedule", "linear:0,2,2", "--dt", "0.002",
                       "--out", str(tmp_path))
        assert code == 0
        report = load_report(tmp_path, "anneal.json")
        assert report["consistency_deviation"] <= 1e-6
        lines = (tmp_path / "trajectory_master.csv").read_text().splitlines()
        assert lines[0] == "t,beta,ground_probability,overlap,log_norm_decrement"

    def test_wide_state_export(self, tmp_path):
        run_cli("anneal", "--chain", "4", "--engines", "master",
                "--schedule", "linear:0,1,1", "--dt", "0.005",
                "--dump-states", "wide", "--out", str(tmp_path))
        lines = (tmp_path / "states_master.csv").read_text().splitlines()
        assert lines[0].split(",")[:2] == ["time", "p0"]
        assert len(lines[0].split(",")) == 17

    def test_long_state_export(self, tmp_path):
        run_cli("anneal", "--chain", "4", "--engines", "master",
                "--schedule", "linear:0,1,1", "--dt", "0.005", "--samples", "5",
                "--dump-states", "long", "--out", str(tmp_path))
        lines = (tmp_path / "states_master.csv").read_text().splitlines()
        assert lines[0] == "time,state_index,probability"

    def test_bad_engine_is_usage_error(self, tmp_path):
        assert run_cli("anneal", "--chain", "4", "--engines", "classical",
                       "--out", str(tmp_path)) == 2

    def test_bad_schedule_is_usage_error(self, tmp_path):
        assert run_cli("anneal", "--chain", "4", "--schedule", "cubic:1,2",
                       "--out", str(tmp_path)) == 2


class TestMc:
    def test_deterministic_success_fraction(self, tmp_path):
        argv = ("mc", "--chain", "10", "--rule", "heatbath",
                "--schedule", "linear:0,3,1000", "--sweeps", "1000",
                "--seeds", "200", "--seed", "42", "--out", str(tmp_path))
        assert run_cli(*argv) == 0
        first = load_report(tmp_path, "mc.json")["success_fraction"]
        assert run_cli(*argv) == 0
        second = load_report(tmp_path, "mc.json")["success_fraction"]
        assert first == second
        report = load_report(tmp_path, "mc.json")
        assert len(report["per_seed"]) == 200

    def test_min_success_numeric_failure(self, tmp_path):
        code = run_cli("mc", "--chain", "6", "--schedule", "linear:0,3,200",
                       "--sweeps", "200", "--seeds", "20", "--seed", "1",
                       "--min-success", "1.01", "--out", str(tmp_path))
        assert code == 1


class TestConfigAndFormat:
    def test_config_file_preloads_flags(self, tmp_path):
        config = {"chain": 6, "K": 0.5, "rule": "heatbath"}
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps(config))
        code = run_cli("bridge-check", "--config", str(cfg_path),
                       "--out", str(tmp_path))
        assert code == 0
        report = load_report(tmp_path, "bridge_check.json")
        assert report["config"]["chain"] == 6
        assert report["config"]["K"] == 0.5

    def test_explicit_flag_overrides_config(self, tmp_path):
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps({"chain": 6, "K": 0.5}))
        run_cli("bridge-check", "--config", str(cfg_path), "--K", "1.0",
                "--out", str(tmp_path))
        report = load_report(tmp_path, "bridge_check.json")
        assert report["config"]["K"] == 1.0

    def test_csv_report_format(self, tmp_path):
        run_cli("bridge-check", "--chain", "4", "--format", "csv",
                "--out", str(tmp_path))
        lines = (tmp_path / "bridge_check.csv").read_text().splitlines()
        assert lines[0] == "key,value"
        keys = {line.split(",")[0] for line in lines[1:]}
        assert "spectrum_deviation" in keys

    def test_rerun_from_reported_config(self, tmp_path):
        run_cli("bridge-check", "--chain", "4", "--K", "0.7", "--out", str(tmp_path))
        first = load_report(tmp_path, "bridge_check.json")
        cfg_path = tmp_path / "replay.json"
        replay = {k: v for k, v in first["config"].items()
                  if k not in ("command", "func", "config")}
        cfg_path.write_text(json.dumps(replay))
        run_cli("bridge-check", "--config", str(cfg_path), "--out", str(tmp_path))
        second = load_report(tmp_path, "bridge_check.json")
        assert first["spectrum_deviation"] == second["spectrum_deviation"]
        assert first["gap"] == second["gap"]


def test_module_entry_point(tmp_path):
    result = subprocess.run(
        [sys.executable, "-m", "isingbridge.cli", "bridge-check", "--chain", "4",
         "--K", "0.5", "--out", str(tmp_path)],
        capture_output=True, text=True)
    assert result.returncode == 0
    assert (tmp_path / "bridge_check.json").exists()
