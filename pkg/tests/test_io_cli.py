import json

import numpy as np
import pytest

from slowsol.cli import main
from slowsol.core import MediumProfile, make_detuning_distribution
from slowsol.dynamics import propagate
from slowsol.errors import SlowsolError
from slowsol.io import config_hash, load_history, save_history, write_csv
from slowsol.scenarios import apply_overrides, default_config, merge_config

SHARP = make_detuning_distribution("sharp")


def small_history():
    tau = np.linspace(0.0, 5.0, 41)
    launch_p = 0.5 * np.ones_like(tau, dtype=complex)
    launch_m = 0.01j * np.ones_like(tau, dtype=complex)
    med = MediumProfile.uniform(10.0, 0.2)
    return propagate(launch_p, launch_m, tau, med, SHARP, 0.2, 20,
                     checkpoint_stride=5, norm_tol=1e-6)


class TestConfigHash:
    def test_order_invariant(self):
        assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})

    def test_value_sensitive(self):
        assert config_hash({"a": 1}) != config_hash({"a": 2})

    def test_format(self):
        h = config_hash({"a": 1})
        assert len(h) == 16
        int(h, 16)


class TestCsv:
    def test_deterministic_bytes(self, tmp_path):
        cols = {"x": np.linspace(0, 1, 7), "y": np.sin(np.linspace(0, 1, 7))}
        header = {"config": "deadbeef"}
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(p1, cols, header)
        write_csv(p2, cols, header)
        assert p1.read_bytes() == p2.read_bytes()
        text = p1.read_text().splitlines()
        assert text[0] == "# config=deadbeef"
        assert text[1] == "x,y"

    def test_unequal_columns_rejected(self, tmp_path):
        with pytest.raises(SlowsolError):
            write_csv(tmp_path / "bad.csv", {"x": [1.0, 2.0], "y": [1.0]})


class TestHistoryRoundTrip:
    def test_round_trip_exact(self, tmp_path):
        res = small_history()
        path = tmp_path / "hist.bin"
        save_history(path, res, SHARP)
        back, weights = load_history(path)
        np.testing.assert_array_equal(back.fields.tau, res.fields.tau)
        np.testing.assert_array_equal(back.fields.zeta, res.fields.zeta)
        np.testing.assert_array_equal(back.fields.omega_p, res.fields.omega_p)
        np.testing.assert_array_equal(back.fields.omega_m, res.fields.omega_m)
        np.testing.assert_array_equal(back.atoms.psi, res.atoms.psi)
        np.testing.assert_array_equal(weights, SHARP.weights)

    def test_truncated_file_rejected(self, tmp_path):
        res = small_history()
        path = tmp_path / "hist.bin"
        save_history(path, res, SHARP)
        data = path.read_bytes()
        path.write_bytes(data[: len(data) // 2])
        with pytest.raises(SlowsolError):
            load_history(path)

    def test_wrong_magic_rejected(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"NOTAHIST" + b"\x00" * 64)
        with pytest.raises(SlowsolError):
            load_history(path)


class TestConfigHandling:
    def test_defaults_are_copies(self):
        a = default_config("figure1")
        a["modulus_mhz"] = -1
        assert default_config("figure1")["modulus_mhz"] != -1

    def test_unknown_scenario(self):
        with pytest.raises(SlowsolError):
            default_config("warp")

    def test_merge_is_recursive(self):
        base = {"a": {"x": 1, "y": 2}, "b": 3}
        out = merge_config(base, {"a": {"y": 5}})
        assert out == {"a": {"x": 1, "y": 5}, "b": 3}
        assert base["a"]["y"] == 2

    def test_overrides_parse_json(self):
        cfg = apply_overrides({"a": {"x": 1}, "flag": False}, [
            "a.x=2.5", "flag=true", "name=plain-string",
        ])
        assert cfg["a"]["x"] == 2.5
        assert cfg["flag"] is True
        assert cfg["name"] == "plain-string"

    def test_malformed_override_rejected(self):
        with pytest.raises(SlowsolError):
            apply_overrides({}, ["no-equals-sign"])


class TestCli:
    def test_figure1_passes(self, tmp_path, capsys):
        code = main([
            "figure1", "--out", str(tmp_path), "--set", "n_points=801",
        ])
        assert code == 0
        report = json.loads((tmp_path / "figure1_report.json").read_text())
        assert report["passed"] is True
        assert len(report["config_hash"]) == 16
        assert (tmp_path / "figure1_strip.csv").exists()
        printed = json.loads(capsys.readouterr().out)
        assert printed["passed"] is True

    def test_set_override_lands_in_hash(self, tmp_path, capsys):
        code_a = main(["feasibility", "--out", str(tmp_path / "a")])
        code_b = main([
            "feasibility", "--out", str(tmp_path / "b"),
            "--set", "distance_m=5e-3",
        ])
        assert code_a == 0 and code_b == 0
        rep_a = json.loads((tmp_path / "a" / "feasibility_report.json").read_text())
        rep_b = json.loads((tmp_path / "b" / "feasibility_report.json").read_text())
        assert rep_a["config_hash"] != rep_b["config_hash"]

    def test_json_format_skips_csv(self, tmp_path, capsys):
        code = main([
            "figure1", "--out", str(tmp_path), "--format", "json",
            "--set", "n_points=801",
        ])
        assert code == 0
        assert not (tmp_path / "figure1_strip.csv").exists()

    def test_error_exit_code(self, tmp_path, capsys):
        code = main([
            "figure1", "--out", str(tmp_path),
            "--set", "modulus_mhz=0",
        ])
        assert code == 2
