import json
import os

import pytest

from weakslit.cli import main
from weakslit.scenarios import (list_scenarios, parse_config, resolve_config,
                                run_scenario)


class TestConfigParsing:
    def test_empty_file_uses_defaults(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text("")
        cfg = parse_config(p, scenario="fig2a")
        assert cfg.x0 == 10.0 and cfg.scenario == "fig2a"

    def test_scenario_required(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text("{}")
        with pytest.raises(ValueError, match="no scenario"):
            parse_config(p)

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match="unknown config key 'bogus'"):
            resolve_config("fig2a", {"bogus": 1})

    def test_invariant_violation_names_field(self):
        with pytest.raises(ValueError, match="d"):
            resolve_config("fig2a", {"d": -1.0})

    def test_zero_coupling_is_valid(self):
        cfg = resolve_config("fig3a", {"g": 0.0})
        assert cfg.g == 0.0

    def test_parse_error_reports_line(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text('{\n  "x0": oops\n}')
        with pytest.raises(ValueError, match="line 2"):
            parse_config(p, scenario="fig2a")

    def test_unknown_scenario_lists_names(self):
        with pytest.raises(ValueError, match="fig2a"):
            resolve_config("nope")

    def test_per_scenario_defaults_applied(self):
        assert resolve_config("fig3b").g == 3.0
        assert resolve_config("fig3b").pointer_y_offset == -2.0
        assert resolve_config("pfilter").p0 == 4.0


class TestListScenarios:
    def test_registry_contains_required_names(self):
        names = set(list_scenarios())
        assert {"single", "fig2a", "fig2b", "fig2c", "fig3a", "fig3b",
                "gscale", "pfilter"} <= names

    def test_cli_list(self, capsys):
        assert main(["list"]) == 0
        out = capsys.readouterr().out
        assert "fig2a" in out and "gscale" in out


class TestRunScenario:
    def test_run_writes_manifest_and_artifacts(self, tmp_path):
        rc = main(["run", "--scenario", "fig2a", "--out", str(tmp_path)])
        assert rc == 0
        manifest = json.loads((tmp_path / "run_manifest.json").read_text())
        assert manifest["scenario"] == "fig2a"
        assert all(c["passed"] for c in manifest["checks"])
        for name, digest in manifest["files"].items():
            assert (tmp_path / name).exists()
            assert len(digest) == 64

    def test_determinism_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["run", "--scenario", "fig2b", "--out", str(a),
                     "--seed", "99"]) == 0
        assert main(["run", "--scenario", "fig2b", "--out", str(b),
                     "--seed", "99"]) == 0
        for name in os.listdir(a):
            if name.endswith(".csv"):
                assert (a / name).read_bytes() == (b / name).read_bytes(), name

    def test_unknown_scenario_exit_code(self, capsys):
        assert main(["run", "--scenario", "nope"]) == 1
        assert "fig2a" in capsys.readouterr().err

    def test_set_override(self, tmp_path):
        rc = main(["run", "--scenario", "single", "--out", str(tmp_path),
                   "--set", "n_bundle=10"])
        assert rc == 0
        manifest = json.loads((tmp_path / "run_manifest.json").read_text())
        assert manifest["config"]["n_bundle"] == 10

    def test_env_var_out_dir(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("WEAKSLIT_OUT", str(tmp_path))
        assert main(["run", "--scenario", "single"]) == 0
        assert (tmp_path / "single" / "run_manifest.json").exists()

    def test_check_mode_writes_nothing(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        assert main(["check", "--scenario", "fig2c"]) == 0
        assert not any(tmp_path.iterdir())

    def test_physics_failure_exit_code(self, tmp_path):
        # an absurd override makes fig2b's classification check fail:
        # with the window far outside both packets nothing couples there
        rc = main(["check", "--scenario", "fig2b", "--set", "w_c=30.0"])
        assert rc == 2


class TestManifestSchema:
    def test_manifest_records_config_and_margins(self, tmp_path):
        cfg = resolve_config("pfilter", {"out_dir": str(tmp_path)})
        manifest = run_scenario(cfg)
        assert manifest.all_passed
        data = json.loads(manifest.to_json())
        assert data["config"]["sigma_sel"] == 1.5
        assert all("detail" in c for c in data["checks"])
        assert data["version"]
