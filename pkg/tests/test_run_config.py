"""Tests for rmhd_dg.run_config.RunConfig."""
import json

import pytest

from rmhd_dg.dg.errors import ConfigError
from rmhd_dg.dg.physics import Floors
from rmhd_dg.run_config import CONFIG_TEMPLATE, DEFAULT_OUTPUT_DIR, OUTPUT_DIR_ENV, RunConfig


class TestFromMapping:
    def test_minimal(self):
        cfg = RunConfig.from_mapping({"problem": "rp1"})
        assert cfg.method == "noncentral"
        assert cfg.K == 1
        assert cfg.N is None

    def test_strings_are_coerced(self):
        cfg = RunConfig.from_mapping({"problem": "rotor", "K": "3", "N": "40", "cfl": "0.2",
                                      "floors": "yes", "dump_dual": "off", "Ny": "none"})
        assert cfg.K == 3 and cfg.N == 40
        assert cfg.cfl == pytest.approx(0.2)
        assert cfg.floors is True
        assert cfg.dump_dual is False
        assert cfg.Ny is None

    def test_integral_float_becomes_int(self):
        assert RunConfig.from_mapping({"problem": "rp1", "N": 64.0}).N == 64

    def test_overrides_win(self):
        cfg = RunConfig.from_mapping({"problem": "rp1", "K": "1"}, {"K": "2", "method": "central"})
        assert cfg.K == 2
        assert cfg.method == "central"

    def test_missing_problem(self):
        with pytest.raises(ConfigError, match="problem"):
            RunConfig.from_mapping({"K": 1})

    def test_unknown_keys_are_listed(self):
        with pytest.raises(ConfigError, match="unknown keys courant, degree"):
            RunConfig.from_mapping({"problem": "rp1", "degree": 2, "courant": 0.1})

    @pytest.mark.parametrize("changes", [
        {"problem": "kelvin-helmholtz"},
        {"method": "upwind"},
        {"K": "4"},
        {"K": "0"},
        {"scheme": "rk2"},
        {"limiter": "sometimes"},
        {"lf_alpha": "upwind"},
        {"theta": "0"},
        {"theta": "1.2"},
        {"cfl": "-0.1"},
        {"M": "-1"},
        {"t_end": "0"},
        {"K": "2", "N": "4"},
        {"K": "1", "Ny": "2"},
        {"output_every": "-1"},
        {"workers": "0"},
        {"max_steps": "0"},
        {"rho_floor": "0"},
        {"N": "many"},
        {"floors": "maybe"},
        {"K": ""},
    ])
    def test_invalid_values(self, changes):
        with pytest.raises(ConfigError):
            RunConfig.from_mapping({"problem": "rp1", **changes})

    def test_smallest_resolution_accepted(self):
        assert RunConfig.from_mapping({"problem": "rp1", "K": 3, "N": 7}).N == 7

    def test_config_error_is_a_value_error(self):
        with pytest.raises(ValueError):
            RunConfig.from_mapping({"problem": "rp1", "K": 5})


class TestFromFile:
    def test_key_value_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# rotor run\nproblem=rotor\nmethod=central\nK=2\nN=32\ntheta=0.5\n", encoding="utf-8")
        cfg = RunConfig.from_file(path)
        assert (cfg.problem, cfg.method, cfg.K, cfg.N) == ("rotor", "central", 2, 32)
        assert cfg.theta == pytest.approx(0.5)

    def test_json_file(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"problem": "smooth2d", "K": 1, "N": 10, "floors": False}), encoding="utf-8")
        cfg = RunConfig.from_file(path, {"scheme": "rk4"})
        assert cfg.N == 10
        assert cfg.floors is False
        assert cfg.scheme == "rk4"

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("{problem: rp1", encoding="utf-8")
        with pytest.raises(ConfigError, match="invalid JSON"):
            RunConfig.from_file(path)

    def test_json_must_be_an_object(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigError):
            RunConfig.from_file(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="init"):
            RunConfig.from_file(tmp_path / "absent.cfg")

    def test_errors_name_the_file(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("problem=rp1\nK=4\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="bad.cfg"):
            RunConfig.from_file(path)


class TestTemplate:
    def test_template_loads(self, tmp_path):
        path = RunConfig.create_template(tmp_path / "sub" / "run.cfg")
        assert path.read_text(encoding="utf-8") == CONFIG_TEMPLATE
        cfg = RunConfig.from_file(path)
        assert cfg.problem == "smooth1d"
        assert cfg.scheme == "rk4"

    def test_template_does_not_overwrite(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("problem=rp1\n", encoding="utf-8")
        with pytest.raises(FileExistsError):
            RunConfig.create_template(path)
        assert path.read_text(encoding="utf-8") == "problem=rp1\n"


class TestResolve:
    def test_defaults_from_problem_and_cfl_table(self):
        params = RunConfig(problem="rotor", method="central", K=2).resolve()
        assert params["cells"] == [300, 300]
        assert params["cfl"] == pytest.approx(0.25)
        assert params["theta"] == pytest.approx(0.3)
        assert params["M"] == pytest.approx(500.0)
        assert params["t_end"] == pytest.approx(0.4)
        assert params["quadrature_points"] == 3

    def test_theta_ignored_default_for_noncentral(self):
        assert RunConfig(problem="rotor", K=1).resolve()["theta"] == 1.0

    def test_explicit_values_win(self):
        params = RunConfig(problem="smooth2d", K=1, N=10, cfl=0.05, M=1.0, t_end=0.1).resolve()
        assert params["cells"] == [10, 20]
        assert params["cfl"] == 0.05
        assert params["M"] == 1.0
        assert params["t_end"] == 0.1

    def test_floors_follow_problem(self):
        assert RunConfig(problem="blast").resolve()["floors"] is True
        assert RunConfig(problem="blast", floors=False).floor_values() is None
        assert RunConfig(problem="rp1", floors=True, rho_floor=1e-8).floor_values() == Floors(1e-8, Floors.p)

    def test_run_name(self):
        assert RunConfig(problem="rp1", method="central", K=2, N=100).run_name() == "rp1_central_P2_N100"
        assert RunConfig(problem="rp1").run_name() == "rp1_noncentral_P1_N800"

    def test_output_dir_precedence(self, monkeypatch, tmp_path):
        assert RunConfig(problem="rp1", output_dir="here").resolved_output_dir().name == "here"
        monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "env"))
        assert RunConfig(problem="rp1").resolved_output_dir() == tmp_path / "env"
        monkeypatch.delenv(OUTPUT_DIR_ENV)
        assert str(RunConfig(problem="rp1").resolved_output_dir()) == DEFAULT_OUTPUT_DIR

    def test_with_overrides_validates(self):
        cfg = RunConfig(problem="rp1")
        assert cfg.with_overrides(K=3).K == 3
        with pytest.raises(ConfigError):
            cfg.with_overrides(K=7)
