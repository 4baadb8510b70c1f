import json

import numpy as np
import pytest

from netopinion.cli import main as cli_main
from netopinion.experiment import (
    ConfigError,
    build_initial_field,
    load_config,
    preset_config,
    run_experiment,
)
from netopinion.grids import ConnectivityRange, OpinionGrid


class TestPresets:
    def test_test1_table_values(self):
        cfg = preset_config("test1", v_r=1.0, v_a=1.0)
        assert cfg.sigma2 == 5e-2
        assert cfg.sigma_f2 == 6e-2
        assert cfg.c_max == 250
        assert cfg.v_r == 1.0 and cfg.v_a == 1.0
        assert cfg.gamma0 == 30.0
        assert cfg.alpha == 0.1 and cfg.beta == 0.0
        assert cfg.n_grid == 80

    def test_test3_table_values(self):
        cfg = preset_config("test3")
        assert cfg.sigma2 == 5e-3
        assert cfg.sigma_f2 == 4e-2
        assert cfg.sigma_l2 == 2.5e-2
        assert cfg.alpha == 1e-4
        assert cfg.k_a == 3.0 and cfg.k_b == 3.0
        assert cfg.kernel == "connectivity_power"

    def test_test4_table_values(self):
        cfg = preset_config("test4")
        assert cfg.sigma2 == 1e-3
        assert cfg.bc_delta == 0.25
        assert cfg.t_final == 100.0

    def test_test2_rates_required(self):
        with pytest.raises(ConfigError, match="v_r"):
            preset_config("test2")

    def test_unknown_preset(self):
        with pytest.raises(ConfigError, match="unknown preset"):
            preset_config("test9")

    @pytest.mark.parametrize("name,extra", [
        ("test1", {"v_r": 1.0, "v_a": 1.0}),
        ("test2", {"v_r": 1.0, "v_a": 1.0}),
        ("test2", {"rate_mode": "remark1", "u_r": 1e3, "u_a": 1e3}),
        ("test3", {}),
        ("test4", {}),
    ])
    def test_preset_initial_data_mass(self, name, extra):
        cfg = preset_config(name, **extra)
        grid = OpinionGrid(cfg.n_grid)
        crange = ConnectivityRange(cfg.c_max)
        f = build_initial_field(cfg, grid, crange)
        assert abs(f.mass() - 1.0) < 1e-12


class TestConfigFile:
    def test_round_trip(self, tmp_path):
        p = tmp_path / "run.txt"
        p.write_text("preset = test1\nv_r = 1\nv_a = 1\nseed = 9\n"
                     "t_final = 0.25  # short\n")
        cfg = load_config(p)
        assert cfg.seed == 9 and cfg.t_final == 0.25
        assert cfg.sigma2 == 5e-2  # preset fills the rest

    def test_unknown_key_reports_line(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("solver = fp\nwibble = 3\n")
        with pytest.raises(ConfigError, match=r"bad.txt:2.*wibble"):
            load_config(p)

    def test_malformed_line(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("just some words\n")
        with pytest.raises(ConfigError, match="key = value"):
            load_config(p)

    def test_bad_value_type(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("n_grid = eighty\n")
        with pytest.raises(ConfigError, match="n_grid"):
            load_config(p)

    def test_invalid_solver(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("solver = quantum\nv_r = 1\nv_a = 1\n")
        with pytest.raises(ConfigError, match="solver"):
            load_config(p)

    def test_dt_policy_strings(self, tmp_path):
        for dt in ("auto", "fixed:0.001", "paper:test1"):
            p = tmp_path / "c.txt"
            p.write_text(f"dt = {dt}\nv_r = 1\nv_a = 1\n")
            assert load_config(p).dt == dt
        p = tmp_path / "c.txt"
        p.write_text("dt = whenever\nv_r = 1\nv_a = 1\n")
        with pytest.raises(ConfigError, match="dt policy"):
            load_config(p)


class TestRunExperiment:
    def _small_cfg(self, out, **over):
        base = dict(v_r=1.0, v_a=1.0, n_grid=24, c_max=40, t_final=0.2,
                    dt="auto", out_dir=str(out), snapshot_times=(0.2,))
        base.update(over)
        return preset_config("test1", **base)

    def test_artifacts_written(self, tmp_path):
        cfg = self._small_cfg(tmp_path / "run")
        run_experiment(cfg)
        out = tmp_path / "run"
        assert (out / "diagnostics.csv").exists()
        assert (out / "snapshot_t0.2.csv").exists()
        assert (out / "snapshot_t0.2_g.csv").exists()
        assert (out / "snapshot_t0.2_rho.csv").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["seed"] == cfg.seed
        assert "wall_time_s" in manifest
        header = (out / "snapshot_t0.2.csv").read_text().splitlines()[0]
        assert header == "w,c,f"

    def test_reruns_byte_identical(self, tmp_path):
        cfg1 = self._small_cfg(tmp_path / "a")
        cfg2 = self._small_cfg(tmp_path / "b")
        run_experiment(cfg1)
        run_experiment(cfg2)
        for name in ("diagnostics.csv", "snapshot_t0.2.csv",
                     "snapshot_t0.2_g.csv", "snapshot_t0.2_rho.csv"):
            assert (tmp_path / "a" / name).read_bytes() == \
                   (tmp_path / "b" / name).read_bytes()

    def test_mc_solver_runs(self, tmp_path):
        cfg = self._small_cfg(tmp_path / "mc", solver="mc", n_samples=2000,
                              epsilon=0.05, dt="auto")
        run_experiment(cfg)
        assert (tmp_path / "mc" / "snapshot_t0.2_rho.csv").exists()

    def test_network_only_solver(self, tmp_path):
        cfg = preset_config("fig1", t_final=20.0, c_max=120, gamma0=10.0,
                            out_dir=str(tmp_path / "net"))
        run_experiment(cfg)
        rho_csv = (tmp_path / "net" / "rho_final.csv").read_text().splitlines()
        assert rho_csv[0] == "c,rho"
        vals = np.array([float(r.split(",")[1]) for r in rho_csv[1:]])
        assert abs(vals.sum() - 1.0) < 1e-12
        diag = (tmp_path / "net" / "diagnostics.csv").read_text().splitlines()
        assert float(diag[-1].split(",")[4]) < float(diag[1].split(",")[4])

    def test_moments_solver(self, tmp_path):
        cfg = self._small_cfg(tmp_path / "mom", solver="moments", t_final=0.5,
                              epsilon=0.05)
        run_experiment(cfg)
        lines = (tmp_path / "mom" / "moments.csv").read_text().splitlines()
        assert lines[0].startswith("t,mass,gamma,mean_opinion")
        assert abs(float(lines[-1].split(",")[1]) - 1.0) < 1e-12


class TestCLI:
    def test_simulate_and_exit_codes(self, tmp_path, capsys):
        p = tmp_path / "cfg.txt"
        p.write_text("preset = test1\nv_r = 1\nv_a = 1\nn_grid = 16\n"
                     "c_max = 30\nt_final = 0.1\ndt = auto\n"
                     f"out_dir = {tmp_path / 'out'}\n")
        assert cli_main(["simulate", str(p)]) == 0
        assert (tmp_path / "out" / "manifest.json").exists()

    def test_error_is_machine_readable(self, tmp_path, capsys):
        p = tmp_path / "cfg.txt"
        p.write_text("nope = 1\n")
        code = cli_main(["simulate", str(p)])
        assert code == 1
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "ConfigError"

    def test_oracle_rho_inf(self, capsys):
        assert cli_main(["oracle", "rho-inf", "--gamma", "30", "--alpha",
                         "0.1", "--c-max", "3"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "c,rho"
        assert abs(float(out[1].split(",")[1]) - 0.5651234780596622) < 1e-12

    def test_oracle_g_inf(self, capsys):
        assert cli_main(["oracle", "g-inf", "--n", "16"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "w,g"
        assert len(out) == 18

    def test_reproduce_rejects_missing_rates(self, capsys):
        assert cli_main(["reproduce", "test2"]) == 1
        err = json.loads(capsys.readouterr().err)
        assert "v_r" in err["message"]

    def test_rates_override_parsing(self, tmp_path):
        assert cli_main(["reproduce", "test2", "--rates", "V=1",
                         "--out-dir", str(tmp_path / "t2")]) in (0, 1)


class TestDtPolicies:
    def test_paper_dt_valid_at_reference_grid(self, tmp_path):
        cfg = preset_config("test1", v_r=1.0, v_a=1.0, t_final=0.02,
                            out_dir=str(tmp_path / "ok"))
        run_experiment(cfg)  # N = 80: dw^2/(4 sigma2) sits under the bound

    def test_paper_dt_rejected_on_coarse_grid(self, tmp_path):
        from netopinion.grids import TimeStepError
        cfg = preset_config("test1", v_r=1.0, v_a=1.0, n_grid=40,
                            t_final=0.02, out_dir=str(tmp_path / "bad"))
        with pytest.raises(TimeStepError):
            run_experiment(cfg)

    def test_fixed_dt_validated(self, tmp_path):
        from netopinion.grids import TimeStepError
        cfg = preset_config("test1", v_r=1.0, v_a=1.0, dt="fixed:0.5",
                            t_final=0.02, out_dir=str(tmp_path / "f"))
        with pytest.raises(TimeStepError):
            run_experiment(cfg)
