import dataclasses
import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from tqnav.cli import load_imu_csv, main, run_scenario, write_imu_csv
from tqnav.config import load_config, preset, write_config
from tqnav.kinematics import TwistVariant
from tqnav.report import read_error_csv
from tqnav.trajectory import ScenarioParams, synthesize_imu


def short_config(tmp_path, duration=0.8, algos=("tq", "twosample"), **kw):
    base = preset("paper-vi")
    return dataclasses.replace(
        base,
        scenario=dataclasses.replace(base.scenario, duration=duration),
        algos=algos,
        out_dir=str(tmp_path / "out"),
        figures=kw.pop("figures", False),
        **kw,
    )


class TestConfig:
    def test_preset_defaults(self):
        cfg = preset("paper-vi")
        assert cfg.scenario.duration == 200.0
        assert cfg.scenario.imu_rate == 100.0
        assert cfg.solver.n_ob == 7 and cfg.solver.n_oe == 7
        assert cfg.solver.m_q == 9 and cfg.solver.max_iters == 9
        assert cfg.solver.rms_tol == 1e-16
        assert cfg.samples_per_window == 8

    def test_unknown_preset(self):
        with pytest.raises(ValueError):
            preset("nope")

    def test_config_file_round_trip(self, tmp_path):
        cfg = preset("paper-vi")
        cfg = dataclasses.replace(
            cfg,
            scenario=dataclasses.replace(cfg.scenario, duration=12.5, v0=321.0),
            algos=("tq",),
            decimate=4,
        )
        path = write_config(tmp_path / "run.cfg", cfg)
        back = load_config(path)
        assert back.scenario.duration == 12.5
        assert back.scenario.v0 == 321.0
        assert back.algos == ("tq",)
        assert back.decimate == 4
        assert back.solver.variant is TwistVariant.BODY_SIDE

    def test_overlay_partial_file(self, tmp_path):
        p = tmp_path / "partial.cfg"
        p.write_text("[scenario]\nduration = 5.0\n\n[solver]\nmax_iters = 11\n")
        cfg = load_config(p)
        assert cfg.scenario.duration == 5.0
        assert cfg.solver.max_iters == 11
        assert cfg.scenario.v0 == 500.0  # untouched preset value

    def test_earth_constants_override(self, tmp_path):
        p = tmp_path / "earth.cfg"
        p.write_text("[earth]\nrotation_rate = 0.0\ngamma_equator = 0.0\ngamma_pole = 0.0\n")
        cfg = load_config(p)
        assert cfg.earth.rotation_rate == 0.0
        assert cfg.earth.gamma_equator == 0.0

    def test_validation(self):
        base = preset("paper-vi")
        with pytest.raises(ValueError):
            dataclasses.replace(base, algos=())
        with pytest.raises(ValueError):
            dataclasses.replace(base, algos=("warp-drive",))
        with pytest.raises(ValueError):
            dataclasses.replace(base, decimate=0)


class TestRunScenario:
    def test_outputs_and_zero_initial_record(self, tmp_path):
        cfg = short_config(tmp_path)
        records = run_scenario(cfg)
        assert set(records) == {"tq", "twosample"}
        for algo, recs in records.items():
            assert recs[0].t == 0.0
            assert recs[0].att_err == 0.0
            assert_allclose(recs[0].vel_err, np.zeros(3), atol=0.0)
            assert_allclose(recs[0].pos_err, np.zeros(3), atol=0.0)
            csv = read_error_csv(tmp_path / "out" / f"{algo}_errors.csv")
            assert len(csv) == len(recs) == 11  # t=0 plus 10 windows

    def test_deterministic_output(self, tmp_path):
        cfg1 = short_config(tmp_path / "r1")
        cfg2 = short_config(tmp_path / "r2")
        run_scenario(cfg1)
        run_scenario(cfg2)
        for algo in ("tq", "twosample"):
            b1 = (tmp_path / "r1" / "out" / f"{algo}_errors.csv").read_bytes()
            b2 = (tmp_path / "r2" / "out" / f"{algo}_errors.csv").read_bytes()
            assert b1 == b2

    def test_zero_duration_header_only(self, tmp_path):
        cfg = short_config(tmp_path, duration=0.0, algos=("twosample",))
        run_scenario(cfg)
        text = (tmp_path / "out" / "twosample_errors.csv").read_text()
        lines = text.strip().split("\n")
        assert len(lines) == 1  # header only

    def test_decimation(self, tmp_path):
        cfg = short_config(tmp_path, decimate=2)
        records = run_scenario(cfg)
        assert len(records["tq"]) == 6  # 11 records, every 2nd kept

    def test_figures_rendered(self, tmp_path):
        cfg = short_config(tmp_path, duration=0.4, algos=("tq",), figures=True)
        run_scenario(cfg)
        for name in ("attitude_errors.png", "velocity_errors.png", "position_errors.png"):
            assert (tmp_path / "out" / name).exists()

    def test_rk4_reference(self, tmp_path):
        cfg = short_config(tmp_path, duration=0.16, algos=("rk4",))
        records = run_scenario(cfg)
        # the oracle tracks truth tightly over two windows
        assert records["rk4"][-1].att_err < 1e-12
        assert np.linalg.norm(records["rk4"][-1].pos_err) < 1e-7


class TestImuFiles:
    def test_round_trip(self, tmp_path, wgs84):
        p = ScenarioParams(duration=0.24)
        windows = synthesize_imu(p, wgs84, 8)
        path = write_imu_csv(tmp_path / "imu.csv", windows)
        back = load_imu_csv(path, 8)
        assert len(back) == len(windows)
        for a, b in zip(windows, back):
            assert_allclose(b.gyro, a.gyro, atol=0.0)
            assert_allclose(b.accel, a.accel, atol=0.0)
            assert_allclose(b.sample_times, a.sample_times, atol=1e-12)

    def test_line_format(self, tmp_path, wgs84):
        p = ScenarioParams(duration=0.08)
        windows = synthesize_imu(p, wgs84, 8)
        path = write_imu_csv(tmp_path / "imu.csv", windows)
        lines = path.read_text().strip().split("\n")
        assert len(lines) == 8
        assert len(lines[0].split(",")) == 7  # t + 3 gyro + 3 accel


class TestMain:
    def test_simulate_and_run_and_compare(self, tmp_path):
        out = tmp_path / "sim"
        cfg = preset("paper-vi")
        cfg_path = write_config(
            tmp_path / "short.cfg",
            dataclasses.replace(
                cfg,
                scenario=dataclasses.replace(cfg.scenario, duration=0.8),
                figures=False,
            ),
        )
        assert main(["simulate", "--config", str(cfg_path), "--out", str(out)]) == 0
        assert (out / "imu.csv").exists() and (out / "truth.csv").exists()

        run_out = tmp_path / "runout"
        code = main(
            ["run", "--config", str(cfg_path), "--out", str(run_out), "--no-figures", "--strict"]
        )
        assert code == 0
        csvs = sorted(run_out.glob("*_errors.csv"))
        assert len(csvs) == 2

        code = main(["compare", *map(str, csvs), "--out", str(run_out)])
        assert code == 0
        summary = json.loads((run_out / "summary.json").read_text())
        assert "algorithms" in summary and "orders_vs_reference" in summary

    def test_bad_algo_exits_nonzero(self, tmp_path):
        assert main(["run", "--algos", "warp-drive", "--out", str(tmp_path)]) == 1

    def test_selftest(self, capsys):
        assert main(["selftest"]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out
