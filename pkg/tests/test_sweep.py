"""Tests for the sweep engine, configuration handling and CSV output."""

import math

import pytest

from subpoisson.errors import ConfigError, DomainError
from subpoisson.sweep import (
    CSV_HEADER,
    SweepConfig,
    build_config,
    emit_csv,
    parse_grid,
    read_config_file,
    run_sweep,
    verify_mode,
)

HALF_PI = math.pi / 2.0


def squeezed_cfg(**overrides):
    base = dict(
        state="squeezed",
        beta_sq_grid=(1.0,),
        f_list=(0.0,),
        nth_list=(0.1,),
        r=0.4,
        phi=HALF_PI,
    )
    base.update(overrides)
    return SweepConfig(**base)


class TestParseGrid:
    def test_comma_list(self):
        assert parse_grid("0.5,1,2", "x") == (0.5, 1.0, 2.0)

    def test_range_spec(self):
        grid = parse_grid("0:1:5", "x")
        assert grid == (0.0, 0.25, 0.5, 0.75, 1.0)

    @pytest.mark.parametrize("bad", ["", "1:2", "a,b", "0:1:1", "0:1:x"])
    def test_rejects_malformed(self, bad):
        with pytest.raises(ConfigError):
            parse_grid(bad, "x")


class TestBuildConfig:
    def test_minimal_squeezed(self):
        cfg = build_config(
            {
                "state": "squeezed",
                "r": "0.4",
                "phi": str(HALF_PI),
                "beta_sq_grid": "1.0",
                "nth_list": "0.1",
            }
        )
        assert cfg.state == "squeezed"
        assert cfg.f_list == (0.0,)
        assert cfg.beta_sq_grid == (1.0,)

    def test_theta_psi_pair(self):
        cfg = build_config(
            {
                "state": "squeezed",
                "r": "0.4",
                "theta": "2.0",
                "psi": "1.0",
                "beta_sq_grid": "1.0",
                "nth_list": "0.0",
            }
        )
        assert cfg.phi == pytest.approx(1.5, abs=1e-12)

    def test_phi_and_theta_conflict(self):
        with pytest.raises(ConfigError, match="phi"):
            build_config(
                {
                    "state": "squeezed",
                    "r": "0.4",
                    "phi": "1.0",
                    "theta": "1.0",
                    "psi": "0.0",
                    "beta_sq_grid": "1.0",
                    "nth_list": "0.0",
                }
            )

    def test_temperature_conversion(self):
        cfg = build_config(
            {
                "state": "cat",
                "beta_sq_grid": "1.0",
                "beta_hw_list": str(math.log(2.0)),
            }
        )
        assert cfg.nth_list[0] == pytest.approx(1.0, abs=1e-12)

    def test_temperature_and_occupancy_conflict(self):
        with pytest.raises(ConfigError, match="nth_list"):
            build_config(
                {
                    "state": "cat",
                    "beta_sq_grid": "1.0",
                    "nth_list": "0.1",
                    "beta_hw_list": "1.0",
                }
            )

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="mystery"):
            build_config({"state": "cat", "beta_sq_grid": "1", "nth_list": "0", "mystery": "1"})

    def test_missing_requirements(self):
        with pytest.raises(ConfigError, match="state"):
            build_config({"beta_sq_grid": "1", "nth_list": "0"})
        with pytest.raises(ConfigError, match="r, phi"):
            build_config({"state": "squeezed", "beta_sq_grid": "1", "nth_list": "0"})
        with pytest.raises(ConfigError, match="nth_list"):
            build_config({"state": "cat", "beta_sq_grid": "1"})

    def test_field_validation_paths(self):
        with pytest.raises(ConfigError, match=r"f_list\[1\]"):
            squeezed_cfg(f_list=(0.0, 1.5))
        with pytest.raises(ConfigError, match=r"nth_list\[0\]"):
            squeezed_cfg(nth_list=(-0.1,))
        with pytest.raises(ConfigError, match=r"beta_sq_grid\[0\]"):
            SweepConfig(state="fock", beta_sq_grid=(1.5,), f_list=(0.0,), nth_list=(0.0,))
        with pytest.raises(ConfigError, match="truncation"):
            squeezed_cfg(truncation=1)


class TestRunSweep:
    def test_reference_squeezed_row(self):
        points = run_sweep(squeezed_cfg())
        assert len(points) == 1
        p = points[0]
        assert p.tau_c == pytest.approx(0.4317091233641969, abs=1e-12)
        assert p.n_in == pytest.approx(1.1687174731524224, abs=1e-12)

    def test_cat_zero_amplitude_threshold(self):
        cfg = SweepConfig(
            state="cat", beta_sq_grid=(0.0,), f_list=(0.0,), nth_list=(0.1,)
        )
        expected = 0.1 / (0.1 + math.sqrt(2.0) - 1.0)
        assert run_sweep(cfg)[0].tau_c == pytest.approx(expected, abs=1e-12)

    def test_pure_loss_thresholds_vanish(self):
        cfg = SweepConfig(
            state="cat", beta_sq_grid=(0.0, 1.0, 2.0), f_list=(0.0,), nth_list=(0.0,)
        )
        assert all(p.tau_c == 0.0 for p in run_sweep(cfg))

    def test_row_ordering(self):
        cfg = squeezed_cfg(beta_sq_grid=(1.0, 2.0), f_list=(0.0, 0.1), nth_list=(0.0, 0.1))
        keys = [(p.F, p.n_th, p.beta_sq) for p in run_sweep(cfg)]
        assert keys == [
            (0.0, 0.0, 1.0),
            (0.0, 0.0, 2.0),
            (0.0, 0.1, 1.0),
            (0.0, 0.1, 2.0),
            (0.1, 0.0, 1.0),
            (0.1, 0.0, 2.0),
            (0.1, 0.1, 1.0),
            (0.1, 0.1, 2.0),
        ]

    def test_below_critical_displacement_has_no_threshold(self):
        cfg = squeezed_cfg(beta_sq_grid=(0.1, 1.0))
        points = run_sweep(cfg)
        assert points[0].tau_c is None
        assert points[1].tau_c is not None

    def test_fock_rows(self):
        cfg = SweepConfig(
            state="fock", beta_sq_grid=(1.0, 3.0), f_list=(0.0,), nth_list=(0.1,)
        )
        points = run_sweep(cfg)
        assert points[0].n_in == 1.0
        assert points[1].q_in == -3.0

    def test_deterministic(self):
        cfg = squeezed_cfg(beta_sq_grid=(0.5, 1.0, 2.0), f_list=(0.0, 0.5))
        assert run_sweep(cfg) == run_sweep(cfg)


class TestEmitCsv:
    def test_header_and_content(self, tmp_path):
        path = tmp_path / "rows.csv"
        emit_csv(run_sweep(squeezed_cfg()), path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == CSV_HEADER
        row = lines[1].split(",")
        assert row[0] == "squeezed"
        assert float(row[3]) == 1.0
        assert float(row[9]) == pytest.approx(0.4317091233641969, abs=1e-12)

    def test_empty_fields_for_missing_values(self, tmp_path):
        path = tmp_path / "rows.csv"
        cfg = SweepConfig(state="cat", beta_sq_grid=(1.0,), f_list=(0.0,), nth_list=(0.0,))
        emit_csv(run_sweep(cfg), path)
        row = path.read_text(encoding="utf-8").splitlines()[1].split(",")
        assert row[1] == "" and row[2] == ""  # r, phi not applicable
        cfg = squeezed_cfg(beta_sq_grid=(0.1,))  # below beta_c: no threshold
        emit_csv(run_sweep(cfg), path)
        row = path.read_text(encoding="utf-8").splitlines()[1].split(",")
        assert row[9] == ""

    def test_byte_identical_reruns(self, tmp_path):
        cfg = squeezed_cfg(beta_sq_grid=(0.5, 1.0, 2.0), f_list=(0.0, 0.7), nth_list=(0.0, 0.3))
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        emit_csv(run_sweep(cfg), first)
        emit_csv(run_sweep(cfg), second)
        assert first.read_bytes() == second.read_bytes()

    def test_roundtrip_shortest_form(self, tmp_path):
        path = tmp_path / "rows.csv"
        points = run_sweep(squeezed_cfg(nth_list=(0.1,)))
        emit_csv(points, path)
        row = path.read_text(encoding="utf-8").splitlines()[1].split(",")
        assert float(row[7]) == points[0].q_in  # exact round-trip

    def test_rejects_empty(self, tmp_path):
        with pytest.raises(DomainError):
            emit_csv([], tmp_path / "rows.csv")


class TestVerifyMode:
    def test_report_passes_on_healthy_grid(self):
        cfg = SweepConfig(
            state="cat",
            beta_sq_grid=(0.0, 1.0),
            f_list=(0.0, 0.3),
            nth_list=(0.1,),
            verify=True,
            verify_samples=3,
        )
        report = verify_mode(cfg)
        assert report.ok
        assert len(report.entries) <= 3
        assert report.worst_deviation < 1e-8
        assert any("worst deviation" in line for line in report.summary_lines())

    def test_truncation_failures_are_reported_per_point(self):
        cfg = squeezed_cfg(beta_sq_grid=(30.0,), nth_list=(0.1,), truncation=16, verify=True)
        report = verify_mode(cfg)
        assert not report.ok
        assert report.entries[0].error is not None

    def test_checks_run_at_the_critical_point(self):
        cfg = squeezed_cfg(verify_samples=1)
        report = verify_mode(cfg)
        entry = report.entries[0]
        assert entry.tau_bar == pytest.approx(0.4317091233641969, abs=1e-12)
        assert abs(entry.q_closed_form) < 1e-12


class TestConfigFile:
    def test_parse_and_build(self, tmp_path):
        path = tmp_path / "sweep.conf"
        path.write_text(
            "# squeezed-state sweep\n"
            "state = squeezed\n"
            "r = 0.4\n"
            f"phi = {HALF_PI}\n"
            "beta_sq_grid = 0.5,1,2\n"
            "f_list = 0,0.1\n"
            "nth_list = 0,0.1  # keep the cold rows\n"
            "out = fig.csv\n",
            encoding="utf-8",
        )
        mapping = read_config_file(path)
        cfg = build_config(mapping)
        assert cfg.beta_sq_grid == (0.5, 1.0, 2.0)
        assert cfg.out.name == "fig.csv"

    def test_rejects_malformed_line(self, tmp_path):
        path = tmp_path / "sweep.conf"
        path.write_text("state squeezed\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="key = value"):
            read_config_file(path)
