"""CLI tests: config resolution and round-trip, unit conversions, CSV
schemas and determinism, and exit codes."""

import pytest

from fdwpcn.cli import (
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_MODEL,
    EXIT_OK,
    RunConfig,
    main,
    parse_config,
    serialize_config,
)
from fdwpcn.errors import ConfigError


class TestParseConfig:
    def test_noise_power_derivation(self):
        cfg = RunConfig(noise_dbm_per_hz=-160.0, bandwidth_hz=1e6)
        assert cfg.sigma0_sq() == pytest.approx(1e-13, rel=1e-12)

    def test_sinr_gap_derivation(self):
        cfg = RunConfig(gamma_db=9.8)
        assert cfg.cap_gamma() == pytest.approx(10 ** 0.98, rel=1e-15)
        assert cfg.cap_gamma() == pytest.approx(9.549925860, abs=1e-8)

    def test_phi_derivation(self):
        cfg = RunConfig(isolation_db=15.0)
        assert cfg.phi() == pytest.approx(0.0316227766, abs=1e-9)

    def test_p0_derivation(self):
        assert RunConfig(p0_dbm=30.0).p0_watts() == pytest.approx(1.0)
        assert RunConfig(p0_dbm=20.0).p0_watts() == pytest.approx(0.1)

    def test_file_round_trip(self, tmp_path):
        cfg = RunConfig(k=4, p0_dbm=23.5, weights=(0.2, 0.3, 0.4, 0.1),
                        knowledge="practical", seed=7, trials=10,
                        alpha_mode="absolute", alpha_value=1e-12)
        path = tmp_path / "run.cfg"
        path.write_text(serialize_config(cfg))
        assert parse_config(str(path), environ={}) == cfg

    def test_defaults_round_trip(self, tmp_path):
        cfg = RunConfig()
        path = tmp_path / "run.cfg"
        path.write_text(serialize_config(cfg))
        assert parse_config(str(path), environ={}) == cfg

    def test_unknown_key_names_file_and_line(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("p0dbm = 3\n")
        with pytest.raises(ConfigError, match="p0dbm"):
            parse_config(str(path), environ={})

    def test_bad_value_names_field(self):
        with pytest.raises(ConfigError, match="trials"):
            RunConfig(trials=0)
        with pytest.raises(ConfigError, match="knowledge"):
            RunConfig(knowledge="psychic")
        with pytest.raises(ConfigError, match="bandwidth_hz"):
            RunConfig(bandwidth_hz=-5.0)

    def test_env_overrides_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("p0_dbm = 10\nseed = 1\n")
        cfg = parse_config(str(path),
                           environ={"FDWPCN_P0_DBM": "25", "HOME": "/"})
        assert cfg.p0_dbm == 25.0
        assert cfg.seed == 1

    def test_explicit_overrides_env(self, tmp_path):
        cfg = parse_config(None, overrides={"p0_dbm": 33.0},
                           environ={"FDWPCN_P0_DBM": "25"})
        assert cfg.p0_dbm == 33.0

    def test_comment_and_blank_lines(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# a comment\n\nk = 2\n")
        assert parse_config(str(path), environ={}).k == 2


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


class TestOptimizeCommand:
    def test_single_ue_whole_block(self, capsys):
        code, out = run_cli(
            ["optimize", "--gains-ap", "0.5", "--knowledge", "practical",
             "--weights", "equal"], capsys)
        assert code == EXIT_OK
        lines = out.strip().split("\n")
        assert lines[0] == ("ue,tau,p_tx,rate,"
                            "kkt_sum_tau_residual,kkt_stationarity_residual")
        assert len(lines) == 2
        row = lines[1].split(",")
        assert row[0] == "1"
        assert float(row[1]) == 1.0

    def test_seventeen_digit_floats(self, capsys):
        code, out = run_cli(
            ["optimize", "--gains-ap", "0.5,0.15", "--knowledge",
             "practical"], capsys)
        assert code == EXIT_OK
        tau1 = out.strip().split("\n")[1].split(",")[1]
        # round-trips exactly through float()
        assert f"{float(tau1):.17g}" == tau1

    def test_weighted_instance(self, capsys):
        code, out = run_cli(
            ["optimize", "--gains-ap", "0.5,0.15", "--knowledge", "genie",
             "--weights", "0.8,0.2", "--gains-inter", "0.01"], capsys)
        assert code == EXIT_OK
        rows = out.strip().split("\n")[1:]
        taus = [float(r.split(",")[1]) for r in rows]
        assert sum(taus) == pytest.approx(1.0, abs=1e-9)

    def test_knowledge_both_rejected(self, capsys):
        code, _ = run_cli(["optimize", "--gains-ap", "0.5"], capsys)
        assert code == EXIT_CONFIG

    def test_infeasible_coupling_exit_code(self, capsys):
        # inter-UE gain too strong: genie energy balance has no
        # non-negative solution
        code, _ = run_cli(
            ["optimize", "--gains-ap", "0.5,0.5", "--gains-inter", "4.0",
             "--knowledge", "genie", "--theta", "1.0", "--isolation-db",
             "200"], capsys)
        assert code == EXIT_MODEL


class TestRateRegionCommand:
    def test_corner_rows_and_count(self, capsys):
        code, out = run_cli(
            ["rate-region", "--knowledge", "practical", "--p0-dbm", "50",
             "--noise-dbm-per-hz", "-30", "--gamma-db", "0",
             "--weight-points", "101"], capsys)
        assert code == EXIT_OK
        lines = out.strip().split("\n")
        assert lines[0] == "omega_1,omega_2,rate_1,rate_2,alpha"
        rows = [line.split(",") for line in lines[1:]]
        assert len(rows) == 101
        first, last = rows[0], rows[-1]
        assert float(first[0]) == 0.0 and float(first[2]) == 0.0
        assert float(last[0]) == 1.0 and float(last[3]) == 0.0
        r1 = [float(r[2]) for r in rows]
        r2 = [float(r[3]) for r in rows]
        assert max(r1) > 0 and max(r2) > 0

    def test_two_alpha_groups(self, capsys):
        code, out = run_cli(
            ["rate-region", "--knowledge", "practical", "--weight-points",
             "11", "--alpha-beta", "0.5", "--alpha-beta", "0.01"], capsys)
        assert code == EXIT_OK
        rows = out.strip().split("\n")[1:]
        assert len(rows) == 22
        alphas = {r.split(",")[4] for r in rows}
        assert len(alphas) == 2


class TestSweepCommands:
    def test_phi_grid_rows(self, capsys):
        code, out = run_cli(
            ["sweep-phi", "--grid", "0:20:1", "--trials", "3", "--k", "2",
             "--seed", "5"], capsys)
        assert code == EXIT_OK
        lines = out.strip().split("\n")
        assert lines[0] == ("isolation_db,mean_practical,se_practical,"
                            "mean_genie,se_genie,trials,seed")
        assert len(lines) == 22
        zero_row = lines[1].split(",")
        assert float(zero_row[1]) == 0.0
        assert float(zero_row[3]) == 0.0

    def test_byte_identical_reruns(self, tmp_path):
        args = ["sweep-p0", "--grid", "20,30", "--trials", "4", "--k", "2",
                "--seed", "11"]
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        assert main(args + ["--output", str(out_a)]) == EXIT_OK
        assert main(args + ["--output", str(out_b), "--workers", "2"]) \
            == EXIT_OK
        assert out_a.read_bytes() == out_b.read_bytes()
        assert out_a.read_bytes().endswith(b"\n")
        assert b"\r" not in out_a.read_bytes()

    def test_sic_grid_with_inf(self, capsys):
        code, out = run_cli(
            ["sweep-sic", "--grid", "inf,120", "--trials", "2", "--k", "2"],
            capsys)
        assert code == EXIT_OK
        lines = out.strip().split("\n")
        assert lines[1].startswith("inf,")

    def test_bad_grid_exit_code(self, capsys):
        code, _ = run_cli(["sweep-p0", "--grid", "10:5:1", "--trials", "1"],
                          capsys)
        assert code == EXIT_CONFIG

    def test_io_error_exit_code(self, capsys):
        code = main(["sweep-p0", "--grid", "20", "--trials", "1", "--k", "1",
                     "--output", "/nonexistent_dir/x.csv"])
        assert code == EXIT_IO

    def test_scale_bandwidth(self, capsys):
        base = ["sweep-p0", "--grid", "20", "--trials", "2", "--k", "2",
                "--seed", "3"]
        _, plain = run_cli(base, capsys)
        _, scaled = run_cli(base + ["--scale-bandwidth"], capsys)
        v_plain = float(plain.strip().split("\n")[1].split(",")[1])
        v_scaled = float(scaled.strip().split("\n")[1].split(",")[1])
        assert v_scaled == pytest.approx(v_plain * 1.0)  # 1 MHz -> x1
        _, mhz10 = run_cli(base + ["--scale-bandwidth", "--bandwidth-hz",
                                   "1e7"], capsys)
        v10 = float(mhz10.strip().split("\n")[1].split(",")[1])
        assert v10 != v_plain


class TestConfigPlumbing:
    def test_config_file_feeds_sweep(self, tmp_path, capsys):
        path = tmp_path / "run.cfg"
        path.write_text("k = 2\ntrials = 2\nseed = 9\n")
        code, out = run_cli(
            ["sweep-phi", "--config", str(path), "--grid", "10,12"], capsys)
        assert code == EXIT_OK
        rows = out.strip().split("\n")[1:]
        assert all(r.split(",")[5] == "2" and r.split(",")[6] == "9"
                   for r in rows)

    def test_missing_config_file(self, capsys):
        code, _ = run_cli(["sweep-phi", "--config", "/no/such/file"], capsys)
        assert code == EXIT_CONFIG
