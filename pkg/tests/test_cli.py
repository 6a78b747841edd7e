import json
import os
import subprocess
import sys

import pytest

from gexp.cli import main


def run_cli(args, tmp_path=None):
    """Invoke the CLI in-process, capturing stdout."""
    import contextlib
    import io

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(args)
    return code, buf.getvalue()


class TestUsage:
    def test_missing_required_flag_exit_2(self, capsys):
        code, _ = run_cli(["harnack", "--drift", "ou"])  # band, p, T, x, y missing
        assert code == 2

    def test_unknown_subcommand_exit_2(self):
        code, _ = run_cli(["frobnicate"])
        assert code == 2

    def test_bad_band_exit_2(self):
        code, _ = run_cli(
            ["gheat", "--band", "one,two", "--payoff", "sigmoid", "--T", "1"]
        )
        assert code == 2

    def test_version_flag(self, capsys):
        import gexp

        with pytest.raises(SystemExit):
            from gexp.cli import build_parser

            build_parser().parse_args(["--version"])
        assert gexp.__version__ == "0.1.0"


class TestReports:
    def test_gheat_json_schema(self):
        code, out = run_cli(
            ["gheat", "--band", "1,1", "--payoff", "sigmoid", "--T", "0.25",
             "--nx", "101", "--sequential"]
        )
        assert code == 0
        rep = json.loads(out)
        assert rep["config"]["schema"] == 1
        assert rep["config"]["version"] == "0.1.0"
        assert len(rep["values"]) == 101

    def test_gheat_csv(self):
        code, out = run_cli(
            ["gheat", "--band", "1,1", "--payoff", "one", "--T", "0.25",
             "--nx", "11", "--format", "csv"]
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "x,u"
        assert len(lines) == 12
        assert all(line.endswith(",1.0") for line in lines[1:])

    def test_pbar_cross_check_pass(self):
        code, out = run_cli(
            ["pbar", "--kind", "qv", "--drift", "zero", "--band", "1,1",
             "--payoff", "sigmoid", "--T", "1", "--x", "0", "--method", "both",
             "--npaths", "4000", "--nsteps", "64", "--sequential"]
        )
        assert code == 0
        rep = json.loads(out)
        assert rep["cross_check"]["pass"] is True
        assert abs(rep["pde_value"] - 0.5) < 2e-3

    def test_harnack_certificate_pass(self):
        code, out = run_cli(
            ["harnack", "--drift", "ou", "--band", "1,1", "--p", "2", "--T", "1",
             "--x", "0", "--y", "0.5", "--payoff", "sigmoid", "--sequential"]
        )
        assert code == 0
        rep = json.loads(out)
        assert rep["certificate"]["pass"] is True

    def test_shift_harnack_certificate_pass(self):
        code, out = run_cli(
            ["shift-harnack", "--drift", "ou", "--band", "0.5,1", "--p", "2",
             "--T", "1", "--x", "0", "--v", "0.5", "--payoff", "bump",
             "--sequential"]
        )
        assert code == 0
        assert json.loads(out)["certificate"]["pass"] is True

    def test_coupling_report(self):
        code, out = run_cli(
            ["coupling", "--band", "1,1", "--x", "1", "--y", "0", "--T", "1",
             "--npaths", "500", "--nsteps", "512", "--pieces", "1",
             "--levels", "2", "--sequential"]
        )
        assert code == 0
        rep = json.loads(out)
        assert rep["all_pass"] is True
        assert len(rep["reports"]) == 1

    def test_axioms_pass(self):
        code, out = run_cli(["axioms", "--band", "0.5,1", "--sequential"])
        assert code == 0
        assert json.loads(out)["all_pass"] is True


class TestConfigFile:
    def test_config_file_with_flag_precedence(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# comment\nnx = 51\nT = 0.25\npayoff = one\n")
        code, out = run_cli(
            ["gheat", "--band", "1,1", "--payoff", "sigmoid", "--T", "0.25",
             "--config", str(cfg), "--sequential"]
        )
        assert code == 0
        rep = json.loads(out)
        # payoff came from the command line (explicit flags win); nx from file
        assert rep["config"]["payoff"] == "sigmoid"
        assert rep["config"]["nx"] == 51

    def test_unknown_config_key_exit_2(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("frob = 1\n")
        code, _ = run_cli(
            ["gheat", "--band", "1,1", "--payoff", "one", "--T", "0.25",
             "--config", str(cfg)]
        )
        assert code == 2

    def test_malformed_config_exit_2(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("just words\n")
        code, _ = run_cli(
            ["gheat", "--band", "1,1", "--payoff", "one", "--T", "0.25",
             "--config", str(cfg)]
        )
        assert code == 2


class TestSeedResolution:
    def test_env_seed_used_when_flag_absent(self, monkeypatch):
        monkeypatch.setenv("GEXP_SEED", "777")
        code, out = run_cli(
            ["pbar", "--kind", "qv", "--drift", "zero", "--band", "1,1",
             "--payoff", "one", "--T", "0.5", "--x", "0", "--method", "mc",
             "--npaths", "100", "--nsteps", "16", "--sequential"]
        )
        assert code == 0
        assert json.loads(out)["config"]["seed"] == 777

    def test_flag_overrides_env(self, monkeypatch):
        monkeypatch.setenv("GEXP_SEED", "777")
        code, out = run_cli(
            ["pbar", "--kind", "qv", "--drift", "zero", "--band", "1,1",
             "--payoff", "one", "--T", "0.5", "--x", "0", "--method", "mc",
             "--npaths", "100", "--nsteps", "16", "--seed", "5", "--sequential"]
        )
        assert code == 0
        assert json.loads(out)["config"]["seed"] == 5


class TestReproducibility:
    @pytest.mark.parametrize(
        "args",
        [
            ["gheat", "--band", "0.5,1", "--payoff", "bump", "--T", "0.5",
             "--nx", "101"],
            ["pbar", "--kind", "qv", "--drift", "ou", "--band", "0.5,1",
             "--payoff", "sigmoid", "--T", "0.5", "--x", "0.5",
             "--npaths", "500", "--nsteps", "32"],
            ["harnack", "--drift", "ou", "--band", "0.5,1", "--p", "2",
             "--T", "0.5", "--x", "0", "--y", "0.5", "--payoff", "cauchy"],
            ["coupling", "--band", "0.5,1", "--x", "0.5", "--y", "0",
             "--T", "1", "--npaths", "200", "--nsteps", "256",
             "--pieces", "2", "--levels", "2"],
        ],
        ids=["gheat", "pbar", "harnack", "coupling"],
    )
    def test_byte_identical_sequential_runs(self, args, tmp_path):
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        code1, _ = run_cli(args + ["--sequential", "--out", str(out1)])
        code2, _ = run_cli(args + ["--sequential", "--out", str(out2)])
        assert code1 == code2 == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_out_file_matches_stdout(self, tmp_path):
        args = ["gheat", "--band", "1,1", "--payoff", "one", "--T", "0.25",
                "--nx", "11", "--sequential"]
        _, stdout = run_cli(args)
        out = tmp_path / "r.json"
        run_cli(args + ["--out", str(out)])
        assert out.read_text() == stdout


class TestEntryPoint:
    def test_console_script_runs(self):
        proc = subprocess.run(["gexp", "--version"], capture_output=True, text=True)
        assert proc.returncode == 0
        assert proc.stdout.strip() == "0.1.0"
