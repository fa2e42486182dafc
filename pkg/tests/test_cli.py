"""
Tests for the essgap command-line interface.
"""

import json
import os
from unittest.mock import patch

import pytest

from essgap.cli import (
    EXIT_ERROR,
    EXIT_OK,
    EXIT_VERIFY_FAILED,
    build_arguments,
    create_config,
    main,
    parse_args,
    _target,
)
from essgap.tools.reports import CSV_COLUMNS, GapReport, SuiteResult
from essgap.utils.config import OutputFormat


def run_main(argv):
    """Run main() and return its exit code."""
    with patch("essgap.cli.load_dotenv"):
        with pytest.raises(SystemExit) as excinfo:
            main(argv)
    return excinfo.value.code


class TestParseArgs:
    """Test cases for argument parsing."""

    def test_gen(self):
        """Test parsing a gen command."""
        args = parse_args(["gen", "gimpel", "--m", "4", "--pairs"])
        assert args.command == "gen"
        assert args.family == "gimpel"
        assert build_arguments(args)["pairs"] is True
        assert build_arguments(args)["m"] == 4

    def test_compute_needs_input(self):
        """Test that compute requires --in."""
        with pytest.raises(SystemExit):
            parse_args(["compute", "cs"])
        args = parse_args(["compute", "ess-k", "--in", "f.json", "--k", "3", "--view", "true"])
        assert build_arguments(args) == {"source": "f.json", "k": 3, "view": "true"}

    def test_verify_cases(self):
        """Test repeated --case flags."""
        args = parse_args(["verify", "horn-gap", "--case", "3,1", "--case", "4,2"])
        assert build_arguments(args)["cases"] == [[3, 1], [4, 2]]
        with pytest.raises(SystemExit):
            parse_args(["verify", "horn-gap", "--case", "3"])

    def test_verify_m_fills_ms(self):
        """Test that --m fills ms for thm1."""
        arguments = build_arguments(parse_args(["verify", "thm1", "--m", "4"]))
        assert arguments["m"] == 4
        assert arguments["ms"] == [4]
        assert build_arguments(parse_args(["verify", "thm1"]))["ms"] is None

    def test_target_reads_only_the_active_subcommand(self):
        """Test that the target name comes from the parsed subcommand's own positional."""
        assert _target(parse_args(["gen", "gimpel", "--m", "3", "--pairs"])) == "gimpel"
        assert _target(parse_args(["compute", "ess", "--in", "f.json"])) == "ess"
        assert _target(parse_args(["verify", "min-cert"])) == "min-cert"

    def test_cert_dir_flag(self):
        """Test that --cert-dir reaches the configuration."""
        config = create_config(parse_args(["compute", "cs", "--in", "f.json", "--cert-dir", "c"]))
        assert config.certificate_dir == "c"
        assert config.out_dir is None

    def test_environment_defaults(self):
        """Test defaults read from ESSGAP_* variables."""
        env = {
            "ESSGAP_SEED": "5",
            "ESSGAP_FORMAT": "csv",
            "ESSGAP_MAX_N": "12",
            "ESSGAP_FORCE": "true",
        }
        with patch.dict(os.environ, env):
            config = create_config(parse_args(["verify", "lemma2"]))
        assert config.seed == 5
        assert config.output_format is OutputFormat.CSV
        assert config.max_n == 12
        assert config.force

    def test_flags_override_environment(self):
        """Test that flags win over the environment."""
        with patch.dict(os.environ, {"ESSGAP_SEED": "5"}):
            args = parse_args(["gen", "all-pairs", "--m", "3", "--seed", "8"])
        assert args.seed == 8


class TestMain:
    """Test cases for main() and its exit codes."""

    def test_gen_writes_files(self, tmp_path, capsys):
        """Test that gen writes its artifacts."""
        code = run_main(["gen", "all-pairs", "--m", "3", "--out", str(tmp_path)])
        assert code == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary["family"] == "all-pairs"
        assert len(summary["files"]) == 2
        assert (tmp_path / "allpairs_m3.txt").read_text() == "3 3\n1 2\n1 3\n2 3\n"
        assert (tmp_path / "allpairs_m3.provenance.json").exists()

    def test_compute_prints_value(self, tmp_path, capsys, write_function):
        """Test that compute prints the value and writes a certificate."""
        source = write_function("parity.json", {"n": 3, "ones": [1, 2, 4, 7]})
        code = run_main(["compute", "cs", "--in", source, "--out", str(tmp_path / "certs")])
        assert code == EXIT_OK
        assert capsys.readouterr().out == "4\n"
        assert (tmp_path / "certs" / "cs.cnf").exists()

    def test_gen_gimpel_end_to_end(self, tmp_path, capsys):
        """Test that gen gimpel runs through main and writes the family."""
        code = run_main(["gen", "gimpel", "--m", "3", "--pairs", "--out", str(tmp_path)])
        assert code == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary["family"] == "gimpel"
        assert all(path.startswith(str(tmp_path)) for path in summary["files"])
        assert any(path.endswith(".provenance.json") for path in summary["files"])

    def test_compute_ess_end_to_end(self, tmp_path, capsys, write_function):
        """Test that compute ess with --k and --view runs through main."""
        source = write_function("and.json", {"n": 2, "ones": [3]})
        argv = ["compute", "ess", "--in", source, "--k", "3", "--cert-dir", str(tmp_path / "c")]
        assert run_main(argv) == EXIT_OK
        assert capsys.readouterr().out == "3\n"
        certificate = json.loads((tmp_path / "c" / "ess.json").read_text())
        assert certificate["k"] == 3
        assert certificate["certificate"] == [0, 1, 2]

    def test_verify_end_to_end(self, capsys):
        """Test that verify runs a real suite through main."""
        assert run_main(["verify", "horn-gap", "--case", "3,1"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["passed"] is True
        assert report["rows"][0]["cs"] == 11

    def test_verify_csv(self, tmp_path, capsys):
        """Test CSV output for a suite."""
        argv = [
            "verify",
            "min-cert",
            "--n-max",
            "3",
            "--count",
            "4",
            "--format",
            "csv",
            "--out",
            str(tmp_path),
        ]
        assert run_main(argv) == EXIT_OK
        out = capsys.readouterr().out
        assert out.splitlines()[0] == ",".join(CSV_COLUMNS)
        assert len(out.splitlines()) == 5
        assert (tmp_path / "min-cert.csv").read_text() == out

    def test_verify_failure(self, capsys):
        """Test the exit code of a failing suite."""
        row = GapReport(family="f", checks={"no_smaller_cnf": False})
        failing = SuiteResult(suite="min-cert", claim="c", rows=[row])
        with patch("essgap.utils.tool_utils.run_min_cert", return_value=failing):
            code = run_main(["verify", "min-cert"])
        assert code == EXIT_VERIFY_FAILED
        assert json.loads(capsys.readouterr().out)["passed"] is False

    def test_missing_input(self, tmp_path, capsys):
        """Test the error payload for a missing input file."""
        code = run_main(["compute", "cs", "--in", str(tmp_path / "missing.json")])
        assert code == EXIT_ERROR
        assert json.loads(capsys.readouterr().out)["error"] == "FormatError"

    def test_unknown_family(self, capsys):
        """Test an unknown gen family."""
        assert run_main(["gen", "cube"]) == EXIT_ERROR
        error = json.loads(capsys.readouterr().out)
        assert error["error"] == "EssGapError"
        assert "all-pairs" in error["hint"]

    def test_cap_error(self, capsys):
        """Test the cap error payload."""
        assert run_main(["gen", "gimpel", "--m", "5", "--pairs", "--max-n", "4"]) == EXIT_ERROR
        error = json.loads(capsys.readouterr().out)
        assert error["error"] == "CapExceededError"
        assert "--force" in error["hint"]

    def test_unexpected_error(self, capsys):
        """Test that unexpected exceptions become JSON errors."""
        with patch("essgap.cli.EssGapToolkit.call", side_effect=RuntimeError("boom")):
            assert run_main(["gen", "all-pairs", "--m", "3"]) == EXIT_ERROR
        assert json.loads(capsys.readouterr().out)["message"] == "boom"
