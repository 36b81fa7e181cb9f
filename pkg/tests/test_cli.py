"""Test cases for the command-line exit codes."""

from pathlib import Path

import pytest

from cli import build_parser, main


def test_check_valid_config(data_file: callable, capsys: pytest.CaptureFixture) -> None:
    """Test exit code 0 for a valid configuration."""
    code = main(["check", str(data_file("mirror_oscillating.toml"))])

    assert code == 0
    assert "valid 'mirror-moving'" in capsys.readouterr().out


@pytest.mark.parametrize(
    "name", ["unknown_key.toml", "malformed.toml", "runaway_violation.toml"]
)
def test_check_invalid_config(data_file: callable, name: str) -> None:
    """Test exit code 2 for configuration errors."""
    assert main(["check", str(data_file(name))]) == 2


def test_scenarios_command(capsys: pytest.CaptureFixture) -> None:
    """Test that the catalog is printed."""
    assert main(["scenarios"]) == 0

    out = capsys.readouterr().out
    assert "fdr-check:" in out
    assert "mirror-moving:" in out


def test_simulate_command(
    data_file: callable, tmp_path: Path, capsys: pytest.CaptureFixture
) -> None:
    """Test a run with overridden seed and output directory."""
    path = str(data_file("mirror_oscillating.toml"))
    code = main(["simulate", path, "--seed", "5", "--out", str(tmp_path)])

    assert code == 0
    assert (tmp_path / "manifest.json").exists()
    assert "flux.csv" in capsys.readouterr().out


def test_parser_requires_command() -> None:
    """Test that a subcommand is mandatory."""
    with pytest.raises(SystemExit):
        build_parser().parse_args([])
