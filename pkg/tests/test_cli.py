import json

import pytest

from context import qproc
from qproc.cli import QProcCLI
from qproc.errors import ValidationError
from scripts.cli import main


def test_analyze_json():
    """
    Test the analyze command.

    The JSON document carries the schema version, the echoed config and
    both hierarchies.
    """
    document = json.loads(QProcCLI().analyze("preset:3symbol-qgm", L=12))
    assert document["schema_version"]
    assert document["config"]["source"] == "preset:3symbol-qgm"
    assert document["quantum"]["entropy_rate"] == pytest.approx(0.6667, abs=0.002)
    assert document["quantum_unifilar"]
    assert document["entropy_rate_exact"] == pytest.approx(2 / 3)


def test_analyze_csv():
    """
    Test the analyze command with CSV output: one S(ℓ) row per length.
    """
    lines = QProcCLI().analyze("preset:qgm", L=4, format="csv").splitlines()
    assert lines[0] == "ell,value"
    assert len(lines) == 6


def test_outputs_are_deterministic():
    """
    Test that repeated runs print identical documents, sampling included.
    """
    cli = QProcCLI()
    assert cli.sync("preset:qgm", L=6) == cli.sync("preset:qgm", L=6)
    assert cli.tomo("preset:qgm", samples=2000, seed=3) == cli.tomo("preset:qgm", samples=2000, seed=3)


def test_measure_and_sync_commands():
    """
    Test the measure and sync commands on the QGM.
    """
    cli = QProcCLI()
    measured = json.loads(cli.measure("preset:qgm", protocol="repeated:M01", L=8))
    assert measured["tag"] == "stationary"
    synced = json.loads(cli.sync("preset:qgm", protocol="repeated:Mpm", L=8))
    assert synced["uncertainty"]["c_inf"] > 0.5
    assert "machine" not in synced


def test_bad_arguments():
    """
    Test RunConfig validation through the CLI.
    """
    with pytest.raises(ValidationError):
        QProcCLI().analyze("preset:qgm", L=0)
    with pytest.raises(ValidationError):
        QProcCLI().analyze("preset:qgm", format="xml")


def test_main_exit_code(capsys):
    """
    Test that main() maps a validation error to exit code 2.
    """
    with pytest.raises(SystemExit) as excinfo:
        main(["analyze", "preset:nope"])
    assert excinfo.value.code == 2
    assert "error:" in capsys.readouterr().err


def test_sync_reports_convergence():
    """
    Test that the sync command flags a curve that has not converged at L.
    """
    synced = json.loads(QProcCLI().sync("preset:qutrit", protocol="preset:qutrit-012-sync", L=10))
    assert synced["uncertainty"]["converged"] is False
    assert synced["uncertainty"]["sync_info"] == "unconverged"
