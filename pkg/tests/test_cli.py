"""Tests for the command-line interface."""

import json

import pytest
from typer.testing import CliRunner

from boltzbesov.cli import app, main

from tests.conftest import small_config_dict

runner = CliRunner()


@pytest.fixture
def out_dir(temp_dir):
    return temp_dir / "out"


def invoke(*args: str):
    return runner.invoke(app, list(args))


def test_moments_writes_csv(config_file, out_dir):
    result = invoke("moments", "--config", str(config_file()), "--out", str(out_dir))

    assert result.exit_code == 0
    lines = (out_dir / "moments.csv").read_text().splitlines()
    assert lines[0].startswith("# generated_at=")
    assert lines[2].startswith("moment,")


def test_missing_config_is_a_validation_error(temp_dir, out_dir):
    result = invoke("moments", "--config", str(temp_dir / "missing.json"), "--out", str(out_dir))

    assert result.exit_code == 1
    assert "Error" in result.output


def test_negative_seed_rejected(config_file, out_dir):
    result = invoke("norms", "--config", str(config_file()), "--out", str(out_dir), "--seed=-1")

    assert result.exit_code == 1


def test_unknown_subcommand():
    assert main(["bogus"]) == 1


@pytest.mark.slow
def test_verify_core_on_zero_family(config_file, out_dir):
    family = {**small_config_dict()["family"], "amplitude": 0.0}
    path = config_file(family=family)

    result = invoke("verify", "--config", str(path), "--out", str(out_dir), "--suite", "core")

    assert result.exit_code == 0
    document = json.loads((out_dir / "verify_core.json").read_text())
    assert document["passed"] is True
    assert (out_dir / "verify_core.txt").exists()


def test_verify_unknown_suite(config_file, out_dir):
    result = invoke("verify", "--config", str(config_file()), "--out", str(out_dir), "-s", "x")

    assert result.exit_code == 1


def test_norms_of_initial_datum(config_file, out_dir):
    result = invoke("norms", "--config", str(config_file()), "--out", str(out_dir))

    assert result.exit_code == 0
    document = json.loads((out_dir / "norms.json").read_text())
    assert document["source"] == "initial datum"
    assert document["norms"]["B^3/2_(2,1)"] == pytest.approx(1e-3, rel=1e-9)
    assert (out_dir / "norm_blocks.csv").exists()


@pytest.mark.slow
def test_simulate_then_measure_snapshot(config_file, out_dir):
    """Test the ledger, snapshots and summary, then norms of a written snapshot."""
    result = invoke("simulate", "--config", str(config_file()), "--out", str(out_dir))

    assert result.exit_code == 0
    ledger = (out_dir / "ledger.csv").read_text().splitlines()
    assert ledger[2] == "t,E_t,D_t,ratio,min_f,picard_ratio"
    assert len(ledger) == 3 + 3
    summary = json.loads((out_dir / "summary.json").read_text())
    assert "fluid_residuals" in summary
    events = [json.loads(line) for line in (out_dir / "events.ndjson").read_text().splitlines()]
    assert events[0]["kind"] == "config"
    assert events[-1] == {**events[-1], "kind": "exit", "code": 0}

    snapshot = out_dir / "snapshots" / "g_00002.bin"
    measured = invoke("norms", "--snapshot", str(snapshot), "--out", str(out_dir / "norms"))

    assert measured.exit_code == 0
    document = json.loads((out_dir / "norms" / "norms.json").read_text())
    assert document["time"] == pytest.approx(0.02)


def test_transport_only_picard(config_file, out_dir):
    path = config_file(include_collision=False)

    result = invoke("picard", "--config", str(path), "--out", str(out_dir))

    assert result.exit_code == 0
    document = json.loads((out_dir / "picard.json").read_text())
    assert document["contraction"]["converged"] is True
    assert document["residual"] is None
    assert (out_dir / "picard_ledger.csv").exists()
