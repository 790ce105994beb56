"""Tests for run files: CSV/JSON reports, event transcript and snapshots."""

import json

import numpy as np
import pytest

from boltzbesov.errors import ArgumentError
from boltzbesov.solver.io import read_snapshot, save_ledger, save_trajectory, write_snapshot
from boltzbesov.solver.ledger import LEDGER_COLUMNS, NormLedger
from boltzbesov.spaces.partition import build_partition
from boltzbesov.state import Trajectory
from boltzbesov.utils.logging import RunLogger
from boltzbesov.utils.parallel import chunk_ranges, parallel_map

HEADER = {"seed": 7, "kernel": {"gamma": -0.5}}


@pytest.fixture
def run_logger(temp_dir):
    return RunLogger(temp_dir / "out", header=HEADER, run_id="test")


def test_csv_has_provenance_lines(run_logger):
    path = run_logger.save_csv("table", ["a", "b"], [[1, 0.5], ["x", 2.0]])

    lines = path.read_text().splitlines()

    assert lines[0].startswith("# generated_at=")
    assert json.loads(lines[1][2:]) == HEADER
    assert lines[2] == "a,b"
    assert lines[3] == "1,0.5"


def test_json_report_has_header(run_logger):
    path = run_logger.save_json("report", {"value": np.float64(1.5), "array": np.arange(2)})

    document = json.loads(path.read_text())

    assert list(document)[0] == "generated_at"
    assert document["header"] == HEADER
    assert document["value"] == 1.5
    assert document["array"] == [0, 1]


def test_events_are_appended(run_logger):
    run_logger.log_event("config", dt=0.01)
    run_logger.log_event("warning", message="careful")

    events = [json.loads(line) for line in run_logger.events_path.read_text().splitlines()]

    assert [e["kind"] for e in events] == ["config", "warning"]
    assert events[0]["run_id"] == "test"
    assert run_logger.get_log_path().endswith("out")


def test_save_text(run_logger):
    path = run_logger.save_text("summary", "hello\n")

    assert path.read_text() == "hello\n"


def test_snapshot_roundtrip(run_logger, kinetic_field):
    stem = run_logger.snapshot_path("g_test")

    path = write_snapshot(stem, kinetic_field, 0.25, HEADER)
    field, time = read_snapshot(path)

    assert path.suffix == ".bin"
    assert time == 0.25
    assert field.grid == kinetic_field.grid
    np.testing.assert_array_equal(field.coeffs, kinetic_field.coeffs)
    sidecar = json.loads(stem.with_suffix(".json").read_text())
    assert sidecar["dtype"] == "<c16"
    assert sidecar["header"] == HEADER


def test_snapshot_size_mismatch(run_logger, kinetic_field):
    stem = run_logger.snapshot_path("broken")
    path = write_snapshot(stem, kinetic_field, 0.0, HEADER)
    path.write_bytes(path.read_bytes()[:-16])

    with pytest.raises(ArgumentError, match="sidecar"):
        read_snapshot(path)


def test_scalar_snapshot_roundtrip(run_logger, scalar_field):
    path = write_snapshot(run_logger.snapshot_path("rho"), scalar_field, 1.0, HEADER)

    field, _ = read_snapshot(path)

    assert field.grid is None
    np.testing.assert_array_equal(field.coeffs, scalar_field.coeffs)


def test_save_trajectory_and_ledger(run_logger, kinetic_field, lattice, grid):
    traj = Trajectory.constant(kinetic_field, [0.0, 0.1])
    ledger = NormLedger(build_partition(lattice), np.eye(grid.size), kinetic_field, 1e3)
    for t, g in zip(traj.times, traj.fields):
        ledger.record(t, g)

    paths = save_trajectory(run_logger, traj)
    csv_path = save_ledger(run_logger, ledger)

    assert [p.name for p in paths] == ["g_00000.bin", "g_00001.bin"]
    assert csv_path.read_text().splitlines()[2] == ",".join(LEDGER_COLUMNS)


def test_parallel_map_preserves_order():
    items = list(range(10))

    assert parallel_map(lambda x: x * x, items, threads=3) == [x * x for x in items]
    assert parallel_map(lambda x: -x, items) == [-x for x in items]


def test_chunk_ranges_cover_everything():
    slices = list(chunk_ranges(10, 4))

    assert [(s.start, s.stop) for s in slices] == [(0, 4), (4, 8), (8, 10)]
    assert list(chunk_ranges(3, 0)) == [slice(0, 1), slice(1, 2), slice(2, 3)]
