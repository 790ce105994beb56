"""Ledger CSVs and binary snapshot tensors with JSON sidecars."""

import json
from pathlib import Path

import numpy as np

from boltzbesov.collision.grid import VelocityGrid
from boltzbesov.errors import ArgumentError
from boltzbesov.solver.ledger import LEDGER_COLUMNS, NormLedger
from boltzbesov.spaces.lattice import FrequencyLattice, SpectralField
from boltzbesov.state import Trajectory
from boltzbesov.utils.logging import RunLogger

SNAPSHOT_DTYPE = "<c16"


def save_ledger(run_logger: RunLogger, ledger: NormLedger, name: str = "ledger") -> Path:
    return run_logger.save_csv(name, LEDGER_COLUMNS, ledger.to_rows())


def write_snapshot(stem: Path, g: SpectralField, time: float, header: dict) -> Path:
    """Write coefficients as raw little-endian complex128 plus a ``.json`` sidecar.

    Returns:
        Path of the binary tensor
    """
    data = np.ascontiguousarray(g.coeffs, dtype=SNAPSHOT_DTYPE)
    path = stem.with_suffix(".bin")
    path.write_bytes(data.tobytes(order="C"))
    sidecar = {
        "header": header,
        "time": time,
        "shape": list(data.shape),
        "dtype": SNAPSHOT_DTYPE,
        "endianness": "little",
        "order": "C",
        "space": "x-frequency (norm=forward) x flattened velocity grid",
        "lattice": {"half_length": g.lattice.half_length, "points": g.lattice.points},
        "velocity_grid": (
            {"half_width": g.grid.half_width, "points": g.grid.points} if g.grid else None
        ),
    }
    stem.with_suffix(".json").write_text(json.dumps(sidecar, indent=2, default=str) + "\n")
    return path


def read_snapshot(path: Path) -> tuple[SpectralField, float]:
    """Read a snapshot written by ``write_snapshot`` (either file of the pair).

    Raises:
        ArgumentError: Sidecar and tensor disagree
    """
    meta = json.loads(path.with_suffix(".json").read_text())
    raw = path.with_suffix(".bin").read_bytes()
    shape = tuple(meta["shape"])
    coeffs = np.frombuffer(raw, dtype=meta["dtype"])
    if coeffs.size != int(np.prod(shape)):
        raise ArgumentError(f"{path}: tensor has {coeffs.size} entries, sidecar says {shape}")
    lattice = FrequencyLattice(**meta["lattice"])
    grid = VelocityGrid(**meta["velocity_grid"]) if meta["velocity_grid"] else None
    field = SpectralField(coeffs.reshape(shape).astype(complex), lattice, grid)
    return field, float(meta["time"])


def save_trajectory(run_logger: RunLogger, traj: Trajectory, prefix: str = "g") -> list[Path]:
    """One snapshot pair per stored state, named ``<prefix>_<index>``."""
    return [
        write_snapshot(run_logger.snapshot_path(f"{prefix}_{n:05d}"), g, t, run_logger.header)
        for n, (t, g) in enumerate(zip(traj.times, traj.fields))
    ]
