"""State containers shared by the solver, ledger and verification harness."""

from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from boltzbesov.errors import ArgumentError
from boltzbesov.spaces.lattice import SpectralField


@dataclass
class SolverState:
    """Perturbation g at one instant."""

    time: float
    g: SpectralField
    step_index: int = 0


@dataclass
class Trajectory:
    """Time series of spectral snapshots with strictly increasing times."""

    times: list[float] = field(default_factory=list)
    fields: list[SpectralField] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.times)

    def append(self, time: float, g: SpectralField) -> None:
        if self.times and time <= self.times[-1]:
            raise ArgumentError(f"snapshot time {time} does not increase past {self.times[-1]}")
        self.times.append(float(time))
        self.fields.append(g)

    @property
    def horizon(self) -> float:
        return self.times[-1] - self.times[0] if self.times else 0.0

    def validate(self, min_snapshots: int = 1) -> None:
        """Raise unless the trajectory has enough, strictly increasing snapshots."""
        if len(self) < min_snapshots:
            raise ArgumentError(
                f"trajectory needs at least {min_snapshots} snapshot(s), has {len(self)}"
            )
        if np.any(np.diff(self.times) <= 0):
            raise ArgumentError("snapshot times must be strictly increasing")

    def at(self, time: float) -> SpectralField:
        """Linear interpolation in time; constant beyond the ends."""
        self.validate()
        times = self.times
        if time <= times[0]:
            return self.fields[0]
        if time >= times[-1]:
            return self.fields[-1]
        j = int(np.searchsorted(times, time)) - 1
        w = (time - times[j]) / (times[j + 1] - times[j])
        return self.fields[j] * (1.0 - w) + self.fields[j + 1] * w

    def map(self, fn: Callable[[SpectralField], SpectralField]) -> "Trajectory":
        """Apply a field transform snapshot-wise."""
        return Trajectory(list(self.times), [fn(g) for g in self.fields])

    @classmethod
    def constant(cls, g: SpectralField, times: list[float]) -> "Trajectory":
        return cls(list(times), [g for _ in times])

    def thinned(self, every: int, keep_last: bool = True) -> "Trajectory":
        """Keep every ``every``-th snapshot (and the last one)."""
        idx = list(range(0, len(self), every))
        if keep_last and idx and idx[-1] != len(self) - 1:
            idx.append(len(self) - 1)
        return Trajectory([self.times[i] for i in idx], [self.fields[i] for i in idx])

    def metadata(self) -> Optional[dict]:
        if not self.fields:
            return None
        g = self.fields[0]
        return {
            "snapshots": len(self),
            "lattice_points": g.lattice.points,
            "half_length": g.lattice.half_length,
            "velocity_points": g.grid.points if g.grid else None,
        }
