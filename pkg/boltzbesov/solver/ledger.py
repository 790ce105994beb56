"""Running energy and dissipation norms of a solver run.

Every recorded state updates, per dyadic block q,

* the running sup of ||Delta_q g||_{L^2_{x,v}}            (energy E_t)
* the trapezoid integral of ||grad Delta_q (a, b, c)||^2  (macro dissipation)
* the trapezoid integral of || |||Delta_q (I - P) g||| ||^2_{L^2_x}  (micro dissipation)

so E_t and D_t are nondecreasing in t by construction.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from boltzbesov.constants import BESOV_ENERGY_REGULARITY, BESOV_MACRO_REGULARITY
from boltzbesov.errors import ArgumentError
from boltzbesov.kinetics.macro import project_P
from boltzbesov.kinetics.maxwellian import maxwellian
from boltzbesov.spaces.lattice import SpectralField, gradient
from boltzbesov.spaces.norms import block_norm, energy_norm, quadratic_form_x_norm
from boltzbesov.spaces.partition import DyadicPartition, block_decomposition

logger = logging.getLogger(__name__)

LEDGER_COLUMNS = ["t", "E_t", "D_t", "ratio", "min_f", "picard_ratio"]


@dataclass
class LedgerRow:
    t: float
    E_t: float
    D_t: float
    ratio: float
    min_f: float
    picard_ratio: Optional[float] = None

    def as_list(self) -> list:
        return [self.t, self.E_t, self.D_t, self.ratio, self.min_f, self.picard_ratio]


@dataclass
class BlockState:
    """Snapshot quantities of one state, per block."""

    energy: dict[int, float]
    macro: dict[int, float]
    micro: dict[int, float]


def min_distribution(g: SpectralField) -> float:
    """min over (x, v) of f = mu + mu^(1/2) g."""
    if g.grid is None:
        raise ArgumentError("min_f needs a kinetic field")
    mu = maxwellian(g.grid)
    return float(np.min(mu + np.sqrt(mu) * g.to_physical()))


class NormLedger:
    """Incremental E_t, D_t, bound ratio and positivity monitor."""

    def __init__(
        self,
        partition: DyadicPartition,
        form: np.ndarray,
        g0: SpectralField,
        bound_ratio_limit: float,
        positivity_tolerance: float = 0.0,
    ):
        """Initialize the ledger.

        Args:
            partition: Dyadic partition of the lattice
            form: Matrix of the squared triple norm on the velocity grid
            g0: Initial datum (sets the normalization of the ratio)
            bound_ratio_limit: Ratios above this are flagged
            positivity_tolerance: epsilon_pos for the min_f monitor
        """
        self.partition = partition
        self.form = form
        self.initial_size = energy_norm(g0, partition)
        self.bound_ratio_limit = bound_ratio_limit
        self.positivity_tolerance = positivity_tolerance
        self.rows: list[LedgerRow] = []
        self.flags: list[str] = []
        self._sup: dict[int, float] = {}
        self._macro_integral: dict[int, float] = {}
        self._micro_integral: dict[int, float] = {}
        self._last: Optional[tuple[float, BlockState]] = None

    def _block_state(self, g: SpectralField) -> BlockState:
        macro, pg = project_P(g)
        micro = g - pg
        energy = {q: block_norm(b) for q, b in block_decomposition(g, self.partition).items()}
        macro_sq: dict[int, float] = {q: 0.0 for q in energy}
        for f in (macro.a_field, macro.b_field, macro.c_field):
            for q, b in block_decomposition(f, self.partition).items():
                macro_sq[q] += gradient(b).l2_norm() ** 2
        micro_sq = {
            q: quadratic_form_x_norm(b, self.form) ** 2
            for q, b in block_decomposition(micro, self.partition).items()
        }
        return BlockState(energy=energy, macro=macro_sq, micro=micro_sq)

    def record(self, t: float, g: SpectralField, picard_ratio: Optional[float] = None) -> LedgerRow:
        """Fold one state into the running norms and append a row."""
        state = self._block_state(g)
        for q, value in state.energy.items():
            self._sup[q] = max(self._sup.get(q, 0.0), value)
        if self._last is not None:
            t_prev, prev = self._last
            span = t - t_prev
            for q in state.macro:
                self._macro_integral[q] = self._macro_integral.get(q, 0.0) + 0.5 * span * (
                    prev.macro[q] + state.macro[q]
                )
                self._micro_integral[q] = self._micro_integral.get(q, 0.0) + 0.5 * span * (
                    prev.micro[q] + state.micro[q]
                )
        self._last = (t, state)

        e_t = self.energy
        d_t = self.dissipation
        ratio = (e_t + d_t) / self.initial_size if self.initial_size > 0 else 0.0
        row = LedgerRow(
            t=t, E_t=e_t, D_t=d_t, ratio=ratio, min_f=min_distribution(g), picard_ratio=picard_ratio
        )
        self.rows.append(row)
        self._flag(row)
        return row

    def _flag(self, row: LedgerRow) -> None:
        if row.ratio > self.bound_ratio_limit:
            self._add_flag(
                f"bound ratio {row.ratio:.3e} exceeds {self.bound_ratio_limit:.1e} at t={row.t:.4g}"
            )
        if row.min_f < -self.positivity_tolerance:
            self._add_flag(
                f"min f = {row.min_f:.3e} below -{self.positivity_tolerance:.1e} at t={row.t:.4g}"
            )

    def _add_flag(self, message: str) -> None:
        logger.warning(message)
        self.flags.append(message)

    @staticmethod
    def _weighted(per_block: dict[int, float], s: float) -> float:
        return float(sum(2.0 ** (q * s) * v for q, v in per_block.items()))

    @property
    def energy(self) -> float:
        """E_t = ||g||_{L~^inf_t L~^2_v(B^{3/2})} so far."""
        return self._weighted(self._sup, BESOV_ENERGY_REGULARITY)

    @property
    def macro_dissipation(self) -> float:
        roots = {q: math.sqrt(v) for q, v in self._macro_integral.items()}
        return self._weighted(roots, BESOV_MACRO_REGULARITY)

    @property
    def micro_dissipation(self) -> float:
        roots = {q: math.sqrt(v) for q, v in self._micro_integral.items()}
        return self._weighted(roots, BESOV_ENERGY_REGULARITY)

    @property
    def dissipation(self) -> float:
        """D_t = ||grad(a,b,c)||_{L~^2_t(B^{1/2})} + ||(I-P)g||_{T^{3/2}_{t,2,2}} so far."""
        return self.macro_dissipation + self.micro_dissipation

    @property
    def min_f(self) -> float:
        return min((r.min_f for r in self.rows), default=math.inf)

    @property
    def max_ratio(self) -> float:
        return max((r.ratio for r in self.rows), default=0.0)

    def to_rows(self) -> list[list]:
        return [row.as_list() for row in self.rows]

    def summary(self) -> dict:
        return {
            "E_T": self.energy,
            "D_T": self.dissipation,
            "initial_size": self.initial_size,
            "max_ratio": self.max_ratio,
            "min_f": self.min_f,
            "positivity_tolerance": self.positivity_tolerance,
            "flags": list(self.flags),
        }


@dataclass
class ContractionReport:
    """Picard iteration history."""

    differences: list[float] = field(default_factory=list)
    ratios: list[float] = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self) -> int:
        return len(self.differences)

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "differences": self.differences,
            "ratios": self.ratios,
            "converged": self.converged,
        }
