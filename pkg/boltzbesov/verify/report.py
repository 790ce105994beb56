"""Fitted-constant reports and their JSON / text rendering."""

import io
import math
from dataclasses import dataclass, field
from typing import Literal, Optional

from rich.console import Console
from rich.table import Table

from boltzbesov.constants import DEFAULT_STABILITY_FACTOR, SCALING_TOLERANCE
from boltzbesov.utils.logging import RunLogger

# |lhs| and |rhs| at or below this count as zero
ZERO = 1e-300


def sample_ratio(lhs: float, rhs: float) -> Optional[float]:
    """lhs / rhs, None for 0/0 (a skipped sample), inf for a positive lhs over 0."""
    if abs(rhs) <= ZERO:
        return None if abs(lhs) <= ZERO else math.inf
    return lhs / rhs


@dataclass
class ConstantReport:
    """Per-sample ratios LHS / RHS-without-constant for one inequality.

    ``mode="max"`` fits an upper constant (the maximum ratio); ``mode="min"``
    fits a lower constant such as a coercivity bound (the minimum ratio).
    """

    id: str
    description: str
    header: dict = field(default_factory=dict)
    ratios: list[Optional[float]] = field(default_factory=list)
    mode: Literal["max", "min"] = "max"
    refinement: dict[str, float] = field(default_factory=dict)
    stability_factor: float = DEFAULT_STABILITY_FACTOR
    hard_failures: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)
    snapshots: Optional[int] = None
    # round-off level checks carry no constant worth comparing across grids
    track_stability: bool = True

    def add(self, ratio: Optional[float]) -> None:
        self.ratios.append(ratio)

    def fail(self, message: str) -> None:
        self.hard_failures.append(message)

    def check_scaling(self, ratio: Optional[float], scaled: Optional[float], index: int) -> None:
        """Record a failure unless the ratio is invariant under positive scaling."""
        if ratio is None or scaled is None:
            if (ratio is None) != (scaled is None):
                self.fail(f"sample {index}: scaling changed a skipped sample")
            return
        if not math.isfinite(ratio):
            return
        if abs(scaled - ratio) > SCALING_TOLERANCE * max(abs(ratio), 1.0):
            self.fail(f"sample {index}: ratio {ratio:.12e} became {scaled:.12e} under scaling")

    @property
    def measured(self) -> list[float]:
        return [r for r in self.ratios if r is not None]

    @property
    def skipped(self) -> int:
        return sum(1 for r in self.ratios if r is None)

    @property
    def constant(self) -> float:
        """The fitted constant; 0 when every sample was skipped."""
        values = self.measured
        if not values:
            return 0.0
        return max(values) if self.mode == "max" else min(values)

    def add_refinement(self, label: str, constant: float) -> None:
        self.refinement[label] = constant

    @property
    def stability(self) -> float:
        """max / min of the constants across refinements (1 when there is nothing to compare)."""
        values = [abs(v) for v in self.refinement.values()]
        if not self.track_stability or len(values) < 2 or max(values) == 0.0:
            return 1.0
        if min(values) == 0.0:
            return math.inf
        return max(values) / min(values)

    @property
    def stable(self) -> bool:
        return self.stability <= self.stability_factor

    @property
    def passed(self) -> bool:
        if self.hard_failures or not self.stable:
            return False
        return math.isfinite(self.constant)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "description": self.description,
            "header": self.header,
            "mode": self.mode,
            "samples": len(self.ratios),
            "skipped": self.skipped,
            "ratios": self.ratios,
            "constant": self.constant,
            "refinement": self.refinement,
            "stability": self.stability,
            "stability_factor": self.stability_factor,
            "snapshots": self.snapshots,
            "hard_failures": self.hard_failures,
            "details": self.details,
            "passed": self.passed,
        }


def merge_refinements(
    reports: list[list[ConstantReport]], labels: list[str]
) -> list[ConstantReport]:
    """Fold the same checks run at several resolutions into the first run's reports.

    Args:
        reports: One list of reports per resolution, same ids in each
        labels: Resolution label per list (e.g. "N_v=8")

    Returns:
        The first resolution's reports with refinement tables filled in
    """
    base = reports[0]
    by_id = [{r.id: r for r in run} for run in reports]
    for report in base:
        for label, run in zip(labels, by_id):
            other = run.get(report.id)
            if other is None:
                continue
            report.add_refinement(label, other.constant)
            if other is not report:
                report.hard_failures.extend(f"{label}: {m}" for m in other.hard_failures)
    return base


def report_table(reports: list[ConstantReport], title: str = "Fitted constants") -> Table:
    table = Table(title=title)
    table.add_column("id", style="cyan")
    table.add_column("samples", justify="right")
    table.add_column("skipped", justify="right")
    table.add_column("constant", justify="right")
    table.add_column("refinement")
    table.add_column("stability", justify="right")
    table.add_column("status")
    for r in reports:
        refinement = ", ".join(f"{k}: {v:.3e}" for k, v in r.refinement.items())
        status = "[green]pass[/green]" if r.passed else "[red]FAIL[/red]"
        table.add_row(
            r.id,
            str(len(r.ratios)),
            str(r.skipped),
            f"{r.constant:.4e}",
            refinement or "-",
            f"{r.stability:.3f}",
            status,
        )
    return table


def render_text(reports: list[ConstantReport], title: str = "Fitted constants") -> str:
    """Plain-text rendering of the report table."""
    console = Console(record=True, width=140, file=io.StringIO())
    console.print(report_table(reports, title))
    failures = [f"{r.id}: {m}" for r in reports for m in r.hard_failures]
    for line in failures:
        console.print(line)
    return console.export_text()


def save_reports(run_logger: RunLogger, reports: list[ConstantReport], name: str) -> None:
    run_logger.save_json(
        name,
        {
            "passed": all(r.passed for r in reports),
            "reports": [r.to_dict() for r in reports],
        },
    )
    run_logger.save_text(name, render_text(reports, title=name))
