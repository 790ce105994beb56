"""Run logging utilities."""

import csv
import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Optional

from rich.logging import RichHandler


def configure_console_logging(verbose: bool = False) -> None:
    """Route library loggers through rich.

    Args:
        verbose: Emit DEBUG records instead of INFO
    """
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(rich_tracebacks=True, show_path=False)],
        force=True,
    )


class RunLogger:
    """Handles output files for one CLI invocation.

    Every CSV starts with a single ``# generated_at=...`` line and every JSON
    report carries ``generated_at`` on its first line; everything else is a
    deterministic function of the invocation and seed.
    """

    def __init__(self, out_dir: Path, header: Optional[dict] = None, run_id: Optional[str] = None):
        """Initialize run logger.

        Args:
            out_dir: Output directory (created if missing)
            header: Provenance fields (seed, kernel, grids) stamped on every file
            run_id: Optional run ID (generated if not provided)
        """
        self.run_id = run_id or datetime.now().strftime("%Y%m%d_%H%M%S")
        self.header = header or {}

        self.log_dir = out_dir
        self.log_dir.mkdir(parents=True, exist_ok=True)

        self.events_path = self.log_dir / "events.ndjson"
        self.snapshot_dir = self.log_dir / "snapshots"

    def log_event(self, kind: str, **payload: Any) -> None:
        """Append one event to the run transcript.

        Args:
            kind: Event kind (config, warning, step, report...)
            **payload: JSON-serializable event fields
        """
        entry = {
            "ts": datetime.now().isoformat(),
            "run_id": self.run_id,
            "kind": kind,
            **payload,
        }

        with open(self.events_path, "a") as f:
            f.write(json.dumps(entry, default=str) + "\n")

    def save_json(self, name: str, payload: dict) -> Path:
        """Save a JSON report with the provenance header.

        Args:
            name: File stem
            payload: Report body

        Returns:
            Path of the written file
        """
        path = self.log_dir / f"{name}.json"
        document = {
            "generated_at": datetime.now().isoformat(),
            "header": self.header,
            **payload,
        }
        with open(path, "w") as f:
            json.dump(document, f, indent=2, default=_jsonable)
            f.write("\n")
        return path

    def save_csv(self, name: str, columns: list[str], rows: list[list[Any]]) -> Path:
        """Save a CSV table preceded by timestamp and provenance comment lines.

        Args:
            name: File stem
            columns: Column names
            rows: Table rows

        Returns:
            Path of the written file
        """
        path = self.log_dir / f"{name}.csv"
        with open(path, "w", newline="") as f:
            f.write(f"# generated_at={datetime.now().isoformat()}\n")
            f.write(f"# {json.dumps(self.header, sort_keys=True, default=_jsonable)}\n")
            writer = csv.writer(f)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_format_cell(cell) for cell in row])
        return path

    def save_text(self, name: str, text: str) -> Path:
        """Save a human-readable text artifact."""
        path = self.log_dir / f"{name}.txt"
        path.write_text(text)
        return path

    def snapshot_path(self, name: str) -> Path:
        """Path stem for a binary snapshot (sidecar gets ``.json``)."""
        self.snapshot_dir.mkdir(exist_ok=True)
        return self.snapshot_dir / name

    def get_log_path(self) -> str:
        """Get the path to the output directory.

        Returns:
            Absolute path to output directory
        """
        return str(self.log_dir.absolute())


def _format_cell(cell: Any) -> Any:
    if isinstance(cell, float):
        return repr(cell)
    return cell


def _jsonable(obj: Any) -> Any:
    # numpy scalars and arrays
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")
