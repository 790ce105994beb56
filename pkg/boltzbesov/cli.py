"""CLI for BoltzBesov."""

import sys
from pathlib import Path
from typing import Literal, Optional

import typer

try:  # typer >= 0.2x vendors click; catch the exceptions it actually raises
    from typer import _click as click
except ImportError:
    import click
from pydantic import BaseModel, Field, ValidationError
from rich.console import Console
from rich.table import Table

from boltzbesov.collision.grid import VelocityGrid
from boltzbesov.config import RuntimeConfig, SimulationConfig
from boltzbesov.constants import (
    EXIT_NUMERICAL_ABORT,
    EXIT_OK,
    EXIT_SUITE_FAILURE,
    EXIT_VALIDATION,
    SUITES,
)
from boltzbesov.errors import (
    ArgumentError,
    BudgetExceededError,
    ConfigurationError,
    ContractionError,
    DomainError,
    NumericalAbort,
    NumericalError,
    PreconditionError,
)
from boltzbesov.kinetics.fluid import fluid_residual
from boltzbesov.kinetics.moments import MOMENT_COLUMNS, verify_moment_table
from boltzbesov.solver.cauchy import evolution_residual, picard_iterate, small_data_threshold
from boltzbesov.solver.context import build_context
from boltzbesov.solver.initial import scale_to
from boltzbesov.solver.io import read_snapshot, save_ledger, save_trajectory
from boltzbesov.solver.runner import ledger_for, run_nonlinear
from boltzbesov.spaces.norms import NormParams, besov_block_norms, besov_norm, sup_norm
from boltzbesov.utils.logging import RunLogger, configure_console_logging
from boltzbesov.verify.report import report_table, save_reports
from boltzbesov.verify.suites import run_suite

app = typer.Typer(
    help="BoltzBesov - Besov-space numerics for the non-cutoff Boltzmann equation",
    no_args_is_help=True,
)
console = Console()

Subcommand = Literal["simulate", "picard", "verify", "norms", "moments"]


class CliInvocation(BaseModel):
    """One parsed command line."""

    subcommand: Subcommand
    config: Optional[Path] = Field(None, description="JSON configuration (default: built-ins)")
    out: Optional[Path] = Field(None, description="Output directory override")
    seed: Optional[int] = Field(None, ge=0, lt=2**64, description="Seed override")
    threads: Optional[int] = Field(None, ge=1, description="Thread count override")
    suite: str = Field("core", description="Verification suite")
    snapshot: Optional[Path] = Field(None, description="Snapshot to measure (norms)")
    bisect: bool = Field(False, description="Estimate the small-data threshold first (picard)")
    verbose: bool = False


def load_configs(invocation: CliInvocation) -> tuple[SimulationConfig, RuntimeConfig]:
    """Resolve the simulation config and runtime overrides.

    Raises:
        ConfigurationError: Missing or invalid config file, or invalid overrides
    """
    config = (
        SimulationConfig.from_file(invocation.config) if invocation.config else SimulationConfig()
    )
    runtime = RuntimeConfig.load()
    if invocation.seed is not None:
        runtime.seed = invocation.seed
    if invocation.threads is not None:
        runtime.threads = invocation.threads
    if invocation.out is not None:
        runtime.out_dir = invocation.out
    errors = runtime.validate()
    if errors:
        raise ConfigurationError("; ".join(errors))
    return config, runtime


def run_header(invocation: CliInvocation, config: SimulationConfig, runtime: RuntimeConfig) -> dict:
    return {
        "subcommand": invocation.subcommand,
        "seed": runtime.seed,
        "kernel": config.kernel.describe(),
        "lattice": config.lattice.model_dump(),
        "velocity_grid": config.velocity.model_dump(),
    }


def _ledger_table(summary: dict, title: str) -> Table:
    table = Table(title=title)
    table.add_column("quantity", style="cyan")
    table.add_column("value", justify="right")
    for key in ("E_T", "D_T", "initial_size", "max_ratio", "min_f", "positivity_tolerance"):
        table.add_row(key, f"{summary[key]:.6e}")
    return table


def cmd_simulate(
    invocation: CliInvocation, config: SimulationConfig, runtime: RuntimeConfig, log: RunLogger
) -> int:
    context = build_context(config, runtime)
    traj, ledger = run_nonlinear(context, run_logger=log)
    save_ledger(log, ledger)
    save_trajectory(log, traj)
    summary = ledger.summary()
    if context.operator is not None and len(traj) >= 3:
        summary["fluid_residuals"] = fluid_residual(
            traj, context.operator, config.include_nonlinear, context.threads
        ).summary()
    log.save_json("summary", summary)
    console.print(_ledger_table(summary, "Nonlinear run"))
    for flag in ledger.flags:
        console.print(f"[yellow]{flag}[/yellow]")
    return EXIT_OK


def cmd_picard(
    invocation: CliInvocation, config: SimulationConfig, runtime: RuntimeConfig, log: RunLogger
) -> int:
    context = build_context(config, runtime)
    payload: dict = {}
    g0 = context.initial()
    if invocation.bisect:
        threshold = small_data_threshold(context, config.t_final)
        payload["threshold"] = threshold.to_dict()
        console.print(f"small-data threshold ~ {threshold.threshold:.3e}")
        context.config = config.model_copy(
            update={"small_data_threshold": threshold.threshold}
        )
        # half the threshold keeps the bisected datum inside the contracting range
        g0 = scale_to(g0, 0.5 * threshold.threshold, context.partition)
    traj, report = picard_iterate(g0, config.t_final, context)
    ledger = ledger_for(traj, context, report.ratios)
    save_ledger(log, ledger, "picard_ledger")
    payload["contraction"] = report.to_dict()
    payload["residual"] = (
        evolution_residual(traj, context)
        if context.operator is not None and len(traj) >= 3
        else None
    )
    log.save_json("picard", payload)

    table = Table(title="Picard iteration")
    table.add_column("n", justify="right")
    table.add_column("||w^n||", justify="right")
    table.add_column("ratio", justify="right")
    for n, diff in enumerate(report.differences):
        ratio = report.ratios[n - 1] if 0 < n <= len(report.ratios) else None
        table.add_row(str(n), f"{diff:.4e}", "-" if ratio is None else f"{ratio:.4f}")
    console.print(table)
    residual = payload["residual"]
    console.print(
        f"converged: {report.converged}, residual "
        + ("-" if residual is None else f"{residual:.3e}")
    )
    return EXIT_OK


def cmd_verify(
    invocation: CliInvocation, config: SimulationConfig, runtime: RuntimeConfig, log: RunLogger
) -> int:
    if invocation.suite not in SUITES:
        raise ConfigurationError(
            f"unknown suite '{invocation.suite}', choose one of {', '.join(SUITES)}"
        )
    reports = run_suite(invocation.suite, config, runtime, log)
    save_reports(log, reports, f"verify_{invocation.suite}")
    console.print(report_table(reports, f"Suite '{invocation.suite}'"))
    failures = [r for r in reports if not r.passed]
    for r in failures:
        for message in r.hard_failures:
            console.print(f"[red]{r.id}: {message}[/red]")
        if not r.stable:
            console.print(f"[red]{r.id}: refinement stability {r.stability:.3f}[/red]")
    return EXIT_SUITE_FAILURE if failures else EXIT_OK


def cmd_norms(
    invocation: CliInvocation, config: SimulationConfig, runtime: RuntimeConfig, log: RunLogger
) -> int:
    if invocation.snapshot is not None:
        g, time = read_snapshot(invocation.snapshot)
        source = str(invocation.snapshot)
    else:
        context = build_context(config.model_copy(update={"include_collision": False}), runtime)
        g, time, source = context.initial(), 0.0, "initial datum"
    values = {
        "L2": g.l2_norm(),
        "B^1/2_(2,1)": besov_norm(g, NormParams(s=0.5)),
        "B^3/2_(2,1)": besov_norm(g, NormParams(s=1.5)),
        "Bdot^3/2_(2,1)": besov_norm(g, NormParams(s=1.5, homogeneous=True)),
        "sup": sup_norm(g),
    }
    blocks = besov_block_norms(g, NormParams(s=1.5))
    log.save_json("norms", {"source": source, "time": time, "norms": values})
    log.save_csv("norm_blocks", ["q", "block_norm"], [[q, v] for q, v in blocks.items()])

    table = Table(title=f"Norms of {source} at t={time:g}")
    table.add_column("norm", style="cyan")
    table.add_column("value", justify="right")
    for name, value in values.items():
        table.add_row(name, f"{value:.6e}")
    console.print(table)
    return EXIT_OK


def cmd_moments(
    invocation: CliInvocation, config: SimulationConfig, runtime: RuntimeConfig, log: RunLogger
) -> int:
    grid = VelocityGrid(config.velocity.half_width, config.velocity.points)
    moment_table = verify_moment_table(grid)
    log.save_csv("moments", MOMENT_COLUMNS, moment_table.to_rows())

    table = Table(title=f"Maxwellian moments on V={grid.half_width:g}, N_v={grid.points}")
    for column in MOMENT_COLUMNS:
        table.add_column(column, justify="left" if column == "moment" else "right")
    for name, computed, reference, error in moment_table.to_rows():
        table.add_row(name, f"{computed:.12g}", f"{reference:g}", f"{error:.3e}")
    console.print(table)
    return EXIT_OK


HANDLERS = {
    "simulate": cmd_simulate,
    "picard": cmd_picard,
    "verify": cmd_verify,
    "norms": cmd_norms,
    "moments": cmd_moments,
}


def dispatch(invocation: CliInvocation) -> int:
    """Run one subcommand and map its outcome to an exit code.

    0 success, 1 validation error, 2 suite failure, 3 numerical abort.
    """
    configure_console_logging(invocation.verbose)
    try:
        config, runtime = load_configs(invocation)
        log = RunLogger(runtime.out_dir, header=run_header(invocation, config, runtime))
        log.log_event("config", config=config.to_dict(), runtime=runtime.to_dict())
        code = HANDLERS[invocation.subcommand](invocation, config, runtime, log)
        log.log_event("exit", code=code)
        console.print(f"[dim]outputs in {log.get_log_path()}[/dim]")
        return code
    except (
        ConfigurationError,
        ArgumentError,
        DomainError,
        PreconditionError,
        BudgetExceededError,
    ) as e:
        console.print(f"[red]Error: {e}[/red]")
        return EXIT_VALIDATION
    except (NumericalAbort, NumericalError, ContractionError) as e:
        console.print(f"[red]Numerical abort: {e}[/red]")
        return EXIT_NUMERICAL_ABORT


ConfigOption = typer.Option(None, "--config", "-c", help="JSON configuration file")
OutOption = typer.Option(None, "--out", "-o", help="Output directory")
SeedOption = typer.Option(None, "--seed", help="Random seed (unsigned 64-bit)")
ThreadsOption = typer.Option(None, "--threads", "-j", help="Worker threads")
VerboseOption = typer.Option(False, "--verbose", "-v", help="Debug logging")


def _run(subcommand: Subcommand, **options: object) -> None:
    try:
        invocation = CliInvocation(subcommand=subcommand, **options)  # type: ignore[arg-type]
    except ValidationError as e:
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(EXIT_VALIDATION) from e
    raise typer.Exit(dispatch(invocation))


@app.command()
def simulate(
    config: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
    seed: Optional[int] = SeedOption,
    threads: Optional[int] = ThreadsOption,
    verbose: bool = VerboseOption,
) -> None:
    """Integrate the perturbation equation and write the norm ledger and snapshots."""
    _run("simulate", config=config, out=out, seed=seed, threads=threads, verbose=verbose)


@app.command()
def picard(
    config: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
    seed: Optional[int] = SeedOption,
    threads: Optional[int] = ThreadsOption,
    bisect: bool = typer.Option(False, "--bisect", help="Estimate the small-data threshold"),
    verbose: bool = VerboseOption,
) -> None:
    """Run the Picard iteration and report its contraction ratios."""
    _run(
        "picard",
        config=config,
        out=out,
        seed=seed,
        threads=threads,
        bisect=bisect,
        verbose=verbose,
    )


@app.command()
def verify(
    config: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
    seed: Optional[int] = SeedOption,
    threads: Optional[int] = ThreadsOption,
    suite: str = typer.Option("core", "--suite", "-s", help=f"One of {', '.join(SUITES)}"),
    verbose: bool = VerboseOption,
) -> None:
    """Fit the constants of a verification suite."""
    _run(
        "verify", config=config, out=out, seed=seed, threads=threads, suite=suite, verbose=verbose
    )


@app.command()
def norms(
    config: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
    seed: Optional[int] = SeedOption,
    threads: Optional[int] = ThreadsOption,
    snapshot: Optional[Path] = typer.Option(None, "--snapshot", help="Snapshot .bin or .json"),
    verbose: bool = VerboseOption,
) -> None:
    """Besov norms of a snapshot (default: the configured initial datum)."""
    _run(
        "norms",
        config=config,
        out=out,
        seed=seed,
        threads=threads,
        snapshot=snapshot,
        verbose=verbose,
    )


@app.command()
def moments(
    config: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
    verbose: bool = VerboseOption,
) -> None:
    """Tabulate the Maxwellian moments on the configured velocity grid."""
    _run("moments", config=config, out=out, verbose=verbose)


def main(argv: Optional[list[str]] = None) -> int:
    """Console entry point; usage errors exit with the validation code."""
    try:
        code = app(args=argv, standalone_mode=False)
    except click.exceptions.UsageError as e:
        e.show()
        return EXIT_VALIDATION
    except click.exceptions.Abort:
        return EXIT_VALIDATION
    return int(code or EXIT_OK)


if __name__ == "__main__":
    sys.exit(main())
