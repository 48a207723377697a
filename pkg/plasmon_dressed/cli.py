"""Command-line interface for plasmon-dressed."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from . import __version__
from .api import Command, CommandResult, run_command
from .core.config import load_config
from .core.errors import ConfigError, PlasmonError
from .core.spectra import Projection

app = typer.Typer(
    name="plasmon",
    help="Emitter strongly coupled to the plasmons of a metal nanosphere",
    add_completion=False,
)
spectrum_app = typer.Typer(help="Near-field and far-field spectra", add_completion=False)
app.add_typer(spectrum_app, name="spectrum")

console = Console()
err_console = Console(stderr=True)

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


def _fail(error: Exception) -> None:
    """Print the machine-readable error object and exit with the matching code."""
    if isinstance(error, ConfigError):
        code = EXIT_CONFIG
    elif isinstance(error, PlasmonError):
        code = EXIT_NUMERICAL
    else:
        code = 1
    payload: Dict[str, Any] = {
        "error": type(error).__name__,
        "message": str(error),
        "exit_code": code,
    }
    if isinstance(error, ConfigError) and error.problems:
        payload["problems"] = error.problems
    typer.echo(json.dumps(payload, sort_keys=True))
    err_console.print(f"[red]Error:[/red] {error}")
    raise typer.Exit(code)


def _run(ctx: typer.Context, command: Command, extra: Optional[Dict] = None, **options):
    settings = ctx.obj or {}
    try:
        config = load_config(settings.get("config"), settings.get("overrides") or (), extra)
        result = run_command(config, command, **options)
    except typer.Exit:
        raise
    except Exception as e:
        _fail(e)
    for path in result.files:
        console.print(f"[green]✓[/green] wrote [cyan]{path}[/cyan]")
    return result


def _peak_table(result: CommandResult, title: str) -> Table:
    table = Table(title=title, show_header=True)
    table.add_column("#", style="dim")
    table.add_column("Energy (eV)", style="cyan")
    table.add_column("Height")
    for i, peak in enumerate(result.summary["peaks"], start=1):
        table.add_row(str(i), f"{peak['position']:.4f}", f"{peak['height']:.4g}")
    return table


@app.command()
def modes(ctx: typer.Context):
    """
    Extract the Lorentzian pseudomode of every multipole order.

    Example:
        plasmon modes
        plasmon --set backend=quasistatic modes
    """
    result = _run(ctx, Command.MODES)
    table = Table(title="Plasmon modes", show_header=True)
    table.add_column("n", style="cyan")
    table.add_column("ħωₙ (eV)")
    table.add_column("ħγₙ (meV)")
    table.add_column("ħgₙ (meV)")
    table.add_column("gₙ/γₙ", style="dim")
    for row in result.summary["modes"]:
        flag = " [yellow]![/yellow]" if row["lorentzian_warning"] else ""
        table.add_row(
            str(row["order"]),
            f"{row['energy_ev']:.4f}",
            f"{1e3 * row['linewidth_ev']:.2f}",
            f"{1e3 * row['coupling_ev']:.2f}{flag}",
            f"{row['figure_of_merit']:.2f}",
        )
    console.print(table)


@app.command()
def dressed(
    ctx: typer.Context,
    vectors: bool = typer.Option(
        False, "--json", help="Also store the complex eigenvectors in the JSON sidecar"
    ),
):
    """
    Diagonalize the effective Hamiltonian.

    Example:
        plasmon dressed --json
    """
    result = _run(ctx, Command.DRESSED, vectors=vectors)
    table = Table(title="Dressed states", show_header=True)
    table.add_column("m", style="cyan")
    table.add_column("ħΩ (eV)")
    table.add_column("width (meV)")
    table.add_column("|m₀|²", style="yellow")
    summary = result.summary
    for m, (energy, width, weight) in enumerate(
        zip(summary["frequencies_ev"], summary["widths_ev"], summary["emitter_weights"]), start=1
    ):
        table.add_row(str(m), f"{energy:.4f}", f"{1e3 * width:.2f}", f"{weight:.3f}")
    console.print(table)


@spectrum_app.command("near")
def spectrum_near(
    ctx: typer.Context,
    mode_subset: Optional[List[int]] = typer.Option(
        None, "--modes", "-m", help="Keep only these orders (repeatable)"
    ),
):
    """
    Near-field polarization spectrum.

    Example:
        plasmon spectrum near --modes 3
    """
    result = _run(ctx, Command.SPECTRUM_NEAR, {"mode_subset": mode_subset or None})
    console.print(_peak_table(result, "Polarization spectrum peaks"))


@spectrum_app.command("far")
def spectrum_far(
    ctx: typer.Context,
    r_nm: Optional[float] = typer.Option(None, "--r", help="Detector distance (nm)"),
    theta: Optional[float] = typer.Option(None, "--theta", help="Detector polar angle (rad)"),
    projection: Optional[Projection] = typer.Option(None, "--projection", help="vector or scalar"),
):
    """
    Far-field spectrum recorded at a detector.

    Example:
        plasmon spectrum far --r 1000 --theta 1.5708
    """
    extra = {"detector_r_nm": r_nm, "detector_theta_rad": theta, "projection": projection}
    result = _run(ctx, Command.SPECTRUM_FAR, extra)
    console.print(_peak_table(result, "Detector spectrum peaks"))


@app.command()
def pattern(
    ctx: typer.Context,
    energy_ev: Optional[float] = typer.Option(None, "--energy-ev", help="Photon energy (eV)"),
    r_nm: Optional[float] = typer.Option(None, "--r", help="Detector distance (nm)"),
    projection: Optional[Projection] = typer.Option(None, "--projection", help="vector or scalar"),
):
    """
    Angular radiation pattern at one energy.

    Example:
        plasmon pattern --energy-ev 2.89
    """
    extra = {"pattern_energy_ev": energy_ev, "detector_r_nm": r_nm, "projection": projection}
    result = _run(ctx, Command.PATTERN, extra)
    summary = result.summary
    console.print(
        Panel(
            f"Energy: [cyan]{summary['energy_ev']:.4f} eV[/cyan]\n"
            f"Forward asymmetry A: [yellow]{summary['asymmetry']:+.3f}[/yellow]",
            title="Radiation pattern",
            border_style="blue",
        )
    )


@app.command()
def dynamics(ctx: typer.Context):
    """
    Emitter and mode populations after exciting the emitter.

    Example:
        plasmon --set dipole_debye=6 dynamics
    """
    result = _run(ctx, Command.DYNAMICS)
    period = result.summary["rabi_period_fs"]
    lines = [
        f"First revival: [cyan]{period:.2f} fs[/cyan]" if period else "No revival in the window"
    ]
    for order, peak in result.summary["dominant"]:
        lines.append(f"  mode {order}: peak population {peak:.3f}")
    console.print(Panel("\n".join(lines), title="Dynamics", border_style="blue"))


@app.command("gap-sweep")
def gap_sweep(
    ctx: typer.Context,
    order: int = typer.Option(3, "--order", "-n", help="Multipole order"),
    gaps: str = typer.Option("1,2,3,4,6,8", "--gaps", help="Comma-separated gaps (nm)"),
):
    """
    Coupling strength of one mode versus emitter-surface gap.

    Example:
        plasmon gap-sweep --order 3 --gaps 1,2,4,8
    """
    try:
        values = [float(g) for g in gaps.split(",") if g.strip()]
    except ValueError:
        _fail(ConfigError(f"--gaps must be comma-separated numbers (got '{gaps}')"))
    result = _run(ctx, Command.GAP_SWEEP, order=order, gaps=values)
    table = Table(title=f"Coupling of mode {order}", show_header=True)
    table.add_column("gap (nm)", style="cyan")
    table.add_column("ħg (meV)")
    for gap, g in zip(result.summary["gaps_nm"], result.summary["couplings_ev"]):
        table.add_row(f"{gap:g}", f"{1e3 * g:.2f}")
    console.print(table)


@app.command()
def validate(ctx: typer.Context):
    """
    Run the property suite and print a pass/fail table.

    Exits with code 3 when any check fails.
    """
    result = _run(ctx, Command.VALIDATE)
    table = Table(title="Property checks", show_header=True)
    table.add_column("Check", style="cyan")
    table.add_column("Result")
    table.add_column("Value")
    table.add_column("Limit", style="dim")
    for check in result.summary["checks"]:
        status = "[green]✓ pass[/green]" if check.passed else "[red]✗ fail[/red]"
        table.add_row(check.name, status, f"{check.value:.3e}", f"{check.limit:.1e}")
    console.print(table)
    if not result.ok:
        raise typer.Exit(EXIT_NUMERICAL)


@app.callback(invoke_without_command=True)
def main(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(
        None, "--config", "-c", help="TOML config file (default: $PLASMON_CONFIG)"
    ),
    overrides: Optional[List[str]] = typer.Option(
        None, "--set", "-s", help="Override one key, e.g. --set radius_nm=20 (repeatable)"
    ),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory"),
    verbose: bool = typer.Option(False, "--verbose", help="Debug logging"),
    version: bool = typer.Option(False, "--version", "-v", help="Show version and exit"),
):
    """
    Plasmon-dressed emitter simulations.

    Run 'plasmon --help' to see all commands.
    """
    if version:
        console.print(f"plasmon-dressed version {__version__}")
        raise typer.Exit()
    _setup_logging(verbose)
    assignments = list(overrides or [])
    if out is not None:
        assignments.append(f"output_dir={json.dumps(str(out))}")
    ctx.obj = {"config": config, "overrides": assignments}
    if ctx.invoked_subcommand is None:
        typer.echo(ctx.get_help())


if __name__ == "__main__":
    app()
