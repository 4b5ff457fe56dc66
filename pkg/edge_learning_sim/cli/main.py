"""Command-line front end: run a scenario and report its metrics."""

import importlib
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from ..core.config import NANOSECONDS_PER_SECOND, get_settings
from ..core.exceptions import ConfigurationError, EdgeSimError, ScenarioValidationError, SimulationError
from ..core.logging import get_logger, setup_logging
from ..models.data_models import MetricsSummary, ScenarioConfig
from ..scenario.config_format import load_config
from ..scenario.runner import run_scenario

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2

app = typer.Typer(
    help="Discrete-event simulator for deep learning at the network edge",
    add_completion=False,
)
console = Console()
err_console = Console(stderr=True)
logger = get_logger(__name__)

# Exceptions of the click flavor typer parses with (upstream or vendored)
_parser_errors = importlib.import_module(typer.BadParameter.__module__)
UsageError = _parser_errors.UsageError
Abort = _parser_errors.Abort


def apply_overrides(config: ScenarioConfig, seed: Optional[int], until: Optional[float]) -> ScenarioConfig:
    """Return ``config`` with the command-line seed and stop time applied."""
    data = config.model_dump()
    if seed is not None:
        data["seed"] = seed
    if until is not None:
        data["stop_at_ns"] = round(until * NANOSECONDS_PER_SECOND)
    return ScenarioConfig.model_validate(data)


def metrics_table(summary: MetricsSummary) -> Table:
    table = Table(title="Run metrics", show_header=True, header_style="bold blue")
    table.add_column("Metric")
    table.add_column("Value", justify="right")
    packets = summary.packets
    table.add_row("final time", f"{summary.final_time_ns / NANOSECONDS_PER_SECOND:.6f} s")
    table.add_row("events executed", str(summary.events_executed))
    table.add_row("packets sent", str(packets.sent))
    table.add_row("packets delivered", str(packets.delivered))
    table.add_row(
        "dropped (queue / no route / app stopped)",
        f"{packets.dropped_queue} / {packets.dropped_no_route} / {packets.dropped_app_stopped}",
    )
    table.add_row("in flight", str(packets.in_flight))
    table.add_row("model results delivered", str(summary.model_results_delivered))
    for edge in summary.edges:
        loss = f"{edge.final_loss:.4g}" if edge.final_loss is not None else "-"
        table.add_row(
            f"edge {edge.node}",
            f"{edge.training_samples} samples, {edge.epochs_run} epochs, loss {loss}, "
            f"cache {edge.cache_hits}h/{edge.cache_misses}m/{edge.cache_evictions}e",
        )
    ensemble = summary.ensemble
    table.add_row("ensemble", f"{'ready' if ensemble.ready else 'not ready'} ({ensemble.submodels} sub-models)")
    for model, accuracy in ensemble.accuracy.items():
        table.add_row(f"accuracy {model}", f"{accuracy:.3f}" if accuracy is not None else "-")
    table.add_row("wall clock", f"{summary.wall_clock_seconds:.2f} s")
    return table


@app.command()
def run(
    config: Path = typer.Option(..., "--config", help="Scenario file"),
    seed: Optional[int] = typer.Option(None, "--seed", min=0, help="Override the scenario seed"),
    until: Optional[float] = typer.Option(None, "--until", help="Override the stop time, in seconds"),
    trace_out: Optional[Path] = typer.Option(None, "--trace-out", help="Trace file (default: output dir)"),
    metrics_out: Optional[Path] = typer.Option(None, "--metrics-out", help="Metrics file (default: output dir)"),
    quiet: bool = typer.Option(False, "--quiet", help="Do not print the metrics table"),
    debug: bool = typer.Option(False, "--debug", help="Enable debug logging"),
    log_file: Optional[Path] = typer.Option(None, "--log-file", help="Also log to this file"),
):
    """Run a scenario, writing its trace and metrics files."""
    settings = get_settings()
    level = "DEBUG" if debug or settings.debug else ("WARNING" if quiet else settings.log_level)
    setup_logging(level=level, log_file=log_file)
    if until is not None and until <= 0:
        err_console.print(f"[red]Invalid value for --until: {until} (must be > 0)[/red]")
        raise typer.Exit(EXIT_INVALID)

    try:
        scenario = apply_overrides(load_config(config), seed, until)
    except ScenarioValidationError as e:
        err_console.print(f"[red]{config}: {e.message}[/red]")
        for issue in e.issues:
            err_console.print(f"  {issue}")
        raise typer.Exit(EXIT_INVALID)
    except ConfigurationError as e:
        err_console.print(f"[red]{e.message}[/red]")
        raise typer.Exit(EXIT_INVALID)
    except ValidationError as e:
        err_console.print(f"[red]Invalid override: {e}[/red]")
        raise typer.Exit(EXIT_INVALID)

    trace_path = trace_out or settings.default_trace_path
    metrics_path = metrics_out or settings.default_metrics_path
    try:
        summary = run_scenario(scenario, trace_path, metrics_path)
    except SimulationError as e:
        err_console.print(f"[red]Simulation failed in event {e.event_id}: {e.message}[/red]")
        logger.debug("Simulation failure", exc_info=True)
        raise typer.Exit(EXIT_RUNTIME)
    except EdgeSimError as e:
        detail = f" ({e.details})" if e.details else ""
        err_console.print(f"[red]{e.message}{detail}[/red]")
        raise typer.Exit(EXIT_RUNTIME)

    if not quiet:
        console.print(metrics_table(summary))
        console.print(f"Trace: {trace_path}\nMetrics: {metrics_path}")


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line with ``argv`` and return the exit code."""
    args: List[str] = list(sys.argv[1:] if argv is None else argv)
    command = typer.main.get_command(app)
    try:
        result = command.main(args=args, prog_name="edge-sim", standalone_mode=False)
    except UsageError as e:
        e.show()
        return EXIT_INVALID
    except Abort:
        err_console.print("Aborted")
        return EXIT_INVALID
    except Exception as e:  # anything the command did not map to an exit code
        err_console.print(f"[red]Unexpected error: {e}[/red]")
        return EXIT_RUNTIME
    return result if isinstance(result, int) else EXIT_OK


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
