"""Command-line entry point: run, validate, serve."""

from __future__ import annotations

import dataclasses
import sys

import click

from .harness import run as run_scenario
from .harness import write_report
from .scenario import ScenarioError, load_scenario_file


def _load(path: str, seed=None):
    try:
        scenario = load_scenario_file(path)
    except ScenarioError as exc:
        for error in exc.errors:
            click.echo(f"error: {error}", err=True)
        sys.exit(1)
    except (OSError, ValueError) as exc:
        click.echo(f"error: cannot read scenario: {exc}", err=True)
        sys.exit(1)
    if seed is not None:
        scenario = dataclasses.replace(scenario, master_seed=seed)
    return scenario


@click.group()
def main() -> None:
    """Multi-robot task-allocation simulator."""


@main.command("run")
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--seed", type=int, default=None, help="Override the scenario's master seed.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--trace", is_flag=True, help="Also write the full event trace.")
def run_cmd(scenario_path: str, out_dir: str, seed, fmt: str, trace: bool) -> None:
    """Run a scenario to its horizon and write the report files."""
    scenario = _load(scenario_path, seed)
    report = run_scenario(scenario)
    written = write_report(report, out_dir, fmt=fmt, trace=trace)
    for path in written:
        click.echo(str(path))
    click.echo(
        f"seed={report.master_seed} duration={report.duration} "
        f"events={report.delivered_events} requests={len(report.requests)}"
    )


@main.command("validate")
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
def validate_cmd(scenario_path: str) -> None:
    """Validate a scenario file; nonzero exit on any diagnostic."""
    scenario = _load(scenario_path)
    click.echo(
        f"ok: {len(scenario.robots)} robots, {len(scenario.blueprints)} blueprints, "
        f"duration {scenario.duration}"
    )


@main.command("serve")
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
@click.option("--seed", type=int, default=None)
def serve_cmd(scenario_path: str, port: int, host: str, seed) -> None:
    """Start the control API with the simulation paused at t=0."""
    import uvicorn

    from .control_api import create_app

    scenario = _load(scenario_path, seed)
    uvicorn.run(create_app(scenario), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
