#!/usr/bin/env python3
"""
HyperBit CLI - pseudo-random bit generation from a 5D hyperchaotic system.

This is the main entry point for the HyperBit CLI application.
Provides commands for generating bitstreams, analysing the dynamics,
sweeping entropy, running the statistical suite and benchmarking.
"""

import sys
from pathlib import Path
from typing import Optional

import typer

from commands import analyze, bench, entropy, generate, suite
from commands import config as config_cmd

# Version information
__version__ = "1.0.0"

app = typer.Typer(
    name="hyperbit",
    help="Chaos-based pseudo-random bit generator with dynamics analysis and randomness testing.",
    add_completion=False,
    context_settings={
        "help_option_names": ["-h", "--help"],
        "max_content_width": 120,
    },
    rich_markup_mode="rich",
)


# Global app state for flags
class AppState:
    def __init__(self):
        self.verbose = False
        self.quiet = False
        self.no_color = False
        self.config_path: Optional[Path] = None


app_state = AppState()


def version_callback(value: bool):
    """Handle version flag"""
    if value:
        typer.echo(f"hyperbit {__version__}")
        raise typer.Exit()


@app.callback()
def main(
    version: bool = typer.Option(
        False,
        "--version",
        "-V",
        callback=version_callback,
        is_eager=True,
        help="Show version and exit",
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable debug output on stderr"),
    quiet: bool = typer.Option(
        False,
        "--quiet",
        "-q",
        help="Suppress progress messages and non-essential output",
    ),
    no_color: bool = typer.Option(False, "--no-color", help="Disable colored output"),
    config_path: Optional[Path] = typer.Option(
        None, "--config", "-c", help="key=value config file (default .hyperbitrc)"
    ),
):
    """
    Chaos-based pseudo-random bit generator.

    Integrates a 5D hyperjerk system in Q4.27 fixed point, post-processes the
    states into five bitstreams and evaluates them. Default output is JSON;
    use --pretty for human-readable output.

    Examples:
        hyperbit generate --bits 1000000 --format ascii
        hyperbit analyze stability --c 0.6 --pretty
        hyperbit test --sequences 100 --length 1000000
    """
    app_state.verbose = verbose
    app_state.quiet = quiet
    app_state.no_color = no_color
    app_state.config_path = config_path

    if verbose and quiet:
        typer.echo("Error: --verbose and --quiet cannot be used together", err=True)
        raise typer.Exit(2)


app.command("generate", help="Generate the B1..B5 bitstreams")(generate.generate)

app.command("analyze", help="Lyapunov, bifurcation, Poincare, stability and trajectory analyses")(
    analyze.analyze
)

app.command("entropy", help="Average entropy per bit against truncation width")(entropy.entropy)

app.command("test", help="Run the statistical test suite")(suite.suite)

app.command("bench", help="Measure software throughput of the generator")(bench.bench)

app.command("config", help="View or modify HyperBit configuration")(config_cmd.config)

if __name__ == "__main__":
    # Share app_state with modules that `import cli` when run as a script
    sys.modules.setdefault("cli", sys.modules[__name__])
    app()
