"""
Config command for managing HyperBit run settings.
Settings live in a flat key=value file (.hyperbitrc, or the global --config PATH).
"""

from pathlib import Path
from typing import Optional

import typer
from rich.console import Console
from rich.panel import Panel
from rich.text import Text

from core import config as config_core
from core.console import output_error, output_json
from core.errors import ConfigError, handle_command_error
from core.styles import Colors, PanelStyles, Styles

console = Console()


def config(
    get: Optional[str] = typer.Option(None, "-g", "--get", help="Get a config value"),
    set_key: Optional[str] = typer.Option(None, "--set", help="Config key to set"),
    export_file: Optional[Path] = typer.Option(
        None, "--export", help="Write the effective configuration as key=value"
    ),
    pretty_output: bool = typer.Option(
        False, "-p", "--pretty", help="Output in human-readable format"
    ),
    value: Optional[str] = typer.Argument(None, help="Value to set (for --set)"),
):
    """
    View or modify HyperBit configuration.

    Use --get to read one value, --set KEY VALUE to persist one, and --export
    to write a config file from which any run can be reproduced.
    Default output is JSON for easy scripting and automation.
    """
    try:
        if set_key:
            if value is None:
                raise ConfigError(
                    "Value is required when using --set",
                    suggestion="Example: hyperbit config --set h 0.005",
                )
            path = config_core.set_preference(set_key, value)
            if pretty_output:
                console.print(Styles.success(f"Set {set_key}: {value}") + f" [dim]({path})[/dim]")
            else:
                output_json({"success": True, "key": set_key, "value": value, "path": str(path)})
            return

        current = config_core.load_run_config()

        if export_file:
            config_core.export_settings(current, export_file)
            if pretty_output:
                console.print(Styles.success(f"Configuration exported to {export_file}"))
            else:
                output_json({"success": True, "exported_to": str(export_file)})
            return

        settings = current.to_settings()
        if get:
            if get not in settings:
                raise ConfigError(
                    f"Config key '{get}' not found",
                    suggestion=f"Valid keys: {', '.join(settings)}",
                )
            if pretty_output:
                console.print(
                    f"[{Colors.SECONDARY}]{get}:[/{Colors.SECONDARY}] "
                    f"[{Colors.PRIMARY}]{settings[get]}[/{Colors.PRIMARY}]"
                )
            else:
                output_json({"key": get, "value": settings[get]})
            return

        if pretty_output:
            _display_config_pretty(settings)
        else:
            output_json(settings)

    except typer.Exit:
        raise
    except Exception as e:
        output_error(e, pretty_output)
        raise typer.Exit(handle_command_error(e))


def _display_config_pretty(settings: dict):
    """Display the effective configuration in a formatted panel"""
    file_settings, path = config_core.read_settings()
    content = Text()
    content.append("Settings:\n", style=f"bold {Colors.BRAND}")
    for key, val in settings.items():
        source = f" (from {path})" if key in file_settings else " (default)"
        content.append(f"  {key}: ", style=Colors.SECONDARY)
        content.append(str(val), style=Colors.PRIMARY)
        content.append(f"{source}\n", style="dim")

    content.append("\nQuick Commands:\n", style=f"bold {Colors.BRAND}")
    commands = [
        ("Change the step", "hyperbit config --set h 0.005"),
        ("Use the double backend", "hyperbit config --set backend double"),
        ("Export settings", "hyperbit config --export run.hyperbitrc"),
        ("Run from a file", "hyperbit --config run.hyperbitrc generate"),
    ]
    for description, command in commands:
        content.append(f"  {description}: ", style=Colors.SECONDARY)
        content.append(f"{command}\n", style=Colors.INTERACTIVE)

    console.print(Panel(content, title="HyperBit Configuration", **PanelStyles.standard()))
