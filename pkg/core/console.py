"""
Console utilities for HyperBit CLI with proper stream separation and color isolation.
stdout carries data (JSON or --pretty tables); stderr carries messages and progress.
"""

import json
import os
import sys
from contextlib import contextmanager
from typing import Any, Dict, Iterator, Optional

from rich.console import Console
from rich.progress import (BarColumn, MofNCompleteColumn, Progress,
                           TextColumn, TimeElapsedColumn)

from .errors import HyperBitError, format_error


def _app_flag(name: str) -> bool:
    try:
        import cli

        return bool(getattr(cli.app_state, name, False))
    except ImportError:
        return False


def should_use_colors() -> bool:
    """Determine if colors should be used based on environment and settings"""
    if os.getenv("NO_COLOR"):
        return False
    if _app_flag("no_color"):
        return False
    return sys.stderr.isatty()


def get_consoles():
    """Get properly configured consoles for different purposes"""
    use_colors = should_use_colors()

    # stdout console: colors only for --pretty data
    stdout_console = Console(file=sys.stdout, no_color=not use_colors, stderr=False)

    # stderr console: colors OK for messages if appropriate
    stderr_console = Console(file=sys.stderr, no_color=not use_colors, stderr=True)

    return stdout_console, stderr_console


def _default(value: Any) -> Any:
    # numpy scalars and paths
    if hasattr(value, "item"):
        return value.item()
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return str(value)


def output_json(data: Dict[str, Any]) -> None:
    """Output JSON data to stdout with no colors"""
    print(json.dumps(data, indent=2, default=_default))


def output_message(message: str, style: Optional[str] = None) -> None:
    """Output a progress or status message to stderr unless --quiet"""
    if _app_flag("quiet"):
        return
    _, stderr_console = get_consoles()
    if style:
        stderr_console.print(message, style=style)
    else:
        stderr_console.print(message)


def output_debug(message: str) -> None:
    """Output a debug line to stderr, only with --verbose"""
    if not _app_flag("verbose"):
        return
    _, stderr_console = get_consoles()
    stderr_console.print(f"[debug] {message}", style="dim", markup=False)


def output_error(error: Exception, pretty: bool = False) -> None:
    """Output error information: JSON on stdout, or styled lines on stderr with --pretty"""
    _, stderr_console = get_consoles()

    if isinstance(error, HyperBitError):
        if pretty:
            stderr_console.print(f"Error: {error.message}", style="red", markup=False)
            if error.suggestion:
                stderr_console.print(
                    f"Suggestion: {error.suggestion}", style="yellow", markup=False
                )
        else:
            output_json(format_error(error))
    else:
        if pretty:
            stderr_console.print(f"Error: {error}", style="red", markup=False)
        else:
            output_json({"success": False, "error": str(error), "code": "GENERAL_ERROR"})


@contextmanager
def progress_bar(description: str, total: Optional[int]) -> Iterator[Any]:
    """
    Progress bar on stderr.

    Yields a callable advance(n); a no-op when --quiet is set or stderr is
    not a terminal.
    """
    _, stderr_console = get_consoles()
    if _app_flag("quiet") or not stderr_console.is_terminal:
        yield lambda n=1: None
        return

    progress = Progress(
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=stderr_console,
        transient=True,
    )
    with progress:
        task = progress.add_task(description, total=total)
        yield lambda n=1: progress.advance(task, n)
