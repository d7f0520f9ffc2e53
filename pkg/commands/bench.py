"""
Bench command: software throughput of the full generation pipeline.
The figure is for this machine and interpreter; it is not comparable to hardware rates.
"""

import time
from typing import Optional

import typer
from rich.console import Console
from rich.panel import Panel
from rich.text import Text

from core import config as config_core
from core.bitgen import BitGenerator
from core.chaos import BackendKind
from core.console import output_error, output_json, output_message
from core.errors import ValidationError, handle_command_error
from core.styles import Colors, PanelStyles


def measure_throughput(generator: BitGenerator, seconds: float, chunk_bits: int) -> dict:
    """Generate chunks until `seconds` have elapsed; bits counted over all five streams"""
    if seconds <= 0 or chunk_bits < 1:
        raise ValidationError("seconds and chunk size must be positive")
    chunks = 0
    start = time.perf_counter()
    elapsed = 0.0
    while elapsed < seconds:
        generator.generate(chunk_bits)
        chunks += 1
        elapsed = time.perf_counter() - start
    total_bits = chunks * chunk_bits * 5
    return {
        "chunks": chunks,
        "bits": total_bits,
        "seconds": elapsed,
        "bits_per_second": total_bits / elapsed,
    }


def bench(
    seconds: float = typer.Option(5.0, "--seconds", help="Minimum timed duration"),
    chunk_bits: int = typer.Option(120_000, "--chunk", help="Bits per stream per chunk"),
    backend: Optional[BackendKind] = typer.Option(None, "--backend", help="fixed or double"),
    pretty_output: bool = typer.Option(
        False, "-p", "--pretty", help="Output in human-readable format"
    ),
):
    """
    Report bits per second of the generator (integration, truncation,
    scrambling and combining) over a timed run.
    """
    try:
        cfg = config_core.load_run_config({"backend": backend})
        # No transient: only the steady-state pipeline is timed.
        generator = BitGenerator(cfg.initial_condition(), cfg.solver(), discard=0)
        output_message(f"Timing the pipeline for {seconds:g}s...", "dim")
        result = measure_throughput(generator, seconds, chunk_bits)
        payload = {
            "success": True,
            "backend": cfg.backend.value,
            "chunk_bits": chunk_bits,
            **result,
            "note": "software throughput on this machine; not comparable to hardware figures",
        }

        if pretty_output:
            content = Text()
            content.append("Throughput: ", style=Colors.SECONDARY)
            content.append(f"{result['bits_per_second'] / 1e6:.3f} Mbit/s\n", style=Colors.SUCCESS)
            content.append("Bits: ", style=Colors.SECONDARY)
            content.append(f"{result['bits']} in {result['seconds']:.2f}s\n", style=Colors.PRIMARY)
            content.append(payload["note"], style=Colors.SECONDARY)
            Console().print(
                Panel(content, title=f"bench ({cfg.backend.value})", **PanelStyles.standard())
            )
        else:
            output_json(payload)

    except typer.Exit:
        raise
    except Exception as e:
        output_error(e, pretty_output)
        raise typer.Exit(handle_command_error(e))
