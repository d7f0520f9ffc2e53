"""
Generate command: integrate the chaotic system and write the B1..B5 bitstreams.
"""

from pathlib import Path
from typing import Optional

import typer
from rich.console import Console
from rich.table import Table

from core import config as config_core
from core import export
from core.bitgen import BitGenerator, Channel
from core.chaos import BackendKind
from core.console import output_debug, output_error, output_json, output_message
from core.errors import handle_command_error
from core.fxp import OverflowPolicy
from core.styles import Colors, Styles


def generate(
    bits: Optional[int] = typer.Option(None, "-n", "--bits", help="Bits per stream"),
    fmt: Optional[str] = typer.Option(
        None, "-f", "--format", help="Bitstream format: packed or ascii"
    ),
    streams: Optional[str] = typer.Option(
        None, "-s", "--streams", help="Comma-separated subset of B1..B5"
    ),
    c: Optional[float] = typer.Option(None, "--c", help="Initial x0 (the parameter c)"),
    h: Optional[float] = typer.Option(None, "--h", help="Integration step"),
    backend: Optional[BackendKind] = typer.Option(None, "--backend", help="fixed or double"),
    overflow: Optional[OverflowPolicy] = typer.Option(
        None, "--overflow", help="Fixed-point overflow policy"
    ),
    discard: Optional[int] = typer.Option(None, "--discard", help="Transient states to drop"),
    output_dir: Optional[Path] = typer.Option(
        None, "-o", "--output-dir", help="Directory for the bitstream files"
    ),
    prefix: str = typer.Option("hyperbit", "--prefix", help="File name prefix"),
    raw: bool = typer.Option(
        False, "--raw", help="Write the serialized channels before post-processing"
    ),
    pretty_output: bool = typer.Option(
        False, "-p", "--pretty", help="Output in human-readable format"
    ),
):
    """
    Generate pseudo-random bitstreams B1..B5.

    Files are named PREFIX_B1.bin .. PREFIX_B5.bin (.txt for ascii); with --raw
    the unscrambled channels are written as PREFIX_raw_x.bin .. PREFIX_raw_v.bin.
    The fixed-point backend is canonical; the double backend produces different files.
    """
    try:
        cfg = config_core.load_run_config(
            {
                "bits": bits,
                "format": fmt,
                "streams": streams,
                "x0": c,
                "h": h,
                "backend": backend,
                "overflow": overflow,
                "discard": discard,
                "output_dir": output_dir,
            }
        )
        output_debug(f"effective config: {cfg.to_settings()}")
        generator = BitGenerator(cfg.initial_condition(), cfg.solver(), cfg.discard)
        output_message(
            f"Integrating {generator.states_for(cfg.bits) + cfg.discard} states...", "dim"
        )

        suffix = export.bits_suffix(cfg.format)
        written = []
        if raw:
            for channel, stream in zip(Channel, generator.raw_streams(cfg.bits)):
                path = cfg.output_dir / f"{prefix}_raw_{channel.value}{suffix}"
                export.write_bits(path, stream.bits, cfg.format)
                written.append((f"raw_{channel.value}", path, stream))
        else:
            generated = generator.generate(cfg.bits)
            for label, stream in generated.items():
                if label.value not in cfg.streams:
                    continue
                path = cfg.output_dir / f"{prefix}_{label.value}{suffix}"
                export.write_bits(path, stream.bits, cfg.format)
                written.append((label.value, path, stream))

        files = [
            {
                "stream": name,
                "path": str(path),
                "bits": stream.length,
                "ones_fraction": stream.ones_fraction(),
            }
            for name, path, stream in written
        ]

        if pretty_output:
            output_message(f"Wrote {len(files)} files", "green")
            _display_files(files, cfg.to_settings())
        else:
            output_json({"success": True, "config": cfg.to_settings(), "files": files})

    except typer.Exit:
        raise
    except Exception as e:
        output_error(e, pretty_output)
        raise typer.Exit(handle_command_error(e))


def _display_files(files, settings):
    console = Console()
    table = Table(title="Generated bitstreams")
    table.add_column("Stream", style=Colors.IDENTIFIER)
    table.add_column("Bits", justify="right")
    table.add_column("Ones", justify="right")
    table.add_column("Path", style=Colors.SECONDARY)
    for entry in files:
        table.add_row(
            entry["stream"],
            str(entry["bits"]),
            f"{entry['ones_fraction']:.5f}",
            entry["path"],
        )
    console.print(table)
    console.print(
        Styles.brand("Effective configuration: ")
        + " ".join(f"{k}={v}" for k, v in settings.items()),
        markup=True,
    )
