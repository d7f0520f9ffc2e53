"""
Test command: run the statistical test suite over generated or supplied bitstreams.
"""

import math
from pathlib import Path
from typing import List, Optional

import typer
from rich.console import Console
from rich.table import Table

from core import config as config_core
from core import export, randtest
from core.bitgen import BitGenerator
from core.chaos import BackendKind
from core.console import (output_debug, output_error, output_json,
                          output_message, progress_bar)
from core.errors import AcceptanceError, handle_command_error
from core.fxp import OverflowPolicy
from core.styles import Styles, TableStyles


def suite(
    sequences: Optional[int] = typer.Option(None, "-N", "--sequences", help="Sequences per stream"),
    length: Optional[int] = typer.Option(None, "-L", "--length", help="Bits per sequence"),
    alpha: Optional[float] = typer.Option(None, "--alpha", help="Significance level"),
    input_files: Optional[List[Path]] = typer.Option(
        None, "-i", "--input", help="Test these bitstream files instead of generating"
    ),
    reference: bool = typer.Option(
        False, "--reference", help="Test the counter-mode reference generator instead"
    ),
    acceptance: bool = typer.Option(
        False, "--acceptance", help="Exit 6 when any proportion falls below the floor"
    ),
    streams: Optional[str] = typer.Option(
        None, "-s", "--streams", help="Comma-separated subset of B1..B5"
    ),
    block_size: Optional[int] = typer.Option(None, "--block-size", help="Block frequency M"),
    serial_m: Optional[int] = typer.Option(None, "--serial-m", help="Serial pattern length"),
    apen_m: Optional[int] = typer.Option(None, "--apen-m", help="Approximate entropy m"),
    c: Optional[float] = typer.Option(None, "--c", help="Initial x0 (the parameter c)"),
    h: Optional[float] = typer.Option(None, "--h", help="Integration step"),
    backend: Optional[BackendKind] = typer.Option(None, "--backend", help="fixed or double"),
    overflow: Optional[OverflowPolicy] = typer.Option(
        None, "--overflow", help="Fixed-point overflow policy"
    ),
    discard: Optional[int] = typer.Option(None, "--discard", help="Transient states to drop"),
    workers: Optional[int] = typer.Option(None, "-w", "--workers", help="Worker processes"),
    output_dir: Optional[Path] = typer.Option(
        None, "-o", "--output-dir", help="Directory for the suite_*.csv reports"
    ),
    pretty_output: bool = typer.Option(
        False, "-p", "--pretty", help="Output in human-readable table format"
    ),
):
    """
    Run the native statistical tests and report per-test proportions.

    Each stream is split into N sequences of L bits. Serial and approximate
    entropy block lengths are capped to what L supports.
    """
    try:
        cfg = config_core.load_run_config(
            {
                "sequences": sequences,
                "length": length,
                "alpha": alpha,
                "streams": streams,
                "block_size": block_size,
                "serial_m": serial_m,
                "apen_m": apen_m,
                "x0": c,
                "h": h,
                "backend": backend,
                "overflow": overflow,
                "discard": discard,
                "workers": workers,
                "output_dir": output_dir,
            }
        )
        output_debug(f"effective config: {cfg.to_settings()}")
        required = cfg.sequences * cfg.length

        if input_files:
            bitstreams = {path.stem: export.read_bits(path) for path in input_files}
        elif reference:
            bitstreams = {"reference": randtest.counter_mode_bits(required)}
        else:
            output_message(f"Generating {required} bits per stream...", "dim")
            generator = BitGenerator(cfg.initial_condition(), cfg.solver(), cfg.discard)
            generated = generator.generate(required)
            bitstreams = {
                label.value: stream.bits
                for label, stream in generated.items()
                if label.value in cfg.streams
            }

        log_length = int(math.log2(cfg.length)) if cfg.length > 1 else 1
        effective_serial = min(cfg.serial_m, max(2, log_length - 3))
        effective_apen = min(cfg.apen_m, max(1, log_length - 6))
        tests = randtest.default_tests(cfg.block_size, effective_serial, effective_apen)

        with progress_bar("Testing sequences", cfg.sequences * len(bitstreams)) as advance:
            report = randtest.run_suite(
                bitstreams,
                cfg.sequences,
                cfg.length,
                alpha=cfg.alpha,
                tests=tests,
                workers=cfg.workers,
                progress=advance,
            )

        written = []
        for stream in report.streams:
            path = cfg.output_dir / f"suite_{stream}.csv"
            export.write_suite_csv(path, report.for_stream(stream))
            written.append(str(path))

        low, high = randtest.proportion_interval(report.alpha, report.n_sequences)
        accepted = report.meets_floor()
        payload = {
            "success": True,
            "config": cfg.to_settings(),
            "parameters": {
                "block_size": cfg.block_size,
                "serial_m": effective_serial,
                "apen_m": effective_apen,
            },
            "proportion_interval": [low, high],
            "accepted": accepted,
            "results": [
                {
                    "stream": s.stream,
                    "test": s.test,
                    "mean_p": s.mean_p,
                    "n_pass": s.n_pass,
                    "n_sequences": s.n_sequences,
                    "proportion": s.proportion,
                    "uniformity_p": s.uniformity_p,
                    "ks_p": s.ks_p,
                }
                for s in report.summaries
            ],
            "outputs": written,
        }

        if pretty_output:
            _display_report(report)
        else:
            output_json(payload)

        if acceptance and not accepted:
            failing = [f"{s.stream}/{s.test}" for s in report.failing()]
            raise AcceptanceError(
                f"Fewer than {report.min_pass()}/{report.n_sequences} passing for: "
                + ", ".join(failing)
            )

    except typer.Exit:
        raise
    except AcceptanceError as e:
        # The report is already on stdout; the verdict goes to stderr.
        output_message(e.message, "red")
        raise typer.Exit(e.exit_code)
    except Exception as e:
        output_error(e, pretty_output)
        raise typer.Exit(handle_command_error(e))


def _display_report(report: randtest.SuiteReport):
    console = Console()
    styles = TableStyles.suite_report()
    floor = report.min_pass() / report.n_sequences
    title = f"{report.n_sequences} sequences of {report.seq_len} bits, alpha = {report.alpha}"
    table = Table(title=title)
    for name, style in styles.items():
        justify = "left" if name in ("Stream", "Test") else "right"
        table.add_column(name, style=style, justify=justify)
    for s in report.summaries:
        table.add_row(
            Styles.stream(s.stream),
            s.test,
            Styles.p_value(s.mean_p, report.alpha),
            Styles.proportion(s.n_pass, s.n_sequences, floor),
            Styles.number(s.uniformity_p, 4),
            Styles.number(s.ks_p, 4),
        )
    console.print(table)
    if report.meets_floor():
        verdict = Styles.success("all proportions within the interval")
    else:
        verdict = Styles.error("some proportions below the floor")
    console.print(f"{verdict} (floor {report.min_pass()}/{report.n_sequences})")
