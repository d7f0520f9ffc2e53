"""
Entropy command: average entropy per bit against the truncation width.
"""

from pathlib import Path
from typing import Optional

import typer
from rich.console import Console
from rich.table import Table

from core import config as config_core
from core import export
from core.bitgen import (WORD_BITS, BitGenerator, Channel, StreamLabel,
                         entropy_sweep, histogram_chi_square, truncate_raw,
                         word_histogram, words_from_bits, xy_distribution)
from core.chaos import BackendKind
from core.console import output_debug, output_error, output_json, output_message
from core.errors import handle_command_error
from core.styles import Styles, TableStyles


def entropy(
    widths: Optional[str] = typer.Option(
        None, "--widths", help="Comma-separated truncation widths N_b"
    ),
    states: int = typer.Option(100_000, "--states", help="Post-transient states to sample"),
    channel: Channel = typer.Option(Channel.X, "--channel", help="State component to truncate"),
    c: Optional[float] = typer.Option(None, "--c", help="Initial x0 (the parameter c)"),
    h: Optional[float] = typer.Option(None, "--h", help="Integration step"),
    backend: Optional[BackendKind] = typer.Option(None, "--backend", help="fixed or double"),
    discard: Optional[int] = typer.Option(None, "--discard", help="Transient states to drop"),
    histogram: bool = typer.Option(
        False,
        "--histogram",
        help="Also write X and B1 12-bit word histograms and the X-Y word pairs",
    ),
    output: Optional[Path] = typer.Option(
        None, "-o", "--output", help="CSV path (default OUTPUT_DIR/entropy.csv)"
    ),
    pretty_output: bool = typer.Option(
        False, "-p", "--pretty", help="Output in human-readable format"
    ),
):
    """
    Sweep the average entropy per bit over truncation widths.

    Wide widths need many samples: roughly 32 * 2^N_b states for a
    trustworthy histogram. Fewer states bias the estimate low.
    """
    try:
        cfg = config_core.load_run_config(
            {"widths": widths, "x0": c, "h": h, "backend": backend, "discard": discard}
        )
        output_debug(f"effective config: {cfg.to_settings()}")
        generator = BitGenerator(cfg.initial_condition(), cfg.solver(), cfg.discard)

        output_message(f"Integrating {states + cfg.discard} states...", "dim")
        raws = generator.raw_states(states)
        rows = entropy_sweep(raws, cfg.widths, channel)
        target = output or cfg.output_dir / "entropy.csv"
        export.write_entropy_csv(target, rows)

        payload = {
            "success": True,
            "config": cfg.to_settings(),
            "channel": channel.value,
            "states": states,
            "rows": [{"Nb": row.n_b, "entropy_per_bit": row.entropy_per_bit} for row in rows],
            "output": str(target),
        }

        if histogram:
            pre_words = truncate_raw(raws)
            x_words = pre_words[:, 0]
            x_path = target.with_name("histogram_x.csv")
            export.write_histogram_csv(x_path, word_histogram(x_words, WORD_BITS))
            xy_path = export.write_xy_csv(target.with_name("xy.csv"), xy_distribution(pre_words))
            x_statistic, x_p_value = histogram_chi_square(x_words, WORD_BITS)
            payload["histogram_x"] = {
                "stream": "X",
                "words": int(x_words.size),
                "chi_square": x_statistic,
                "p_value": x_p_value,
                "output": str(x_path),
                "xy_output": str(xy_path),
            }

            output_message("Generating B1 for the histogram...", "dim")
            b1 = generator.generate(states * WORD_BITS)[StreamLabel.B1]
            words = words_from_bits(b1.bits, WORD_BITS)
            histogram_path = target.with_name("histogram.csv")
            export.write_histogram_csv(histogram_path, word_histogram(words, WORD_BITS))
            statistic, p_value = histogram_chi_square(words, WORD_BITS)
            payload["histogram"] = {
                "stream": StreamLabel.B1.value,
                "words": int(words.size),
                "chi_square": statistic,
                "p_value": p_value,
                "output": str(histogram_path),
            }

        if pretty_output:
            _display_table(payload)
        else:
            output_json(payload)

    except typer.Exit:
        raise
    except Exception as e:
        output_error(e, pretty_output)
        raise typer.Exit(handle_command_error(e))


def _display_table(payload):
    console = Console()
    styles = TableStyles.entropy_table()
    table = Table(title=f"Average entropy per bit, channel {Styles.stream(payload['channel'])}")
    table.add_column("N_b", style=styles["N_b"], justify="right")
    table.add_column("Entropy/bit", style=styles["Entropy/bit"], justify="right")
    for row in payload["rows"]:
        table.add_row(str(row["Nb"]), Styles.number(row["entropy_per_bit"]))
    console.print(table)
    for key in ("histogram_x", "histogram"):
        if key in payload:
            hist = payload[key]
            console.print(
                f"{Styles.stream(hist['stream'])} 12-bit histogram: "
                f"chi2 = {Styles.number(hist['chi_square'], 2)}, p = "
                + Styles.p_value(hist["p_value"], 0.001)
            )
