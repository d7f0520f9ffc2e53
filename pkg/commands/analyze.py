"""
Analyze command: dynamics analyses of the hyperjerk system written as CSV.
A diverging trajectory is reported as a marked row, never as a crash.
"""

from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import typer
from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from core import config as config_core
from core import dynamics, export
from core.chaos import BackendKind, trajectory
from core.console import (output_debug, output_error, output_json,
                          output_message)
from core.errors import DivergenceError, handle_command_error
from core.fxp import OverflowPolicy
from core.styles import Colors, PanelStyles, Styles, TableStyles


class AnalysisKind(str, Enum):
    LYAPUNOV = "lyapunov"
    LYAPUNOV_SWEEP = "lyapunov-sweep"
    BIFURCATION = "bifurcation"
    POINCARE = "poincare"
    STABILITY = "stability"
    TRAJECTORY = "trajectory"


def analyze(
    kind: AnalysisKind = typer.Argument(..., help="Analysis to run"),
    c: Optional[float] = typer.Option(None, "--c", help="Initial x0 (the parameter c)"),
    c_min: float = typer.Option(0.0, "--c-min", help="Sweep start"),
    c_max: float = typer.Option(1.0, "--c-max", help="Sweep end"),
    points: int = typer.Option(200, "--points", help="Number of c values in a sweep"),
    t_total: Optional[float] = typer.Option(
        None, "-t", "--time", help="Integration time (lyapunov default 2e4, others 1e3)"
    ),
    transient: Optional[float] = typer.Option(
        None, "--transient", help="Time discarded before measuring"
    ),
    h: Optional[float] = typer.Option(None, "--h", help="Integration step"),
    steps: int = typer.Option(1000, "--steps", help="Trajectory length in steps"),
    plane: float = typer.Option(1.0, "--plane", help="Poincare plane x = PLANE"),
    component: str = typer.Option("x", "--component", help="Bifurcation component"),
    backend: Optional[BackendKind] = typer.Option(
        None, "--backend", help="Trajectory backend: fixed or double"
    ),
    overflow: Optional[OverflowPolicy] = typer.Option(
        None, "--overflow", help="Fixed-point overflow policy"
    ),
    workers: Optional[int] = typer.Option(None, "-w", "--workers", help="Worker processes"),
    output: Optional[Path] = typer.Option(
        None, "-o", "--output", help="CSV path (default OUTPUT_DIR/KIND.csv)"
    ),
    pretty_output: bool = typer.Option(
        False, "-p", "--pretty", help="Output in human-readable format"
    ),
):
    """
    Run a dynamics analysis: lyapunov, lyapunov-sweep, bifurcation, poincare,
    stability or trajectory.
    """
    try:
        cfg = config_core.load_run_config(
            {"x0": c, "h": h, "backend": backend, "overflow": overflow, "workers": workers}
        )
        output_debug(f"effective config: {cfg.to_settings()}")
        target = output or cfg.output_dir / f"{kind.value}.csv"
        ic = cfg.initial_condition()

        if kind is AnalysisKind.LYAPUNOV:
            result = _lyapunov(ic, cfg.h, t_total or 2e4, transient or 0.0, target)
        elif kind is AnalysisKind.LYAPUNOV_SWEEP:
            result = _lyapunov_sweep(
                c_min, c_max, points, cfg.h, t_total or 2e4, transient or 0.0, cfg.workers, target
            )
        elif kind is AnalysisKind.BIFURCATION:
            output_message(f"Sweeping {points} values of c...", "dim")
            samples = dynamics.bifurcation_sweep(
                c_min,
                c_max,
                points,
                transient=transient if transient is not None else 500.0,
                capture=t_total or 500.0,
                h=cfg.h,
                component=component,
                workers=cfg.workers,
            )
            export.write_bifurcation_csv(target, samples)
            result = {
                "points": len(samples),
                "diverged": [s.c for s in samples if s.diverged],
                "distinct_extrema": {f"{s.c:.6g}": s.distinct_extrema for s in samples},
            }
        elif kind is AnalysisKind.POINCARE:
            result = _poincare(ic, plane, t_total or 1e3, cfg.h, transient or 0.0, target)
        elif kind is AnalysisKind.STABILITY:
            report = dynamics.stability_at(ic.c)
            result = _stability_dict(report)
            target = None
        else:
            solver = cfg.solver()
            states = trajectory(ic, steps, solver)
            fixed = solver.backend is BackendKind.FIXED
            initial = ic.to_state(solver.make_backend())
            export.write_trajectory_csv(target, [initial, *states], fixed_point=fixed)
            result = {"steps": steps, "backend": solver.backend.value}

        payload = {"success": True, "kind": kind.value, "config": cfg.to_settings(), **result}
        if target is not None:
            payload["output"] = str(target)

        if pretty_output:
            _display(kind, payload)
        else:
            output_json(payload)

    except typer.Exit:
        raise
    except Exception as e:
        output_error(e, pretty_output)
        raise typer.Exit(handle_command_error(e))


def _spectrum_dict(spectrum: dynamics.LyapunovSpectrum) -> Dict[str, Any]:
    return {
        "exponents": list(spectrum.exponents),
        "sum": spectrum.total,
        "dimension": spectrum.dimension,
    }


def _lyapunov(ic, h, t_total, transient, target) -> Dict[str, Any]:
    output_message(f"Integrating tangent dynamics for t={t_total:g}...", "dim")
    try:
        spectrum = dynamics.lyapunov_spectrum(ic, t_total, h, transient=transient)
    except DivergenceError as e:
        output_message(e.message, "yellow")
        export.write_spectrum_csv(target, [dynamics.LyapunovSweepRow(ic.c, None)])
        return {"diverged": True, "diverged_at": e.time}
    export.write_spectrum_csv(target, [dynamics.LyapunovSweepRow(ic.c, spectrum)])
    return {"diverged": False, **_spectrum_dict(spectrum)}


def _lyapunov_sweep(c_min, c_max, points, h, t_total, transient, workers, target):
    output_message(f"Computing {points} spectra (t={t_total:g} each)...", "dim")
    rows = dynamics.lyapunov_sweep(
        np.linspace(c_min, c_max, points).tolist(), t_total, h, transient, workers
    )
    export.write_spectrum_csv(target, rows)
    return {
        "rows": [
            {
                "c": row.c,
                "diverged": row.diverged,
                **(_spectrum_dict(row.spectrum) if row.spectrum else {}),
            }
            for row in rows
        ]
    }


def _poincare(ic, plane, t_total, h, transient, target) -> Dict[str, Any]:
    try:
        points = dynamics.poincare_section(ic, plane, t_total, h, transient)
    except DivergenceError as e:
        output_message(e.message, "yellow")
        export.write_poincare_csv(target, np.empty((0, 4)))
        return {"diverged": True, "diverged_at": e.time, "crossings": 0}
    export.write_poincare_csv(target, points)
    distinct = int(np.unique(np.round(points, 9), axis=0).shape[0]) if points.size else 0
    return {"diverged": False, "crossings": int(points.shape[0]), "distinct": distinct}


def _stability_dict(report: dynamics.StabilityReport) -> Dict[str, Any]:
    return {
        "c": report.c,
        "classification": report.classification.value,
        "routh_hurwitz_stable": report.routh_hurwitz,
        "eigenvalues": [complex(ev) for ev in report.eigenvalues],
        "characteristic_polynomial": list(report.polynomial),
        "jacobian_eigenvalues": [complex(ev) for ev in report.jacobian_eigenvalues],
    }


def _display(kind: AnalysisKind, payload: Dict[str, Any]):
    console = Console()
    if kind is AnalysisKind.STABILITY:
        content = Text()
        content.append("Classification: ", style=Colors.SECONDARY)
        content.append_text(Text.from_markup(Styles.classification(payload["classification"])))
        content.append("\nRouth-Hurwitz stable: ", style=Colors.SECONDARY)
        content.append(str(payload["routh_hurwitz_stable"]), style=Colors.PRIMARY)
        content.append("\nEigenvalues:\n", style=Colors.SECONDARY)
        for ev in payload["eigenvalues"]:
            content.append(f"  {ev.real:+.6f} {ev.imag:+.6f}i\n", style=Colors.PRIMARY)
        title = f"Equilibrium (c, 0, 0, 0, 0), c = {payload['c']}"
        console.print(Panel(content, title=title, **PanelStyles.standard()))
        return

    if kind in (AnalysisKind.LYAPUNOV, AnalysisKind.LYAPUNOV_SWEEP):
        rows = payload.get("rows") or [{"c": payload["config"]["x0"], **payload}]
        styles = TableStyles.spectrum_table()
        table = Table(title="Lyapunov spectrum")
        for name, style in styles.items():
            table.add_column(name, style=style, justify="right")
        for row in rows:
            if row.get("diverged"):
                table.add_row(str(row["c"]), *([""] * 5), Styles.warning("diverged"))
            else:
                table.add_row(
                    str(row["c"]),
                    *(Styles.number(e) for e in row["exponents"]),
                    Styles.number(row["dimension"], 4),
                )
        console.print(table)
    else:
        summary = {k: v for k, v in payload.items() if k not in ("config", "distinct_extrema")}
        content = Text("\n".join(f"{k}: {v}" for k, v in summary.items()))
        console.print(Panel(content, title=f"analyze {kind.value}", **PanelStyles.standard()))
