"""Rich renderings of models, designs and reports."""
from typing import Iterable, Optional, Sequence

import numpy as np
from rich import box
from rich.table import Table

from ovenctl.services.design import GainSet, StabilityReport
from ovenctl.services.heat_transfer import DimensionlessGroup
from ovenctl.services.plant import PlantReport, TemperatureGuideline
from ovenctl.services.simulation import StepMetrics

HEADER_STYLE = "bold bright_red on bright_blue"
BORDER_STYLE = "bright_blue"


def _table(title: str, *columns: str) -> Table:
    table = Table(title=title, show_header=True, header_style=HEADER_STYLE, border_style=BORDER_STYLE,
                  box=box.ROUNDED)
    for column in columns:
        table.add_column(column)
    return table


def format_complex(z: complex, digits: int = 4) -> str:
    if abs(z.imag) <= 1e-12 * max(1.0, abs(z)):
        return f"{z.real:.{digits}f}"
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real:.{digits}f} {sign} {abs(z.imag):.{digits}f}j"


def matrix_table(title: str, matrix: np.ndarray, row_labels: Sequence[str],
                 col_labels: Sequence[str]) -> Table:
    table = _table(title, "", *col_labels)
    for label, row in zip(row_labels, np.atleast_2d(matrix)):
        table.add_row(label, *(f"{v:.5f}" for v in row))
    return table


def guidelines_table(rows: Iterable[TemperatureGuideline]) -> Table:
    table = _table("Food temperature guidelines", "Food", "Safe (F)", "Recommended (F)", "Preset")
    for row in rows:
        low, high = row.recommended
        recommended = f"{low:g}" if low == high else f"{low:g}-{high:g}"
        table.add_row(row.food, f"{row.safe_temp:g}", recommended,
                      "[green]modelled[/green]" if row.modelled else "[dim]reference only[/dim]")
    return table


def plant_report_table(report: PlantReport) -> Table:
    table = _table("Plant checks", "Check", "Result", "Detail")
    for check in report.checks:
        table.add_row(check.name, "[green]pass[/green]" if check.passed else "[red]FAIL[/red]", check.detail)
    return table


def stability_table(report: StabilityReport, title: str = "Open-loop poles",
                    published: Optional[Sequence[float]] = None) -> Table:
    """Computed poles, optionally beside published values matched in sorted order."""
    columns = ["#", "Pole", "Re < 0"] + (["Published"] if published else [])
    table = _table(title, *columns)
    reference = sorted(published) if published else []
    for i, pole in enumerate(report.spectrum.sorted(), start=1):
        row = [str(i), format_complex(pole), "yes" if pole.real < 0 else "no"]
        if published:
            row.append(f"{reference[i - 1]:.3f}")
        table.add_row(*row)
    return table


def gains_table(gains: GainSet, state_labels: Sequence[str]) -> Table:
    table = _table("Gains", "", *state_labels)
    table.add_row("K", *(f"{v:.6g}" for v in gains.k.ravel()))
    table.add_row("L", *(f"{v:.6g}" for v in gains.l.ravel()))
    table.add_row("N", f"{gains.n_ff:.6g}", *([""] * (len(state_labels) - 1)))
    return table


def htc_table(surfaces: Sequence[tuple[str, float, float, DimensionlessGroup, float, float]]) -> Table:
    """Rows of (surface, D, dT, groups, derived h, table h)."""
    table = _table("Natural-convection estimate", "Surface", "D (ft)", "dT (F)", "Gr", "Pr", "Nu",
                   "h derived", "h table", "Regime")
    for name, d, delta_t, groups, h, h_table in surfaces:
        regime = "turbulent" if groups.gr > 1e9 else "laminar"
        table.add_row(name, f"{d:g}", f"{delta_t:g}", f"{groups.gr:.4g}", f"{groups.pr:.4f}",
                      f"{groups.nu:.4g}", f"{h:.4g}", f"{h_table:.4g}", regime)
    return table


def metrics_table(rows: Sequence[tuple[str, StepMetrics]]) -> Table:
    table = _table("Step response", "Run", "Final (F)", "Peak (F)", "Overshoot", "Undershoot",
                   "Settling time", "In band")
    for label, m in rows:
        settling = f"{m.settling_time:.4g}" if m.settling_time is not None else "[yellow]not settled[/yellow]"
        table.add_row(label, f"{m.final_value:.4f}", f"{m.peak:.4f}", f"{m.overshoot:.4f}",
                      f"{m.undershoot:.4f}", settling, "yes" if m.in_band else "[red]no[/red]")
    return table


def repro_table(checks: Iterable, title: Optional[str] = "Reproduction checks") -> Table:
    table = _table(title, "Check", "Expected", "Computed", "Tolerance", "Result")
    for check in checks:
        table.add_row(check.name, check.expected, check.computed, f"{check.tolerance:g}",
                      "[green]pass[/green]" if check.passed else "[red]FAIL[/red]")
    return table
