"""
Commande - Vérification du point fixe
Intégrales des deux régions sur une grille de z (cas n = 2)
"""

import logging
from typing import Annotated

import typer
from rich.table import Table

from app.cli.dependencies import console, err_console, guarded
from app.core.exceptions import NumericalFailureError
from app.services.analytic import fixed_point_grid, verify_fixed_point


logger = logging.getLogger(__name__)


def check_fixed_point_command(
    a: Annotated[float, typer.Option("--a", help="Concentration (> 0)")] = 1.0,
    grid: Annotated[int, typer.Option("--grid", min=1, help="Nombre de points intérieurs")] = 99,
    tol: Annotated[float, typer.Option("--tol", help="Résidu maximal accepté")] = 1e-5,
):
    """
    Vérifie que Beta(2a, 2a) est point fixe de l'opérateur de transfert:
    chaque région doit valoir P∞(z)/2. Code de sortie 0 si le résidu
    maximal est sous la tolérance.
    """
    with guarded():
        logger.info("vérification du point fixe a=%s, %d points, tolérance %.1e", a, grid, tol)
        checks = [verify_fixed_point(a, float(z)) for z in fixed_point_grid(grid)]

    table = Table(title=f"point fixe, a={a:g}")
    for column in ("z", "région i", "région ii", "P∞(z)/2", "résidu"):
        table.add_column(column, justify="right")
    for check in checks:
        table.add_row(
            f"{check.z:.2f}",
            f"{check.region_i:.10f}",
            f"{check.region_ii:.10f}",
            f"{check.target / 2:.10f}",
            f"{check.residual:.3e}",
        )
    console.print(table)

    worst = max(checks, key=lambda check: check.residual)
    if worst.residual < tol:
        console.print(f"[green]OK[/green] résidu maximal {worst.residual:.3e} < {tol:.1e}")
        return
    err_console.print(
        f"[bold red]Échec:[/bold red] résidu maximal {worst.residual:.3e} en z={worst.z:.2f} (tolérance {tol:.1e})"
    )
    raise typer.Exit(code=NumericalFailureError.exit_code)
