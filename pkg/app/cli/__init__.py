"""
Interface en ligne de commande
Regroupement de toutes les commandes
"""

from typing import Annotated, Optional

import typer

from app.cli.check_fixed_point import check_fixed_point_command
from app.cli.ensemble import ensemble_command
from app.cli.figure import figure_command
from app.cli.version import version_command
from app.core.config import settings
from app.core.logging import setup_logging


cli = typer.Typer(
    name="rsp",
    help=f"{settings.APP_NAME}: simulation et vérifications analytiques",
    no_args_is_help=True,
    add_completion=False,
)


@cli.callback()
def main(
    log_level: Annotated[Optional[str], typer.Option("--log-level", help="Niveau de log")] = None,
    log_format: Annotated[Optional[str], typer.Option("--log-format", help="console ou json")] = None,
):
    """Configure le logging avant chaque commande"""
    setup_logging(level=log_level, fmt=log_format)


# Inclure toutes les commandes
cli.command("ensemble")(ensemble_command)
cli.command("figure")(figure_command)
cli.command("check-fixed-point")(check_fixed_point_command)
cli.command("version")(version_command)


__all__ = ["cli"]
