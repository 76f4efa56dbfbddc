"""
Dépendances communes des commandes
Options partagées, consoles rich et traduction des erreurs en codes de sortie
"""

from contextlib import contextmanager
from pathlib import Path
from typing import Annotated, Iterator, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from app.core.config import settings
from app.core.exceptions import SimulationError, UsageError
from app.schemas.run import RunManifest


console = Console()
err_console = Console(stderr=True)


# ===== Options partagées =====

SeedOption = Annotated[Optional[int], typer.Option("--seed", min=0, help="Graine maître (64 bits)")]
OutOption = Annotated[Optional[Path], typer.Option("--out", help="Répertoire de sortie")]
ReplicasOption = Annotated[Optional[int], typer.Option("--replicas", min=1, help="Nombre de répliques")]
WorkersOption = Annotated[Optional[int], typer.Option("--workers", min=1, help="Nombre de processus")]
SvgOption = Annotated[Optional[bool], typer.Option("--svg/--no-svg", help="Produire les figures SVG")]
BinsOption = Annotated[Optional[int], typer.Option("--bins", min=1, help="Nombre de classes des histogrammes")]
EpsRealOption = Annotated[Optional[float], typer.Option("--eps-real", help="Demi-largeur de la bande réelle")]
DimensionOption = Annotated[Optional[int], typer.Option("--n", help="Dimension des matrices")]
ConcentrationOption = Annotated[Optional[float], typer.Option("--a", help="Concentration de Dirichlet")]
TimesOption = Annotated[Optional[list[int]], typer.Option("--t", help="Temps observé (répétable)")]


# ===== Erreurs =====

@contextmanager
def guarded() -> Iterator[None]:
    """
    Traduit les erreurs métier en message rich et code de sortie

    ValidationError (configuration invalide) devient une erreur d'usage.
    """
    try:
        yield
    except ValidationError as exc:
        error = UsageError(f"configuration invalide: {exc}")
        err_console.print(f"[bold red]Erreur:[/bold red] {error.detail}")
        raise typer.Exit(code=error.exit_code) from exc
    except SimulationError as exc:
        if settings.DEBUG:
            err_console.print_exception()
        err_console.print(f"[bold red]Erreur:[/bold red] {exc.detail}")
        raise typer.Exit(code=exc.exit_code) from exc


# ===== Affichage =====

def print_manifest(manifest: RunManifest, title: str) -> None:
    """Tableau des fichiers produits et des exclusions"""
    table = Table(title=title)
    table.add_column("fichier")
    table.add_column("octets", justify="right")
    table.add_column("sha256")
    for artifact in manifest.artifacts:
        table.add_row(artifact.path, str(artifact.bytes), artifact.sha256[:16])
    console.print(table)
    for key, value in manifest.excluded.items():
        console.print(f"[yellow]exclus[/yellow] {key}: {value}")
    console.print(f"durée: {manifest.wall_clock_seconds:.2f} s")
