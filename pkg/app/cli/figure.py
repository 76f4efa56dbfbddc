"""
Commande - Figures
Reproduction d'un panneau de figure (séries, référence analytique, SVG)
"""

from typing import Annotated

import typer

from app.cli.dependencies import (
    BinsOption,
    ConcentrationOption,
    DimensionOption,
    EpsRealOption,
    OutOption,
    ReplicasOption,
    SeedOption,
    SvgOption,
    TimesOption,
    WorkersOption,
    guarded,
    print_manifest,
)
from app.services.figures import reproduce_figure


def figure_command(
    tag: Annotated[str, typer.Argument(help="Panneau: fig1a ... fig6d (fig3, fig4 acceptés)")],
    seed: SeedOption = None,
    out: OutOption = None,
    replicas: ReplicasOption = None,
    workers: WorkersOption = None,
    svg: SvgOption = None,
    bins: BinsOption = None,
    eps_real: EpsRealOption = None,
    n: DimensionOption = None,
    a: ConcentrationOption = None,
    t: TimesOption = None,
):
    """
    Reproduit un panneau avec ses paramètres par défaut (remplaçables)
    """
    with guarded():
        manifest = reproduce_figure(
            tag,
            master_seed=seed,
            output_dir=out,
            replicas=replicas,
            workers=workers,
            emit_svg=svg,
            bins=bins,
            eps_real=eps_real,
            n=n,
            a=a,
            t_values=t,
        )
    print_manifest(manifest, title=f"figure {manifest.figure}")
