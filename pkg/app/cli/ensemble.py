"""
Commande - Ensemble
Simulation d'un ensemble de répliques et écriture des observables
"""

from typing import Annotated, Optional

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
from app.core.config import settings
from app.schemas.run import Observable, RunConfig
from app.services.ensemble import run_ensemble


def ensemble_command(
    n: DimensionOption = None,
    a: ConcentrationOption = None,
    t: TimesOption = None,
    replicas: ReplicasOption = None,
    seed: SeedOption = None,
    out: OutOption = None,
    svg: SvgOption = None,
    eps_real: EpsRealOption = None,
    bins: BinsOption = None,
    workers: WorkersOption = None,
    renormalize: Annotated[bool, typer.Option("--renormalize", help="Renormaliser les colonnes à chaque pas")] = False,
    homogeneous: Annotated[bool, typer.Option("--homogeneous", help="Chaîne homogène M^t")] = False,
    observable: Annotated[
        Optional[list[Observable]], typer.Option("--observable", help="Observable enregistrée (répétable)")
    ] = None,
):
    """
    Simule U(t) = M_t ··· M_1 pour chaque réplique et écrit un CSV par
    observable et par temps, plus manifest.json
    """
    with guarded():
        config = RunConfig(
            n=2 if n is None else n,
            a=1.0 if a is None else a,
            t_values=t or [1],
            replicas=settings.DEFAULT_REPLICAS if replicas is None else replicas,
            master_seed=settings.DEFAULT_SEED if seed is None else seed,
            observables=observable or [Observable.COLUMNS],
            bins=bins,
            eps_real=settings.EPS_REAL if eps_real is None else eps_real,
            output_dir=settings.OUTPUT_DIR if out is None else out,
            emit_svg=settings.EMIT_SVG if svg is None else svg,
            renormalize_columns=renormalize or settings.RENORMALIZE_COLUMNS,
            homogeneous=homogeneous,
            workers=settings.WORKERS if workers is None else workers,
        )
        manifest = run_ensemble(config)
    print_manifest(manifest, title=f"ensemble n={config.n} a={config.a:g}")
