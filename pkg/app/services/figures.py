"""
Service des figures
Registre des panneaux (paramètres par défaut de chaque figure) et
production des séries, des références analytiques et des SVG
"""

import logging
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Literal, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from app.core.config import settings
from app.core.exceptions import InvalidArgumentError, UsageError
from app.models.plot import PlotSpec, Series
from app.models.spectrum import Spectrum
from app.schemas.run import Observable, RunConfig, RunManifest
from app.services import analytic, stats
from app.services.ensemble import MANIFEST_NAME, EnsembleRunner, neg_log_rate, u11_reference
from app.services.export import artifact_entry, emit_csv, emit_manifest, emit_svg
from app.services.spectral import rescale_spectrum


logger = logging.getLogger(__name__)

PanelKind = Literal["histogram", "curve", "scatter", "real_fraction"]
Quantity = Literal["u11", "theta", "vartheta", "neg_log_rate", "lambda1", "spectrum"]
Overlay = Literal["p2", "fixed_point", "gamma_fit", "analytic_n2"]

_OBSERVABLE = {
    "u11": Observable.COLUMNS,
    "theta": Observable.EXPONENTS,
    "vartheta": Observable.EXPONENTS,
    "neg_log_rate": Observable.DISTANCE,
    "lambda1": Observable.CURVE,
    "spectrum": Observable.SPECTRUM,
}

_LABELS = {
    "u11": "U₁₁",
    "theta": "θ",
    "vartheta": "ϑ",
    "neg_log_rate": "-(1/t) ln d₁₂",
}

ALIASES = {"fig3": "fig3a", "fig4": "fig4a"}


@dataclass(frozen=True)
class FigurePanel:
    """
    Paramètres d'un panneau de figure

    Attributes:
        tag: Identifiant (fig1a...fig6d)
        kind: Histogramme, courbe, nuage de points ou fraction réelle
        title: Titre du panneau
        dimensions: Une ou plusieurs dimensions n
        a: Concentration
        t_values: Temps observés (le dernier pour un histogramme)
        quantity: Grandeur tracée
        overlay: Référence superposée
        reference: Paramètres publiés, à titre qualitatif
    """

    tag: str
    kind: PanelKind
    title: str
    dimensions: tuple[int, ...]
    a: float
    t_values: tuple[int, ...]
    quantity: Quantity
    overlay: Optional[Overlay] = None
    reference: dict[str, float] = field(default_factory=dict)

    @property
    def observable(self) -> Observable:
        return _OBSERVABLE[self.quantity]


def _u11_panel(tag: str, n: int, a: float, t: int, overlay: Overlay) -> FigurePanel:
    return FigurePanel(
        tag=tag,
        kind="histogram",
        title=f"U₁₁, n={n}, a={a:g}, t={t}",
        dimensions=(n,),
        a=a,
        t_values=(t,),
        quantity="u11",
        overlay=overlay,
    )


def _exponent_panel(tag: str, quantity: Quantity, n: int, t: int, alpha: float, beta: float) -> FigurePanel:
    return FigurePanel(
        tag=tag,
        kind="histogram",
        title=f"{_LABELS[quantity]}, n={n}, a=1, t={t}",
        dimensions=(n,),
        a=1.0,
        t_values=(t,),
        quantity=quantity,
        overlay="gamma_fit",
        reference={"alpha": alpha, "beta": beta},
    )


def registry() -> dict[str, FigurePanel]:
    """Tous les panneaux, avec leurs paramètres par défaut"""
    n5 = settings.FIG5_DIMENSION
    curve_times = (1, 2) + tuple(range(5, 55, 5))
    panels = [
        # ===== Figure 1: U₁₁ pour n = 2 =====
        _u11_panel("fig1a", 2, 1.0, 2, "p2"),
        _u11_panel("fig1b", 2, 1.0, 10, "fixed_point"),
        _u11_panel("fig1c", 2, 2.0, 5, "fixed_point"),
        _u11_panel("fig1d", 2, 3.0, 5, "fixed_point"),
        # ===== Figure 2: décroissance de λ₁ et exposants pour n = 2 =====
        FigurePanel(
            tag="fig2a",
            kind="curve",
            title="-ln⟨|λ₁(t)|⟩, a=1",
            dimensions=(2, 8, 32),
            a=1.0,
            t_values=curve_times,
            quantity="lambda1",
            overlay="analytic_n2",
        ),
        _exponent_panel("fig2b", "theta", 2, 1, 1.92, 1.3),
        _exponent_panel("fig2c", "theta", 2, 5, 9.13, 6.15),
        _exponent_panel("fig2d", "vartheta", 2, 1, 2.05, 0.65),
        # ===== Figure 3: conjecture a' = na =====
        _u11_panel("fig3a", 3, 1.0, 50, "fixed_point"),
        _u11_panel("fig3b", 5, 1.0, 50, "fixed_point"),
        _u11_panel("fig3c", 10, 1.0, 50, "fixed_point"),
        _u11_panel("fig3d", 4, 1.0, 20, "fixed_point"),
        _u11_panel("fig3e", 5, 2.0, 50, "fixed_point"),
        _u11_panel("fig3f", 5, 3.0, 50, "fixed_point"),
        # ===== Figure 4: distance entre colonnes =====
        *[
            FigurePanel(
                tag=f"fig4{suffix}",
                kind="histogram",
                title=f"-(1/t) ln d₁₂, n=3, a=1, t={t}",
                dimensions=(3,),
                a=1.0,
                t_values=(t,),
                quantity="neg_log_rate",
                overlay="gamma_fit",
            )
            for suffix, t in (("a", 5), ("b", 10), ("c", 20))
        ],
        # ===== Figure 5: exposants pour n > 2 =====
        _exponent_panel("fig5a", "theta", n5, 1, 4.23, 3.87),
        _exponent_panel("fig5b", "theta", n5, 5, 18.46, 15.89),
        _exponent_panel("fig5c", "vartheta", n5, 1, 3.8, 2.5),
        _exponent_panel("fig5d", "vartheta", n5, 5, 18.81, 9.0),
        # ===== Figure 6: spectre remis à l'échelle =====
        *[
            FigurePanel(
                tag=f"fig6{suffix}",
                kind="scatter",
                title=f"λ|λ|^(1/t-1), n=5, a=1, t={t}",
                dimensions=(5,),
                a=1.0,
                t_values=(t,),
                quantity="spectrum",
            )
            for suffix, t in (("a", 1), ("b", 5), ("c", 10))
        ],
        FigurePanel(
            tag="fig6d",
            kind="real_fraction",
            title="fraction réelle, a=1, ε=0.01",
            dimensions=(3, 5, 10),
            a=1.0,
            t_values=(1, 2, 5, 10, 20),
            quantity="spectrum",
        ),
    ]
    return {panel.tag: panel for panel in panels}


def resolve_tag(tag: str) -> FigurePanel:
    """
    Raises:
        UsageError: Identifiant inconnu (la liste des identifiants est donnée)
    """
    panels = registry()
    key = ALIASES.get(tag, tag)
    if key not in panels:
        raise UsageError(f"figure inconnue: {tag}; figures disponibles: {', '.join(sorted(panels))}")
    return panels[key]


# ===== Production d'une figure =====
class FigureBuilder:
    """Exécute les ensembles d'un panneau et écrit ses séries"""

    def __init__(
        self,
        panel: FigurePanel,
        output_dir: Path,
        master_seed: int,
        replicas: int,
        workers: int = 1,
        emit_svg: bool = False,
        bins: Optional[int] = None,
        eps_real: Optional[float] = None,
    ):
        self.panel = panel
        self.root = Path(output_dir) / panel.tag
        self.master_seed = master_seed
        self.replicas = replicas
        self.workers = workers
        self.emit_svg = emit_svg
        self.bins = bins
        self.eps_real = settings.EPS_REAL if eps_real is None else eps_real

    def configs(self) -> list[RunConfig]:
        """
        Un RunConfig par dimension

        Raises:
            UsageError: Paramètres invalides
        """
        panel = self.panel
        try:
            return [
                RunConfig(
                    n=n,
                    a=panel.a,
                    t_values=list(panel.t_values),
                    replicas=self.replicas,
                    master_seed=self.master_seed,
                    observables=[panel.observable],
                    bins=self.bins,
                    eps_real=self.eps_real,
                    output_dir=self.root / f"n{n}",
                    emit_svg=False,
                    workers=self.workers,
                )
                for n in panel.dimensions
            ]
        except ValidationError as exc:
            raise UsageError(f"{panel.tag}: configuration invalide: {exc}") from exc

    def build(self) -> RunManifest:
        panel = self.panel
        logger.info("figure %s: %s (répliques=%d, graine=%d)", panel.tag, panel.title, self.replicas, self.master_seed)
        started = time.perf_counter()
        configs = self.configs()
        runners = [EnsembleRunner(config) for config in configs]
        paths: list[Path] = []
        for runner in runners:
            runner.run(write_manifest=False)
            paths.extend(runner.emit_paths)

        builders = {
            "histogram": self._histogram,
            "curve": self._curve,
            "scatter": self._scatter,
            "real_fraction": self._real_fraction,
        }
        figure_paths, plot, summary = builders[panel.kind](runners)
        paths.extend(figure_paths)
        if self.emit_svg and plot is not None:
            paths.append(emit_svg(plot, self.root / f"{panel.tag}.svg"))

        excluded: dict[str, int] = {}
        for runner in runners:
            for key, value in runner.excluded.items():
                excluded[f"n{runner.config.n}.{key}"] = value
        elapsed = time.perf_counter() - started
        manifest = RunManifest(
            config=configs[0],
            figure=panel.tag,
            extra_configs=configs[1:],
            artifacts=[artifact_entry(path, self.root) for path in paths],
            excluded=dict(sorted(excluded.items())),
            wall_clock_seconds=elapsed,
            library_version=settings.APP_VERSION,
            settings_echo=settings.model_dump(mode="json"),
            summaries={
                "panel": {
                    "title": panel.title,
                    "dimensions": list(panel.dimensions),
                    "a": panel.a,
                    "t_values": list(panel.t_values),
                    "quantity": panel.quantity,
                    "overlay": panel.overlay,
                    "source_reference": panel.reference or None,
                },
                "figure": summary,
                "ensembles": {f"n{runner.config.n}": runner.summaries for runner in runners},
            },
        )
        emit_manifest(manifest, self.root / MANIFEST_NAME)
        logger.info("figure %s terminée en %.2f s", panel.tag, elapsed)
        return manifest

    # ===== Histogrammes =====
    def _samples(self, runner: EnsembleRunner) -> np.ndarray:
        panel = self.panel
        ts = runner.slices[panel.t_values[-1]]
        if panel.quantity == "u11":
            return ts.u11
        if panel.quantity == "theta":
            values = ts.theta
        elif panel.quantity == "vartheta":
            values = ts.vartheta
        else:
            values = neg_log_rate(ts.distance, ts.t)
        return values[np.isfinite(values) & (values > 0.0)]

    def _histogram(self, runners: Sequence[EnsembleRunner]):
        panel = self.panel
        runner = runners[0]
        n, t = runner.config.n, panel.t_values[-1]
        samples = self._samples(runner)
        summary: dict[str, Any] = {"samples": int(samples.size)}

        if panel.quantity == "u11":
            hist = stats.histogram(samples, self.bins or "fd", value_range=(0.0, 1.0))
            overlay = self._u11_overlay(n, t)
            reference = u11_reference(n, panel.a, t)
            if reference is not None:
                summary["reference"] = reference.summary(samples)
        else:
            hist = stats.histogram(samples, self.bins)
            overlay = None
            try:
                fit = stats.fit_gamma(samples, excluded=len(runner.slices[t]) - samples.size)
            except InvalidArgumentError as exc:
                logger.warning("%s: ajustement Gamma impossible: %s", panel.tag, exc.detail)
            else:
                summary["fit"] = fit.model_dump()
                alpha, beta = fit.param("alpha"), fit.param("beta")
                overlay = analytic.gamma_density_fn(alpha, beta)

        analytic_values = overlay.pdf(hist.centers) if overlay is not None else np.full(hist.centers.shape, math.nan)
        rows = zip(hist.edges[:-1], hist.edges[1:], hist.densities, analytic_values)
        path = emit_csv(("bin_left", "bin_right", "density", "analytic_density"), rows, self.root / f"{panel.tag}.csv")

        lines = ()
        if overlay is not None:
            grid = np.linspace(hist.edges[0], hist.edges[-1], 400)
            if panel.quantity == "u11":
                grid = grid[(grid > 0.0) & (grid < 1.0)]
            lines = (Series(label=overlay.family, x=grid, y=overlay.pdf(grid)),)
        plot = PlotSpec(
            title=panel.title,
            xlabel=_LABELS[panel.quantity],
            ylabel="densité",
            bars=hist,
            lines=lines,
        )
        summary["bins"] = int(hist.densities.size)
        return [path], plot, summary

    def _u11_overlay(self, n: int, t: int):
        if self.panel.overlay == "p2":
            return analytic.p2_density_fn()
        if self.panel.overlay == "fixed_point":
            return analytic.fixed_point_density_fn(self.panel.a, n)
        return None

    # ===== Courbe de décroissance =====
    def _curve(self, runners: Sequence[EnsembleRunner]):
        panel = self.panel
        paths = []
        lines = []
        summary: dict[str, Any] = {}
        slope_n2 = -math.log(analytic.mean_abs_lambda_n2(panel.a))
        for runner in runners:
            n = runner.config.n
            points = runner.curve()
            rows = [(p.t, p.value, p.t * slope_n2 if n == 2 else math.nan) for p in points]
            paths.append(emit_csv(("t", "neg_log_mean_lambda1", "analytic"), rows, self.root / f"{panel.tag}_n{n}.csv"))
            if points:
                lines.append(Series(label=f"n={n}", x=[p.t for p in points], y=[p.value for p in points]))
            tail = [p for p in points if p.t >= 5]
            if len(tail) >= 2:
                summary[f"n{n}"] = stats.linear_regression([p.t for p in tail], [p.value for p in tail])._asdict()
        times = np.asarray(panel.t_values, dtype=float)
        lines.append(Series(label="n=2 exact", x=times, y=times * slope_n2))
        summary["analytic_slope_n2"] = slope_n2
        plot = PlotSpec(title=panel.title, xlabel="t", ylabel="-ln⟨|λ₁|⟩", lines=tuple(lines))
        return paths, plot, summary

    # ===== Spectres =====
    def _scatter(self, runners: Sequence[EnsembleRunner]):
        panel = self.panel
        runner = runners[0]
        t = panel.t_values[-1]
        ts = runner.slices[t]
        points = []
        for values in ts.spectra:
            if np.all(np.isfinite(values)):
                points.append(rescale_spectrum(Spectrum(values), t).eigenvalues[1:])
        scaled = np.concatenate(points) if points else np.empty(0, dtype=complex)
        path = emit_csv(("re", "im"), zip(scaled.real, scaled.imag), self.root / f"{panel.tag}.csv")
        plot = PlotSpec(
            title=panel.title,
            xlabel="Re",
            ylabel="Im",
            points=(Series(label=f"t={t}", x=scaled.real, y=scaled.imag),),
            unit_circle=True,
        )
        summary = {"points": int(scaled.size), "mean_real_fraction": runner.mean_real_fraction(t)}
        return [path], plot, summary

    def _real_fraction(self, runners: Sequence[EnsembleRunner]):
        panel = self.panel
        rows = []
        lines = []
        summary: dict[str, Any] = {}
        for runner in runners:
            n = runner.config.n
            values = [runner.mean_real_fraction(t) for t in panel.t_values]
            rows.extend((t, n, value) for t, value in zip(panel.t_values, values))
            lines.append(Series(label=f"n={n}", x=panel.t_values, y=values))
            summary[f"n{n}"] = dict(zip(map(str, panel.t_values), values))
        path = emit_csv(("t", "n", "mean_real_fraction"), rows, self.root / f"{panel.tag}.csv")
        plot = PlotSpec(title=panel.title, xlabel="t", ylabel="fraction réelle", lines=tuple(lines))
        return [path], plot, summary


def reproduce_figure(
    tag: str,
    master_seed: Optional[int] = None,
    output_dir: Optional[Path] = None,
    replicas: Optional[int] = None,
    workers: Optional[int] = None,
    emit_svg: Optional[bool] = None,
    bins: Optional[int] = None,
    eps_real: Optional[float] = None,
    n: Optional[int] = None,
    a: Optional[float] = None,
    t_values: Optional[Sequence[int]] = None,
) -> RunManifest:
    """
    Produit les séries d'un panneau, la référence analytique et le manifeste

    Les paramètres du panneau peuvent être remplacés (n, a, t_values);
    les valeurs effectives sont reprises dans le manifeste.

    Raises:
        UsageError: Identifiant inconnu ou configuration invalide
        OutputError: Erreur d'écriture
    """
    panel = resolve_tag(tag)
    overrides: dict[str, Any] = {}
    if n is not None:
        overrides["dimensions"] = (n,)
    if a is not None:
        overrides["a"] = a
    if t_values:
        overrides["t_values"] = tuple(t_values)
    if overrides:
        panel = replace(panel, **overrides)

    builder = FigureBuilder(
        panel,
        output_dir=settings.OUTPUT_DIR if output_dir is None else output_dir,
        master_seed=settings.DEFAULT_SEED if master_seed is None else master_seed,
        replicas=settings.DEFAULT_REPLICAS if replicas is None else replicas,
        workers=settings.WORKERS if workers is None else workers,
        emit_svg=settings.EMIT_SVG if emit_svg is None else emit_svg,
        bins=bins,
        eps_real=eps_real,
    )
    return builder.build()
