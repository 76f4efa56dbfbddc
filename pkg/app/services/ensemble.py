"""
Service d'ensemble
Simulation des répliques, écriture des CSV par observable et par temps,
résumés statistiques et manifeste
"""

import logging
import math
import time
from itertools import islice
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Literal, NamedTuple, Optional

import numpy as np

from app.core.config import settings
from app.core.exceptions import InvalidArgumentError, NumericalFailureError
from app.models.density import DensityFn
from app.models.observations import TimeSlice
from app.models.params import DirichletParams, SeedSpec, StreamLabel
from app.models.plot import PlotSpec, Series
from app.models.spectrum import Spectrum
from app.schemas.run import Observable, RunConfig, RunManifest
from app.services import analytic, stats
from app.services.chain import column_distance, iter_chain, iter_homogeneous_chain, perron_vector
from app.services.export import artifact_entry, emit_csv, emit_manifest, emit_svg, ensure_dir
from app.services.sampler import derive_generator
from app.services.spectral import exponent_positivity_violations, exponent_sample, real_fraction, rescale_spectrum, spectrum


logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"

_SPECTRAL = (Observable.EXPONENTS, Observable.SPECTRUM, Observable.CURVE)


# ===== Simulation d'un morceau de répliques =====
def _simulate_chunk(task: tuple[RunConfig, int, int]) -> dict[int, TimeSlice]:
    """
    Simule les répliques [start, stop) et empile leurs observations par temps

    Fonction de module pour être sérialisable par multiprocessing.
    """
    config, start, stop = task
    params = DirichletParams(a=config.a, n=config.n)
    wanted = set(config.t_values)
    t_max = config.t_values[-1]
    n = config.n
    need_spectrum = any(config.wants(o) for o in _SPECTRAL)

    rows: dict[int, dict[str, list]] = {t: {} for t in config.t_values}
    violations = {t: 0 for t in config.t_values}

    for replica in range(start, stop):
        if config.homogeneous:
            gen = derive_generator(SeedSpec(config.master_seed, replica, StreamLabel.HOMOGENEOUS))
            chain = iter_homogeneous_chain(params, gen)
        else:
            gen = derive_generator(SeedSpec(config.master_seed, replica, StreamLabel.FACTORS))
            chain = iter_chain(params, gen, renormalize=config.renormalize_columns)

        for record in islice(chain, t_max):
            t = record.t
            if t not in wanted:
                continue
            product = record.product
            out = rows[t]
            out.setdefault("replicas", []).append(replica)

            if config.wants(Observable.COLUMNS):
                out.setdefault("columns", []).append(np.array(product.entries))

            if config.wants(Observable.DISTANCE):
                out.setdefault("distance", []).append(column_distance(product, 0, 1))

            spec: Optional[Spectrum] = None
            if need_spectrum:
                try:
                    spec = spectrum(product)
                except NumericalFailureError as exc:
                    logger.warning("réplique %d, t=%d: %s", replica, t, exc.detail)
                values = spec.eigenvalues if spec is not None else np.full(n, complex(math.nan, math.nan))
                out.setdefault("spectra", []).append(values)
                out.setdefault("lambda1", []).append(abs(spec.subleading) if spec is not None else math.nan)

            if config.wants(Observable.EXPONENTS):
                sample = exponent_sample(product, t, replica, spec=spec)
                violations[t] += exponent_positivity_violations([sample])
                out.setdefault("theta", []).append(sample.theta)
                out.setdefault("vartheta", []).append(sample.vartheta)

            if config.wants(Observable.PERRON):
                try:
                    vector = perron_vector(product).values
                except NumericalFailureError:
                    vector = np.full(n, math.nan)
                out.setdefault("perron", []).append(vector)

    slices = {}
    for t in config.t_values:
        out = rows[t]
        slices[t] = TimeSlice(
            t=t,
            replicas=np.asarray(out.get("replicas", []), dtype=np.int64),
            columns=np.stack(out["columns"]) if "columns" in out else None,
            distance=np.asarray(out["distance"]) if "distance" in out else None,
            theta=np.asarray(out["theta"]) if "theta" in out else None,
            vartheta=np.asarray(out["vartheta"]) if "vartheta" in out else None,
            spectra=np.stack(out["spectra"]) if "spectra" in out else None,
            lambda1=np.asarray(out["lambda1"]) if "lambda1" in out else None,
            perron=np.stack(out["perron"]) if "perron" in out else None,
            violations=violations[t],
        )
    return slices


def _tasks(config: RunConfig) -> list[tuple[RunConfig, int, int]]:
    size = settings.CHUNK_SIZE
    return [(config, start, min(start + size, config.replicas)) for start in range(0, config.replicas, size)]


# ===== Orchestration =====
class EnsembleRunner:
    """
    Exécute un RunConfig: simulation, CSV, résumés et manifeste

    Les répliques sont réparties en morceaux de taille fixe; les résultats
    sont rassemblés dans l'ordre des morceaux, donc des indices de réplique,
    quel que soit le nombre de processus.
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.output_dir = Path(config.output_dir)
        self.slices: dict[int, TimeSlice] = {}
        self.excluded: dict[str, int] = {}
        self.emit_paths: list[Path] = []
        self.summaries: dict[str, Any] = {}

    def simulate(self) -> dict[int, TimeSlice]:
        """Simule toutes les répliques et renvoie les observations par temps"""
        tasks = _tasks(self.config)
        if self.config.workers > 1 and len(tasks) > 1:
            with Pool(processes=min(self.config.workers, len(tasks))) as pool:
                parts = pool.map(_simulate_chunk, tasks)
        else:
            parts = [_simulate_chunk(task) for task in tasks]
        self.slices = {t: TimeSlice.concat([part[t] for part in parts]) for t in self.config.t_values}
        return self.slices

    # ===== Fichiers =====
    def emit(self) -> list[Path]:
        """
        Écrit un CSV par observable et par temps, plus curve.csv et
        real_fraction.csv

        Raises:
            OutputError: Répertoire ou fichier non inscriptible
        """
        config = self.config
        out = ensure_dir(self.output_dir)
        paths: list[Path] = []
        for t, ts in self.slices.items():
            if ts.columns is not None:
                paths.append(emit_csv(("replica", "row", "col", "value"), _column_rows(ts), out / f"columns_t{t}.csv"))
            if ts.distance is not None:
                paths.append(emit_csv(("replica", "d12", "neg_log_rate"), _distance_rows(ts), out / f"distance_t{t}.csv"))
            if ts.theta is not None:
                paths.append(
                    emit_csv(
                        ("replica", "t", "n", "theta", "vartheta", "theta_degenerate", "vartheta_degenerate"),
                        _exponent_rows(ts, config.n),
                        out / f"exponents_t{t}.csv",
                    )
                )
            if config.wants(Observable.SPECTRUM) and ts.spectra is not None:
                paths.append(
                    emit_csv(
                        ("replica", "index", "re", "im", "re_rescaled", "im_rescaled"),
                        _spectrum_rows(ts),
                        out / f"spectrum_t{t}.csv",
                    )
                )
            if ts.perron is not None:
                paths.append(emit_csv(("replica", "index", "value"), _perron_rows(ts), out / f"perron_t{t}.csv"))

        if config.wants(Observable.CURVE):
            curve = self.curve()
            paths.append(
                emit_csv(
                    ("t", "neg_log_mean_lambda1", "samples", "excluded"),
                    [(p.t, p.value, p.samples, p.excluded) for p in curve],
                    out / "curve.csv",
                )
            )
        if config.wants(Observable.SPECTRUM):
            paths.append(
                emit_csv(
                    ("t", "mean_real_fraction"),
                    [(t, self.mean_real_fraction(t)) for t in config.t_values],
                    out / "real_fraction.csv",
                )
            )
        if config.emit_svg:
            paths.extend(self._emit_plots(out))
        return paths

    def _emit_plots(self, out: Path) -> list[Path]:
        """SVG: histogramme de U₁₁ par temps, courbe, spectres remis à l'échelle"""
        config = self.config
        paths = []
        for t, ts in self.slices.items():
            if ts.columns is not None:
                hist = stats.histogram(ts.u11, config.bins or "fd", value_range=(0.0, 1.0))
                lines = ()
                reference = u11_reference(config.n, config.a, t, config.homogeneous)
                if reference is not None:
                    grid = np.linspace(0.0, 1.0, 402)[1:-1]
                    label = f"{reference.name} ({reference.status})"
                    lines = (Series(label=label, x=grid, y=reference.density.pdf(grid)),)
                plot = PlotSpec(title=f"U₁₁, n={config.n}, a={config.a:g}, t={t}", xlabel="U₁₁", ylabel="densité", bars=hist, lines=lines)
                paths.append(emit_svg(plot, out / f"u11_t{t}.svg"))
            if config.wants(Observable.SPECTRUM) and ts.spectra is not None:
                scaled = [
                    rescale_spectrum(Spectrum(values), t).eigenvalues[1:]
                    for values in ts.spectra
                    if np.all(np.isfinite(values))
                ]
                points = np.concatenate(scaled) if scaled else np.empty(0, dtype=complex)
                plot = PlotSpec(
                    title=f"spectre remis à l'échelle, n={config.n}, t={t}",
                    xlabel="Re",
                    ylabel="Im",
                    points=(Series(label=f"t={t}", x=points.real, y=points.imag),),
                    unit_circle=True,
                )
                paths.append(emit_svg(plot, out / f"spectrum_t{t}.svg"))
        if config.wants(Observable.CURVE):
            curve = self.curve()
            plot = PlotSpec(
                title=f"-ln⟨|λ₁(t)|⟩, n={config.n}, a={config.a:g}",
                xlabel="t",
                ylabel="-ln⟨|λ₁|⟩",
                lines=(Series(label=f"n={config.n}", x=[p.t for p in curve], y=[p.value for p in curve]),),
            )
            paths.append(emit_svg(plot, out / "curve.svg"))
        return paths

    # ===== Grandeurs dérivées =====
    def curve(self) -> list[stats.CurvePoint]:
        per_t = {t: ts.lambda1 for t, ts in self.slices.items() if ts.lambda1 is not None}
        return stats.mean_log_modulus_curve(per_t)

    def real_fractions(self, t: int) -> np.ndarray:
        """Fraction réelle par réplique (spectre remis à l'échelle par défaut)"""
        ts = self.slices[t]
        if ts.spectra is None:
            return np.empty(0)
        out = []
        for values in ts.spectra:
            if not np.all(np.isfinite(values)):
                continue
            spec = Spectrum(values)
            if settings.REAL_FRACTION_ON_RESCALED:
                spec = rescale_spectrum(spec, t)
            out.append(real_fraction(spec, self.config.eps_real))
        return np.asarray(out)

    def mean_real_fraction(self, t: int) -> float:
        fractions = self.real_fractions(t)
        return float(np.mean(fractions)) if fractions.size else math.nan

    # ===== Résumés =====
    def summarize(self) -> dict[str, Any]:
        """Ajustements par temps, fraction réelle, régression de la courbe"""
        config = self.config
        per_t: dict[str, Any] = {}
        violations = 0
        for t, ts in self.slices.items():
            entry: dict[str, Any] = {"replicas": len(ts)}
            if ts.theta is not None:
                entry["theta"] = self._fit_positive("gamma", ts.theta, f"theta_t{t}")
                entry["vartheta"] = self._fit_positive("gamma", ts.vartheta, f"vartheta_t{t}")
                violations += ts.violations
            if ts.distance is not None:
                entry["neg_log_rate"] = self._fit_positive("gamma", neg_log_rate(ts.distance, t), f"neg_log_rate_t{t}")
            if ts.columns is not None:
                entry["u11"] = self._u11_summary(ts)
            if ts.perron is not None:
                elements = ts.perron[np.all(np.isfinite(ts.perron), axis=1)].ravel()
                self._count("perron", len(ts) - elements.size // config.n)
                entry["perron"] = _safe_fit("gaussian", elements, 0)
                entry["gaussian_limit"] = analytic.gaussian_limit(config.a, config.n)._asdict()
            if config.wants(Observable.SPECTRUM):
                entry["mean_real_fraction"] = self.mean_real_fraction(t)
            if ts.spectra is not None:
                self._count("spectrum", int(np.sum(~np.all(np.isfinite(ts.spectra), axis=1))))
            per_t[str(t)] = entry

        summaries: dict[str, Any] = {"per_t": per_t}
        if config.wants(Observable.EXPONENTS):
            summaries["exponent_positivity_violations"] = violations
            if violations:
                logger.warning("%d échantillons d'exposants non positifs", violations)
        if config.wants(Observable.CURVE):
            summaries["curve"] = self._curve_summary()
        return summaries

    def _count(self, key: str, value: int) -> None:
        if value:
            self.excluded[key] = self.excluded.get(key, 0) + int(value)

    def _fit_positive(self, family: str, values: np.ndarray, key: str) -> Optional[dict]:
        usable = values[np.isfinite(values) & (values > 0.0)]
        excluded = values.size - usable.size
        self._count(key, excluded)
        if excluded:
            logger.warning("%s: %d échantillons dégénérés exclus", key, excluded)
        return _safe_fit(family, usable, excluded)

    def _u11_summary(self, ts: TimeSlice) -> dict[str, Any]:
        config = self.config
        u11 = ts.u11
        inner = u11[(u11 > 0.0) & (u11 < 1.0)]
        summary: dict[str, Any] = {"fit": _safe_fit("beta", inner, u11.size - inner.size)}
        reference = u11_reference(config.n, config.a, ts.t, config.homogeneous)
        if reference is not None:
            summary["reference"] = reference.summary(u11)
        return summary

    def _curve_summary(self) -> dict[str, Any]:
        points = self.curve()
        summary: dict[str, Any] = {"points": [p._asdict() for p in points]}
        if len(points) >= 2:
            regression = stats.linear_regression([p.t for p in points], [p.value for p in points])
            summary["regression"] = regression._asdict()
        if self.config.n == 2 and not self.config.homogeneous:
            summary["analytic_slope"] = -math.log(analytic.mean_abs_lambda_n2(self.config.a))
        return summary

    # ===== Manifeste =====
    def build_manifest(self, paths: list[Path], summaries: dict[str, Any], elapsed: float, root: Optional[Path] = None) -> RunManifest:
        root = root or self.output_dir
        return RunManifest(
            config=self.config,
            artifacts=[artifact_entry(path, root) for path in paths],
            excluded=dict(sorted(self.excluded.items())),
            wall_clock_seconds=elapsed,
            library_version=settings.APP_VERSION,
            settings_echo=settings.model_dump(mode="json"),
            summaries=summaries,
        )

    def run(self, write_manifest: bool = True) -> RunManifest:
        """
        Simulation, CSV, résumés et manifeste (manifest.json)

        Raises:
            OutputError: Erreur d'écriture
        """
        config = self.config
        logger.info(
            "ensemble n=%d a=%s t=%s répliques=%d graine=%d processus=%d",
            config.n, config.a, config.t_values, config.replicas, config.master_seed, config.workers,
        )
        started = time.perf_counter()
        self.simulate()
        paths = self.emit_paths = self.emit()
        summaries = self.summaries = self.summarize()
        elapsed = time.perf_counter() - started
        manifest = self.build_manifest(paths, summaries, elapsed)
        if write_manifest:
            emit_manifest(manifest, self.output_dir / MANIFEST_NAME)
        logger.info("ensemble terminé en %.2f s (%d fichiers)", elapsed, len(paths))
        return manifest


def run_ensemble(config: RunConfig) -> RunManifest:
    """Exécute un ensemble complet et écrit son manifeste"""
    return EnsembleRunner(config).run()


# ===== Aides =====
def neg_log_rate(distance: np.ndarray, t: int) -> np.ndarray:
    """-(1/t) ln d, nan sous le plancher de dégénérescence"""
    with np.errstate(divide="ignore", invalid="ignore"):
        rate = -np.log(np.where(distance >= settings.DEGENERATE_FLOOR, distance, math.nan)) / t
    return rate


ReferenceStatus = Literal["exact", "numerical", "asymptotic", "conjecture"]


class U11Reference(NamedTuple):
    """Loi de référence de U₁₁ et son statut (exacte, Nyström, limite, conjecture)"""

    density: DensityFn
    status: ReferenceStatus

    @property
    def name(self) -> str:
        return self.density.family

    def summary(self, samples: np.ndarray) -> dict[str, Any]:
        """Entrée "reference" du manifeste: nom, statut et test KS"""
        ks = stats.ks_statistic(samples, self.density.cdf)
        return {"name": self.name, "status": self.status, "ks_statistic": ks.statistic, "p_value": ks.p_value}


def u11_reference(n: int, a: float, t: int, homogeneous: bool = False) -> Optional[U11Reference]:
    """
    Loi de référence de U₁₁ au temps t, si elle est connue

    - t = 1: marginale Beta(a, (n-1)a), exacte
    - n = 2, a = 1, t = 2: densité p₂, exacte
    - n = 2, a >= 1: T^(t-1) appliqué à la marginale par Nyström
      (settings.REFERENCE_NODES intervalles)
    - n = 2, a < 1: point fixe Beta(2a, 2a), limite t → ∞ seulement
    - n > 2: point fixe Beta(na, n(n-1)a), conjecturé

    Aucune pour une chaîne homogène au-delà de t = 1.
    """
    if t == 1:
        return U11Reference(analytic.marginal_density_fn(a, n), "exact")
    if homogeneous:
        return None
    if n == 2 and a == 1.0 and t == 2:
        return U11Reference(analytic.p2_density_fn(), "exact")
    if n == 2 and a >= 1.0:
        density = analytic.iterate_transfer(
            analytic.marginal_density_fn(a, n), a, t - 1, nodes=settings.REFERENCE_NODES
        )
        return U11Reference(density, "numerical")
    if n == 2:
        return U11Reference(analytic.fixed_point_density_fn(a, n), "asymptotic")
    return U11Reference(analytic.fixed_point_density_fn(a, n), "conjecture")


def _safe_fit(family: str, values: np.ndarray, excluded: int) -> Optional[dict]:
    try:
        return stats.fit(family, values, excluded=excluded).model_dump()
    except InvalidArgumentError as exc:
        logger.warning("ajustement %s ignoré: %s", family, exc.detail)
        return None


def _column_rows(ts: TimeSlice):
    n = ts.columns.shape[1]
    for replica, matrix in zip(ts.replicas, ts.columns):
        for row in range(n):
            for col in range(n):
                yield replica, row, col, matrix[row, col]


def _distance_rows(ts: TimeSlice):
    rates = neg_log_rate(ts.distance, ts.t)
    for replica, d, rate in zip(ts.replicas, ts.distance, rates):
        yield replica, d, rate


def _exponent_rows(ts: TimeSlice, n: int):
    for replica, theta, vartheta in zip(ts.replicas, ts.theta, ts.vartheta):
        yield replica, ts.t, n, theta, vartheta, math.isnan(theta), math.isnan(vartheta)


def _spectrum_rows(ts: TimeSlice):
    for replica, values in zip(ts.replicas, ts.spectra):
        if not np.all(np.isfinite(values)):
            continue
        rescaled = rescale_spectrum(Spectrum(values), ts.t).eigenvalues
        for index, (raw, scaled) in enumerate(zip(values, rescaled)):
            yield replica, index, raw.real, raw.imag, scaled.real, scaled.imag


def _perron_rows(ts: TimeSlice):
    for replica, vector in zip(ts.replicas, ts.perron):
        if not np.all(np.isfinite(vector)):
            continue
        for index, value in enumerate(vector):
            yield replica, index, value
