"""
Service d'export
CSV (format canonique), manifeste JSON et figures SVG
"""

import csv
import hashlib
import logging
from pathlib import Path
from typing import Any, Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import orjson  # noqa: E402

from app.core.exceptions import OutputError  # noqa: E402
from app.models.plot import PlotSpec  # noqa: E402
from app.schemas.run import ArtifactEntry, RunManifest  # noqa: E402


logger = logging.getLogger(__name__)

# Identifiants SVG stables d'un run à l'autre
matplotlib.rcParams["svg.hashsalt"] = "random-stochastic-products"


def format_value(value: Any) -> str:
    """Cellule CSV: entiers tels quels, flottants en repr (aller-retour exact)"""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def parse_value(cell: str) -> int | float:
    try:
        return int(cell)
    except ValueError:
        return float(cell)


def ensure_dir(path: Path) -> Path:
    """
    Raises:
        OutputError: Répertoire impossible à créer
    """
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"répertoire de sortie inaccessible: {exc.strerror}", path) from exc
    return path


# ===== CSV =====
def emit_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], path: Path) -> Path:
    """
    Écrit un CSV avec une ligne d'en-tête (fins de ligne "\\n")

    Une série vide donne un fichier réduit à l'en-tête.

    Raises:
        OutputError: Erreur d'écriture, avec le chemin
    """
    path = Path(path)
    ensure_dir(path.parent)
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_value(value) for value in row])
    except OSError as exc:
        raise OutputError(f"écriture CSV impossible: {exc.strerror}", path) from exc
    logger.debug("CSV écrit: %s", path)
    return path


def read_csv(path: Path) -> tuple[list[str], list[list[int | float]]]:
    """
    Relit un CSV produit par emit_csv

    Raises:
        OutputError: Fichier illisible
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            header = next(reader, [])
            rows = [[parse_value(cell) for cell in row] for row in reader]
    except OSError as exc:
        raise OutputError(f"lecture CSV impossible: {exc.strerror}", path) from exc
    return header, rows


# ===== Empreintes et manifeste =====
def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    try:
        with open(path, "rb") as f:
            for block in iter(lambda: f.read(1 << 16), b""):
                digest.update(block)
    except OSError as exc:
        raise OutputError(f"lecture impossible: {exc.strerror}", path) from exc
    return digest.hexdigest()


def artifact_entry(path: Path, root: Path) -> ArtifactEntry:
    """Entrée de manifeste: chemin relatif, SHA-256 et taille"""
    path = Path(path)
    return ArtifactEntry(
        path=path.relative_to(root).as_posix(),
        sha256=sha256_file(path),
        bytes=path.stat().st_size,
    )


def emit_manifest(manifest: RunManifest, path: Path) -> Path:
    """
    Écrit le manifeste en JSON indenté, clés triées

    Raises:
        OutputError: Erreur d'écriture
    """
    path = Path(path)
    ensure_dir(path.parent)
    payload = orjson.dumps(
        manifest.model_dump(mode="json"),
        option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY,
    )
    try:
        path.write_bytes(payload + b"\n")
    except OSError as exc:
        raise OutputError(f"écriture du manifeste impossible: {exc.strerror}", path) from exc
    return path


def read_manifest(path: Path) -> RunManifest:
    try:
        return RunManifest.model_validate(orjson.loads(Path(path).read_bytes()))
    except OSError as exc:
        raise OutputError(f"lecture du manifeste impossible: {exc.strerror}", path) from exc


# ===== SVG =====
def emit_svg(spec: PlotSpec, path: Path) -> Path:
    """
    Trace la figure en SVG autonome (barres, courbes, points, axes et légendes)

    La date est omise des métadonnées pour que le fichier ne dépende
    que des données.

    Raises:
        OutputError: Erreur d'écriture
    """
    path = Path(path)
    ensure_dir(path.parent)
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    try:
        if spec.bars is not None:
            ax.bar(
                spec.bars.edges[:-1],
                spec.bars.densities,
                width=spec.bars.widths,
                align="edge",
                color="#9ecae1",
                edgecolor="#3182bd",
                linewidth=0.5,
                label="données",
            )
        for series in spec.lines:
            ax.plot(series.x, series.y, linewidth=1.5, label=series.label)
        for series in spec.points:
            ax.scatter(series.x, series.y, s=2, alpha=0.5, label=series.label)
        if spec.unit_circle:
            angle = np.linspace(0.0, 2.0 * np.pi, 361)
            ax.plot(np.cos(angle), np.sin(angle), color="black", linewidth=0.8)
            ax.set_aspect("equal")
        ax.set_title(spec.title)
        ax.set_xlabel(spec.xlabel)
        ax.set_ylabel(spec.ylabel)
        if spec.lines or spec.points:
            ax.legend(loc="best", fontsize="small")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as exc:
        raise OutputError(f"écriture SVG impossible: {exc.strerror}", path) from exc
    finally:
        plt.close(fig)
    return path
