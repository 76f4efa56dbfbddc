"""
Tests de l'export (CSV, manifeste, SVG)
"""

import hashlib

import numpy as np
import pytest

from app.core.exceptions import InvalidArgumentError, OutputError
from app.models.histogram import Histogram
from app.models.plot import PlotSpec, Series
from app.schemas.run import RunManifest
from app.services.export import (
    artifact_entry,
    emit_csv,
    emit_manifest,
    emit_svg,
    format_value,
    read_csv,
    read_manifest,
    sha256_file,
)


class TestCsv:
    def test_header_only_for_empty_series(self, output_dir):
        path = emit_csv(("t", "value"), [], output_dir / "empty.csv")
        assert path.read_text(encoding="utf-8") == "t,value\n"

    def test_values_read_back_exactly(self, output_dir):
        values = [0.1, 1 / 3, 1e-300, -2.5e17]
        path = emit_csv(("index", "value"), enumerate(values), output_dir / "values.csv")
        header, rows = read_csv(path)
        assert header == ["index", "value"]
        assert [row[1] for row in rows] == values
        assert [row[0] for row in rows] == [0, 1, 2, 3]

    def test_format_value(self):
        assert format_value(np.int64(7)) == "7"
        assert format_value(True) == "1"
        assert format_value(np.bool_(False)) == "0"
        assert format_value(np.float64(0.5)) == "0.5"
        assert format_value(float("nan")) == "nan"

    def test_unwritable_path(self, output_dir):
        blocker = output_dir / "file"
        blocker.write_text("x")
        with pytest.raises(OutputError) as info:
            emit_csv(("a",), [(1,)], blocker / "nested.csv")
        assert info.value.exit_code == 4


class TestManifest:
    def test_artifact_hash(self, output_dir):
        path = emit_csv(("a",), [(1,), (2,)], output_dir / "sub" / "a.csv")
        entry = artifact_entry(path, output_dir)
        assert entry.path == "sub/a.csv"
        assert entry.sha256 == hashlib.sha256(path.read_bytes()).hexdigest()
        assert entry.bytes == path.stat().st_size
        assert sha256_file(path) == entry.sha256

    def test_round_trip(self, output_dir, make_config):
        manifest = RunManifest(
            config=make_config(),
            excluded={"theta_t1": 2},
            summaries={"value": 1.5, "missing": float("nan")},
        )
        path = emit_manifest(manifest, output_dir / "manifest.json")
        text = path.read_text(encoding="utf-8")
        assert text.endswith("\n")
        assert '"missing": null' in text
        restored = read_manifest(path)
        assert restored.config == manifest.config
        assert restored.excluded == {"theta_t1": 2}

    def test_keys_sorted(self, output_dir, make_config):
        path = emit_manifest(RunManifest(config=make_config()), output_dir / "m.json")
        text = path.read_text(encoding="utf-8")
        assert text.index('"artifacts"') < text.index('"config"') < text.index('"wall_clock_seconds"')


class TestSvg:
    def test_histogram_with_overlay(self, output_dir):
        hist = Histogram(edges=np.linspace(0.0, 1.0, 5), densities=np.ones(4), count=10)
        grid = np.linspace(0.01, 0.99, 50)
        spec = PlotSpec(
            title="essai",
            xlabel="x",
            ylabel="densité",
            bars=hist,
            lines=(Series(label="ref", x=grid, y=6 * grid * (1 - grid)),),
        )
        path = emit_svg(spec, output_dir / "plot.svg")
        text = path.read_text(encoding="utf-8")
        assert text.lstrip().startswith("<?xml")
        assert "<svg" in text

    def test_deterministic_output(self, output_dir):
        spec = PlotSpec(
            title="spectre",
            xlabel="Re",
            ylabel="Im",
            points=(Series(label="t=1", x=[0.1, -0.2], y=[0.0, 0.3]),),
            unit_circle=True,
        )
        first = emit_svg(spec, output_dir / "a.svg").read_bytes()
        second = emit_svg(spec, output_dir / "b.svg").read_bytes()
        assert first == second

    def test_series_shape_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            Series(label="x", x=[1.0, 2.0], y=[1.0])
