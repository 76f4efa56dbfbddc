"""
Tests du registre et de la production des figures
"""

import math

import pytest

from app.core.config import settings
from app.core.exceptions import UsageError
from app.services.export import read_csv, sha256_file
from app.services.figures import ALIASES, registry, reproduce_figure, resolve_tag

EXPECTED_TAGS = (
    [f"fig1{s}" for s in "abcd"]
    + [f"fig2{s}" for s in "abcd"]
    + [f"fig3{s}" for s in "abcdef"]
    + [f"fig4{s}" for s in "abc"]
    + [f"fig5{s}" for s in "abcd"]
    + [f"fig6{s}" for s in "abcd"]
)


class TestRegistry:
    def test_all_panels_registered(self):
        assert sorted(registry()) == sorted(EXPECTED_TAGS)

    def test_unknown_tag_lists_available(self):
        with pytest.raises(UsageError) as info:
            resolve_tag("fig9z")
        assert "fig1a" in info.value.detail
        assert info.value.exit_code == 2

    def test_aliases(self):
        for alias, tag in ALIASES.items():
            assert resolve_tag(alias).tag == tag

    def test_panel_defaults(self):
        assert resolve_tag("fig1a").overlay == "p2"
        assert resolve_tag("fig1c").a == 2.0
        assert resolve_tag("fig2c").reference == {"alpha": 9.13, "beta": 6.15}
        assert resolve_tag("fig2a").dimensions == (2, 8, 32)
        assert resolve_tag("fig5a").dimensions == (settings.FIG5_DIMENSION,)
        assert resolve_tag("fig6d").t_values == (1, 2, 5, 10, 20)


class TestReproduce:
    def test_u11_histogram(self, output_dir):
        manifest = reproduce_figure("fig1a", master_seed=3, output_dir=output_dir, replicas=200, bins=10)
        root = output_dir / "fig1a"
        header, rows = read_csv(root / "fig1a.csv")
        assert header == ["bin_left", "bin_right", "density", "analytic_density"]
        assert len(rows) == 10
        assert all(len(row) == 4 for row in rows)
        assert rows[0][0] == 0.0 and rows[-1][1] == 1.0
        assert manifest.figure == "fig1a"
        assert manifest.summaries["figure"]["reference"]["name"] == "p2"
        assert manifest.summaries["figure"]["reference"]["status"] == "exact"
        for artifact in manifest.artifacts:
            assert sha256_file(root / artifact.path) == artifact.sha256
        assert (root / "manifest.json").exists()

    def test_same_seed_same_series(self, tmp_path):
        for name in ("a", "b"):
            reproduce_figure("fig1b", master_seed=11, output_dir=tmp_path / name, replicas=40, t_values=[3])
        first = sha256_file(tmp_path / "a" / "fig1b" / "fig1b.csv")
        assert first == sha256_file(tmp_path / "b" / "fig1b" / "fig1b.csv")

    def test_gamma_fit_panel(self, output_dir):
        manifest = reproduce_figure("fig2b", master_seed=5, output_dir=output_dir, replicas=300)
        fit = manifest.summaries["figure"]["fit"]
        assert fit["family"] == "gamma"
        assert fit["parameters"]["alpha"] > 0
        _, rows = read_csv(output_dir / "fig2b" / "fig2b.csv")
        assert all(not math.isnan(row[3]) for row in rows)

    def test_curve_panel_with_overrides(self, output_dir):
        manifest = reproduce_figure(
            "fig2a", master_seed=2, output_dir=output_dir, replicas=50, n=2, t_values=[1, 2, 5, 6]
        )
        header, rows = read_csv(output_dir / "fig2a" / "fig2a_n2.csv")
        assert header == ["t", "neg_log_mean_lambda1", "analytic"]
        assert [row[0] for row in rows] == [1, 2, 5, 6]
        assert rows[2][2] == pytest.approx(5 * math.log(3.0))
        assert manifest.config.n == 2
        assert manifest.config.t_values == [1, 2, 5, 6]
        assert manifest.summaries["figure"]["analytic_slope_n2"] == pytest.approx(math.log(3.0))

    def test_scatter_panel(self, output_dir):
        reproduce_figure("fig6a", master_seed=1, output_dir=output_dir, replicas=10, n=3)
        header, rows = read_csv(output_dir / "fig6a" / "fig6a.csv")
        assert header == ["re", "im"]
        assert len(rows) == 20
        assert all(math.hypot(re, im) <= 1.0 + 1e-12 for re, im in rows)

    def test_real_fraction_panel(self, output_dir):
        manifest = reproduce_figure("fig6d", master_seed=1, output_dir=output_dir, replicas=20, n=3, t_values=[1, 2])
        header, rows = read_csv(output_dir / "fig6d" / "fig6d.csv")
        assert header == ["t", "n", "mean_real_fraction"]
        assert [(row[0], row[1]) for row in rows] == [(1, 3), (2, 3)]
        assert all(0.0 <= row[2] <= 1.0 for row in rows)
        assert manifest.extra_configs == []

    def test_multi_dimension_panel(self, output_dir):
        manifest = reproduce_figure("fig6d", master_seed=1, output_dir=output_dir, replicas=5, t_values=[1])
        assert [c.n for c in [manifest.config, *manifest.extra_configs]] == [3, 5, 10]
        assert (output_dir / "fig6d" / "n10" / "spectrum_t1.csv").exists()

    def test_svg(self, output_dir):
        reproduce_figure("fig1a", output_dir=output_dir, replicas=50, emit_svg=True)
        assert (output_dir / "fig1a" / "fig1a.svg").exists()

    def test_invalid_override(self, output_dir):
        with pytest.raises(UsageError):
            reproduce_figure("fig1a", output_dir=output_dir, replicas=10, a=-1.0)

    def test_unknown_tag(self, output_dir):
        with pytest.raises(UsageError):
            reproduce_figure("nope", output_dir=output_dir, replicas=10)
