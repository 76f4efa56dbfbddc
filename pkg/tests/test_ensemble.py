"""
Tests du service d'ensemble
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from app.schemas.run import Observable, RunConfig
from app.services.ensemble import MANIFEST_NAME, EnsembleRunner, neg_log_rate, run_ensemble, u11_reference
from app.services.export import read_csv, read_manifest, sha256_file

ALL_OBSERVABLES = list(Observable)


def _hashes(directory):
    return {path.name: sha256_file(path) for path in sorted(directory.glob("*.csv"))}


class TestRunConfig:
    def test_times_must_increase(self, make_config):
        with pytest.raises(ValidationError):
            make_config(t_values=[2, 2])
        with pytest.raises(ValidationError):
            make_config(t_values=[0, 1])

    def test_bounds(self, make_config):
        with pytest.raises(ValidationError):
            make_config(n=1)
        with pytest.raises(ValidationError):
            make_config(a=0.0)
        with pytest.raises(ValidationError):
            make_config(replicas=0)

    def test_observables_canonical_order(self, make_config):
        config = make_config(observables=["perron", "columns", "perron"])
        assert config.observables == [Observable.COLUMNS, Observable.PERRON]


class TestSimulation:
    def test_single_replica_columns(self, make_config):
        config = make_config(replicas=1, t_values=[1])
        manifest = run_ensemble(config)
        header, rows = read_csv(config.output_dir / "columns_t1.csv")
        assert header == ["replica", "row", "col", "value"]
        assert len(rows) == 4
        matrix = np.zeros((2, 2))
        for _, row, col, value in rows:
            matrix[row, col] = value
        np.testing.assert_allclose(matrix.sum(axis=0), 1.0, atol=1e-15)
        assert [a.path for a in manifest.artifacts] == ["columns_t1.csv"]
        assert (config.output_dir / MANIFEST_NAME).exists()

    def test_time_slices_follow_one_chain(self, make_config):
        runner = EnsembleRunner(make_config(replicas=3, t_values=[1, 3]))
        slices = runner.simulate()
        assert sorted(slices) == [1, 3]
        assert slices[3].replicas.tolist() == [0, 1, 2]
        assert slices[3].columns.shape == (3, 2, 2)
        assert not np.allclose(slices[1].columns, slices[3].columns)

    def test_all_observables(self, make_config):
        config = make_config(replicas=12, t_values=[1, 2, 5], observables=ALL_OBSERVABLES)
        manifest = run_ensemble(config)
        names = {a.path for a in manifest.artifacts}
        for t in (1, 2, 5):
            for prefix in ("columns", "distance", "exponents", "spectrum", "perron"):
                assert f"{prefix}_t{t}.csv" in names
        assert {"curve.csv", "real_fraction.csv"} <= names

        header, rows = read_csv(config.output_dir / "exponents_t5.csv")
        assert header[:3] == ["replica", "t", "n"]
        assert all(row[1] == 5 and row[2] == 2 for row in rows)

        header, rows = read_csv(config.output_dir / "curve.csv")
        assert [row[0] for row in rows] == [1, 2, 5]

        header, rows = read_csv(config.output_dir / "real_fraction.csv")
        # Spectre toujours réel pour n = 2
        assert all(row[1] == 1.0 for row in rows)

        summaries = manifest.summaries
        assert summaries["per_t"]["1"]["u11"]["reference"]["name"] == "marginal"
        assert summaries["per_t"]["1"]["u11"]["reference"]["status"] == "exact"
        assert summaries["curve"]["analytic_slope"] == pytest.approx(math.log(3.0))
        assert summaries["exponent_positivity_violations"] == 0

    def test_manifest_hashes_match_files(self, make_config):
        config = make_config(observables=["columns", "distance"])
        run_ensemble(config)
        manifest = read_manifest(config.output_dir / MANIFEST_NAME)
        for artifact in manifest.artifacts:
            assert sha256_file(config.output_dir / artifact.path) == artifact.sha256
        assert manifest.library_version == "1.0.0"
        assert manifest.settings_echo["CHUNK_SIZE"] > 0

    def test_svg_emission(self, make_config):
        config = make_config(replicas=30, t_values=[2], observables=["columns", "spectrum", "curve"], emit_svg=True)
        run_ensemble(config)
        for name in ("u11_t2.svg", "spectrum_t2.svg", "curve.svg"):
            assert (config.output_dir / name).exists()

    def test_homogeneous_chain(self, make_config):
        runner = EnsembleRunner(make_config(replicas=5, t_values=[1, 2], homogeneous=True))
        runner.run()
        assert "reference" not in runner.summaries["per_t"]["2"]["u11"]


class TestDeterminism:
    def test_same_seed_same_files(self, make_config, tmp_path):
        first = make_config(output_dir=tmp_path / "a", observables=ALL_OBSERVABLES)
        second = make_config(output_dir=tmp_path / "b", observables=ALL_OBSERVABLES)
        run_ensemble(first)
        run_ensemble(second)
        assert _hashes(first.output_dir) == _hashes(second.output_dir)

    def test_different_seed_different_files(self, make_config, tmp_path):
        run_ensemble(make_config(output_dir=tmp_path / "a"))
        run_ensemble(make_config(output_dir=tmp_path / "b", master_seed=8))
        assert _hashes(tmp_path / "a") != _hashes(tmp_path / "b")

    def test_independent_of_worker_count(self, make_config, tmp_path, small_chunks):
        observables = ["columns", "exponents", "spectrum"]
        serial = make_config(replicas=10, output_dir=tmp_path / "serial", observables=observables)
        parallel = make_config(replicas=10, output_dir=tmp_path / "parallel", observables=observables, workers=3)
        run_ensemble(serial)
        run_ensemble(parallel)
        assert _hashes(serial.output_dir) == _hashes(parallel.output_dir)

    def test_prefix_of_larger_run(self, make_config, tmp_path, small_chunks):
        small = EnsembleRunner(make_config(replicas=5, output_dir=tmp_path / "s"))
        large = EnsembleRunner(make_config(replicas=9, output_dir=tmp_path / "l"))
        small.simulate()
        large.simulate()
        np.testing.assert_array_equal(small.slices[2].columns, large.slices[2].columns[:5])


class TestHelpers:
    def test_neg_log_rate(self):
        rates = neg_log_rate(np.array([math.exp(-6.0), 0.0]), 3)
        assert rates[0] == pytest.approx(2.0)
        assert math.isnan(rates[1])

    @pytest.mark.parametrize(
        "n,a,t,name,status",
        [
            (2, 1.0, 1, "marginal", "exact"),
            (5, 0.5, 1, "marginal", "exact"),
            (2, 1.0, 2, "p2", "exact"),
            (2, 2.0, 2, "tabulated", "numerical"),
            (2, 1.0, 7, "tabulated", "numerical"),
            (2, 0.5, 4, "fixed_point", "asymptotic"),
            (5, 1.0, 50, "fixed_point", "conjecture"),
        ],
    )
    def test_u11_reference(self, n, a, t, name, status):
        reference = u11_reference(n, a, t)
        assert reference.name == name
        assert reference.status == status

    def test_u11_reference_of_homogeneous_chain(self):
        assert u11_reference(2, 1.0, 3, homogeneous=True) is None
        assert u11_reference(2, 1.0, 1, homogeneous=True).status == "exact"

    def test_transfer_reference_is_a_density(self):
        reference = u11_reference(2, 2.0, 3)
        assert reference.density.cdf(1.0) == pytest.approx(1.0, abs=1e-3)
        assert reference.density.pdf(0.5) > reference.density.pdf(0.05)

    def test_conjectured_reference_keeps_parameters(self):
        assert u11_reference(5, 1.0, 50).density.params == (1.0, 5.0)
