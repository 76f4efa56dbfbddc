"""
Tests de l'échantillonnage (Gamma, Dirichlet, matrices stochastiques)
"""

from itertools import islice

import numpy as np
import pytest
from scipy import stats as sps

from app.core.config import settings
from app.core.exceptions import InvalidParameterError
from app.models.params import DirichletParams, SeedSpec, StreamLabel
from app.services.sampler import (
    derive_generator,
    dirichlet_column,
    factor_batch_size,
    gamma_sample,
    gamma_variates,
    iter_random_matrices,
    random_probability_vector,
    random_stochastic_matrices,
    random_stochastic_matrix,
    replica_generator,
)


class TestSeeding:
    def test_same_spec_same_stream(self):
        first = derive_generator(SeedSpec(42, 3)).random(5)
        second = derive_generator(SeedSpec(42, 3)).random(5)
        np.testing.assert_array_equal(first, second)

    def test_replicas_and_labels_are_distinct(self):
        base = replica_generator(42, 0).random(3)
        assert not np.array_equal(base, replica_generator(42, 1).random(3))
        assert not np.array_equal(base, replica_generator(42, 0, StreamLabel.INITIAL_STATE).random(3))

    def test_seed_spec_domain(self):
        with pytest.raises(InvalidParameterError):
            SeedSpec(-1)
        with pytest.raises(InvalidParameterError):
            SeedSpec(1, replica_index=-2)

    def test_dirichlet_params_domain(self):
        with pytest.raises(InvalidParameterError):
            DirichletParams(a=0.0, n=2)
        with pytest.raises(InvalidParameterError):
            DirichletParams(a=1.0, n=1)
        assert DirichletParams(a=0.5, n=4).a0 == 2.0


class TestGamma:
    @pytest.mark.parametrize("shape", [0.1, 0.5, 1.0, 3.7])
    def test_matches_gamma_law(self, shape, gen):
        draws = gamma_variates(shape, 20_000, gen)
        assert np.all(draws >= 0.0)
        assert draws.mean() == pytest.approx(shape, rel=0.1)
        assert sps.kstest(draws, sps.gamma(shape).cdf).pvalue > 1e-3

    def test_invalid_shape(self, gen):
        with pytest.raises(InvalidParameterError):
            gamma_variates(0.0, 3, gen)
        with pytest.raises(InvalidParameterError):
            gamma_sample(-1.0, gen)

    def test_depends_only_on_generator_state(self, make_gen):
        np.testing.assert_array_equal(gamma_variates(0.3, 50, make_gen(9)), gamma_variates(0.3, 50, make_gen(9)))


class TestDirichlet:
    def test_column_is_probability_vector(self, gen):
        column = dirichlet_column(DirichletParams(a=0.2, n=6), gen)
        assert column.shape == (6,)
        assert np.all(column >= 0.0)
        assert column.sum() == pytest.approx(1.0, abs=1e-15)

    def test_n2_uniform_marginal(self, gen, params_n2):
        firsts = np.array([dirichlet_column(params_n2, gen)[0] for _ in range(4000)])
        assert sps.kstest(firsts, "uniform").pvalue > 1e-3

    def test_beta_marginal(self, gen):
        params = DirichletParams(a=2.0, n=3)
        firsts = np.array([dirichlet_column(params, gen)[0] for _ in range(4000)])
        assert sps.kstest(firsts, sps.beta(2.0, 4.0).cdf).pvalue > 1e-3

    def test_random_probability_vector(self, gen):
        p = random_probability_vector(4, gen)
        assert p.n == 4
        p.validate()


class TestStochasticMatrix:
    @pytest.mark.parametrize("a,n", [(1.0, 2), (0.05, 5), (3.0, 10)])
    def test_columns_sum_to_one(self, a, n, gen):
        matrix = random_stochastic_matrix(DirichletParams(a=a, n=n), gen)
        matrix.validate()
        assert matrix.column_sum_error() <= 1e-12

    def test_deflated_form_reconstructs_entries(self, gen):
        matrix = random_stochastic_matrix(DirichletParams(a=1.0, n=4), gen)
        np.testing.assert_allclose(matrix.deflated.entries(), matrix.entries, atol=1e-14)

    def test_without_deflation(self, gen, params_n2):
        assert random_stochastic_matrix(params_n2, gen, deflate=False).deflated is None


class TestFactorBatches:
    def test_batch_layout_follows_draw_order(self, make_gen):
        params = DirichletParams(a=1.0, n=3)
        matrices = random_stochastic_matrices(params, 4, make_gen(21))
        draws = gamma_variates(1.0, 4 * 9, make_gen(21)).reshape(4, 3, 3)
        for matrix, block in zip(matrices, draws):
            expected = block.T / block.T.sum(axis=0)
            np.testing.assert_allclose(matrix.entries, expected, rtol=1e-14)

    def test_each_matrix_of_a_batch_is_valid(self, gen):
        matrices = random_stochastic_matrices(DirichletParams(a=0.4, n=5), 6, gen)
        assert len(matrices) == 6
        for matrix in matrices:
            matrix.validate()
            np.testing.assert_allclose(matrix.deflated.entries(), matrix.entries, atol=1e-14)

    def test_single_draw_is_a_batch_of_one(self, make_gen, params_n2):
        single = random_stochastic_matrix(params_n2, make_gen(4))
        batch = random_stochastic_matrices(params_n2, 1, make_gen(4))
        np.testing.assert_array_equal(single.entries, batch[0].entries)

    def test_rejects_empty_batch(self, gen, params_n2):
        with pytest.raises(InvalidParameterError):
            random_stochastic_matrices(params_n2, 0, gen)

    def test_batch_size_depends_on_dimension_only(self, monkeypatch):
        monkeypatch.setattr(settings, "FACTOR_BATCH", 64)
        assert factor_batch_size(2) == 16
        assert factor_batch_size(3) == 7
        assert factor_batch_size(16) == 1

    def test_stream_chains_successive_batches(self, monkeypatch, make_gen, params_n2):
        monkeypatch.setattr(settings, "FACTOR_BATCH", 8)
        streamed = list(islice(iter_random_matrices(params_n2, make_gen(8)), 5))
        gen = make_gen(8)
        batches = [m for _ in range(3) for m in random_stochastic_matrices(params_n2, 2, gen)]
        for left, right in zip(streamed, batches):
            np.testing.assert_array_equal(left.entries, right.entries)
