"""
Module services - Tous les services
Importations centralisées pour faciliter l'usage
"""

from app.services.sampler import (
    derive_generator,
    dirichlet_column,
    gamma_sample,
    random_stochastic_matrices,
    random_stochastic_matrix,
)
from app.services.chain import chain_product, column_distance, evolve, perron_vector
from app.services.spectral import (
    eigenvalues,
    lyapunov_exponent,
    real_fraction,
    rescale_spectrum,
    singular_values,
    stability_exponent,
)
from app.services.analytic import (
    beta_marginal_pdf,
    fixed_point_density,
    gamma_pdf,
    p2_density,
    transfer_apply,
    verify_fixed_point,
)
from app.services.stats import (
    fit_beta,
    fit_gamma,
    fit_gaussian,
    histogram,
    ks_statistic,
    mean_log_modulus_curve,
)
from app.services.export import emit_csv, emit_manifest, emit_svg
from app.services.ensemble import EnsembleRunner, U11Reference, run_ensemble, u11_reference
from app.services.figures import FigureBuilder, reproduce_figure


__all__ = [
    "derive_generator",
    "dirichlet_column",
    "gamma_sample",
    "random_stochastic_matrices",
    "random_stochastic_matrix",
    "chain_product",
    "column_distance",
    "evolve",
    "perron_vector",
    "eigenvalues",
    "lyapunov_exponent",
    "real_fraction",
    "rescale_spectrum",
    "singular_values",
    "stability_exponent",
    "beta_marginal_pdf",
    "fixed_point_density",
    "gamma_pdf",
    "p2_density",
    "transfer_apply",
    "verify_fixed_point",
    "fit_beta",
    "fit_gamma",
    "fit_gaussian",
    "histogram",
    "ks_statistic",
    "mean_log_modulus_curve",
    "emit_csv",
    "emit_manifest",
    "emit_svg",
    "EnsembleRunner",
    "run_ensemble",
    "U11Reference",
    "u11_reference",
    "FigureBuilder",
    "reproduce_figure",
]
