"""Probability metrics on discrete measures and prior-perturbation
experiments on the distribution of Bayesian posteriors."""

import json as _json

from ._core import (  # noqa: F401
    ConfigError,
    PreconditionError,
    InvariantError,
    FiniteMetricSpace,
    DiscreteMeasure,
    EmpiricalLaw,
    CategoricalModel,
    Dataset,
    RngSeed,
    build_grid_space,
    build_line_space,
    enlarge,
    diameter,
    dirac,
    total_variation,
    kl_divergence,
    hellinger,
    prokhorov,
    prokhorov_oracle,
    ky_fan_empirical,
    meta_space,
    meta_prokhorov,
    ky_fan_to_dirac,
    make_bernoulli_grid_model,
    make_product_bernoulli_model,
    make_gaussian_bin_model,
    sample_data,
    posterior,
    posterior_law,
    coupled_posterior_distances,
    kl_neighborhood,
    has_kl_support,
    dirac_contamination,
    ball_evacuation,
    covering_number,
    packing_number,
    least_mass_center,
    run_experiment_json,
    validate_config_json,
    __version__,
)


def run_experiment(config):
    """Run an experiment from a config dict (or JSON string); returns the
    report as a dict."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _json.loads(run_experiment_json(config))


def validate_config(config):
    """Validate a config dict (or JSON string); returns the resolved echo."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _json.loads(validate_config_json(config))
