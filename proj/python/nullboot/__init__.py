"""Parametric-bootstrap tests for clustering structure."""

import json

from ._nullboot import (
    NumericalError,
    ValidationError,
    aggregate_pvalue,
    asw,
    calibrate,
    classical_mds,
    cluster,
    euclidean_distance,
    gmm_noise_fit,
    kulczynski,
    linkage,
    pam,
    per_k_pvalue,
    polychoric,
    prediction_strength,
)
from . import _nullboot

__all__ = [
    "NumericalError",
    "ValidationError",
    "aggregate_pvalue",
    "asw",
    "bootstrap_points",
    "calibrate",
    "classical_mds",
    "cluster",
    "estimate_null",
    "euclidean_distance",
    "gmm_noise_fit",
    "kulczynski",
    "linkage",
    "pam",
    "per_k_pvalue",
    "polychoric",
    "prediction_strength",
    "run",
]


def run(config_path, workers=1, seed=None, m=None, write_outputs=False):
    """Runs the bootstrap described by an INI run config and returns the result document."""
    return json.loads(
        _nullboot.run_config_json(str(config_path), workers=workers, seed=seed, m=m, write_outputs=write_outputs)
    )


def estimate_null(config_path, workers=1):
    """Fits the config's null model and returns the parameter document."""
    return json.loads(_nullboot.estimate_config_json(str(config_path), workers=workers))


def bootstrap_points(points, K, m=99, seed=1, method="pam", index="asw", workers=1):
    """Bootstrap test on an n x p array of continuous variables with the latent Gaussian null."""
    return json.loads(
        _nullboot.bootstrap_points_json(points, list(K), m=m, seed=seed, method=method, index=index, workers=workers)
    )
