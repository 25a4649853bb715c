"""Contact-pattern clustering pipeline: Python bindings for the C++ core."""

from epiclust._core import (  # noqa: F401
    InputError,
    IoError,
    NumericalError,
    aggregate_matrix,
    aggregate_params,
    aggregate_population,
    calibrate_beta0,
    cut_clusters,
    linkage,
    ngm_spectral_radius,
    pca,
    run_pipeline,
    sum_settings,
    symmetrize,
    two_d2_pca,
    zscore_matrix_stack,
)

__all__ = [
    "InputError",
    "IoError",
    "NumericalError",
    "aggregate_matrix",
    "aggregate_params",
    "aggregate_population",
    "calibrate_beta0",
    "cut_clusters",
    "linkage",
    "ngm_spectral_radius",
    "pca",
    "run_pipeline",
    "sum_settings",
    "symmetrize",
    "two_d2_pca",
    "zscore_matrix_stack",
]
