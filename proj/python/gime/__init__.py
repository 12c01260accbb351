"""General information metrics: dataset profiling, threshold-gated training
subset selection, and Monte Carlo verification of the subset-metric
expectation model."""

from ._gime import (
    GimeError,
    classify_default,
    compute_metrics,
    derive_thresholds,
    draw_uniform,
    eq1_check,
    evaluate_thresholds,
    fit_sensitivity,
    lemma_expectation,
    metric_names,
    optimal_subset,
    select,
    subset_metric,
    theorem_trial,
    validate_manifest,
    verify_lemma,
    write_civil_fixture,
    __version__,
)

__all__ = [
    "GimeError",
    "classify_default",
    "compute_metrics",
    "derive_thresholds",
    "draw_uniform",
    "eq1_check",
    "evaluate_thresholds",
    "fit_sensitivity",
    "lemma_expectation",
    "metric_names",
    "optimal_subset",
    "select",
    "subset_metric",
    "theorem_trial",
    "validate_manifest",
    "verify_lemma",
    "write_civil_fixture",
    "__version__",
]
