"""Conjugate-gradient functional PLS for scalar-on-function regression."""

from ._fpls import (
    confidence_set,
    fit_early_stopped,
    pca_estimate,
    run_test,
    simulate,
    spectrum,
)

__all__ = [
    "confidence_set",
    "fit_early_stopped",
    "pca_estimate",
    "run_test",
    "simulate",
    "spectrum",
]
