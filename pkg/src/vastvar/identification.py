"""Recursive identification via Cholesky factorization and shock scaling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError


@dataclass(frozen=True)
class StructuralFactor:
    """Lower-triangular factor of the reduced-form covariance plus shock scaling.

    `shock_index` is the position of the shocked variable in the ordering and
    `s` holds per-variable unconditional standard deviations in reporting units.
    """

    Pmat: np.ndarray
    shock_index: int
    s: np.ndarray


def cholesky_identify(Sigma: np.ndarray) -> np.ndarray:
    """Unique lower-triangular P with positive diagonal such that P P' = Sigma."""
    Sigma = np.asarray(Sigma, dtype=float)
    try:
        return np.linalg.cholesky(0.5 * (Sigma + Sigma.T))
    except np.linalg.LinAlgError as exc:
        raise NumericalError("covariance matrix is not positive definite") from exc


def scaled_impact(factor: StructuralFactor, sigma: float) -> np.ndarray:
    """Impact vector scaled to a `sigma`-standard-deviation move in the shocked variable.

    Normalizes the factor column so its own element is 1, then scales by
    sigma times the shocked variable's unconditional standard deviation.
    Variables ordered before the shocked one have exactly zero impact.
    """
    if sigma == 0.0:
        raise ValueError("shock scale must be nonzero")
    j = factor.shock_index
    col = factor.Pmat[:, j]
    # normalize before scaling so the own element is exactly sigma * s_j
    return sigma * factor.s[j] * (col / col[j])
