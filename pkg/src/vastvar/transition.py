"""Logistic transition functions and the two-column-per-learner basis matrix.

Each weak learner r contributes a column pair (S_r, 1 - S_r) to W, where
S_r is a logistic step in one selected lagged regressor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EXP_CLAMP = 500.0  # exponent guard; saturates the logistic within float precision


@dataclass(frozen=True)
class TransitionSpec:
    """One learner: selected regressor column, threshold, and adjustment speed."""

    sel: int
    mu: float
    phi: float

    def __post_init__(self):
        if self.phi <= 0.0:
            raise ValueError(f"phi must be positive, got {self.phi}")


def eval_transition(spec: TransitionSpec, z):
    """Logistic transition (1 + exp(-phi*(z - mu)))^-1, overflow-safe.

    Accepts scalars or arrays.
    """
    with np.errstate(over="ignore"):
        a = spec.phi * (np.asarray(z, dtype=float) - spec.mu)
    a = np.clip(a, -EXP_CLAMP, EXP_CLAMP)
    out = 1.0 / (1.0 + np.exp(-a))
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class BasisState:
    """R transition specs plus the T_eff x 2R basis matrix W.

    Keeps a reference to the regressor matrix so learners can be replaced
    without re-passing it.
    """

    specs: tuple[TransitionSpec, ...]
    W: np.ndarray
    X: np.ndarray

    @property
    def R(self) -> int:
        return len(self.specs)


def learner_columns(X: np.ndarray, spec: TransitionSpec) -> np.ndarray:
    """The (S, 1-S) column pair for one learner, shape (T_eff, 2)."""
    if not 0 <= spec.sel < X.shape[1]:
        raise IndexError(f"sel={spec.sel} out of range for K={X.shape[1]} regressors")
    s = eval_transition(spec, X[:, spec.sel])
    return np.column_stack([s, 1.0 - s])


def build_basis(X: np.ndarray, specs) -> BasisState:
    """Assemble W column-pair by column-pair from the given specs."""
    specs = tuple(specs)
    T_eff = X.shape[0]
    W = np.empty((T_eff, 2 * len(specs)))
    for r, spec in enumerate(specs):
        W[:, 2 * r : 2 * r + 2] = learner_columns(X, spec)
    return BasisState(specs=specs, W=W, X=X)


def replace_learner(basis: BasisState, r: int, spec: TransitionSpec) -> BasisState:
    """New BasisState with learner r replaced; all other columns unchanged."""
    if not 0 <= r < basis.R:
        raise IndexError(f"learner index {r} out of range for R={basis.R}")
    W = basis.W.copy()
    W[:, 2 * r : 2 * r + 2] = learner_columns(basis.X, spec)
    specs = list(basis.specs)
    specs[r] = spec
    return BasisState(specs=tuple(specs), W=W, X=basis.X)
