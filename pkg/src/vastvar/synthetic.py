"""Synthetic data generation from known threshold-switching VARs.

Used for validation: the generator returns both the simulated panel and an
oracle handle exposing the true conditional mean, so estimated quantities can
be checked against ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import PanelDataset, VariableMeta
from .errors import DataError
from .transition import EXP_CLAMP


@dataclass(frozen=True)
class SyntheticLearner:
    sel: int  # column of the stacked lag vector (Y'_{t-1}, ..., Y'_{t-P})
    mu: float
    phi: float
    b0: tuple  # intercept when the transition is on
    b1: tuple  # intercept when it is off


@dataclass(frozen=True)
class SyntheticSpec:
    M: int
    T: int
    P: int
    learners: tuple[SyntheticLearner, ...] = ()
    A: np.ndarray | None = None  # M x (M*P) linear lag coefficients
    intercept: np.ndarray | None = None
    Sigma: np.ndarray | None = None
    burn: int = 200

    def __post_init__(self):
        K = self.M * self.P
        for lr in self.learners:
            if not 0 <= lr.sel < K:
                raise DataError(f"learner sel {lr.sel} out of range for K={K}")
            if len(lr.b0) != self.M or len(lr.b1) != self.M:
                raise DataError("learner intercepts must have length M")
        if self.A is not None and self.A.shape != (self.M, K):
            raise DataError(f"A must be M x M*P = {(self.M, K)}, got {self.A.shape}")


class TrueModel:
    """Ground-truth conditional mean with the same evaluator protocol as a draw."""

    def __init__(self, spec: SyntheticSpec):
        self.spec = spec
        self.Sigma = spec.Sigma if spec.Sigma is not None else np.eye(spec.M)

    def conditional_mean(self, Xmat: np.ndarray) -> np.ndarray:
        sp = self.spec
        out = np.zeros((Xmat.shape[0], sp.M))
        if sp.intercept is not None:
            out += sp.intercept[None, :]
        if sp.A is not None:
            out += Xmat @ sp.A.T
        for lr in sp.learners:
            a = np.clip(lr.phi * (Xmat[:, lr.sel] - lr.mu), -EXP_CLAMP, EXP_CLAMP)
            s = 1.0 / (1.0 + np.exp(-a))
            out += s[:, None] * np.asarray(lr.b0)[None, :]
            out += (1.0 - s)[:, None] * np.asarray(lr.b1)[None, :]
        return out

    def standardized(self, means: np.ndarray, sds: np.ndarray) -> "StandardizedTrueModel":
        return StandardizedTrueModel(self, means, sds)


class StandardizedTrueModel:
    """The true model expressed on the standardized scale of a fitted panel."""

    def __init__(self, true_model: TrueModel, means: np.ndarray, sds: np.ndarray):
        self.inner = true_model
        self.means = np.asarray(means, dtype=float)
        self.sds = np.asarray(sds, dtype=float)
        P = true_model.spec.P
        D = np.diag(1.0 / self.sds)
        self.Sigma = D @ true_model.Sigma @ D
        self._lag_means = np.tile(self.means, P)
        self._lag_sds = np.tile(self.sds, P)

    def conditional_mean(self, Xmat_std: np.ndarray) -> np.ndarray:
        Xraw = Xmat_std * self._lag_sds[None, :] + self._lag_means[None, :]
        return (self.inner.conditional_mean(Xraw) - self.means[None, :]) / self.sds[None, :]


def generate_synthetic(spec: SyntheticSpec, seed: int) -> tuple[np.ndarray, TrueModel]:
    """Simulate T x M raw data from the description; raises on explosive paths."""
    model = TrueModel(spec)
    rng = np.random.default_rng(seed)
    L = np.linalg.cholesky(model.Sigma)
    M, P = spec.M, spec.P
    K = M * P
    total = spec.burn + spec.T
    hist = np.zeros((P, M))  # hist[0] = Y_{t-1}, ..., hist[P-1] = Y_{t-P}
    out = np.empty((total, M))
    for t in range(total):
        x = hist.reshape(K)
        mean = model.conditional_mean(x[None, :])[0]
        y = mean + L @ rng.standard_normal(M)
        if np.max(np.abs(y)) > 1e6:
            raise DataError(
                "explosive synthetic path (|Y| > 1e6); reduce coefficients or intercepts"
            )
        out[t] = y
        hist = np.vstack([y[None, :], hist[:-1]])
    return out[spec.burn :], model


def synthetic_meta(M: int, ebp_pos: int = 1) -> list[VariableMeta]:
    """Generic level-transform metadata satisfying the ordering contract."""
    metas = []
    for i in range(M):
        if i < ebp_pos:
            block = "macro"
        elif i == ebp_pos:
            block = "ebp"
        else:
            block = "long_yield"
        metas.append(
            VariableMeta(
                name=f"v{i}", country="GLOBAL", transform="level", block=block, order_index=i
            )
        )
    return metas


def to_panel(values: np.ndarray, meta=None, start="2000-01") -> PanelDataset:
    """Standardize a raw synthetic matrix into a PanelDataset."""
    import pandas as pd

    from .data import transform_and_standardize

    T, M = values.shape
    meta = meta if meta is not None else synthetic_meta(M)
    dates = pd.period_range(start, periods=T, freq="M")
    frame = pd.DataFrame(values, index=dates, columns=[m.name for m in meta])
    return transform_and_standardize(frame, meta)
