"""Linear Bayesian VAR baseline with a Minnesota-style shrinkage prior.

Implemented as a conjugate Normal-inverse-Wishart with a diagonal prior
covariance over regressors, reusing the same closed-form machinery as the
nonlinear model. Own lags are centered on persistence for level-type series
and on zero for differenced ones; prior variances decay with the lag and are
scaled by univariate AR(1) residual variances. Under the Kronecker-structured
conjugate prior the cross-variable tightness acts as a uniform multiplier on
all lag coefficients rather than distinguishing own from cross lags.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import niw
from .data import DesignMatrix
from .identification import StructuralFactor, cholesky_identify, scaled_impact


@dataclass(frozen=True)
class MinnesotaConfig:
    lambda1: float = 0.2
    lambda2: float = 0.5
    lambda3: float = 2.0
    lambda4: float = 100.0
    P: int = 12

    def __post_init__(self):
        if min(self.lambda1, self.lambda3, self.lambda4) <= 0 or not 0 < self.lambda2 <= 1:
            raise ValueError("Minnesota hyperparameters must be positive (lambda2 in (0,1])")


@dataclass(frozen=True)
class LinearVarDraw:
    A: np.ndarray  # M x (M*P + 1), intercept last
    Sigma: np.ndarray


def ar1_residual_variances(X: np.ndarray, Y: np.ndarray, M: int) -> np.ndarray:
    """Per-variable AR(1)-with-intercept residual variances, for prior scaling."""
    psi = np.empty(M)
    for m in range(M):
        Z = np.column_stack([X[:, m], np.ones(X.shape[0])])  # first lag of variable m
        coef, *_ = np.linalg.lstsq(Z, Y[:, m], rcond=None)
        resid = Y[:, m] - Z @ coef
        psi[m] = np.var(resid)
    return psi


def minnesota_prior(
    design: DesignMatrix, cfg: MinnesotaConfig, own_lag_mean: Sequence[float] | None = None
) -> niw.NiwPrior:
    """Conjugate NIW prior with Minnesota moments for [lags..., intercept] regressors."""
    M, P, K = design.M, design.P, design.K
    psi = ar1_residual_variances(design.X, design.Y, M)

    B0 = np.zeros((K + 1, M))
    means = np.ones(M) if own_lag_mean is None else np.asarray(own_lag_mean, dtype=float)
    for m in range(M):
        B0[m, m] = means[m]  # first own lag

    v0_diag = np.empty(K + 1)
    for n, (m, p) in enumerate(design.lag_labels):
        v0_diag[n] = (cfg.lambda1 * cfg.lambda2) ** 2 / (p**cfg.lambda3 * psi[m])
    v0_diag[K] = (cfg.lambda1 * cfg.lambda4) ** 2

    return niw.NiwPrior(
        v0=float(M + 2),
        S0=np.diag(psi),
        B0=B0,
        V0=np.diag(v0_diag),
    )


def estimate_bvar(
    design: DesignMatrix,
    cfg: MinnesotaConfig,
    n_draws: int,
    seed: int,
    own_lag_mean: Sequence[float] | None = None,
) -> list[LinearVarDraw]:
    """Posterior draws from the conjugate Minnesota BVAR (intercept appended last)."""
    Z = np.column_stack([design.X, np.ones(design.T_eff)])
    prior = minnesota_prior(design, cfg, own_lag_mean)
    post = niw.update(prior, Z, design.Y)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_draws):
        d = niw.sample(post, rng)
        out.append(LinearVarDraw(A=d.B.T, Sigma=d.Sigma))
    return out


def posterior_mean_A(
    design: DesignMatrix, cfg: MinnesotaConfig, own_lag_mean: Sequence[float] | None = None
) -> np.ndarray:
    """Posterior mean of the coefficient matrix, M x (M*P + 1)."""
    Z = np.column_stack([design.X, np.ones(design.T_eff)])
    post = niw.update(minnesota_prior(design, cfg, own_lag_mean), Z, design.Y)
    return post.BN.T


def companion(A_lags: np.ndarray, M: int, P: int) -> np.ndarray:
    """Companion-form matrix for an M-variable VAR(P), A_lags is M x (M*P)."""
    C = np.zeros((M * P, M * P))
    C[:M, :] = A_lags
    if P > 1:
        C[M:, : M * (P - 1)] = np.eye(M * (P - 1))
    return C


def linear_irf(
    draw: LinearVarDraw, shock_j: int, sigma: float, H: int, scale_sd: np.ndarray
) -> np.ndarray:
    """(H+1) x M impulse responses in reporting units via companion-form powers."""
    M = draw.Sigma.shape[0]
    K = draw.A.shape[1] - 1
    P = K // M
    Pmat = cholesky_identify(draw.Sigma)
    factor = StructuralFactor(Pmat=Pmat, shock_index=shock_j, s=np.ones(M))
    impact = scaled_impact(factor, sigma)  # standardized units
    C = companion(draw.A[:, :K], M, P)
    responses = np.empty((H + 1, M))
    state = np.zeros(K)
    state[:M] = impact
    responses[0] = impact
    for h in range(1, H + 1):
        state = C @ state
        responses[h] = state[:M]
    return responses * np.asarray(scale_sd)[None, :]
