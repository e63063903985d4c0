"""Conjugate Normal-inverse-Wishart machinery for the regression Y = W B + E.

Rows of E are N(0, Sigma); the prior is Sigma ~ IW(v0, S0) and
B | Sigma ~ MN(B0, V0, Sigma), so vec(B) | Sigma ~ N(vec(B0), Sigma kron V0).
Provides the closed-form posterior update, the log marginal likelihood of Y
(a matrix-variate t), and joint (B, Sigma) sampling.

All inversions go through Cholesky factors; a single trace-scaled ridge retry
guards against near-singular cross-products from near-duplicate basis columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.special import multigammaln

from .errors import NumericalError

_RIDGE = 1e-8


def _chol_lower(A: np.ndarray, what: str) -> np.ndarray:
    """Lower Cholesky factor with one ridge retry."""
    try:
        return cholesky(A, lower=True)
    except np.linalg.LinAlgError:
        pass
    ridge = _RIDGE * max(np.trace(A) / A.shape[0], 1.0)
    try:
        return cholesky(A + ridge * np.eye(A.shape[0]), lower=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"matrix {what} is not positive definite (ridge retry failed)") from exc


@dataclass(frozen=True)
class NiwPrior:
    v0: float
    S0: np.ndarray
    B0: np.ndarray
    V0: np.ndarray

    @classmethod
    def default(cls, M: int, n_basis: int, xi: float = 0.01, shrink: float | None = None) -> "NiwPrior":
        """Weakly informative default: v0 = M, S0 = xi*I, B0 = 0, V0 = (1/J)*I.

        J defaults to the number of basis columns so that individual basis
        coefficients are shrunk harder as the basis grows.
        """
        j = float(shrink) if shrink is not None else float(n_basis)
        return cls(
            v0=float(M),
            S0=xi * np.eye(M),
            B0=np.zeros((n_basis, M)),
            V0=(1.0 / j) * np.eye(n_basis),
        )

    @property
    def M(self) -> int:
        return self.S0.shape[0]


@dataclass(frozen=True)
class NiwPosterior:
    vN: float
    SN: np.ndarray
    BN: np.ndarray
    VN: np.ndarray
    logml: float


@dataclass(frozen=True)
class PosteriorDraw:
    B: np.ndarray
    Sigma: np.ndarray


class PriorCache:
    """Precomputed prior-side quantities shared by many logml evaluations."""

    def __init__(self, prior: NiwPrior):
        self.prior = prior
        M = prior.M
        L0 = _chol_lower(prior.V0, "V0")
        self.V0_inv = cho_solve((L0, True), np.eye(prior.V0.shape[0]))
        self.logdet_V0 = 2.0 * np.sum(np.log(np.diag(L0)))
        self.V0inv_B0 = self.V0_inv @ prior.B0
        self.B0_V0inv_B0 = prior.B0.T @ self.V0inv_B0
        Ls0 = _chol_lower(prior.S0, "S0")
        self.logdet_S0 = 2.0 * np.sum(np.log(np.diag(Ls0)))
        self.mgamln_v0 = multigammaln(prior.v0 / 2.0, M)


def moments(W: np.ndarray, Y: np.ndarray):
    """Cross-product moments (W'W, W'Y, Y'Y, T) consumed by the fast path."""
    return W.T @ W, W.T @ Y, Y.T @ Y, W.shape[0]


def posterior_from_moments(cache: PriorCache, WtW, WtY, YtY, T: int) -> NiwPosterior:
    """Conjugate update plus matrix-t log marginal likelihood from moments."""
    prior = cache.prior
    M = prior.M
    Q = cache.V0_inv + WtW  # posterior precision of the basis coefficients
    Lq = _chol_lower(Q, "V0^-1 + W'W")
    U = cache.V0inv_B0 + WtY
    BN = cho_solve((Lq, True), U)
    logdet_VN = -2.0 * np.sum(np.log(np.diag(Lq)))
    C = solve_triangular(Lq, U, lower=True)
    SN = prior.S0 + YtY + cache.B0_V0inv_B0 - C.T @ C
    SN = 0.5 * (SN + SN.T)
    vN = prior.v0 + T
    Ls = _chol_lower(SN, "SN")
    logdet_SN = 2.0 * np.sum(np.log(np.diag(Ls)))
    logml = (
        -0.5 * T * M * np.log(np.pi)
        + 0.5 * M * (logdet_VN - cache.logdet_V0)
        + 0.5 * prior.v0 * cache.logdet_S0
        - 0.5 * vN * logdet_SN
        + multigammaln(vN / 2.0, M)
        - cache.mgamln_v0
    )
    VN = cho_solve((Lq, True), np.eye(Q.shape[0]))
    return NiwPosterior(vN=vN, SN=SN, BN=BN, VN=0.5 * (VN + VN.T), logml=float(logml))


def logml_from_moments(cache: PriorCache, WtW, WtY, YtY, T: int) -> float:
    """Log marginal likelihood only; skips forming VN explicitly."""
    prior = cache.prior
    M = prior.M
    Q = cache.V0_inv + WtW
    Lq = _chol_lower(Q, "V0^-1 + W'W")
    U = cache.V0inv_B0 + WtY
    C = solve_triangular(Lq, U, lower=True)
    SN = prior.S0 + YtY + cache.B0_V0inv_B0 - C.T @ C
    SN = 0.5 * (SN + SN.T)
    vN = prior.v0 + T
    Ls = _chol_lower(SN, "SN")
    logml = (
        -0.5 * T * M * np.log(np.pi)
        + 0.5 * M * (-2.0 * np.sum(np.log(np.diag(Lq))) - cache.logdet_V0)
        + 0.5 * prior.v0 * cache.logdet_S0
        - 0.5 * vN * 2.0 * np.sum(np.log(np.diag(Ls)))
        + multigammaln(vN / 2.0, M)
        - cache.mgamln_v0
    )
    return float(logml)


def update(prior: NiwPrior, W: np.ndarray, Y: np.ndarray) -> NiwPosterior:
    """Closed-form conjugate update on (W, Y)."""
    if W.shape[0] != Y.shape[0]:
        raise ValueError(f"row mismatch: W has {W.shape[0]}, Y has {Y.shape[0]}")
    cache = PriorCache(prior)
    if W.shape[0] == 0:
        return NiwPosterior(
            vN=prior.v0, SN=prior.S0.copy(), BN=prior.B0.copy(), VN=prior.V0.copy(), logml=0.0
        )
    return posterior_from_moments(cache, *moments(W, Y))


def log_marginal(prior: NiwPrior, W: np.ndarray, Y: np.ndarray) -> float:
    """Log marginal likelihood of Y given the basis W under the prior."""
    if W.shape[0] == 0:
        return 0.0
    return logml_from_moments(PriorCache(prior), *moments(W, Y))


def sample(posterior: NiwPosterior, rng: np.random.Generator) -> PosteriorDraw:
    """Draw Sigma ~ IW(vN, SN) (Bartlett) and B | Sigma ~ MN(BN, VN, Sigma)."""
    M = posterior.SN.shape[0]
    Ls = _chol_lower(posterior.SN, "SN")
    # Bartlett factor of a Wishart(vN, I) draw
    A = np.zeros((M, M))
    for i in range(M):
        A[i, i] = np.sqrt(rng.chisquare(posterior.vN - i))
        if i > 0:
            A[i, :i] = rng.standard_normal(i)
    # Sigma = (Ls A^-T)(Ls A^-T)'
    F = solve_triangular(A, Ls.T, lower=True).T
    Sigma = F @ F.T
    Sigma = 0.5 * (Sigma + Sigma.T)

    Lv = _chol_lower(posterior.VN, "VN")
    Lsig = _chol_lower(Sigma, "Sigma")
    Z = rng.standard_normal(posterior.BN.shape)
    B = posterior.BN + Lv @ Z @ Lsig.T
    return PosteriorDraw(B=B, Sigma=Sigma)
