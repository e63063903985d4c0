"""MCMC for the smooth-transition basis model.

Per sweep, each learner gets (i) a discrete update of its selected regressor,
marginal of the regression coefficients and error covariance, and (ii) a joint
random-walk Metropolis-Hastings update of its threshold and speed on
(mu, log phi). With all transition functions fixed the model is a multivariate
regression, so (Sigma, B) are then drawn in closed form.

Cross-products W'W and W'Y are maintained incrementally under column-pair
swaps, which keeps the per-candidate marginal-likelihood cost linear in T.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import niw
from .errors import NumericalError
from .niw import NiwPrior, PosteriorDraw, PriorCache
from .transition import BasisState, TransitionSpec, build_basis, learner_columns

MU_PRIOR_SD = 10.0
PHI_PRIOR_SHAPE = 0.01
PHI_PRIOR_RATE = 0.01
# the heavy-tailed speed prior is truncated to the float64-representable range
LOG_PHI_BOUND = 690.0
ADAPT_TARGET = 0.30


@dataclass(frozen=True)
class SamplerConfig:
    R: int = 50
    P: int = 12
    n_draws: int = 30_000
    n_burn: int = 15_000
    thin: int = 1
    seed: int = 0
    mh_step_mu: float = 0.5
    mh_step_logphi: float = 0.5
    adapt: bool = True
    candidate_subsample: int = 0  # 0 = evaluate all K candidates each sweep

    def __post_init__(self):
        if self.R < 1 or self.P < 1 or self.thin < 1:
            raise ValueError("R, P, and thin must be >= 1")
        if not self.n_burn < self.n_draws:
            raise ValueError("n_burn must be smaller than n_draws")
        if self.mh_step_mu <= 0 or self.mh_step_logphi <= 0:
            raise ValueError("MH step sizes must be positive")

    @property
    def n_retained(self) -> int:
        return (self.n_draws - self.n_burn) // self.thin


@dataclass
class McmcChain:
    draws: list  # (PosteriorDraw, tuple[TransitionSpec, ...]) per retained sweep
    accept_rate_mu_phi: np.ndarray
    logml_trace: np.ndarray
    config: SamplerConfig

    def __len__(self) -> int:
        return len(self.draws)


def _log_prior_mu_phi(mu: float, phi: float) -> float:
    lp = -0.5 * (mu / MU_PRIOR_SD) ** 2
    lp += (PHI_PRIOR_SHAPE - 1.0) * np.log(phi) - PHI_PRIOR_RATE * phi
    return lp


class SamplerState:
    """Current basis plus incrementally-maintained cross-products."""

    def __init__(self, X: np.ndarray, Y: np.ndarray, basis: BasisState, prior: NiwPrior):
        self.X = X
        self.Y = Y
        self.basis = basis
        self.cache = PriorCache(prior)
        self.WtW = basis.W.T @ basis.W
        self.WtY = basis.W.T @ Y
        self.YtY = Y.T @ Y
        self.T = Y.shape[0]
        self.logml = niw.logml_from_moments(self.cache, self.WtW, self.WtY, self.YtY, self.T)

    def _swapped_products(self, r: int, C: np.ndarray):
        idx = [2 * r, 2 * r + 1]
        t = self.basis.W.T @ C
        WtW = self.WtW.copy()
        WtW[:, idx] = t
        WtW[idx, :] = t.T
        WtW[np.ix_(idx, idx)] = C.T @ C
        WtY = self.WtY.copy()
        WtY[idx, :] = C.T @ self.Y
        return WtW, WtY

    def candidate_logml(self, r: int, spec: TransitionSpec):
        """Marginal likelihood with learner r swapped for `spec`."""
        C = learner_columns(self.X, spec)
        WtW, WtY = self._swapped_products(r, C)
        logml = niw.logml_from_moments(self.cache, WtW, WtY, self.YtY, self.T)
        return logml, C, WtW, WtY

    def apply(self, r: int, spec: TransitionSpec, C, WtW, WtY, logml: float):
        W = self.basis.W.copy()
        W[:, 2 * r : 2 * r + 2] = C
        specs = list(self.basis.specs)
        specs[r] = spec
        self.basis = BasisState(specs=tuple(specs), W=W, X=self.basis.X)
        self.WtW, self.WtY, self.logml = WtW, WtY, logml

    def posterior(self) -> niw.NiwPosterior:
        return niw.posterior_from_moments(self.cache, self.WtW, self.WtY, self.YtY, self.T)


def delta_step(state: SamplerState, r: int, rng: np.random.Generator, subsample: int = 0):
    """Discrete update of learner r's selected regressor via Gumbel-max.

    The candidate prior is uniform over the K regressors, so only marginal
    likelihoods enter the log weights. The incumbent is always in the support.
    """
    K = state.X.shape[1]
    incumbent = state.basis.specs[r]
    if subsample and subsample < K:
        cand = rng.choice(K, size=subsample, replace=False)
        if incumbent.sel not in cand:
            cand = np.append(cand, incumbent.sel)
    else:
        cand = np.arange(K)
    best, best_key = None, -np.inf
    for n in cand:
        spec = TransitionSpec(int(n), incumbent.mu, incumbent.phi)
        logml, C, WtW, WtY = state.candidate_logml(r, spec)
        key = logml + rng.gumbel()
        if key > best_key:
            best_key = key
            best = (spec, C, WtW, WtY, logml)
    state.apply(r, *best)
    return best[0]


def mu_phi_step(
    state: SamplerState,
    r: int,
    rng: np.random.Generator,
    step_mu: float,
    step_logphi: float,
):
    """Joint random-walk MH on (mu, log phi) for learner r.

    The proposal is Gaussian on (mu, log phi); the log-phi parameterization
    contributes the Jacobian term log(phi*) - log(phi) to the accept ratio.
    """
    cur = state.basis.specs[r]
    z = rng.standard_normal(2)
    mu_new = cur.mu + step_mu * z[0]
    log_phi_new = float(np.log(cur.phi) + step_logphi * z[1])
    if abs(log_phi_new) > LOG_PHI_BOUND:  # outside the truncated prior support
        return cur, False
    phi_new = float(np.exp(log_phi_new))
    prop = TransitionSpec(cur.sel, mu_new, phi_new)
    logml_new, C, WtW, WtY = state.candidate_logml(r, prop)
    log_ratio = (
        logml_new
        - state.logml
        + _log_prior_mu_phi(mu_new, phi_new)
        - _log_prior_mu_phi(cur.mu, cur.phi)
        + np.log(phi_new)
        - np.log(cur.phi)
    )
    if np.log(rng.uniform()) < log_ratio:
        state.apply(r, prop, C, WtW, WtY, logml_new)
        return prop, True
    return cur, False


def sample_delta(r, basis, X, Y, prior, rng, hyper=None, subsample: int = 0) -> TransitionSpec:
    """Standalone discrete regressor update (builds its own cross-products)."""
    if hyper is not None:
        mu_r, phi_r = hyper
        basis = build_basis(X, [
            TransitionSpec(s.sel, mu_r, phi_r) if i == r else s
            for i, s in enumerate(basis.specs)
        ])
    state = SamplerState(X, Y, basis, prior)
    return delta_step(state, r, rng, subsample=subsample)


def sample_mu_phi(r, basis, X, Y, prior, rng, step_mu: float, step_logphi: float):
    """Standalone (mu, phi) MH update; returns (spec, accepted)."""
    state = SamplerState(X, Y, basis, prior)
    return mu_phi_step(state, r, rng, step_mu, step_logphi)


def init_specs(K: int, R: int, rng: np.random.Generator) -> list[TransitionSpec]:
    return [TransitionSpec(int(rng.integers(K)), 0.0, 1.0) for _ in range(R)]


def run_chain(design, prior: NiwPrior, config: SamplerConfig) -> McmcChain:
    """Run the full three-block sampler on a DesignMatrix.

    Deterministic given the seed. Step sizes adapt toward 30% acceptance
    during burn-in only (Robbins-Monro on the log scale), then freeze.
    """
    X, Y = design.X, design.Y
    K = X.shape[1]
    rng = np.random.default_rng(config.seed)
    specs = init_specs(K, config.R, rng)
    state = SamplerState(X, Y, build_basis(X, specs), prior)

    R = config.R
    log_scale = np.zeros(R)  # per-learner multiplier on both step sizes
    accepts = np.zeros(R)
    proposals = np.zeros(R)
    draws = []
    logml_trace = np.empty(config.n_draws)

    for it in range(config.n_draws):
        for r in range(R):
            try:
                delta_step(state, r, rng, subsample=config.candidate_subsample)
                scale = float(np.exp(log_scale[r]))
                _, accepted = mu_phi_step(
                    state, r, rng, config.mh_step_mu * scale, config.mh_step_logphi * scale
                )
            except NumericalError as exc:
                raise NumericalError(f"sweep {it}, learner {r}: {exc}") from exc
            proposals[r] += 1
            accepts[r] += accepted
            if config.adapt and it < config.n_burn:
                gamma = (it + 1) ** -0.6
                log_scale[r] += gamma * (float(accepted) - ADAPT_TARGET)
        try:
            draw = niw.sample(state.posterior(), rng)
        except NumericalError as exc:
            raise NumericalError(f"sweep {it}, coefficient draw: {exc}") from exc
        logml_trace[it] = state.logml
        if (it + 1) % 1000 == 0:
            fresh = niw.log_marginal(prior, state.basis.W, Y)
            if not np.isclose(fresh, state.logml, rtol=0.0, atol=1e-8 * max(1.0, abs(fresh))):
                raise NumericalError(
                    f"sweep {it}: incremental marginal likelihood drifted "
                    f"({state.logml} vs recomputed {fresh})"
                )
        if it >= config.n_burn and (it - config.n_burn + 1) % config.thin == 0:
            draws.append((draw, state.basis.specs))

    return McmcChain(
        draws=draws,
        accept_rate_mu_phi=accepts / np.maximum(proposals, 1),
        logml_trace=logml_trace,
        config=config,
    )
