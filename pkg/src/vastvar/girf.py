"""Generalized impulse responses by Monte Carlo simulation through the fitted mean.

For each posterior draw, origin period, and shock scale, a shocked and an
unshocked path are simulated forward; the response is the mean difference.
Noise draws are shared between the two branches (common random numbers), so
the impact row is exact by construction. A zero-noise mode propagates
conditional means only and is used to cross-check the linear nested case.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .identification import StructuralFactor, cholesky_identify, scaled_impact
from .niw import PosteriorDraw
from .transition import EXP_CLAMP


@dataclass(frozen=True)
class GirfRequest:
    shock_index: int
    sigmas: tuple = (-6.0, -3.0, -1.0, 1.0, 3.0, 6.0)
    horizons: int = 24
    origins: tuple | None = None  # design-row indices; None = all
    n_sim: int = 100
    draw_thin: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.horizons < 0:
            raise ValueError("horizons must be >= 0")
        if self.n_sim < 2:
            raise ValueError("n_sim must be >= 2")
        if any(s == 0.0 for s in self.sigmas):
            raise ValueError("shock scales must be nonzero")
        if self.draw_thin < 1:
            raise ValueError("draw_thin must be >= 1")


@dataclass(frozen=True)
class GirfResult:
    """Responses in reporting units, shape (draw, origin, sigma, H+1, M)."""

    responses: np.ndarray
    time_avg: np.ndarray  # (draw, sigma, H+1, M)
    quantiles: np.ndarray  # (len(percentiles), sigma, H+1, M), over draws of time_avg
    percentiles: tuple
    sigmas: np.ndarray
    origins: np.ndarray
    shock_index: int

    @property
    def H(self) -> int:
        return self.responses.shape[3] - 1

    @property
    def M(self) -> int:
        return self.responses.shape[4]


class VastDrawState:
    """Conditional-mean evaluator for one retained draw of the nonlinear model."""

    def __init__(self, specs, B: np.ndarray, Sigma: np.ndarray):
        self.sel = np.array([s.sel for s in specs])
        self.mu = np.array([s.mu for s in specs])
        self.phi = np.array([s.phi for s in specs])
        self.B = B
        self.Sigma = Sigma

    def conditional_mean(self, Xmat: np.ndarray) -> np.ndarray:
        a = np.clip(self.phi * (Xmat[:, self.sel] - self.mu), -EXP_CLAMP, EXP_CLAMP)
        s = 1.0 / (1.0 + np.exp(-a))
        W = np.empty((Xmat.shape[0], 2 * s.shape[1]))
        W[:, 0::2] = s
        W[:, 1::2] = 1.0 - s
        return W @ self.B


class LinearDrawState:
    """Conditional-mean evaluator for a linear VAR draw (intercept last)."""

    def __init__(self, A: np.ndarray, Sigma: np.ndarray):
        self.A = A
        self.Sigma = Sigma

    def conditional_mean(self, Xmat: np.ndarray) -> np.ndarray:
        K = self.A.shape[1] - 1
        return Xmat @ self.A[:, :K].T + self.A[:, K]


def girf_one(
    state,
    x_lag: np.ndarray,
    y_realized: np.ndarray,
    impact: np.ndarray,
    H: int,
    n_sim: int,
    rng: np.random.Generator,
    zero_noise: bool = False,
    crn: bool = True,
) -> np.ndarray:
    """(H+1) x M response path in standardized units for one (draw, origin, scale).

    `x_lag` is the lag state that generated the origin period and `y_realized`
    its realized outcome; the shocked branch adds `impact` to that realization.
    """
    M = y_realized.shape[0]
    K = x_lag.shape[0]
    if zero_noise:
        n_sim = 1
    L = None if zero_noise else cholesky_identify(state.Sigma)

    responses = np.empty((H + 1, M))
    responses[0] = impact
    tail = x_lag[: K - M]
    xb = np.tile(np.concatenate([y_realized, tail]), (n_sim, 1))
    xs = np.tile(np.concatenate([y_realized + impact, tail]), (n_sim, 1))
    for h in range(1, H + 1):
        mb = state.conditional_mean(xb)
        ms = state.conditional_mean(xs)
        if zero_noise:
            yb, ys = mb, ms
        else:
            eps = rng.standard_normal((n_sim, M)) @ L.T
            yb = mb + eps
            ys = ms + (eps if crn else rng.standard_normal((n_sim, M)) @ L.T)
        responses[h] = np.mean(ys - yb, axis=0)
        xb = np.concatenate([yb, xb[:, : K - M]], axis=1)
        xs = np.concatenate([ys, xs[:, : K - M]], axis=1)
    return responses


def vast_draw_states(chain, draw_thin: int = 1) -> list[VastDrawState]:
    return [
        VastDrawState(specs, d.B, d.Sigma) for d, specs in chain.draws[::draw_thin]
    ]


def linear_draw_states(draws) -> list[LinearDrawState]:
    return [LinearDrawState(d.A, d.Sigma) for d in draws]


def _stream(seed: int, d: int, o: int, si: int) -> np.random.Generator:
    # counter-based stream keyed by (seed, draw, origin, scale); schedule-independent
    key = np.array([np.uint64(seed), np.uint64((d << 40) + (o << 20) + si)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def girf_batch(
    draw_states,
    design,
    scale_sd: np.ndarray,
    req: GirfRequest,
    zero_noise: bool = False,
    percentiles: tuple = (16, 50, 84),
) -> GirfResult:
    """GIRFs over all (draw, origin, scale) combinations plus time averages.

    Responses are de-standardized per variable with `scale_sd`; the shocked
    variable's impact equals sigma times its unconditional standard deviation.
    """
    if not draw_states:
        raise ValueError("no posterior draws supplied")
    states = draw_states[:: req.draw_thin]
    origins = (
        np.arange(design.T_eff) if req.origins is None else np.asarray(sorted(req.origins))
    )
    sigmas = np.asarray(req.sigmas, dtype=float)
    H, M = req.horizons, design.M
    scale_sd = np.asarray(scale_sd, dtype=float)

    responses = np.empty((len(states), len(origins), len(sigmas), H + 1, M))
    for d, st in enumerate(states):
        Pmat = cholesky_identify(st.Sigma)
        factor = StructuralFactor(Pmat=Pmat, shock_index=req.shock_index, s=np.ones(M))
        impacts = [scaled_impact(factor, s) for s in sigmas]
        for o, t in enumerate(origins):
            x_lag = design.X[t]
            y_real = design.Y[t]
            for si, impact in enumerate(impacts):
                rng = _stream(req.seed, d, o, si)
                path = girf_one(
                    st, x_lag, y_real, impact, H, req.n_sim, rng, zero_noise=zero_noise
                )
                responses[d, o, si] = path * scale_sd[None, :]

    time_avg = responses.mean(axis=1)
    quantiles = np.percentile(time_avg, percentiles, axis=0)
    return GirfResult(
        responses=responses,
        time_avg=time_avg,
        quantiles=quantiles,
        percentiles=tuple(percentiles),
        sigmas=sigmas,
        origins=origins,
        shock_index=req.shock_index,
    )
