import numpy as np
import pytest
from math import lgamma

from scipy.special import logsumexp, roots_hermitenorm, roots_legendre

from vastvar.data import VariableMeta
from vastvar.niw import NiwPrior


def logml_quadrature_oracle(W, Y, prior: NiwPrior, n_u: int = 80, n_s: int = 240) -> float:
    """Numeric integration of likelihood x prior for the M=1, 2-regressor case.

    Integrates over the coefficient pair (Gauss-Hermite in the prior-scaled
    space) and the error variance (Gauss-Legendre on the log scale). Shares
    no code with the closed-form conjugate update.
    """
    y = Y[:, 0]
    T = len(y)
    C = np.linalg.cholesky(prior.V0)
    G = W @ C
    r0 = y - W @ prior.B0[:, 0]
    un, uw = roots_hermitenorm(n_u)
    U = np.array(np.meshgrid(un, un)).reshape(2, -1)
    log_uw = np.log(np.outer(uw, uw).ravel()) - np.log(2 * np.pi)
    D = G @ U
    a, b = prior.v0 / 2.0, prior.S0[0, 0] / 2.0
    tn, tw = roots_legendre(n_s)
    lo, hi = -14.0, 8.0
    t = 0.5 * (hi - lo) * tn + 0.5 * (hi + lo)
    wt = 0.5 * (hi - lo) * tw
    vals = np.empty(n_s)
    for i, ti in enumerate(t):
        s2 = np.exp(ti)
        log_ig = a * np.log(b) - lgamma(a) - (a + 1.0) * ti - b / s2 + ti
        r = r0[:, None] - np.sqrt(s2) * D
        ll = -0.5 * T * np.log(2 * np.pi * s2) - 0.5 * np.sum(r * r, axis=0) / s2
        vals[i] = log_ig + logsumexp(log_uw + ll)
    return float(logsumexp(np.log(wt) + vals))


@pytest.fixture
def scalar_fixture():
    """M=1, two regressors, T=3; used against the quadrature oracle."""
    rng = np.random.default_rng(42)
    W = rng.standard_normal((3, 2))
    Y = rng.standard_normal((3, 1))
    prior = NiwPrior(
        v0=3.0,
        S0=np.array([[0.5]]),
        B0=np.array([[0.2], [-0.1]]),
        V0=np.diag([0.5, 1.0]),
    )
    return W, Y, prior


def make_meta(names, blocks, transforms=None):
    transforms = transforms or ["level"] * len(names)
    return [
        VariableMeta(name=n, country="GLOBAL", transform=t, block=b, order_index=i)
        for i, (n, b, t) in enumerate(zip(names, blocks, transforms))
    ]
