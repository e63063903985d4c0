"""Nonlinear multi-country VAR with smooth-transition weak learners.

Estimation via MCMC, recursive identification of financial shocks, Monte
Carlo generalized impulse responses with sign/size asymmetries, and a linear
Minnesota-prior BVAR baseline.
"""

__version__ = "0.1.0"

from .data import (
    DesignMatrix,
    PanelDataset,
    VariableMeta,
    build_design,
    default_schema,
    load_csv,
    transform_and_standardize,
)
from .girf import GirfRequest, GirfResult, girf_batch, girf_one
from .identification import StructuralFactor, cholesky_identify, scaled_impact
from .minnesota import LinearVarDraw, MinnesotaConfig, estimate_bvar, linear_irf
from .niw import NiwPosterior, NiwPrior, PosteriorDraw, log_marginal, sample, update
from .sampler import McmcChain, SamplerConfig, run_chain
from .transition import BasisState, TransitionSpec, build_basis, eval_transition, replace_learner
