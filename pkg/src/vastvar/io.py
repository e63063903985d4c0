"""Serialization for chains, GIRF arrays, and summary tables.

Large arrays go into compressed .npz files with a format version; manifests
and metadata are JSON; tables are tidy CSV.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from pathlib import Path

import numpy as np

from .girf import GirfResult
from .minnesota import LinearVarDraw
from .niw import PosteriorDraw
from .sampler import McmcChain, SamplerConfig
from .transition import TransitionSpec

CHAIN_FORMAT_VERSION = 1
GIRF_FORMAT_VERSION = 1


def save_chain(path, chain: McmcChain) -> None:
    B = np.stack([d.B for d, _ in chain.draws])
    Sigma = np.stack([d.Sigma for d, _ in chain.draws])
    sel = np.array([[s.sel for s in specs] for _, specs in chain.draws])
    mu = np.array([[s.mu for s in specs] for _, specs in chain.draws])
    phi = np.array([[s.phi for s in specs] for _, specs in chain.draws])
    np.savez_compressed(
        path,
        version=CHAIN_FORMAT_VERSION,
        config=json.dumps(dataclasses.asdict(chain.config)),
        B=B,
        Sigma=Sigma,
        sel=sel,
        mu=mu,
        phi=phi,
        accept_rate_mu_phi=chain.accept_rate_mu_phi,
        logml_trace=chain.logml_trace,
    )


def load_chain(path) -> McmcChain:
    with np.load(path, allow_pickle=False) as z:
        if int(z["version"]) != CHAIN_FORMAT_VERSION:
            raise ValueError(f"unsupported chain format version {int(z['version'])}")
        config = SamplerConfig(**json.loads(str(z["config"])))
        draws = []
        for i in range(z["B"].shape[0]):
            specs = tuple(
                TransitionSpec(int(z["sel"][i, r]), float(z["mu"][i, r]), float(z["phi"][i, r]))
                for r in range(z["sel"].shape[1])
            )
            draws.append((PosteriorDraw(B=z["B"][i], Sigma=z["Sigma"][i]), specs))
        return McmcChain(
            draws=draws,
            accept_rate_mu_phi=z["accept_rate_mu_phi"],
            logml_trace=z["logml_trace"],
            config=config,
        )


def save_linear_draws(path, draws: list[LinearVarDraw]) -> None:
    np.savez_compressed(
        path,
        version=CHAIN_FORMAT_VERSION,
        linear=True,
        A=np.stack([d.A for d in draws]),
        Sigma=np.stack([d.Sigma for d in draws]),
    )


def load_linear_draws(path) -> list[LinearVarDraw]:
    with np.load(path, allow_pickle=False) as z:
        return [LinearVarDraw(A=z["A"][i], Sigma=z["Sigma"][i]) for i in range(z["A"].shape[0])]


def is_linear_chain(path) -> bool:
    with np.load(path, allow_pickle=False) as z:
        return "linear" in z.files


def save_girf(path, result: GirfResult, manifest_path=None, variable_names=None, units=None) -> None:
    np.savez_compressed(
        path,
        version=GIRF_FORMAT_VERSION,
        responses=result.responses,
        time_avg=result.time_avg,
        quantiles=result.quantiles,
        percentiles=np.asarray(result.percentiles),
        sigmas=result.sigmas,
        origins=result.origins,
        shock_index=result.shock_index,
    )
    if manifest_path is not None:
        manifest = {
            "format_version": GIRF_FORMAT_VERSION,
            "dimensions": {
                "draws": result.responses.shape[0],
                "origins": result.responses.shape[1],
                "sigmas": result.responses.shape[2],
                "horizons": result.H,
                "variables": result.M,
            },
            "sigma_grid": [float(s) for s in result.sigmas],
            "shock_index": int(result.shock_index),
            "percentiles": list(result.percentiles),
            "variable_names": variable_names,
            "units": units or "transformed (pre-standardization) units",
        }
        Path(manifest_path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def load_girf(path) -> GirfResult:
    with np.load(path, allow_pickle=False) as z:
        if int(z["version"]) != GIRF_FORMAT_VERSION:
            raise ValueError(f"unsupported girf format version {int(z['version'])}")
        return GirfResult(
            responses=z["responses"],
            time_avg=z["time_avg"],
            quantiles=z["quantiles"],
            percentiles=tuple(int(p) for p in z["percentiles"]),
            sigmas=z["sigmas"],
            origins=z["origins"],
            shock_index=int(z["shock_index"]),
        )


def write_rows_csv(path, rows: list, fieldnames: list[str]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fieldnames)
        w.writeheader()
        for row in rows:
            w.writerow(dataclasses.asdict(row) if dataclasses.is_dataclass(row) else row)
