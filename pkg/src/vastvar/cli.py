"""Command-line entry points: ingest, estimate, girf, summarize, synth, run."""

from __future__ import annotations

import dataclasses
import json
import os
import shutil
import sys
import time
from pathlib import Path

import click
import numpy as np
import pandas as pd

from . import __version__, analytics, girf as girf_mod, io as io_mod
from .data import PanelDataset, build_design, default_schema, load_csv, schema_from_json, transform_and_standardize
from .errors import ConfigError, DataError, NumericalError
from .girf import GirfRequest, girf_batch, linear_draw_states, vast_draw_states
from .minnesota import MinnesotaConfig, estimate_bvar
from .niw import NiwPrior
from .sampler import SamplerConfig, run_chain
from .synthetic import SyntheticLearner, SyntheticSpec, generate_synthetic, synthetic_meta

_SAMPLER_FIELDS = {f.name for f in dataclasses.fields(SamplerConfig)}
_MINNESOTA_FIELDS = {f.name for f in dataclasses.fields(MinnesotaConfig)}
_GIRF_FIELDS = {"sigmas", "horizons", "n_sim", "draw_thin", "origin_stride"}


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(str(path), "file not found")
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON: {exc}")


def validate_config(cfg: dict, base_dir: Path) -> dict:
    """Resolve and validate a run configuration; tracks defaulted fields."""
    if "config" in cfg and isinstance(cfg["config"], dict):
        cfg = cfg["config"]  # accept a previously-emitted metadata.json
    assumed: list[str] = []

    def take(section: dict, key: str, default, path: str):
        if key in section:
            return section[key]
        assumed.append(path)
        return default

    if "seed" not in cfg:
        raise ConfigError("seed", "required field is missing")
    if not isinstance(cfg["seed"], int):
        raise ConfigError("seed", "must be an integer")

    data = cfg.get("data")
    if not isinstance(data, dict) or "csv" not in data:
        raise ConfigError("data.csv", "required field is missing")
    csv_path = (base_dir / data["csv"]).resolve()
    if not csv_path.exists():
        raise ConfigError("data.csv", f"file does not exist: {csv_path}")
    schema_ref = data.get("schema", "default")
    if schema_ref != "default":
        schema_path = (base_dir / schema_ref).resolve()
        if not schema_path.exists():
            raise ConfigError("data.schema", f"file does not exist: {schema_path}")
        schema_ref = str(schema_path)

    model = cfg.get("model", "vast")
    if model not in ("vast", "linear"):
        raise ConfigError("model", f"must be 'vast' or 'linear', got {model!r}")

    sampler_in = cfg.get("sampler", {})
    for key in sampler_in:
        if key not in _SAMPLER_FIELDS:
            raise ConfigError(f"sampler.{key}", "unknown field")
    sampler = {f.name: getattr(SamplerConfig(seed=cfg["seed"]), f.name) for f in dataclasses.fields(SamplerConfig)}
    for name in sampler:
        if name in sampler_in:
            sampler[name] = sampler_in[name]
        elif name != "seed":
            assumed.append(f"sampler.{name}")
    sampler["seed"] = int(sampler_in.get("seed", cfg["seed"]))
    try:
        SamplerConfig(**sampler)
    except (TypeError, ValueError) as exc:
        raise ConfigError("sampler", str(exc))

    minnesota_in = cfg.get("minnesota", {})
    for key in minnesota_in:
        if key not in _MINNESOTA_FIELDS:
            raise ConfigError(f"minnesota.{key}", "unknown field")
    minnesota = dataclasses.asdict(MinnesotaConfig(P=sampler["P"]))
    for name in minnesota:
        if name in minnesota_in:
            minnesota[name] = minnesota_in[name]
        elif name != "P":
            assumed.append(f"minnesota.{name}")
    minnesota["P"] = sampler["P"]
    try:
        MinnesotaConfig(**minnesota)
    except (TypeError, ValueError) as exc:
        raise ConfigError("minnesota", str(exc))

    girf_in = cfg.get("girf", {})
    for key in girf_in:
        if key not in _GIRF_FIELDS:
            raise ConfigError(f"girf.{key}", "unknown field")
    girf = {
        "sigmas": take(girf_in, "sigmas", [-6.0, -3.0, -1.0, 1.0, 3.0, 6.0], "girf.sigmas"),
        "horizons": take(girf_in, "horizons", 24, "girf.horizons"),
        "n_sim": take(girf_in, "n_sim", 100, "girf.n_sim"),
        "draw_thin": take(girf_in, "draw_thin", 1, "girf.draw_thin"),
        "origin_stride": take(girf_in, "origin_stride", 1, "girf.origin_stride"),
    }
    if girf["origin_stride"] < 1:
        raise ConfigError("girf.origin_stride", "must be >= 1")

    if "output_dir" not in cfg:
        raise ConfigError("output_dir", "required field is missing")

    return {
        "seed": cfg["seed"],
        "data": {"csv": str(csv_path), "schema": schema_ref},
        "model": model,
        "sampler": sampler,
        "minnesota": minnesota,
        "girf": girf,
        "output_dir": str((base_dir / cfg["output_dir"]).resolve()),
        "emit_metadata": bool(cfg.get("emit_metadata", True)),
        "_assumed": assumed,
    }


def _resolve_schema(ref: str):
    if ref == "default":
        return default_schema()
    return schema_from_json(_load_json(ref))


def _ingest(resolved: dict) -> PanelDataset:
    schema = _resolve_schema(resolved["data"]["schema"])
    raw = load_csv(resolved["data"]["csv"], schema)
    return transform_and_standardize(raw, schema)


def _girf_request(resolved: dict, panel: PanelDataset, design) -> GirfRequest:
    g = resolved["girf"]
    stride = int(g["origin_stride"])
    origins = tuple(range(0, design.T_eff, stride)) if stride > 1 else None
    return GirfRequest(
        shock_index=panel.ebp_index(),
        sigmas=tuple(float(s) for s in g["sigmas"]),
        horizons=int(g["horizons"]),
        origins=origins,
        n_sim=int(g["n_sim"]),
        draw_thin=int(g["draw_thin"]),
        seed=int(resolved["seed"]),
    )


def _summarize(result, panel: PanelDataset, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    peaks = analytics.peak_table(result, flip_benign=False)
    io_mod.write_rows_csv(
        out_dir / "peaks.csv",
        peaks,
        ["variable", "sigma", "peak_value", "peak_h", "p16", "p50", "p84"],
    )
    # bands and activeness target the policy-stance variable when present
    blocks = [m.block for m in panel.meta]
    target = blocks.index("policy_rate") if "policy_rate" in blocks else 0
    band_rows, activeness_rows = [], []
    for sign, sel in (("adverse", result.sigmas > 0), ("benign", result.sigmas < 0)):
        mags = np.abs(result.sigmas[sel])
        has_small = np.any((mags >= 0.1) & (mags <= 1.5))
        has_large = np.any((mags > 1.5) & (mags <= 6.0))
        if not (has_small and has_large):
            continue
        bands = analytics.size_bands(result, target, sign)
        band_rows.extend(bands)
        for origin, value in sorted(analytics.activeness(bands).items()):
            activeness_rows.append(
                {"origin": origin, "sign": sign, "variable": target, "activeness": value}
            )
    if band_rows:
        io_mod.write_rows_csv(
            out_dir / "bands.csv",
            band_rows,
            ["origin", "regime", "sign", "mean_peak", "min_peak", "max_peak"],
        )
    if activeness_rows:
        io_mod.write_rows_csv(
            out_dir / "activeness.csv",
            activeness_rows,
            ["origin", "sign", "variable", "activeness"],
        )
    manifest = {
        "tables": sorted(p.name for p in out_dir.glob("*.csv")),
        "band_variable": target,
        "variable_names": [m.name for m in panel.meta],
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


@click.group()
@click.version_option(__version__)
def main():
    """Nonlinear multi-country VAR estimation and impulse-response analysis."""


@main.command()
@click.option("--csv", "csv_path", required=True, type=click.Path(exists=True))
@click.option("--schema", "schema_ref", default="default", show_default=True)
@click.option("--lags", default=12, show_default=True)
@click.option("--check", is_flag=True, help="Validate and print dimensions.")
def ingest(csv_path, schema_ref, lags, check):
    """Validate a CSV dataset against a schema and report T, M, K."""
    schema = _resolve_schema(schema_ref)
    panel = transform_and_standardize(load_csv(csv_path, schema), schema)
    click.echo(f"T={panel.T} M={panel.M} K={panel.M * lags}")
    if check:
        build_design(panel, lags)
        click.echo("ok")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def estimate(config_path, out_path):
    """Estimate the nonlinear model and write the chain file."""
    resolved = validate_config(_load_json(config_path), Path(config_path).parent)
    panel = _ingest(resolved)
    design = build_design(panel, resolved["sampler"]["P"])
    cfg = SamplerConfig(**resolved["sampler"])
    prior = NiwPrior.default(design.M, 2 * cfg.R)
    chain = run_chain(design, prior, cfg)
    io_mod.save_chain(out_path, chain)
    click.echo(f"wrote {out_path} ({len(chain)} retained draws)")


@main.command("estimate-linear")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--n-draws", default=500, show_default=True)
def estimate_linear(config_path, out_path, n_draws):
    """Estimate the linear Minnesota-prior baseline and write its draws."""
    resolved = validate_config(_load_json(config_path), Path(config_path).parent)
    panel = _ingest(resolved)
    design = build_design(panel, resolved["sampler"]["P"])
    cfg = MinnesotaConfig(**resolved["minnesota"])
    own = [0.0 if m.transform == "log_diff" else 1.0 for m in panel.meta]
    draws = estimate_bvar(design, cfg, n_draws, resolved["seed"], own_lag_mean=own)
    io_mod.save_linear_draws(out_path, draws)
    click.echo(f"wrote {out_path} ({len(draws)} draws)")


@main.command("girf")
@click.option("--chain", "chain_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def girf_cmd(chain_path, config_path, out_path):
    """Compute generalized impulse responses from a saved chain."""
    resolved = validate_config(_load_json(config_path), Path(config_path).parent)
    panel = _ingest(resolved)
    design = build_design(panel, resolved["sampler"]["P"])
    if io_mod.is_linear_chain(chain_path):
        states = linear_draw_states(io_mod.load_linear_draws(chain_path))
    else:
        states = vast_draw_states(io_mod.load_chain(chain_path))
    req = _girf_request(resolved, panel, design)
    result = girf_batch(states, design, panel.scale_sd, req)
    io_mod.save_girf(
        out_path,
        result,
        manifest_path=str(Path(out_path).with_suffix(".manifest.json")),
        variable_names=[m.name for m in panel.meta],
    )
    click.echo(f"wrote {out_path}")


@main.command()
@click.option("--girf", "girf_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
def summarize(girf_path, config_path, out_dir):
    """Write peak, band, and activeness tables from a GIRF file."""
    resolved = validate_config(_load_json(config_path), Path(config_path).parent)
    panel = _ingest(resolved)
    result = io_mod.load_girf(girf_path)
    _summarize(result, panel, Path(out_dir))
    click.echo(f"wrote tables to {out_dir}")


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--seed", default=20240101, show_default=True)
def synth(out_dir, seed):
    """Generate the synthetic demo dataset, schema, and run config."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_demo(out, seed)
    click.echo(f"wrote demo dataset and config to {out}")


def demo_spec() -> SyntheticSpec:
    """Small three-variable threshold DGP used by the shipped demo."""
    M, P = 3, 2
    A = np.zeros((M, M * P))
    A[0, 0], A[1, 1], A[2, 2] = 0.5, 0.7, 0.4
    A[0, 1] = -0.15  # activity reacts to lagged financial conditions
    learners = (
        SyntheticLearner(sel=1, mu=0.8, phi=8.0, b0=(-0.6, 0.3, -0.2), b1=(0.0, 0.0, 0.0)),
        SyntheticLearner(sel=0, mu=-0.5, phi=4.0, b0=(0.2, 0.0, 0.1), b1=(0.0, 0.0, 0.0)),
    )
    return SyntheticSpec(M=M, T=240, P=P, learners=learners, A=A, Sigma=0.25 * np.eye(M))


def write_demo(out: Path, seed: int) -> None:
    values, _ = generate_synthetic(demo_spec(), seed)
    meta = synthetic_meta(3)
    dates = pd.period_range("2000-01", periods=values.shape[0], freq="M")
    frame = pd.DataFrame(values, columns=[m.name for m in meta])
    frame.insert(0, "date", dates.astype(str))
    frame.to_csv(out / "demo.csv", index=False)
    schema = [
        {
            "name": m.name,
            "country": m.country,
            "transform": m.transform,
            "block": m.block,
            "order_index": m.order_index,
        }
        for m in meta
    ]
    (out / "schema.json").write_text(json.dumps(schema, indent=2) + "\n")
    config = {
        "seed": seed,
        "data": {"csv": "demo.csv", "schema": "schema.json"},
        "model": "vast",
        "sampler": {"R": 4, "P": 2, "n_draws": 600, "n_burn": 300, "thin": 3},
        "girf": {
            "sigmas": [-6.0, -3.0, -1.0, -0.5, 0.5, 1.0, 3.0, 6.0],
            "horizons": 12,
            "n_sim": 25,
            "draw_thin": 5,
            "origin_stride": 12,
        },
        "output_dir": "out",
    }
    (out / "demo.json").write_text(json.dumps(config, indent=2) + "\n")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--threads", type=int, default=None, help="Thread budget (recorded; execution is sequential).")
@click.option("--dry-run", is_flag=True, help="Print the resolved plan and exit.")
def run(config_path, seed, threads, dry_run):
    """Full pipeline: ingest, estimate, girf, summarize, with metadata."""
    raw_cfg = _load_json(config_path)
    if seed is not None:
        if "config" in raw_cfg:
            raw_cfg["config"]["seed"] = seed
        else:
            raw_cfg["seed"] = seed
    resolved = validate_config(raw_cfg, Path(config_path).parent)
    threads = threads or int(os.environ.get("VASTVAR_THREADS", "1"))

    if dry_run:
        plan = {k: v for k, v in resolved.items() if k != "_assumed"}
        plan["threads"] = threads
        click.echo(json.dumps(plan, indent=2, sort_keys=True))
        return

    out_dir = Path(resolved["output_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    produced: list[Path] = []
    try:
        panel = _ingest(resolved)
        design = build_design(panel, resolved["sampler"]["P"])

        chain_path = out_dir / "chain.npz"
        if resolved["model"] == "vast":
            cfg = SamplerConfig(**resolved["sampler"])
            prior = NiwPrior.default(design.M, 2 * cfg.R)
            chain = run_chain(design, prior, cfg)
            io_mod.save_chain(chain_path, chain)
            states = vast_draw_states(chain)
        else:
            mcfg = MinnesotaConfig(**resolved["minnesota"])
            own = [0.0 if m.transform == "log_diff" else 1.0 for m in panel.meta]
            draws = estimate_bvar(design, mcfg, 500, resolved["seed"], own_lag_mean=own)
            io_mod.save_linear_draws(chain_path, draws)
            states = linear_draw_states(draws)
        produced.append(chain_path)

        req = _girf_request(resolved, panel, design)
        result = girf_batch(states, design, panel.scale_sd, req)
        girf_path = out_dir / "girf.npz"
        io_mod.save_girf(
            girf_path,
            result,
            manifest_path=str(out_dir / "girf.manifest.json"),
            variable_names=[m.name for m in panel.meta],
        )
        produced.extend([girf_path, out_dir / "girf.manifest.json"])

        tables_dir = out_dir / "tables"
        _summarize(result, panel, tables_dir)
        produced.append(tables_dir)
    except (DataError, NumericalError, ConfigError, ValueError) as exc:
        failed = out_dir / "failed"
        failed.mkdir(exist_ok=True)
        for p in produced:
            if p.exists():
                shutil.move(str(p), str(failed / p.name))
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)

    if resolved["emit_metadata"]:
        metadata = {
            "version": __version__,
            "config": {k: v for k, v in resolved.items() if k != "_assumed"},
            "assumed_defaults": resolved["_assumed"],
            "seed": resolved["seed"],
            "threads": threads,
            "wall_time_seconds": round(time.time() - started, 3),
        }
        (out_dir / "metadata.json").write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n")
    click.echo(f"completed in {time.time() - started:.1f}s; outputs in {out_dir}")


def cli_main():
    try:
        main(standalone_mode=False)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except click.exceptions.Abort:
        sys.exit(130)


if __name__ == "__main__":
    cli_main()
