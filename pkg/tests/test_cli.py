import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from vastvar import io as vio
from vastvar.cli import main, validate_config, write_demo
from vastvar.errors import ConfigError


@pytest.fixture
def demo_dir(tmp_path):
    write_demo(tmp_path, seed=20240101)
    return tmp_path


def small_config(demo_dir, **overrides):
    cfg = json.loads((demo_dir / "demo.json").read_text())
    # shrink the shipped demo for test speed
    cfg["sampler"].update({"n_draws": 40, "n_burn": 20, "thin": 2, "R": 2})
    cfg["girf"].update({"n_sim": 4, "horizons": 4, "origin_stride": 60, "draw_thin": 3})
    cfg.update(overrides)
    return cfg


def write_config(demo_dir, cfg, name="cfg.json"):
    p = demo_dir / name
    p.write_text(json.dumps(cfg))
    return p


class TestValidateConfig:
    def test_missing_seed(self, demo_dir):
        cfg = small_config(demo_dir)
        del cfg["seed"]
        with pytest.raises(ConfigError, match="seed"):
            validate_config(cfg, demo_dir)

    def test_missing_csv(self, demo_dir):
        cfg = small_config(demo_dir)
        cfg["data"] = {}
        with pytest.raises(ConfigError, match="data.csv"):
            validate_config(cfg, demo_dir)

    def test_nonexistent_csv(self, demo_dir):
        cfg = small_config(demo_dir)
        cfg["data"]["csv"] = "missing.csv"
        with pytest.raises(ConfigError, match="data.csv"):
            validate_config(cfg, demo_dir)

    def test_unknown_sampler_field(self, demo_dir):
        cfg = small_config(demo_dir)
        cfg["sampler"]["chains"] = 4
        with pytest.raises(ConfigError, match="sampler.chains"):
            validate_config(cfg, demo_dir)

    def test_bad_model(self, demo_dir):
        cfg = small_config(demo_dir, model="dsge")
        with pytest.raises(ConfigError, match="model"):
            validate_config(cfg, demo_dir)

    def test_assumed_defaults_tracked(self, demo_dir):
        cfg = small_config(demo_dir)
        resolved = validate_config(cfg, demo_dir)
        assert "minnesota.lambda1" in resolved["_assumed"]
        assert "sampler.mh_step_mu" in resolved["_assumed"]
        assert "sampler.n_draws" not in resolved["_assumed"]

    def test_accepts_reemitted_metadata(self, demo_dir):
        cfg = small_config(demo_dir)
        resolved = validate_config(cfg, demo_dir)
        wrapped = {"config": {k: v for k, v in resolved.items() if k != "_assumed"}}
        again = validate_config(wrapped, demo_dir)
        assert again["sampler"] == resolved["sampler"]
        assert again["girf"] == resolved["girf"]

    def test_origin_stride_validated(self, demo_dir):
        cfg = small_config(demo_dir)
        cfg["girf"]["origin_stride"] = 0
        with pytest.raises(ConfigError, match="origin_stride"):
            validate_config(cfg, demo_dir)


class TestCommands:
    def test_synth_writes_demo(self, tmp_path):
        runner = CliRunner()
        res = runner.invoke(main, ["synth", "--out", str(tmp_path / "d")])
        assert res.exit_code == 0, res.output
        assert (tmp_path / "d" / "demo.csv").exists()
        assert (tmp_path / "d" / "schema.json").exists()
        assert (tmp_path / "d" / "demo.json").exists()

    def test_ingest_reports_dimensions(self, demo_dir):
        runner = CliRunner()
        res = runner.invoke(
            main,
            ["ingest", "--csv", str(demo_dir / "demo.csv"), "--schema",
             str(demo_dir / "schema.json"), "--lags", "2", "--check"],
        )
        assert res.exit_code == 0, res.output
        assert "T=240 M=3 K=6" in res.output
        assert "ok" in res.output

    def test_estimate_girf_summarize_pipeline(self, demo_dir):
        runner = CliRunner()
        cfg_path = write_config(demo_dir, small_config(demo_dir))
        chain = demo_dir / "chain.npz"
        res = runner.invoke(main, ["estimate", "--config", str(cfg_path), "--out", str(chain)])
        assert res.exit_code == 0, res.output
        assert chain.exists()
        loaded = vio.load_chain(chain)
        assert len(loaded) == 10  # (40-20)//2

        girf = demo_dir / "girf.npz"
        res = runner.invoke(
            main, ["girf", "--chain", str(chain), "--config", str(cfg_path), "--out", str(girf)]
        )
        assert res.exit_code == 0, res.output
        result = vio.load_girf(girf)
        assert result.M == 3 and result.H == 4
        assert (demo_dir / "girf.manifest.json").exists()

        tables = demo_dir / "tables"
        res = runner.invoke(
            main, ["summarize", "--girf", str(girf), "--config", str(cfg_path), "--out", str(tables)]
        )
        assert res.exit_code == 0, res.output
        assert (tables / "peaks.csv").exists()
        assert (tables / "bands.csv").exists()
        assert (tables / "activeness.csv").exists()
        assert (tables / "manifest.json").exists()

    def test_estimate_linear(self, demo_dir):
        runner = CliRunner()
        cfg_path = write_config(demo_dir, small_config(demo_dir, model="linear"))
        out = demo_dir / "linear.npz"
        res = runner.invoke(
            main, ["estimate-linear", "--config", str(cfg_path), "--out", str(out), "--n-draws", "20"]
        )
        assert res.exit_code == 0, res.output
        assert vio.is_linear_chain(out)
        assert len(vio.load_linear_draws(out)) == 20

    def test_run_dry_run(self, demo_dir):
        runner = CliRunner()
        cfg_path = write_config(demo_dir, small_config(demo_dir))
        res = runner.invoke(main, ["run", "--config", str(cfg_path), "--dry-run"])
        assert res.exit_code == 0, res.output
        plan = json.loads(res.output)
        assert plan["model"] == "vast"
        assert plan["threads"] == 1
        assert "_assumed" not in plan

    def test_run_full_pipeline_with_metadata(self, demo_dir):
        runner = CliRunner()
        cfg_path = write_config(demo_dir, small_config(demo_dir))
        res = runner.invoke(main, ["run", "--config", str(cfg_path)])
        assert res.exit_code == 0, res.output
        out = demo_dir / "out"
        for name in ("chain.npz", "girf.npz", "girf.manifest.json", "metadata.json"):
            assert (out / name).exists()
        assert (out / "tables" / "peaks.csv").exists()
        meta = json.loads((out / "metadata.json").read_text())
        assert meta["seed"] == 20240101
        assert meta["config"]["sampler"]["n_draws"] == 40
        assert isinstance(meta["wall_time_seconds"], float)
        assert "girf.n_sim" not in meta["assumed_defaults"]

    def test_run_seed_override(self, demo_dir):
        runner = CliRunner()
        cfg_path = write_config(demo_dir, small_config(demo_dir))
        res = runner.invoke(main, ["run", "--config", str(cfg_path), "--seed", "7", "--dry-run"])
        assert res.exit_code == 0, res.output
        assert json.loads(res.output)["seed"] == 7

    def test_run_quarantines_on_failure(self, demo_dir):
        runner = CliRunner()
        cfg = small_config(demo_dir)
        cfg["girf"]["sigmas"] = [0.0]  # invalid; fails after the chain is written
        cfg_path = write_config(demo_dir, cfg)
        res = runner.invoke(main, ["run", "--config", str(cfg_path)])
        assert res.exit_code == 1
        out = demo_dir / "out"
        assert (out / "failed" / "chain.npz").exists()
        assert not (out / "chain.npz").exists()

    def test_run_reproducible(self, demo_dir, tmp_path):
        runner = CliRunner()
        cfg1 = small_config(demo_dir, output_dir="o1")
        cfg2 = small_config(demo_dir, output_dir="o2")
        res1 = runner.invoke(main, ["run", "--config", str(write_config(demo_dir, cfg1, "c1.json"))])
        res2 = runner.invoke(main, ["run", "--config", str(write_config(demo_dir, cfg2, "c2.json"))])
        assert res1.exit_code == 0 and res2.exit_code == 0
        g1 = vio.load_girf(demo_dir / "o1" / "girf.npz")
        g2 = vio.load_girf(demo_dir / "o2" / "girf.npz")
        assert np.array_equal(g1.responses, g2.responses)
        p1 = (demo_dir / "o1" / "tables" / "peaks.csv").read_text()
        p2 = (demo_dir / "o2" / "tables" / "peaks.csv").read_text()
        assert p1 == p2
