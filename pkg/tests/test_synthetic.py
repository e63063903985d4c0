import numpy as np
import pytest

from vastvar.data import build_design, validate_ordering
from vastvar.errors import DataError
from vastvar.synthetic import (
    SyntheticLearner,
    SyntheticSpec,
    TrueModel,
    generate_synthetic,
    synthetic_meta,
    to_panel,
)


def test_shapes_and_determinism():
    spec = SyntheticSpec(M=2, T=50, P=2, A=np.hstack([0.3 * np.eye(2), np.zeros((2, 2))]))
    a, _ = generate_synthetic(spec, seed=1)
    b, _ = generate_synthetic(spec, seed=1)
    c, _ = generate_synthetic(spec, seed=2)
    assert a.shape == (50, 2)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_pure_noise_moments():
    spec = SyntheticSpec(M=2, T=20_000, P=1, Sigma=np.diag([4.0, 0.25]))
    raw, _ = generate_synthetic(spec, seed=3)
    assert np.allclose(raw.std(axis=0), [2.0, 0.5], rtol=0.05)
    assert np.allclose(raw.mean(axis=0), 0.0, atol=0.05)


def test_ar1_autocorrelation():
    rho = 0.8
    spec = SyntheticSpec(M=1, T=20_000, P=1, A=np.array([[rho]]))
    raw, _ = generate_synthetic(spec, seed=4)
    x = raw[:, 0]
    ac = np.corrcoef(x[:-1], x[1:])[0, 1]
    assert ac == pytest.approx(rho, abs=0.02)


def test_threshold_switching_means():
    # two intercept regimes split by the sign of the first lag; intercepts
    # oppose the regime so the path keeps switching
    lr = SyntheticLearner(sel=0, mu=0.0, phi=50.0, b0=(-2.0,), b1=(2.0,))
    spec = SyntheticSpec(M=1, T=30_000, P=1, learners=(lr,), Sigma=np.array([[0.04]]))
    raw, model = generate_synthetic(spec, seed=5)
    x = raw[:, 0]
    after_high = x[1:][x[:-1] > 0.2]
    after_low = x[1:][x[:-1] < -0.2]
    assert after_high.mean() == pytest.approx(-2.0, abs=0.05)
    assert after_low.mean() == pytest.approx(2.0, abs=0.05)


def test_true_model_conditional_mean():
    lr = SyntheticLearner(sel=1, mu=0.5, phi=2.0, b0=(1.0, 0.0), b1=(0.0, 1.0))
    A = 0.1 * np.ones((2, 2))
    spec = SyntheticSpec(M=2, T=10, P=1, learners=(lr,), A=A, intercept=np.array([0.3, -0.3]))
    model = TrueModel(spec)
    x = np.array([[0.5, 2.0]])
    s = 1.0 / (1.0 + np.exp(-2.0 * (2.0 - 0.5)))
    want = np.array([0.3, -0.3]) + A @ x[0] + s * np.array([1.0, 0.0]) + (1 - s) * np.array([0.0, 1.0])
    assert np.allclose(model.conditional_mean(x)[0], want, atol=1e-12)


def test_standardized_model_consistency():
    # the standardized evaluator agrees with raw evaluation after rescaling
    lr = SyntheticLearner(sel=0, mu=0.2, phi=3.0, b0=(1.0, -1.0), b1=(0.0, 0.5))
    spec = SyntheticSpec(M=2, T=300, P=2, learners=(lr,), Sigma=0.5 * np.eye(2))
    raw, model = generate_synthetic(spec, seed=6)
    panel = to_panel(raw)
    std_model = model.standardized(panel.scale_mean, panel.scale_sd)
    design = build_design(panel, 2)
    got = std_model.conditional_mean(design.X)
    Xraw = design.X * np.tile(panel.scale_sd, 2) + np.tile(panel.scale_mean, 2)
    want = (model.conditional_mean(Xraw) - panel.scale_mean) / panel.scale_sd
    assert np.allclose(got, want, atol=1e-12)


def test_explosive_path_rejected():
    spec = SyntheticSpec(M=1, T=500, P=1, A=np.array([[1.5]]), Sigma=np.array([[1.0]]))
    with pytest.raises(DataError, match="explosive"):
        generate_synthetic(spec, seed=7)


def test_spec_validation():
    with pytest.raises(DataError, match="sel"):
        SyntheticSpec(M=1, T=10, P=1, learners=(SyntheticLearner(5, 0.0, 1.0, (0.0,), (0.0,)),))
    with pytest.raises(DataError, match="length M"):
        SyntheticSpec(M=2, T=10, P=1, learners=(SyntheticLearner(0, 0.0, 1.0, (0.0,), (0.0,)),))
    with pytest.raises(DataError, match="A must be"):
        SyntheticSpec(M=2, T=10, P=1, A=np.zeros((2, 3)))


def test_synthetic_meta_ordering():
    meta = synthetic_meta(5, ebp_pos=2)
    validate_ordering(meta)
    assert meta[2].block == "ebp"


def test_to_panel_standardizes():
    raw, _ = generate_synthetic(SyntheticSpec(M=2, T=100, P=1, Sigma=np.diag([9.0, 1.0])), seed=8)
    panel = to_panel(raw)
    assert np.allclose(panel.values.std(axis=0, ddof=1), 1.0, atol=1e-12)
    assert panel.scale_sd[0] == pytest.approx(raw[:, 0].std(ddof=1))
