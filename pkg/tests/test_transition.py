import numpy as np
import pytest

from vastvar.transition import (
    TransitionSpec,
    build_basis,
    eval_transition,
    learner_columns,
    replace_learner,
)


def test_midpoint_is_half():
    spec = TransitionSpec(0, mu=0.7, phi=3.0)
    assert eval_transition(spec, 0.7) == pytest.approx(0.5, abs=1e-15)


def test_known_value():
    # phi=2, mu=1, z=2 -> 1/(1+e^-2)
    spec = TransitionSpec(0, mu=1.0, phi=2.0)
    assert eval_transition(spec, 2.0) == pytest.approx(1.0 / (1.0 + np.exp(-2.0)), rel=1e-15)


def test_monotone_and_bounded():
    spec = TransitionSpec(0, mu=-0.3, phi=5.0)
    z = np.linspace(-10, 10, 401)
    s = eval_transition(spec, z)
    assert np.all(np.diff(s) >= 0)
    assert np.all((s >= 0) & (s <= 1))


def test_extreme_phi_no_overflow():
    spec = TransitionSpec(0, mu=0.0, phi=1e300)
    s = eval_transition(spec, np.array([-1.0, 1.0]))
    assert np.all(np.isfinite(s))
    assert s[0] < 1e-200 and s[1] == 1.0


def test_extreme_z_no_overflow():
    spec = TransitionSpec(0, mu=0.0, phi=2.0)
    s = eval_transition(spec, np.array([-1e308, 1e308]))
    assert s[0] < 1e-200 and s[1] == 1.0


def test_tiny_phi_is_flat():
    spec = TransitionSpec(0, mu=0.0, phi=1e-300)
    s = eval_transition(spec, np.array([-50.0, 50.0]))
    assert s == pytest.approx([0.5, 0.5], abs=1e-12)


def test_phi_must_be_positive():
    with pytest.raises(ValueError, match="phi"):
        TransitionSpec(0, 0.0, 0.0)
    with pytest.raises(ValueError, match="phi"):
        TransitionSpec(0, 0.0, -1.0)


def test_learner_columns_complement():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((40, 3))
    C = learner_columns(X, TransitionSpec(1, 0.2, 4.0))
    assert C.shape == (40, 2)
    assert np.allclose(C.sum(axis=1), 1.0, atol=1e-15)


def test_learner_columns_sel_out_of_range():
    X = np.zeros((5, 2))
    with pytest.raises(IndexError):
        learner_columns(X, TransitionSpec(2, 0.0, 1.0))


def test_build_basis_layout():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((30, 4))
    specs = [TransitionSpec(0, 0.1, 2.0), TransitionSpec(3, -0.5, 8.0)]
    basis = build_basis(X, specs)
    assert basis.W.shape == (30, 4)
    assert np.array_equal(basis.W[:, 0:2], learner_columns(X, specs[0]))
    assert np.array_equal(basis.W[:, 2:4], learner_columns(X, specs[1]))
    # every row of W sums to R
    assert np.allclose(basis.W.sum(axis=1), 2.0, atol=1e-12)


def test_replace_learner_touches_one_pair():
    rng = np.random.default_rng(2)
    X = rng.standard_normal((25, 3))
    basis = build_basis(X, [TransitionSpec(0, 0.0, 1.0), TransitionSpec(1, 0.0, 1.0)])
    new = TransitionSpec(2, 1.0, 3.0)
    out = replace_learner(basis, 1, new)
    assert np.array_equal(out.W[:, 0:2], basis.W[:, 0:2])
    assert np.array_equal(out.W[:, 2:4], learner_columns(X, new))
    assert out.specs == (basis.specs[0], new)
    # matches a from-scratch rebuild exactly
    rebuilt = build_basis(X, out.specs)
    assert np.array_equal(out.W, rebuilt.W)


def test_replace_learner_index_check():
    X = np.zeros((5, 2)) + np.arange(5)[:, None]
    basis = build_basis(X, [TransitionSpec(0, 0.0, 1.0)])
    with pytest.raises(IndexError):
        replace_learner(basis, 1, TransitionSpec(0, 0.0, 1.0))
