import math

import numpy as np
import pytest

import mlpinit as mi

KAIMING = mi.InitScheme(mi.InitFamily.KAIMING, mi.InitDist.NORMAL)
XAVIER_U = mi.InitScheme(mi.InitFamily.XAVIER, mi.InitDist.UNIFORM)


def test_closed_forms():
    assert mi.target_variance(KAIMING, 50) == pytest.approx(0.04)
    assert mi.uniform_bound(XAVIER_U, 85) == pytest.approx(math.sqrt(3 / 85))
    with pytest.raises(mi.ValidationError):
        mi.target_variance(KAIMING, 0)


def test_initialize_matches_target():
    w = mi.initialize(KAIMING, 400, 50, seed=3)
    assert w.shape == (400, 50)
    assert w.var() == pytest.approx(0.04, rel=0.05)
    u = mi.initialize(XAVIER_U, 64, 85, seed=3)
    assert np.abs(u).max() <= mi.uniform_bound(XAVIER_U, 85)


def test_presets():
    hp = mi.preset_hyperparams(mi.Topology.THREE_LAYER, mi.InitFamily.KAIMING)
    assert hp == mi.Hyperparams(36, 0.0002, 0.6)


def test_model_forward_predict_and_bytes():
    model = mi.Model(mi.Topology.THREE_LAYER, KAIMING, seed=1)
    x = np.random.default_rng(0).standard_normal((8, mi.FEATURE_COUNT))
    probs = model.forward(x)
    assert probs.shape == (8, mi.CLASS_COUNT)
    np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-12)
    assert model.predict(x) == list(probs.argmax(axis=1))
    assert model.grad_check(x, [0, 1, 2, 3, 0, 1, 2, 3]) < 1e-4
    assert mi.Model.from_bytes(model.to_bytes()) == model
    with pytest.raises(mi.ShapeError):
        model.forward(np.zeros((2, 84)))


def test_synthesize_and_evaluate():
    x, labels, ids = mi.synthesize(seed=2)
    assert x.shape == (192, mi.FEATURE_COUNT)
    assert sorted(set(labels)) == [0, 1, 2, 3]
    assert len(set(ids)) == 16
    report = mi.evaluate([0, 0, 1, 3], [0, 1, 1, 3])
    assert report["accuracy"] == 0.75
    assert report["classes"][0]["f1"] == pytest.approx(2 / 3)


def test_run_experiment_is_deterministic():
    a = mi.run_experiment(mi.Topology.ONE_LAYER, KAIMING, seed=5, epochs=5)
    b = mi.run_experiment(mi.Topology.ONE_LAYER, KAIMING, seed=5, epochs=5)
    assert a == b
    assert a["test_size"] == 36
    with pytest.raises(mi.DataError):
        mi.run_experiment(mi.Topology.ONE_LAYER, KAIMING, csv="/nonexistent.csv")
