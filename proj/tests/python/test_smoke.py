import json

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

import otmap


def test_assignment_matches_scipy():
    rng = np.random.default_rng(0)
    for k in (1, 2, 5, 40):
        costs = rng.random((k, k))
        perm, total = otmap.solve_assignment(costs)
        rows, cols = linear_sum_assignment(costs)
        assert sorted(perm) == list(range(k))
        assert total == pytest.approx(costs[rows, cols].sum(), abs=1e-12)
        assert total == pytest.approx(costs[np.arange(k), perm].sum(), abs=1e-12)


def test_divergence_examples():
    assert otmap.ot_divergence([[0.0, 0.0]], [[3.0, 4.0]]) == pytest.approx(5.0)
    a = np.array([[0.0, 0.0], [1.0, 1.0]])
    assert otmap.ot_divergence(a, a[::-1]) == 0.0
    assert otmap.ot_divergence([[0.0, 0.0]], [[3.0, 4.0]], report_metric="l1") == pytest.approx(7.0)


def test_errors_raise_otmap_error():
    with pytest.raises(otmap.OtmapError, match="InvalidCost"):
        otmap.solve_assignment(np.array([[0.0, np.nan], [1.0, 2.0]]))
    with pytest.raises(otmap.OtmapError):
        otmap.ot_divergence(np.zeros((2, 2)), np.zeros((3, 2)))
    with pytest.raises(otmap.OtmapError):
        otmap.ot_divergence(np.zeros((2, 2)), np.zeros((2, 2)), assign_metric="cosine")


def test_synthetic_data_shapes_and_determinism():
    moons = otmap.make_moons(100, noise=0.0, seed=3)
    assert moons.shape == (100, 2)
    upper = moons[:50]
    assert np.allclose(np.hypot(upper[:, 0], upper[:, 1]), 1.0)
    assert np.array_equal(moons, otmap.make_moons(100, noise=0.0, seed=3))
    circles = otmap.make_circles(10, noise=0.0, factor=0.25)
    assert np.allclose(np.hypot(circles[5:, 0], circles[5:, 1]), 0.25)


def test_cluster_model_round_trip():
    pts = otmap.make_moons(500, seed=1)
    model = json.loads(otmap.fit_cluster_model(pts, 4, seed=2))
    assert model["clusters"] == 4
    assert sum(model["weights"]) == pytest.approx(1.0)
    samples = otmap.sample_cluster_model(json.dumps(model), 200, seed=5)
    assert samples.shape == (200, 2)


def test_cli_train_and_generate(tmp_path):
    out = tmp_path / "run"
    code = otmap.run_cli(["train", "--algo", "otgen", "--data", "moons", "--n", "400", "--steps", "20",
                          "--batch", "16", "--width", "8", "--depth", "1", "--eval-n", "100", "--out", str(out)])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["results"]["eval_n"] == 100
    pts = otmap.generate(str(out / "checkpoint.ckpt"), 50, seed=1)
    assert pts.shape == (50, 2)
    assert np.array_equal(pts, otmap.generate(str(out / "checkpoint.ckpt"), 50, seed=1))
    assert otmap.run_cli(["train", "--data", "moons"]) == 2
