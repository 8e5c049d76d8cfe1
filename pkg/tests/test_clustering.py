import numpy as np
import pytest

from botsense.clustering import KMeansConfig, KMeansModel, fit_kmeans, nearest_cluster, nearest_clusters

from oracles import brute_force_inertia

SQUARE = np.array([[0, 0], [0, 1], [10, 0], [10, 1]], dtype=float)


def test_k1_closed_form(rng):
    pts = rng.normal(size=(30, 3))
    model, labels = fit_kmeans(pts, KMeansConfig(k=1))
    assert np.allclose(model.centroids[0], pts.mean(axis=0))
    assert model.inertia == pytest.approx(pts.var(axis=0).sum() * len(pts))
    assert np.all(labels == 0)


def test_square_example():
    model, _ = fit_kmeans(SQUARE, KMeansConfig(k=2, seed=1))
    cents = sorted(map(tuple, model.centroids))
    assert cents == [(0.0, 0.5), (10.0, 0.5)]
    assert model.inertia == pytest.approx(1.0)
    assert brute_force_inertia(SQUARE, 2) == pytest.approx(1.0)


def test_deterministic(rng):
    pts = rng.normal(size=(50, 4))
    a, la = fit_kmeans(pts, KMeansConfig(k=4, seed=9))
    b, lb = fit_kmeans(pts, KMeansConfig(k=4, seed=9))
    assert np.array_equal(a.centroids, b.centroids) and np.array_equal(la, lb)


def test_nearest_cluster_rules():
    model = KMeansModel(np.array([[0.0, 0.0], [2.0, 0.0], [5.0, 5.0]]), 0.0, 0, KMeansConfig(k=3))
    assert nearest_cluster(model, [5.0, 5.0]) == 2
    assert nearest_cluster(model, [1.0, 0.0]) == 0
    model2 = KMeansModel(np.array([[0.0, 0.5], [10.0, 0.5]]), 0.0, 0, KMeansConfig(k=2))
    assert nearest_cluster(model2, [1.0, 0.0]) == 0
    with pytest.raises(ValueError):
        nearest_cluster(model, [1.0])


def test_inertia_monotone_and_assignment(rng):
    for _ in range(25):
        n, d, k = int(rng.integers(10, 60)), int(rng.integers(1, 5)), int(rng.integers(1, 7))
        pts = rng.normal(size=(n, d)) * rng.uniform(0.1, 10)
        model, labels = fit_kmeans(pts, KMeansConfig(k=k, seed=int(rng.integers(1 << 31))))
        hist = np.array(model.inertia_history)
        assert np.all(np.diff(hist) <= 0)
        assert np.array_equal(labels, nearest_clusters(model, pts))


def test_brute_force_small(rng):
    for _ in range(5):
        pts = rng.integers(0, 6, size=(6, 2)).astype(float)
        k = 2
        if len(np.unique(pts, axis=0)) < k:
            continue
        best = min(fit_kmeans(pts, KMeansConfig(k=k, seed=s))[0].inertia for s in range(10))
        assert best == pytest.approx(brute_force_inertia(pts, k), rel=1e-9, abs=1e-12)


def test_errors():
    with pytest.raises(ValueError):
        KMeansConfig(k=0)
    with pytest.raises(ValueError):
        fit_kmeans(SQUARE, KMeansConfig(k=5))
    with pytest.raises(ValueError):
        fit_kmeans(np.zeros((4, 2)), KMeansConfig(k=2))


def test_duplicate_points_split(rng):
    pts = np.repeat(rng.normal(size=(3, 2)), 5, axis=0)
    model, labels = fit_kmeans(pts, KMeansConfig(k=3))
    assert model.inertia == pytest.approx(0.0, abs=1e-20)
    assert len(set(labels)) == 3
