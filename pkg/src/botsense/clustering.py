"""k-means and nearest-centroid routing.

Fitting seeds with k-means++ and runs Lloyd iterations. Whenever Lloyd
settles, the single point move that lowers inertia most (a Hartigan step) is
applied and Lloyd resumes; fitting ends when no such move exists. The final
partition is therefore also a nearest-centroid partition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    max_iterations: int = 300
    tolerance: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.tolerance < 0:
            raise ValueError("tolerance must be non-negative")


@dataclass(frozen=True)
class KMeansModel:
    centroids: np.ndarray
    inertia: float
    iterations_run: int
    config: KMeansConfig
    # inertia after every assignment step, for diagnostics
    inertia_history: tuple[float, ...] = field(default=(), compare=False, repr=False)

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    @property
    def dim(self) -> int:
        return self.centroids.shape[1]


def squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """(n, k) matrix of squared Euclidean distances.

    Routing and fitting both go through here so their tie-breaking agrees
    bit for bit.
    """
    diff = points[:, None, :] - centroids[None, :, :]
    return np.square(diff).sum(axis=2)


def _assign(points, centroids):
    d2 = squared_distances(points, centroids)
    labels = np.argmin(d2, axis=1)  # first index wins ties
    return labels, d2[np.arange(len(points)), labels]


def kmeans_plusplus(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    chosen = [int(rng.integers(n))]
    closest = squared_distances(points, points[chosen]).ravel()
    for _ in range(1, k):
        total = closest.sum()
        if total <= 0:
            raise ValueError(f"fewer than k={k} distinct points")
        idx = int(rng.choice(n, p=closest / total))
        chosen.append(idx)
        closest = np.minimum(closest, squared_distances(points, points[[idx]]).ravel())
    return points[chosen].copy()


def _update(points, labels, centroids, k):
    new = np.empty_like(centroids)
    counts = np.bincount(labels, minlength=k)
    for j in range(k):
        if counts[j]:
            new[j] = points[labels == j].mean(axis=0)
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        # reseed each empty cluster on the point worst served by its centroid
        d2 = np.square(points - new[labels]).sum(axis=1)
        for j in empty:
            far = int(np.argmax(d2))
            new[j] = points[far]
            counts[labels[far]] -= 1
            labels = labels.copy()
            labels[far] = j
            counts[j] = 1
            d2[far] = 0.0
    return new


def _best_move(points, labels, centroids, counts):
    """Single point move that lowers inertia the most, or None.

    Moving x from cluster a (size n_a) to b changes inertia by
    n_b/(n_b+1)*|x-c_b|^2 - n_a/(n_a-1)*|x-c_a|^2.
    """
    d2 = squared_distances(points, centroids)
    idx = np.arange(len(points))
    own = counts[labels]
    leave = np.where(own > 1, own / np.maximum(own - 1, 1) * d2[idx, labels], -np.inf)
    join = counts / (counts + 1.0) * d2
    delta = join - leave[:, None]
    delta[idx, labels] = np.inf
    i, j = np.unravel_index(int(np.argmin(delta)), delta.shape)
    if delta[i, j] >= -1e-12 * max(float(leave[i]), 1.0):
        return None
    return int(i), int(j)


def fit_kmeans(points: np.ndarray, cfg: KMeansConfig) -> tuple[KMeansModel, np.ndarray]:
    """Fit ``cfg.k`` centroids to ``points`` and return (model, assignments).

    Deterministic in (points, cfg). The returned assignments are the
    nearest-centroid labels under the final centroids.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise ValueError("points must be a 2-d array")
    n = points.shape[0]
    if n < cfg.k:
        raise ValueError(f"cannot form k={cfg.k} clusters from {n} points")
    if not np.all(np.isfinite(points)):
        raise ValueError("points contain non-finite values")

    rng = np.random.default_rng(cfg.seed)
    centroids = kmeans_plusplus(points, cfg.k, rng)
    history = []
    iterations = 0
    labels, d2 = _assign(points, centroids)
    history.append(float(d2.sum()))
    while iterations < cfg.max_iterations:
        iterations += 1
        new = _update(points, labels, centroids, cfg.k)
        shift = float(np.linalg.norm(new - centroids, axis=1).sum())
        centroids = new
        new_labels, d2 = _assign(points, centroids)
        history.append(float(d2.sum()))
        stable = np.array_equal(new_labels, labels)
        labels = new_labels
        if stable:
            # Lloyd has converged; escape the local optimum with a single move if one helps
            move = _best_move(points, labels, centroids, np.bincount(labels, minlength=cfg.k))
            if move is None:
                break
            # the next update step recomputes both affected means
            labels = labels.copy()
            labels[move[0]] = move[1]
        elif shift <= cfg.tolerance:
            break

    labels, d2 = _assign(points, centroids)
    if float(d2.sum()) != history[-1]:
        history.append(float(d2.sum()))
    model = KMeansModel(centroids, float(d2.sum()), iterations, cfg, tuple(history))
    return model, labels


def nearest_cluster(model: KMeansModel, point) -> int:
    point = np.asarray(point, dtype=float)
    if point.shape != (model.dim,):
        raise ValueError(f"point has shape {point.shape}, model expects ({model.dim},)")
    return int(_assign(point[None, :], model.centroids)[0][0])


def nearest_clusters(model: KMeansModel, points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != model.dim:
        raise ValueError(f"points have shape {points.shape}, model expects (n, {model.dim})")
    return _assign(points, model.centroids)[0]
