"""Local-model bot detector: scaler, k-means grouping and one SVM per group.

``train_ensemble`` builds the deployable model, ``train_global`` is the
single-SVM baseline (the one-cluster special case), ``classify`` routes a
player to its nearest centroid and asks that cluster's SVM, and ``select_k``
runs the five-fold search over the number of clusters.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from ._rng import derive_seed
from .clustering import KMeansConfig, KMeansModel, fit_kmeans, nearest_clusters
from .features import FEATURE_NAMES, FeatureSet, PlayerVector, ZScoreScaler, fit_scaler, stack
from .metrics import confusion, scores
from .svm import BOT, HUMAN, SvmConfig, SvmModel, decision_values, predict_many, train_svm

log = logging.getLogger(__name__)

FORMAT_NAME = "botsense-ensemble"
FORMAT_VERSION = "1"
K_RANGE = tuple(range(4, 15))
N_FOLDS = 5
MIN_PER_CLASS = 2

# seed-derivation tags
_KMEANS, _SVM, _UNDERSAMPLE, _FOLDS, _SELECT = range(5)


class DegenerateDataError(ValueError):
    """Training data lacks one of the two classes where both are required."""


@dataclass(frozen=True)
class EnsembleModel:
    feature_set: FeatureSet
    scaler: ZScoreScaler
    kmeans: KMeansModel
    cluster_models: tuple[SvmModel, ...]
    training_seed: int
    version: str = FORMAT_VERSION

    def __post_init__(self):
        if len(self.cluster_models) != self.kmeans.k:
            raise ValueError("need exactly one SVM per cluster")
        for m in self.cluster_models:
            if m.dim != self.feature_set.dim:
                raise ValueError("SVM dimension does not match the feature set")

    @property
    def k(self) -> int:
        return self.kmeans.k

    def transform(self, vectors: Sequence[PlayerVector] | np.ndarray) -> np.ndarray:
        """Standardize canonical vectors and project them to the model's features."""
        matrix = vectors if isinstance(vectors, np.ndarray) else stack(vectors)
        return self.scaler.transform(matrix)[:, self.feature_set.indices]


def _labels(vectors: Sequence[PlayerVector]) -> np.ndarray:
    labels = np.array([v.label for v in vectors], dtype=object)
    if any(lab not in (BOT, HUMAN) for lab in labels):
        raise ValueError("training vectors must all carry a human/bot label")
    return labels


def undersample(vectors: Sequence[PlayerVector], seed: int) -> list[PlayerVector]:
    """Balance classes 1:1 by dropping random majority-class players.

    The kept players stay in their input order.
    """
    labels = _labels(vectors)
    bots = np.flatnonzero(labels == BOT)
    humans = np.flatnonzero(labels == HUMAN)
    if len(bots) == 0 or len(humans) == 0:
        raise DegenerateDataError("undersampling needs both human and bot players")
    minority, majority = (bots, humans) if len(bots) <= len(humans) else (humans, bots)
    rng = np.random.default_rng(derive_seed(seed, _UNDERSAMPLE))
    kept = rng.choice(majority, size=len(minority), replace=False)
    keep = np.sort(np.concatenate([minority, kept]))
    return [vectors[i] for i in keep]


def _train_cluster(xs, labels, seed, svm_config: SvmConfig | None) -> SvmModel:
    n_bot = int(np.sum(labels == BOT))
    n_human = len(labels) - n_bot
    cfg = replace(svm_config or SvmConfig(), seed=seed)
    if n_bot < MIN_PER_CLASS or n_human < MIN_PER_CLASS:
        majority = BOT if n_bot >= n_human else HUMAN
        return SvmModel.constant(majority, xs.shape[1], cfg)
    return train_svm(xs, np.where(labels == BOT, 1.0, -1.0), cfg)


def train_ensemble(
    vectors: Sequence[PlayerVector],
    fs: FeatureSet | str,
    k: int,
    seed: int,
    svm_config: SvmConfig | None = None,
) -> EnsembleModel:
    """Fit scaler, k-means and one SVM per cluster on labeled vectors.

    A cluster with fewer than two players of either class gets a constant
    classifier voting its majority label (ties go to bot).
    """
    fs = FeatureSet.parse(fs)
    if len(vectors) < k:
        raise ValueError(f"cannot build k={k} clusters from {len(vectors)} players")
    labels = _labels(vectors)
    matrix = stack(vectors)
    scaler = fit_scaler(matrix)
    points = scaler.transform(matrix)[:, fs.indices]
    km, assign = fit_kmeans(points, KMeansConfig(k=k, seed=derive_seed(seed, _KMEANS)))
    models = []
    for j in range(k):
        members = assign == j
        models.append(_train_cluster(points[members], labels[members], derive_seed(seed, _SVM, j), svm_config))
    return EnsembleModel(fs, scaler, km, tuple(models), int(seed))


def train_global(
    vectors: Sequence[PlayerVector], fs: FeatureSet | str, seed: int, svm_config: SvmConfig | None = None
) -> EnsembleModel:
    return train_ensemble(vectors, fs, 1, seed, svm_config)


@dataclass
class Routing:
    predicted: np.ndarray  # object array of "bot"/"human"
    clusters: np.ndarray
    decision: np.ndarray  # NaN where the cluster model is a constant fallback


def route(model: EnsembleModel, vectors: Sequence[PlayerVector] | np.ndarray) -> Routing:
    points = model.transform(vectors)
    clusters = nearest_clusters(model.kmeans, points)
    predicted = np.empty(len(points), dtype=object)
    decision = np.full(len(points), np.nan)
    for j in np.unique(clusters):
        rows = clusters == j
        svm = model.cluster_models[j]
        predicted[rows] = predict_many(svm, points[rows])
        if svm.fallback is None:
            decision[rows] = decision_values(svm, points[rows])
    return Routing(predicted, clusters, decision)


def classify(model: EnsembleModel, v: PlayerVector) -> str:
    return str(route(model, [v]).predicted[0])


def evaluate(model: EnsembleModel, vectors: Sequence[PlayerVector]):
    """Confusion matrix of ``model`` on labeled vectors, plus the routing."""
    labels = _labels(vectors)
    routing = route(model, vectors)
    return confusion(zip(routing.predicted, labels)), routing


# -- model selection ---------------------------------------------------------


def make_folds(n: int, seed: int, n_folds: int = N_FOLDS) -> list[np.ndarray]:
    """Shuffle ``range(n)`` and cut it into folds whose sizes differ by <= 1."""
    perm = np.random.default_rng(derive_seed(seed, _FOLDS)).permutation(n)
    return [np.sort(f) for f in np.array_split(perm, n_folds)]


def rotation_split(folds: Sequence[np.ndarray], rotation: int):
    """(train, validation, test) index arrays for one test-fold rotation.

    The validation fold is the last of the four building folds.
    """
    building = [f for i, f in enumerate(folds) if i != rotation]
    train = np.sort(np.concatenate(building[:-1]))
    return train, building[-1], folds[rotation]


@dataclass
class SelectionReport:
    per_k: dict[int, dict[str, float]]
    chosen_k: int
    fold_layout: dict
    rotation: int = 0
    test_scores: dict[str, float] = field(default_factory=dict)
    # every rotation's report, filled on the deployed (first) rotation
    rotations: list["SelectionReport"] = field(default_factory=list, repr=False)

    def _summary(self) -> dict:
        return {
            "rotation": self.rotation,
            "per_k": {str(k): v for k, v in self.per_k.items()},
            "chosen_k": self.chosen_k,
            "test_scores": self.test_scores,
        }

    def to_dict(self) -> dict:
        out = {**self._summary(), "fold_layout": self.fold_layout}
        if self.rotations:
            out["rotations"] = [r._summary() for r in self.rotations]
        return out


@dataclass
class RotationOutcome:
    model: EnsembleModel
    report: SelectionReport
    test_index: np.ndarray
    test_routing: Routing


def _check_classes(labels, what: str):
    if len(set(labels)) < 2:
        raise DegenerateDataError(f"{what} fold is single-class after splitting; try a different seed")


def select_rotation(
    vectors: Sequence[PlayerVector],
    fs: FeatureSet | str,
    seed: int,
    rotation: int,
    k_values: Sequence[int] = K_RANGE,
    svm_config: SvmConfig | None = None,
) -> RotationOutcome:
    """Pick k on the validation fold of one rotation and score it on the test fold."""
    fs = FeatureSet.parse(fs)
    labels = _labels(vectors)
    folds = make_folds(len(vectors), seed)
    train, val, test = rotation_split(folds, rotation)
    for idx, name in ((train, "training"), (val, "validation"), (test, "test")):
        _check_classes(labels[idx], name)
    train_vecs = [vectors[i] for i in train]
    val_vecs = [vectors[i] for i in val]

    per_k, models = {}, {}
    for k in k_values:
        model = train_ensemble(train_vecs, fs, k, derive_seed(seed, _SELECT, rotation, k), svm_config)
        cm, _ = evaluate(model, val_vecs)
        per_k[k] = scores(cm)
        models[k] = model
        log.debug("rotation %d k=%d validation accuracy %.4f", rotation, k, per_k[k]["accuracy"])
    best = max(per_k[k]["accuracy"] for k in per_k)
    chosen = min(k for k in per_k if per_k[k]["accuracy"] == best)
    model = models[chosen]
    test_vecs = [vectors[i] for i in test]
    cm, routing = evaluate(model, test_vecs)
    ids = [v.player_id for v in vectors]
    layout = {
        "folds": [[ids[i] for i in f] for f in folds],
        "test": rotation,
        "validation": [i for i in range(len(folds)) if i != rotation][-1],
        "train": [i for i in range(len(folds)) if i != rotation][:-1],
    }
    report = SelectionReport(per_k, chosen, layout, rotation, scores(cm))
    return RotationOutcome(model, report, test, routing)


def select_k(
    vectors: Sequence[PlayerVector],
    fs: FeatureSet | str,
    seed: int,
    k_values: Sequence[int] = K_RANGE,
    svm_config: SvmConfig | None = None,
    rotations: Sequence[int] | None = None,
):
    """Five-fold search over k.

    Returns ``(model, report, test_metrics)``: the model and selection report
    of the first rotation, and test scores per rotation and averaged.
    """
    if len(vectors) < N_FOLDS * 2:
        raise ValueError("too few players for five-fold model selection")
    rotations = range(N_FOLDS) if rotations is None else rotations
    outcomes = [select_rotation(vectors, fs, seed, r, k_values, svm_config) for r in rotations]
    per_rotation = [o.report.test_scores for o in outcomes]
    mean = {m: float(np.mean([s[m] for s in per_rotation])) for m in per_rotation[0]}
    test_metrics = {
        "per_rotation": per_rotation,
        "mean": mean,
        "chosen_k": [o.report.chosen_k for o in outcomes],
    }
    first = outcomes[0]
    first.report.rotations = [o.report for o in outcomes]
    return first.model, first.report, test_metrics


# -- persistence -------------------------------------------------------------

_TOP_KEYS = {
    "format",
    "version",
    "feature_set",
    "feature_names",
    "scaler",
    "k",
    "centroids",
    "inertia",
    "training_seed",
    "clusters",
}
_CLUSTER_KEYS = {"kernel", "gamma", "c", "bias", "support_vectors", "dual_coefs", "fallback"}


def model_to_dict(model: EnsembleModel) -> dict:
    clusters = []
    for m in model.cluster_models:
        clusters.append(
            {
                "kernel": m.config.kernel,
                "gamma": float(m.gamma),
                "c": float(m.config.c),
                "bias": float(m.bias),
                "support_vectors": m.support_vectors.tolist(),
                "dual_coefs": m.dual_coefs.tolist(),
                "fallback": m.fallback,
            }
        )
    return {
        "format": FORMAT_NAME,
        "version": model.version,
        "feature_set": model.feature_set.value,
        "feature_names": list(FEATURE_NAMES),
        "scaler": {"means": model.scaler.means.tolist(), "stds": model.scaler.stds.tolist()},
        "k": model.k,
        "centroids": model.kmeans.centroids.tolist(),
        "inertia": float(model.kmeans.inertia),
        "training_seed": model.training_seed,
        "clusters": clusters,
    }


def _reject_unknown(obj: dict, allowed: set, where: str):
    if not isinstance(obj, dict):
        raise ValueError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    missing = allowed - set(obj)
    if unknown:
        raise ValueError(f"{where}: unknown field {sorted(unknown)[0]!r}")
    if missing:
        raise ValueError(f"{where}: missing field {sorted(missing)[0]!r}")


def model_from_dict(doc: dict) -> EnsembleModel:
    _reject_unknown(doc, _TOP_KEYS, "model")
    if doc["format"] != FORMAT_NAME:
        raise ValueError(f"not a {FORMAT_NAME} document")
    if doc["version"] != FORMAT_VERSION:
        raise ValueError(f"unsupported model version {doc['version']!r}")
    if list(doc["feature_names"]) != list(FEATURE_NAMES):
        raise ValueError("feature name list does not match this toolkit")
    _reject_unknown(doc["scaler"], {"means", "stds"}, "scaler")
    fs = FeatureSet.parse(doc["feature_set"])
    scaler = ZScoreScaler(np.array(doc["scaler"]["means"], float), np.array(doc["scaler"]["stds"], float))
    centroids = np.array(doc["centroids"], dtype=float).reshape(int(doc["k"]), fs.dim)
    km = KMeansModel(centroids, float(doc["inertia"]), 0, KMeansConfig(k=int(doc["k"])))
    models = []
    for i, c in enumerate(doc["clusters"]):
        _reject_unknown(c, _CLUSTER_KEYS, f"clusters[{i}]")
        cfg = SvmConfig(c=float(c["c"]), kernel=c["kernel"], gamma=float(c["gamma"]))
        if c["fallback"] is not None:
            models.append(SvmModel.constant(c["fallback"], fs.dim, cfg))
            continue
        sv = np.array(c["support_vectors"], dtype=float).reshape(-1, fs.dim)
        models.append(SvmModel(sv, np.array(c["dual_coefs"], float), float(c["bias"]), cfg, float(c["gamma"])))
    return EnsembleModel(fs, scaler, km, tuple(models), int(doc["training_seed"]), doc["version"])


def dumps_model(model: EnsembleModel) -> str:
    return json.dumps(model_to_dict(model), sort_keys=True) + "\n"


def save_model(model: EnsembleModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_model(model))


def load_model(path) -> EnsembleModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
