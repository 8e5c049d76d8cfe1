"""Play-style aware game bot detection.

Behavior logs are aggregated into per-player feature vectors, players are
clustered with k-means, and one SVM per cluster separates humans from bots.
"""

__version__ = "0.1.0"

from .logmodel import BehaviorSample, LabeledSample, LogFormatError, parse_log, read_log, serialize_log, write_log
from .features import FeatureSet, PlayerVector, ZScoreScaler, derive_interval_features, extract_player_vectors, fit_scaler
from .clustering import KMeansConfig, KMeansModel, fit_kmeans, nearest_cluster
from .svm import SvmConfig, SvmModel, decision_value, predict, train_svm
from .metrics import ConfusionMatrix, confusion, scores, style_report
from .pipeline import (
    EnsembleModel,
    SelectionReport,
    classify,
    evaluate,
    load_model,
    save_model,
    select_k,
    train_ensemble,
    train_global,
    undersample,
)
from .datagen import GeneratorConfig, default_mix, generate

__all__ = [
    "BehaviorSample", "LabeledSample", "LogFormatError", "parse_log", "read_log", "serialize_log", "write_log",
    "FeatureSet", "PlayerVector", "ZScoreScaler", "derive_interval_features", "extract_player_vectors",
    "fit_scaler", "KMeansConfig", "KMeansModel", "fit_kmeans", "nearest_cluster", "SvmConfig", "SvmModel",
    "decision_value", "predict", "train_svm", "ConfusionMatrix", "confusion", "scores", "style_report",
    "EnsembleModel", "SelectionReport", "classify", "evaluate", "load_model", "save_model", "select_k",
    "train_ensemble", "train_global", "undersample", "GeneratorConfig", "default_mix", "generate",
]
