"""Per-interval derived features, per-player aggregation and Z-scoring.

Every vector in the package uses the same 17-slot canonical order: the twelve
raw log fields followed by the five derived efficiency features.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .logmodel import LABELS, STYLES, BehaviorSample, LabeledSample

RAW_FEATURES = (
    "hunting",
    "attack",
    "hit",
    "defense",
    "avoidance",
    "recovery",
    "item",
    "collection",
    "drop",
    "x",
    "y",
    "portal",
)
DERIVED_FEATURES = ("combat1", "combat2", "combat3", "collect", "move")
FEATURE_NAMES = RAW_FEATURES + DERIVED_FEATURES
N_FEATURES = len(FEATURE_NAMES)

BATTLE = ("hunting", "attack", "hit", "defense", "avoidance", "recovery")
COLLECT = ("item", "collection", "drop")
MOVE = ("x", "y", "portal")


class FeatureSet(str, enum.Enum):
    F17 = "F17"
    F12 = "F12"
    F5 = "F5"
    FB = "FB"
    FM = "FM"
    FC = "FC"

    @property
    def names(self) -> tuple[str, ...]:
        return _SET_MEMBERS[self]

    @property
    def indices(self) -> np.ndarray:
        return _SET_INDICES[self]

    @property
    def dim(self) -> int:
        return len(_SET_MEMBERS[self])

    @classmethod
    def parse(cls, token: "str | FeatureSet") -> "FeatureSet":
        if isinstance(token, FeatureSet):
            return token
        try:
            return cls(str(token).upper())
        except ValueError:
            raise ValueError(f"unknown feature set {token!r}") from None


def _members(names: Iterable[str]) -> tuple[str, ...]:
    wanted = set(names)
    return tuple(n for n in FEATURE_NAMES if n in wanted)


_SET_MEMBERS = {
    FeatureSet.F17: FEATURE_NAMES,
    FeatureSet.F12: RAW_FEATURES,
    FeatureSet.F5: DERIVED_FEATURES,
    FeatureSet.FB: _members(BATTLE),
    FeatureSet.FM: _members(MOVE),
    FeatureSet.FC: _members(COLLECT),
}
_SET_INDICES = {
    fs: np.array([FEATURE_NAMES.index(n) for n in names], dtype=np.intp)
    for fs, names in _SET_MEMBERS.items()
}


@dataclass(frozen=True)
class IntervalFeatures:
    """Derived features of one sampling interval.

    ``combat3`` and ``move`` are ``None`` on a player's first sample, where
    there is no previous position to measure from.
    """

    combat1: float
    combat2: float
    combat3: float | None
    collect: float
    move: float | None


def _ratio(num: float, den: float) -> float:
    return num / den if den != 0 else 0.0


def derive_interval_features(
    current: BehaviorSample, previous: BehaviorSample | None = None
) -> IntervalFeatures:
    """Compute the five efficiency features for ``current``.

    A ratio with a zero denominator is taken as 0; for ``combat1`` this
    applies to each of its two terms separately.
    """
    combat1 = _ratio(current.hunting, current.attack) + _ratio(current.avoidance, current.defense)
    combat2 = _ratio(current.recovery, current.hunting)
    collect = _ratio(current.collection + current.drop, 2 * current.item)
    if previous is None:
        return IntervalFeatures(combat1, combat2, None, collect, None)
    if previous.timestamp > current.timestamp:
        raise ValueError("previous sample is later than current sample")
    dist = math.hypot(current.x - previous.x, current.y - previous.y)
    return IntervalFeatures(combat1, combat2, _ratio(current.hunting, dist), collect, dist)


@dataclass(frozen=True)
class PlayerVector:
    player_id: str
    values: np.ndarray
    sample_count: int = 1
    label: str | None = None
    style: str | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (N_FEATURES,):
            raise ValueError(f"expected {N_FEATURES} feature values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError(f"non-finite feature value for player {self.player_id!r}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __eq__(self, other):
        if not isinstance(other, PlayerVector):
            return NotImplemented
        return (
            self.player_id == other.player_id
            and np.array_equal(self.values, other.values)
            and self.sample_count == other.sample_count
            and self.label == other.label
            and self.style == other.style
        )

    __hash__ = None

    def __getitem__(self, name: str) -> float:
        return float(self.values[FEATURE_NAMES.index(name)])


def aggregate_player(samples: Sequence[LabeledSample]) -> PlayerVector:
    """Average one player's time-ordered samples into a :class:`PlayerVector`.

    Raw fields are plain means. Derived features are computed per interval
    and then averaged over the intervals where they are defined; a feature
    defined nowhere aggregates to 0.
    """
    if not samples:
        raise ValueError("cannot aggregate an empty sample sequence")
    pid = samples[0].player_id
    if any(s.player_id != pid for s in samples):
        raise ValueError("samples belong to more than one player")

    raw = np.array([[getattr(s.sample, f) for f in RAW_FEATURES] for s in samples], dtype=float)
    sums = dict.fromkeys(DERIVED_FEATURES, 0.0)
    counts = dict.fromkeys(DERIVED_FEATURES, 0)
    prev = None
    for s in samples:
        feats = derive_interval_features(s.sample, prev)
        for name in DERIVED_FEATURES:
            value = getattr(feats, name)
            if value is not None:
                sums[name] += value
                counts[name] += 1
        prev = s.sample
    derived = [sums[n] / counts[n] if counts[n] else 0.0 for n in DERIVED_FEATURES]

    label = next((s.label for s in samples if s.label is not None), None)
    style = next((s.style for s in samples if s.style is not None), None)
    values = np.concatenate([raw.mean(axis=0), derived])
    return PlayerVector(pid, values, len(samples), label, style)


def extract_player_vectors(samples: Iterable[LabeledSample]) -> list[PlayerVector]:
    """Group a log by player and aggregate each player, in first-seen order."""
    from .logmodel import group_by_player

    return [aggregate_player(rows) for rows in group_by_player(samples).values()]


def stack(vectors: Sequence[PlayerVector]) -> np.ndarray:
    if not vectors:
        return np.empty((0, N_FEATURES))
    return np.vstack([v.values for v in vectors])


@dataclass(frozen=True)
class ZScoreScaler:
    means: np.ndarray
    stds: np.ndarray

    def __post_init__(self):
        means = np.asarray(self.means, dtype=float)
        stds = np.asarray(self.stds, dtype=float)
        if means.shape != stds.shape or means.ndim != 1:
            raise ValueError("means and stds must be vectors of equal length")
        if np.any(stds < 0):
            raise ValueError("standard deviations must be non-negative")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "stds", stds)

    def transform(self, matrix: np.ndarray) -> np.ndarray:
        """Z-score the rows of ``matrix``; constant features map to 0."""
        matrix = np.asarray(matrix, dtype=float)
        safe = np.where(self.stds > 0, self.stds, 1.0)
        z = (matrix - self.means) / safe
        return np.where(self.stds > 0, z, 0.0)


def fit_scaler(vectors: Sequence[PlayerVector] | np.ndarray) -> ZScoreScaler:
    """Fit per-feature means and population standard deviations."""
    matrix = vectors if isinstance(vectors, np.ndarray) else stack(vectors)
    if matrix.shape[0] == 0:
        raise ValueError("cannot fit a scaler on zero vectors")
    means = matrix.mean(axis=0)
    stds = matrix.std(axis=0)  # ddof=0
    return ZScoreScaler(means, stds)


def standardize(scaler: ZScoreScaler, v: PlayerVector) -> PlayerVector:
    return replace(v, values=scaler.transform(v.values))


def project(v: PlayerVector | np.ndarray, fs: FeatureSet | str) -> np.ndarray:
    """Restrict a canonical vector (or matrix of row vectors) to a feature set."""
    fs = FeatureSet.parse(fs)
    values = v.values if isinstance(v, PlayerVector) else np.asarray(v, dtype=float)
    return values[..., fs.indices]


VECTOR_COLUMNS = ("player_id", *FEATURE_NAMES, "sample_count", "label", "style")


def vectors_to_csv(vectors: Iterable[PlayerVector]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(VECTOR_COLUMNS)
    for v in vectors:
        writer.writerow(
            [v.player_id, *(repr(float(x)) for x in v.values), v.sample_count, v.label or "", v.style or ""]
        )
    return buf.getvalue()


def vectors_from_csv(text: str) -> list[PlayerVector]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        return []
    if tuple(header) != VECTOR_COLUMNS:
        raise ValueError("bad player-vector header")
    out = []
    for row in reader:
        if not row:
            continue
        if len(row) != len(VECTOR_COLUMNS):
            raise ValueError(f"line {reader.line_num}: expected {len(VECTOR_COLUMNS)} fields")
        label = row[-2] or None
        style = row[-1] or None
        if label is not None and label not in LABELS:
            raise ValueError(f"line {reader.line_num}: unknown label {label!r}")
        if style is not None and style not in STYLES:
            raise ValueError(f"line {reader.line_num}: unknown style {style!r}")
        values = np.array([float(x) for x in row[1 : 1 + N_FEATURES]])
        out.append(PlayerVector(row[0], values, int(row[1 + N_FEATURES]), label, style))
    return out
