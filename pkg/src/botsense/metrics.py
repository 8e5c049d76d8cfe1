"""Detection metrics, per-style accuracy and cluster composition reports."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping

from .logmodel import LABELS, STYLES

DEV_STYLES = ("Killer", "Achiever", "Remainder")
TYPED_STYLES = ("Killer", "Achiever", "Explorer")
METRIC_NAMES = ("accuracy", "precision", "recall", "f1")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            self.tp + other.tp, self.tn + other.tn, self.fp + other.fp, self.fn + other.fn
        )


def confusion(pairs: Iterable[tuple[str, str]]) -> ConfusionMatrix:
    """Count (predicted, actual) pairs with bot as the positive class."""
    tp = tn = fp = fn = 0
    for predicted, actual in pairs:
        if predicted not in LABELS or actual not in LABELS:
            raise ValueError(f"labels must be human or bot, got ({predicted!r}, {actual!r})")
        if predicted == "bot":
            if actual == "bot":
                tp += 1
            else:
                fp += 1
        elif actual == "bot":
            fn += 1
        else:
            tn += 1
    return ConfusionMatrix(tp, tn, fp, fn)


def _div(num: float, den: float) -> float:
    return num / den if den else 0.0


def scores(cm: ConfusionMatrix) -> dict[str, float]:
    """Accuracy, precision, recall and F1; every 0/0 is reported as 0."""
    precision = _div(cm.tp, cm.tp + cm.fp)
    recall = _div(cm.tp, cm.tp + cm.fn)
    return {
        "accuracy": _div(cm.tp + cm.tn, cm.total),
        "precision": precision,
        "recall": recall,
        # harmonic mean of precision and recall, as one correctly rounded division
        "f1": _div(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn),
    }


def population_std(values) -> float:
    values = list(values)
    if not values:
        return 0.0
    mean = sum(values) / len(values)
    return math.sqrt(sum((v - mean) ** 2 for v in values) / len(values))


@dataclass
class ClusterComposition:
    cluster: int
    counts: dict[str, int]
    ratios: dict[str, float] | None  # None when the cluster has no typed members

    @property
    def empty(self) -> bool:
        return self.ratios is None


@dataclass
class StyleReport:
    per_style_accuracy: dict[str, float]
    per_style_count: dict[str, int]
    dev: float
    dev_complete: bool
    per_cluster_composition: list[ClusterComposition] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "per_style_accuracy": dict(self.per_style_accuracy),
            "per_style_count": dict(self.per_style_count),
            "dev": self.dev,
            "dev_complete": self.dev_complete,
            "per_cluster_composition": [
                {
                    "cluster": c.cluster,
                    "counts": dict(c.counts),
                    "ratios": None if c.ratios is None else dict(c.ratios),
                    "empty": c.empty,
                }
                for c in self.per_cluster_composition
            ],
        }


def composition(cluster_assignments: Iterable[tuple[str, int]], n_clusters: int | None = None):
    counts: dict[int, dict[str, int]] = {}
    for style, cluster in cluster_assignments:
        counts.setdefault(int(cluster), dict.fromkeys(STYLES, 0))
        if style is not None:
            counts[int(cluster)][style] += 1
    if n_clusters is not None:
        for j in range(n_clusters):
            counts.setdefault(j, dict.fromkeys(STYLES, 0))
    out = []
    for j in sorted(counts):
        typed = sum(counts[j][s] for s in TYPED_STYLES)
        ratios = {s: counts[j][s] / typed for s in TYPED_STYLES} if typed else None
        out.append(ClusterComposition(j, counts[j], ratios))
    return out


def style_report(
    predictions: Iterable[tuple[str, str, str]],
    cluster_assignments: Iterable[tuple[str, int]] = (),
    n_clusters: int | None = None,
) -> StyleReport:
    """Per-style accuracy, the Dev statistic and per-cluster style ratios.

    ``predictions`` are (predicted, actual, style) triples. Dev is the
    population standard deviation of the Killer, Achiever and Remainder
    accuracies; styles without members are left out of both the accuracy map
    and Dev, and ``dev_complete`` turns False.
    """
    hits = dict.fromkeys(STYLES, 0)
    totals = dict.fromkeys(STYLES, 0)
    for predicted, actual, style in predictions:
        if style is None:
            continue
        totals[style] += 1
        hits[style] += predicted == actual
    acc = {s: hits[s] / totals[s] for s in STYLES if totals[s]}
    dev_values = [acc[s] for s in DEV_STYLES if s in acc]
    return StyleReport(
        per_style_accuracy=acc,
        per_style_count=totals,
        dev=population_std(dev_values),
        dev_complete=len(dev_values) == len(DEV_STYLES),
        per_cluster_composition=composition(cluster_assignments, n_clusters),
    )


def percent(value: float) -> str:
    return f"{100.0 * value:6.2f}"


def render_scores_table(rows: Mapping[str, Mapping[str, float]], title: str = "") -> str:
    """Aligned text table, one row per key, metrics shown in percent."""
    width = max([len("Feature")] + [len(k) for k in rows])
    lines = [title] if title else []
    lines.append(f"{'Feature':<{width}}  " + "  ".join(f"{m.capitalize():>9}" for m in METRIC_NAMES))
    for key, s in rows.items():
        lines.append(f"{key:<{width}}  " + "  ".join(f"{percent(s[m]):>9}" for m in METRIC_NAMES))
    return "\n".join(lines) + "\n"


def render_style_table(rows: Mapping[str, StyleReport | Mapping], title: str = "") -> str:
    width = max([len("Feature")] + [len(k) for k in rows])
    lines = [title] if title else []
    lines.append(f"{'Feature':<{width}}  " + "  ".join(f"{s:>9}" for s in STYLES) + f"  {'Dev.':>6}")
    for key, rep in rows.items():
        if isinstance(rep, StyleReport):
            rep = rep.to_dict()
        acc = rep["per_style_accuracy"]
        cells = [f"{percent(acc[s]):>9}" if s in acc else f"{'-':>9}" for s in STYLES]
        lines.append(f"{key:<{width}}  " + "  ".join(cells) + f"  {100 * rep['dev']:6.2f}")
    return "\n".join(lines) + "\n"


def render_composition(comps: Iterable[ClusterComposition | Mapping]) -> str:
    lines = [f"{'Cluster':>7}  " + "  ".join(f"{s:>9}" for s in TYPED_STYLES) + f"  {'Typed':>6}"]
    for c in comps:
        if isinstance(c, ClusterComposition):
            c = {"cluster": c.cluster, "counts": c.counts, "ratios": c.ratios}
        typed = sum(c["counts"][s] for s in TYPED_STYLES)
        if c["ratios"] is None:
            cells = [f"{'-':>9}"] * len(TYPED_STYLES)
        else:
            cells = [f"{percent(c['ratios'][s]):>9}" for s in TYPED_STYLES]
        lines.append(f"{'k' + str(c['cluster'] + 1):>7}  " + "  ".join(cells) + f"  {typed:>6}")
    return "\n".join(lines) + "\n"


def evaluation_report(
    cm: ConfusionMatrix, style: StyleReport | None = None, extra: Mapping | None = None
) -> dict:
    """Machine-readable evaluation record (see ``data/report.schema.json``)."""
    report = {
        "confusion": asdict(cm),
        "scores": scores(cm),
        "styles": style.to_dict() if style is not None else None,
    }
    if extra:
        report.update(extra)
    return report


def render_evaluation(report: Mapping) -> str:
    cm = report["confusion"]
    lines = [
        f"players evaluated: {sum(cm.values())}",
        f"TP {cm['tp']}  TN {cm['tn']}  FP {cm['fp']}  FN {cm['fn']}",
        "",
        render_scores_table({"model": report["scores"]}),
    ]
    if report.get("styles"):
        lines.append(render_style_table({"model": report["styles"]}, "Accuracy by play style"))
        lines.append("Play-style composition per cluster (Remainder excluded)")
        lines.append(render_composition(report["styles"]["per_cluster_composition"]))
    return "\n".join(lines)


def dump_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
