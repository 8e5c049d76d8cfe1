"""Feature-set x method grid on generated data, with per-style breakdowns.

Each grid cell (seed, feature set, method) is computed once and stored as
``<out_dir>/seed-<seed>/<FS>-<method>.json``; reruns reuse stored cells.
Tables are rendered only from those stored artifacts.
"""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ._rng import derive_seed
from .datagen import GeneratorConfig, default_mix, generate
from .features import FeatureSet, PlayerVector, extract_player_vectors, vectors_from_csv, vectors_to_csv
from .metrics import (
    DEV_STYLES,
    METRIC_NAMES,
    ConfusionMatrix,
    composition,
    confusion,
    dump_json,
    render_composition,
    render_scores_table,
    render_style_table,
    scores,
    style_report,
)
from .pipeline import evaluate, make_folds, rotation_split, select_rotation, train_global, undersample, N_FOLDS

log = logging.getLogger(__name__)

METHODS = ("baseline", "proposed")
FEATURE_SETS = tuple(FeatureSet)
DEFAULT_PLAYERS = 2000
_BASELINE = 100


def thread_cap() -> int:
    """Worker count from ``BOTSENSE_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("BOTSENSE_THREADS", "1")))
    except ValueError:
        return 1


def seed_dir(out_dir, seed: int) -> Path:
    return Path(out_dir) / f"seed-{seed}"


def cell_path(out_dir, seed: int, fs: FeatureSet, method: str) -> Path:
    return seed_dir(out_dir, seed) / f"{fs.value}-{method}.json"


def prepare_players(out_dir, seed: int, players: int = DEFAULT_PLAYERS, cfg: GeneratorConfig | None = None):
    """Generate, aggregate and undersample one seed's players (cached as CSV)."""
    path = seed_dir(out_dir, seed) / "players.csv"
    if path.exists():
        return vectors_from_csv(path.read_text(encoding="utf-8"))
    if cfg is None:
        cfg = default_mix(players, seed=seed)
    else:
        cfg = GeneratorConfig(seed, dict(cfg.players_per_cell), cfg.interval_seconds, cfg.profiles, cfg.session)
    vectors = undersample(extract_player_vectors(generate(cfg)), seed)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(vectors_to_csv(vectors), encoding="utf-8")
    return vectors


def run_cell(vectors: Sequence[PlayerVector], seed: int, fs: FeatureSet, method: str) -> dict:
    """Cross-validated test results of one method on one feature set.

    Both methods see the same five test folds and the same three training
    folds per rotation; the proposed method additionally uses the validation
    fold to pick k.
    """
    labels = [v.label for v in vectors]
    folds = make_folds(len(vectors), seed)
    rotations, predictions = [], []
    composition_pairs: list = []
    total = ConfusionMatrix()
    for r in range(N_FOLDS):
        if method == "baseline":
            train, _, test = rotation_split(folds, r)
            model = train_global([vectors[i] for i in train], fs, derive_seed(seed, _BASELINE, r))
            cm, routing = evaluate(model, [vectors[i] for i in test])
            chosen_k = 1
        else:
            outcome = select_rotation(vectors, fs, seed, r)
            model, test, routing = outcome.model, outcome.test_index, outcome.test_routing
            cm = confusion(zip(routing.predicted, [labels[i] for i in test]))
            chosen_k = outcome.report.chosen_k
        total = total + cm
        rotations.append({"rotation": r, "chosen_k": chosen_k, "confusion": cm.__dict__, "scores": scores(cm)})
        for i, pred, cl in zip(test, routing.predicted, routing.clusters):
            v = vectors[i]
            predictions.append([v.player_id, str(pred), v.label, v.style, r, int(cl)])
        if r == 0:
            full = evaluate(model, vectors)[1]
            composition_pairs = [(v.style, int(c)) for v, c in zip(vectors, full.clusters)]
            n_clusters = model.k

    mean = {m: float(np.mean([rot["scores"][m] for rot in rotations])) for m in METRIC_NAMES}
    pooled_styles = style_report((p[1], p[2], p[3]) for p in predictions)
    comps = composition(composition_pairs, n_clusters)
    return {
        "seed": seed,
        "feature_set": fs.value,
        "method": method,
        "rotations": rotations,
        "mean": mean,
        "pooled_confusion": total.__dict__,
        "pooled": scores(total),
        "styles": {
            "per_style_accuracy": pooled_styles.per_style_accuracy,
            "per_style_count": pooled_styles.per_style_count,
            "dev": pooled_styles.dev,
            "dev_complete": pooled_styles.dev_complete,
        },
        "composition": [
            {"cluster": c.cluster, "counts": c.counts, "ratios": c.ratios, "empty": c.empty} for c in comps
        ],
        "predictions": predictions,
    }


def _run_seed(args):
    out_dir, seed, players, feature_sets = args
    pending = [
        (fs, m) for fs in feature_sets for m in METHODS if not cell_path(out_dir, seed, fs, m).exists()
    ]
    if not pending:
        return seed
    vectors = prepare_players(out_dir, seed, players)
    for fs, method in pending:
        log.info("seed %d: %s %s", seed, fs.value, method)
        result = run_cell(vectors, seed, fs, method)
        dump_json(result, cell_path(out_dir, seed, fs, method))
    return seed


def run_grid(
    out_dir,
    seeds: Iterable[int] = range(5),
    players: int = DEFAULT_PLAYERS,
    feature_sets: Sequence[FeatureSet] = FEATURE_SETS,
    workers: int | None = None,
) -> dict:
    """Run (or resume) the grid and write ``grid.json`` / ``grid.txt``."""
    seeds = list(seeds)
    if len(seeds) < 3:
        raise ValueError("the grid needs at least three seeds")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    feature_sets = [FeatureSet.parse(fs) for fs in feature_sets]
    jobs = [(out_dir, s, players, feature_sets) for s in seeds]
    workers = workers or thread_cap()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            list(pool.map(_run_seed, jobs))
    else:
        for job in jobs:
            _run_seed(job)
    report = grid_report(out_dir, seeds, feature_sets)
    dump_json(report, out_dir / "grid.json")
    (out_dir / "grid.txt").write_text(render_grid(report), encoding="utf-8")
    return report


def load_cell(out_dir, seed: int, fs: FeatureSet, method: str) -> dict:
    with open(cell_path(out_dir, seed, fs, method), encoding="utf-8") as fh:
        return json.load(fh)


def grid_report(out_dir, seeds: Sequence[int], feature_sets: Sequence[FeatureSet] = FEATURE_SETS) -> dict:
    """Aggregate stored cells: per method and feature set, mean/std over seeds."""
    tables = {}
    for method in METHODS:
        rows = {}
        for fs in feature_sets:
            per_seed = {str(s): load_cell(out_dir, s, fs, method)["mean"] for s in seeds}
            values = {m: [per_seed[str(s)][m] for s in seeds] for m in METRIC_NAMES}
            rows[fs.value] = {
                "per_seed": per_seed,
                "mean": {m: float(np.mean(v)) for m, v in values.items()},
                "std": {m: float(np.std(v)) for m, v in values.items()},
            }
        tables[method] = rows
    return {"seeds": list(seeds), "feature_sets": [fs.value for fs in feature_sets], "tables": tables}


def render_grid(report: dict) -> str:
    parts = []
    titles = {"baseline": "Global SVM baseline", "proposed": "Local SVM per cluster (k chosen in 4..14)"}
    for method in METHODS:
        rows = {fs: r["mean"] for fs, r in report["tables"][method].items()}
        parts.append(render_scores_table(rows, f"{titles[method]}, mean over seeds {report['seeds']}"))
        std = {fs: r["std"] for fs, r in report["tables"][method].items()}
        parts.append(render_scores_table(std, "std over seeds"))
    return "\n".join(parts)


def run_style_breakdown(in_dir, seeds: Sequence[int] | None = None) -> dict:
    """Per-style accuracy and Dev tables from stored grid cells."""
    in_dir = Path(in_dir)
    if seeds is None:
        with open(in_dir / "grid.json", encoding="utf-8") as fh:
            grid = json.load(fh)
        seeds = grid["seeds"]
        feature_sets = [FeatureSet.parse(f) for f in grid["feature_sets"]]
    else:
        feature_sets = list(FEATURE_SETS)
    tables = {}
    for method in METHODS:
        rows = {}
        for fs in feature_sets:
            cells = [load_cell(in_dir, s, fs, method) for s in seeds]
            for cell in cells:
                if any(p[3] is None for p in cell["predictions"]):
                    raise ValueError(f"seed {cell['seed']}: players without style labels")
            styles = sorted({st for c in cells for st in c["styles"]["per_style_accuracy"]})
            acc = {
                st: float(np.mean([c["styles"]["per_style_accuracy"][st] for c in cells
                                   if st in c["styles"]["per_style_accuracy"]]))
                for st in styles
            }
            devs = [c["styles"]["dev"] for c in cells]
            rows[fs.value] = {
                "per_style_accuracy": acc,
                "dev": float(np.mean(devs)),
                "dev_per_seed": {str(c["seed"]): c["styles"]["dev"] for c in cells},
                "dev_complete": all(c["styles"]["dev_complete"] for c in cells),
                "composition": {str(c["seed"]): c["composition"] for c in cells},
            }
        tables[method] = rows
    report = {
        "seeds": list(seeds),
        "dev_styles": list(DEV_STYLES),
        "tables": tables,
        "mean_dev": {m: float(np.mean([r["dev"] for r in tables[m].values()])) for m in METHODS},
    }
    dump_json(report, in_dir / "styles.json")
    (in_dir / "styles.txt").write_text(render_styles(report), encoding="utf-8")
    return report


def render_styles(report: dict) -> str:
    parts = []
    for method in METHODS:
        rows = report["tables"][method]
        parts.append(render_style_table(rows, f"Accuracy by play style, {method}, mean over seeds"))
    for method in METHODS:
        first = str(report["seeds"][0])
        for fs, row in report["tables"][method].items():
            parts.append(f"Cluster composition, {method} {fs}, seed {first}")
            parts.append(render_composition(row["composition"][first]))
    parts.append(
        "mean Dev: " + ", ".join(f"{m} {100 * v:.2f}" for m, v in report["mean_dev"].items())
    )
    return "\n".join(parts) + "\n"
