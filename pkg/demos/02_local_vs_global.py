"""One global SVM versus one SVM per player cluster, on one generated seed.

The global model sees every play style at once; the local models each see a
single neighbourhood of behavior. Run with ``python demos/02_local_vs_global.py``.
"""

from botsense.datagen import default_mix, generate
from botsense.features import FeatureSet, extract_player_vectors
from botsense.metrics import render_scores_table, scores
from botsense.pipeline import evaluate, make_folds, rotation_split, select_rotation, train_global, undersample

SEED = 0
vectors = undersample(extract_player_vectors(generate(default_mix(1200, seed=SEED))), SEED)
print(f"{len(vectors)} players after balancing humans and bots")

rows = {}
for fs in (FeatureSet.F17, FeatureSet.F12):
    # rotation 0: folds 1-3 train, fold 4 picks k, fold 0 is the test set
    train, _, test = rotation_split(make_folds(len(vectors), SEED), 0)
    glob = train_global([vectors[i] for i in train], fs, SEED)
    cm, _ = evaluate(glob, [vectors[i] for i in test])
    rows[f"{fs.value} global"] = scores(cm)

    outcome = select_rotation(vectors, fs, SEED, 0)
    cm, _ = evaluate(outcome.model, [vectors[i] for i in test])
    rows[f"{fs.value} local k={outcome.report.chosen_k}"] = scores(cm)

    acc = {k: round(v["accuracy"], 3) for k, v in outcome.report.per_k.items()}
    print(f"{fs.value} validation accuracy by k: {acc}")

print()
print(render_scores_table(rows, "Test fold of rotation 0"))
