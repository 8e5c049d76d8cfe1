"""Generate a small labeled log and look at the per-player features.

Run with ``python demos/01_behavior_features.py``.
"""

import numpy as np

from botsense.datagen import default_mix, generate
from botsense.features import FEATURE_NAMES, derive_interval_features, extract_player_vectors

# A few hundred players split over the eight (style, human/bot) cells.
cfg = default_mix(400, seed=1)
print("players per cell:")
for (style, is_bot), n in cfg.players_per_cell.items():
    print(f"  {style:<9} {'bot' if is_bot else 'human':<5} {n}")

log = generate(cfg)
print(f"\n{len(log)} five-minute samples")

# Derived features of one interval, computed against the previous sample.
first, second = log[0], log[1]
print("\nsecond interval of", first.player_id, derive_interval_features(second.sample, first.sample))

# Each player becomes one 17-value vector of means.
vectors = extract_player_vectors(log)
matrix = np.array([v.values for v in vectors])
labels = np.array([v.label for v in vectors])
styles = np.array([v.style for v in vectors])

print(f"\n{'feature':<11} {'human':>9} {'bot':>9}")
for i, name in enumerate(FEATURE_NAMES):
    print(f"{name:<11} {matrix[labels == 'human', i].mean():9.3f} {matrix[labels == 'bot', i].mean():9.3f}")

# Killers fight the most, Explorers move the most.
print(f"\n{'style':<10} {'hunting':>8} {'move':>8}")
for style in ("Killer", "Achiever", "Explorer", "Remainder"):
    rows = matrix[styles == style]
    if len(rows):
        print(f"{style:<10} {rows[:, 0].mean():8.2f} {rows[:, FEATURE_NAMES.index('move')].mean():8.2f}")
