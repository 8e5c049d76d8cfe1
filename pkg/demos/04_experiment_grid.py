"""Feature-set by method grid over several seeds, then the play-style tables.

The full default grid (5 seeds, 2000 players each) takes a few minutes on one
core; pass a smaller player count for a quick look:
``python demos/04_experiment_grid.py out_dir 600``.
"""

import sys

from botsense.experiments import run_grid, run_style_breakdown

out_dir = sys.argv[1] if len(sys.argv) > 1 else "grid-out"
players = int(sys.argv[2]) if len(sys.argv) > 2 else 2000

run_grid(out_dir, seeds=range(5), players=players)
styles = run_style_breakdown(out_dir)

print(open(f"{out_dir}/grid.txt").read())
print(open(f"{out_dir}/styles.txt").read())
