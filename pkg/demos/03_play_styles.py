"""Which play styles does each model get right, and what do the clusters hold?

Trains the local ensemble through the command-line front end, then reads its
evaluation report. Run with ``python demos/03_play_styles.py [work_dir]``.
"""

import json
import sys
import tempfile
from pathlib import Path

from botsense.cli import main

work = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="botsense-"))
log, model = work / "train.csv", work / "model.json"

main(["generate", "--players", "1000", "--seed", "3", "--out", str(log)])
main(["generate", "--players", "600", "--seed", "4", "--out", str(work / "holdout.csv")])
main(["train", "--logs", str(log), "--feature-set", "f17", "--seed", "3", "--select-k", "--out", str(model)])
main(["evaluate", "--model", str(model), "--logs", str(work / "holdout.csv"), "--out-dir", str(work / "eval")])

print((work / "eval" / "report.txt").read_text())

report = json.loads((work / "eval" / "report.json").read_text())
print("Dev (spread of Killer, Achiever and Remainder accuracy):", round(report["styles"]["dev"], 4))
print("artifacts in", work)
