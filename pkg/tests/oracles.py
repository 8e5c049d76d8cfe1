"""Independent reference computations used by the tests."""

import itertools
from fractions import Fraction

import numpy as np


def brute_force_inertia(points: np.ndarray, k: int) -> float:
    """Minimal within-cluster sum of squares over every partition into k groups."""
    n = len(points)
    best = np.inf
    for labels in itertools.product(range(k), repeat=n):
        if labels[0] != 0 or len(set(labels)) != k:
            continue
        labels = np.array(labels)
        total = 0.0
        for j in range(k):
            members = points[labels == j]
            total += float(((members - members.mean(axis=0)) ** 2).sum())
        best = min(best, total)
    return best


def kkt_violation(K, y, alpha, bias, c):
    """Largest violation of the soft-margin KKT conditions over training points."""
    margins = y * (K @ (alpha * y) + bias)
    eps = 1e-9 * c
    worst = 0.0
    for m, a in zip(margins, alpha):
        if a <= eps:
            worst = max(worst, 1 - m)
        elif a >= c - eps:
            worst = max(worst, m - 1)
        else:
            worst = max(worst, abs(m - 1))
    return worst


def exact_features(h, a, av, d, r, col, dr, it, dist=None):
    """Derived interval features in exact rational arithmetic."""
    def ratio(num, den):
        return Fraction(num) / Fraction(den) if den else Fraction(0)
    out = {
        "combat1": ratio(h, a) + ratio(av, d),
        "combat2": ratio(r, h),
        "collect": ratio(col + dr, 2 * it),
        "combat3": None if dist is None else ratio(h, dist),
        "move": None if dist is None else Fraction(dist),
    }
    return out


def rational_scores(tp, tn, fp, fn):
    def ratio(num, den):
        return Fraction(num, den) if den else Fraction(0)
    precision = ratio(tp, tp + fp)
    recall = ratio(tp, tp + fn)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else Fraction(0)
    return {"accuracy": ratio(tp + tn, tp + tn + fp + fn), "precision": precision, "recall": recall, "f1": f1}
