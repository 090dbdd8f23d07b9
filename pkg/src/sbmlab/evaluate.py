"""Relabeling-invariant scoring of community labelings and sweep driving.

Accuracy is the fraction of vertices on which two labelings agree,
maximized over bijections of the label alphabet: brute force over
permutations for k <= 6, otherwise a maximum-weight assignment on the
confusion matrix (the objective is linear in the confusion counts, so the
assignment optimum is exact).
"""

import csv
import itertools
import time
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import LengthMismatch

BRUTE_FORCE_LIMIT = 6


def confusion(label_a, label_b, k):
    label_a = np.asarray(label_a, dtype=np.int64)
    label_b = np.asarray(label_b, dtype=np.int64)
    if label_a.shape != label_b.shape:
        raise LengthMismatch(f"labelings differ in length: {label_a.shape} vs {label_b.shape}")
    C = np.zeros((k, k), dtype=np.int64)
    np.add.at(C, (label_a, label_b), 1)
    return C


def best_bijection(label_a, label_b, k):
    """(permutation pi, matched count): pi maps labels of A onto labels of B."""
    C = confusion(label_a, label_b, k)
    if k <= BRUTE_FORCE_LIMIT:
        best, best_pi = -1, None
        for pi in itertools.permutations(range(k)):
            score = sum(C[a, pi[a]] for a in range(k))
            if score > best:
                best, best_pi = score, pi
        return tuple(best_pi), int(best)
    rows, cols = linear_sum_assignment(-C)
    pi = np.empty(k, dtype=np.int64)
    pi[rows] = cols
    return tuple(int(v) for v in pi), int(C[rows, cols].sum())


@dataclass(frozen=True)
class AccuracyResult:
    accuracy: float
    matching: tuple
    forced_fraction: float = 0.0


def agreement(label_a, label_b, k, forced_fraction=0.0):
    """Best-bijection agreement fraction between two labelings."""
    pi, score = best_bijection(label_a, label_b, k)
    return AccuracyResult(accuracy=score / len(label_a), matching=pi,
                          forced_fraction=forced_fraction)


def exact_match(label_a, label_b, k):
    """True iff some relabeling makes the two labelings identical."""
    return agreement(label_a, label_b, k).accuracy == 1.0


SWEEP_COLUMNS = ("point", "trial", "accuracy", "exact", "runtime_s",
                 "forced_fraction", "dplus_or_rho")


@dataclass(frozen=True)
class SweepPoint:
    name: str
    params: object  # ModelParams
    signal: float  # D+ or rho at this point, for the output table


def sweep(points, n, trials, seed, detector, out_path=None):
    """Run a detector over parameter points x trials; returns CSV-ready rows.

    detector(params, n, seed) must return (labels, truth, forced_fraction).
    """
    rows = [SWEEP_COLUMNS]
    for point in points:
        for trial in range(trials):
            t0 = time.perf_counter()
            labels, truth, forced = detector(point.params, n, seed + trial)
            elapsed = time.perf_counter() - t0
            result = agreement(labels, truth, point.params.k, forced_fraction=forced)
            rows.append((point.name, trial, f"{result.accuracy:.6f}",
                         int(result.accuracy == 1.0), f"{elapsed:.3f}",
                         f"{forced:.6f}", f"{point.signal:.6f}"))
    if out_path is not None:
        with open(out_path, "w", newline="") as fh:
            csv.writer(fh).writerows(rows)
    return rows
