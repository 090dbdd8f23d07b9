"""Figure rendering for sweep outputs.

Kept apart from the scoring code: evaluation produces CSV rows only, and
this module turns a finished row table into PNG files next to it.
"""

import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def render_sweep_figure(rows, out_path):
    """Accuracy and exact-recovery rate per sweep point, saved as a PNG.

    rows is the table produced by the sweep driver (header row first).
    """
    header = rows[0]
    idx = {name: i for i, name in enumerate(header)}
    acc = defaultdict(list)
    exact = defaultdict(list)
    for row in rows[1:]:
        point = row[idx["point"]]
        acc[point].append(float(row[idx["accuracy"]]))
        exact[point].append(float(row[idx["exact"]]))
    points = list(acc.keys())
    if not points:
        return None

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    positions = np.arange(len(points))
    means = [np.mean(acc[p]) for p in points]
    stds = [np.std(acc[p]) for p in points]
    ax1.bar(positions, means, yerr=stds, color="steelblue", capsize=4)
    ax1.set_xticks(positions)
    ax1.set_xticklabels(points, rotation=30, ha="right")
    ax1.set_ylabel("accuracy")
    ax1.set_ylim(0, 1.05)
    ax1.set_title("mean accuracy per point")

    rates = [np.mean(exact[p]) for p in points]
    ax2.bar(positions, rates, color="darkorange")
    ax2.set_xticks(positions)
    ax2.set_xticklabels(points, rotation=30, ha="right")
    ax2.set_ylabel("exact-recovery rate")
    ax2.set_ylim(0, 1.05)
    ax2.set_title("exact recovery per point")

    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return os.path.abspath(out_path)
