"""Exact recovery by degree profiling.

The pipeline splits off a gamma-fraction of edges, runs sphere comparison
on that part to get a rough labeling, aligns the rough clusters to the
model communities, then re-classifies every vertex twice from its degree
profile on the held-out edges: first a per-community Poisson MAP step,
then a composite step against the finest recoverable partition.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.special import logsumexp

from .divergence import finest_partition, min_cross_divergence
from .errors import NotApplicable, ZeroEntry
from .graph import selected_as_graph, split_edges
from .model import Regime
from .sphere import default_hyperparams, reliable_classification

ALIGN_BRUTE_FORCE_LIMIT = 8
GAMMA_MIN, GAMMA_MAX = 0.05, 0.5


def degree_profile(graph, v, labeling, k):
    """Neighbor counts of v into each alleged community."""
    d = np.zeros(k, dtype=np.int64)
    for u in graph.neighbors(v):
        d[labeling[int(u)]] += 1
    return d


def _empirical_model(labeling, graph, k):
    """Cluster shares and an edge-density kernel rescaled to Q's units."""
    n = graph.n
    sizes = np.bincount(labeling, minlength=k).astype(float)
    counts = np.zeros((k, k))
    for u, v in graph.edges():
        a, b = labeling[u], labeling[v]
        counts[a, b] += 1
        if a != b:
            counts[b, a] += 1
    pairs = np.outer(sizes, sizes)
    np.fill_diagonal(pairs, sizes * (sizes - 1) / 2.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        density = np.where(pairs > 0, counts / pairs, 0.0)
    return sizes / n, density * n / math.log(n)


def align_clusters(prelim, params, graph):
    """Permute the rough labels so clusters line up with model communities.

    The cost of matching cluster a to community j combines the size gap
    |share_a - p_j| with the L1 gap between the empirical density row and
    Q's row j; small k is solved by brute force over permutations (the
    density rows themselves move with the permutation), larger k by a
    linear assignment on the identity-ordered rows.
    """
    prelim = np.asarray(prelim, dtype=np.int64)
    k = params.k
    if k == 1:
        return prelim
    shares, density = _empirical_model(prelim, graph, k)
    if k <= ALIGN_BRUTE_FORCE_LIMIT:
        best_cost, best_pi = math.inf, None
        for pi in itertools.permutations(range(k)):
            cost = sum(abs(shares[a] - params.p[pi[a]]) for a in range(k))
            cost += sum(
                abs(density[a, b] - params.Q[pi[a], pi[b]])
                for a in range(k) for b in range(a, k)
            )
            if cost < best_cost:
                best_cost, best_pi = cost, pi
        pi = np.array(best_pi, dtype=np.int64)
    else:
        cost = np.abs(shares[:, None] - params.p[None, :])
        for a in range(k):
            cost[a] += np.abs(density[a][None, :] - params.Q).sum(axis=1)
        rows, cols = linear_sum_assignment(cost)
        pi = np.empty(k, dtype=np.int64)
        pi[rows] = cols
    return pi[prelim]


def _log_likelihoods(d, params, scale):
    """Per-community log p_j + sum_i [d_i ln(scale p_i Q_ij) - scale p_i Q_ij]."""
    means = scale * params.p[:, None] * params.Q  # means[i, j]
    if np.any(means <= 0):
        raise ZeroEntry("degree-profile likelihood needs strictly positive p_i Q_ij")
    d = np.asarray(d, dtype=float)
    return np.log(params.p) + (d[:, None] * np.log(means) - means).sum(axis=0)


def map_classify(d, params, scale):
    """MAP community for a degree profile; ties go to the lowest index."""
    return int(np.argmax(_log_likelihoods(d, params, scale)))


def group_classify(d, params, scale, partition):
    """MAP group of communities: mixture likelihood summed within each part."""
    ll = _log_likelihoods(d, params, scale)
    scores = [logsumexp(ll[list(part)]) for part in partition]
    return int(np.argmax(scores))


@dataclass(frozen=True)
class GroupAssignment:
    groups: tuple  # finest partition of communities
    assignment: np.ndarray  # per-vertex group index
    gamma: float
    prelim: np.ndarray  # aligned sphere labeling (sigma')
    runs_failed: int = 0
    runs_discarded: int = 0


def default_gamma(params, partition, n):
    """Edge-split fraction (Delta - 1)/(2 Delta) + ln ln n / (4 ln n).

    Delta is the smallest cross-group divergence; when the formula is
    vacuous (Delta <= 1) only the second-order term survives, and the
    result is clamped so both graph halves stay usable at finite n.
    """
    delta = min_cross_divergence(params, partition)
    correction = math.log(math.log(n)) / (4.0 * math.log(n))
    if not math.isfinite(delta) or delta <= 1.0:
        gamma = max(GAMMA_MIN, correction)
    else:
        gamma = (delta - 1.0) / (2.0 * delta) + correction
    return min(GAMMA_MAX, max(GAMMA_MIN, gamma))


def degree_profiling(graph, params, seed, gamma=None):
    """Full exact-recovery pipeline; deterministic given the seed."""
    if np.any(params.Q <= 0):
        raise NotApplicable("degree profiling requires strictly positive Q")
    n = graph.n
    k = params.k
    report = finest_partition(params)
    partition = report.finest
    if len(partition) == 1:
        return GroupAssignment(groups=partition,
                               assignment=np.zeros(n, dtype=np.int64),
                               gamma=0.0, prelim=np.zeros(n, dtype=np.int64))
    if gamma is None:
        gamma = default_gamma(params, partition, n)

    split = split_edges(graph, gamma, seed)
    g_prime = selected_as_graph(split, n)
    g_second = split.remainder

    # the selected half behaves like a constant-degree model with kernel
    # gamma * ln(n) * Q at this graph size
    eff = params.scaled(gamma * math.log(n), regime=Regime.CONSTANT)
    hyper = default_hyperparams(eff, n)
    sphere_result = reliable_classification(g_prime, eff, hyper, seed)
    prelim = align_clusters(sphere_result.labels, params, graph)

    scale = (1.0 - gamma) * math.log(n)
    sigma2 = np.empty(n, dtype=np.int64)
    for v in range(n):
        sigma2[v] = map_classify(degree_profile(g_second, v, prelim, k), params, scale)
    assignment = np.empty(n, dtype=np.int64)
    for v in range(n):
        assignment[v] = group_classify(degree_profile(g_second, v, sigma2, k),
                                       params, scale, partition)
    return GroupAssignment(groups=partition, assignment=assignment, gamma=gamma,
                           prelim=prelim, runs_failed=sphere_result.runs_failed,
                           runs_discarded=sphere_result.runs_discarded)
