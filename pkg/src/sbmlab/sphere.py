"""Sphere-comparison partial recovery.

Two vertices are compared by counting held-out edges between their BFS
spheres, inverting a small Vandermonde system in the scaled eigenvalues
of PQ to estimate the eigenspace inner products z_i, and thresholding the
quadratic form z(v,v) - 2 z(v,v') + z(v',v').  Anchor classification and
the T-fold ensemble wrapper turn this into a full labeling.
"""

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import AllRunsFailed, BudgetExceeded, ClassificationFailed, ParameterError
from .evaluate import best_bijection
from .graph import split_edges
from .seeding import stream
from .spectral import eigen_summary


@dataclass(frozen=True)
class NeighborLayers:
    """BFS spheres N_0..N_R around a vertex (N_0 = {origin})."""

    origin: int
    layers: tuple  # tuple of frozensets

    @property
    def counts(self):
        return tuple(len(s) for s in self.layers)

    def layer(self, r):
        if r < len(self.layers):
            return self.layers[r]
        return frozenset()


def neighborhoods(graph, v, R, budget=None):
    """BFS layers around v to depth R, aborting past the vertex budget.

    The budget (default n/2) guards against parameter choices whose spheres
    swallow the graph, which would break the quasi-linear time contract.
    """
    if budget is None:
        budget = graph.n // 2
    visited = {v}
    layers = [frozenset([v])]
    frontier = deque([v])
    for _ in range(R):
        nxt = set()
        for u in frontier:
            for w in graph.neighbors(u):
                w = int(w)
                if w not in visited:
                    visited.add(w)
                    nxt.add(w)
        if len(visited) > budget:
            raise BudgetExceeded(
                f"sphere around {v} visited {len(visited)} vertices (budget {budget})"
            )
        layers.append(frozenset(nxt))
        frontier = deque(nxt)
        if not nxt:
            break
    while len(layers) <= R:
        layers.append(frozenset())
    return NeighborLayers(origin=v, layers=tuple(layers))


def cross_count(layers_v, layers_vp, r, rp, split):
    """|{(v1, v2): v1 in N_r(v), v2 in N_r'(v'), (v1, v2) in E}| (ordered pairs).

    Iterates over the smaller side of the product: each v2 in N_r'(v') looks
    up its E-neighbors and membership-tests them against N_r(v).
    """
    near = layers_v.layer(r)
    if not near:
        return 0
    count = 0
    for v2 in layers_vp.layer(rp):
        for u in split.selected_neighbors(v2):
            if u in near:
                count += 1
    return count


@dataclass(frozen=True)
class ZVector:
    z: np.ndarray
    ill_conditioned: bool = False


def solve_decomposition(counts, spectral, c, r, rp, n):
    """Solve sum_i ((1-c) lam_i)^(r+r'+j+1) z_i = (1-c) n / c * N_{r+j,r'} for z.

    The coefficient matrix is a scaled Vandermonde in the distinct nonzero
    eigenvalues; a condition estimate above 1e12 sets a warning flag.
    """
    eta = spectral.eta
    counts = np.asarray(counts, dtype=float)
    if len(counts) != eta:
        raise ParameterError(f"need {eta} counts, got {len(counts)}")
    lams = (1.0 - c) * spectral.distinct[:eta]
    A = np.empty((eta, eta))
    for j in range(eta):
        A[j, :] = lams ** (r + rp + j + 1)
    rhs = (1.0 - c) * n / c * counts
    ill = bool(np.linalg.cond(A) > 1e12)
    z = np.linalg.solve(A, rhs)
    return ZVector(z=z, ill_conditioned=ill)


@dataclass(frozen=True)
class SphereHyperparams:
    c: float
    m: int
    epsilon: float
    x: float
    T: int
    theorem_conditions_hold: bool = True


def comparison_threshold(x, min_p):
    return 5.0 * (2.0 * x / math.sqrt(min_p) + x * x)


def classification_margin(x, min_p):
    return 19.0 / 3.0 * (2.0 * x / math.sqrt(min_p) + x * x)


def depths(spectral, hyper, n):
    """BFS depths r >= r' >= 1 from the scaled top eigenvalue and epsilon.

    Raises ParameterError when the working graph is too small (or the
    scaled spectrum too flat) for the shallow depth to reach 1.
    """
    lam1s = (1.0 - hyper.c) * spectral.lambda_max
    if lam1s <= 1.0:
        raise ParameterError(f"(1-c)*lambda_1 = {lam1s:.4g} <= 1; spheres cannot grow")
    denom = math.log(lam1s)
    r_real = (1.0 - hyper.epsilon / 3.0) * math.log(n) / denom - spectral.eta
    rp_real = (2.0 * hyper.epsilon / 3.0) * math.log(n) / denom
    if rp_real < 1.0:
        raise ParameterError(f"r' = {rp_real:.3f} < 1; n too small for these depths")
    r = max(1, math.floor(r_real))
    rp = max(1, math.floor(rp_real))
    if r < rp:
        r, rp = rp, r
    return r, rp


def _z_pair(layers_a, layers_b, split, spectral, c, r, rp, n):
    counts = [cross_count(layers_a, layers_b, r + j, rp, split) for j in range(spectral.eta)]
    return solve_decomposition(counts, spectral, c, r, rp, n).z


def vertex_comparison(layers_v, layers_vp, split, spectral, hyper, min_p, r, rp, n):
    """Decide Same/Different from the quadratic form in the z estimates."""
    zvv = _z_pair(layers_v, layers_v, split, spectral, hyper.c, r, rp, n)
    zvpvp = _z_pair(layers_vp, layers_vp, split, spectral, hyper.c, r, rp, n)
    zvvp = _z_pair(layers_v, layers_vp, split, spectral, hyper.c, r, rp, n)
    gap = zvv - 2.0 * zvvp + zvpvp
    if np.any(gap > comparison_threshold(hyper.x, min_p)):
        return "different"
    return "same"


def vertex_classification(anchor_layers, anchor_self_z, layers_vp, split, spectral,
                          hyper, min_p, r, rp, n):
    """Community of v' by dominance against the anchors; None means Fail.

    v' joins anchor sigma when, for every other anchor and every component,
    z_self[sigma] - 2 z(anchor_sigma, v') undercuts the competitor's value
    by at most the classification margin; the winner must be unique.
    """
    k = len(anchor_layers)
    margin = classification_margin(hyper.x, min_p)
    scores = [
        anchor_self_z[s] - 2.0 * _z_pair(anchor_layers[s], layers_vp, split,
                                         spectral, hyper.c, r, rp, n)
        for s in range(k)
    ]
    winners = []
    for s in range(k):
        if all(np.all(scores[s] <= scores[t] + margin) for t in range(k) if t != s):
            winners.append(s)
    if len(winners) == 1:
        return winners[0]
    return None


@dataclass(frozen=True)
class SphereRun:
    labels: np.ndarray
    forced_fraction: float


def unreliable_classification(graph, params, hyper, seed, spectral=None):
    """One pass of anchor selection, comparison, and whole-graph classification.

    Raises ClassificationFailed when the anchor comparisons are inconsistent
    or fail to expose all k communities; vertices whose own classification
    fails get uniformly random labels, reported via forced_fraction.
    """
    n = graph.n
    k = params.k
    if spectral is None:
        spectral = eigen_summary(params)
    min_p = float(np.min(params.p))
    r, rp = depths(spectral, hyper, n)

    split = split_edges(graph, hyper.c, seed)
    work = split.remainder
    rng = stream(seed, "sphere-anchors")
    anchors = [int(a) for a in rng.choice(n, size=min(hyper.m, n), replace=False)]

    deep = r + spectral.eta - 1
    budget = n // 2
    try:
        anchor_layers = [neighborhoods(work, a, max(deep, rp), budget) for a in anchors]
    except BudgetExceeded as exc:
        raise ClassificationFailed(str(exc)) from exc

    m = len(anchors)
    same = np.eye(m, dtype=bool)
    for i in range(m):
        for j in range(i + 1, m):
            verdict = vertex_comparison(anchor_layers[i], anchor_layers[j], split,
                                        spectral, hyper, min_p, r, rp, n)
            same[i, j] = same[j, i] = verdict == "same"

    # the relation must already be an equivalence exposing all k communities
    for i in range(m):
        for j in range(m):
            if not same[i, j]:
                continue
            if not np.array_equal(same[i], same[j]):
                raise ClassificationFailed("anchor comparisons are not transitive")
    classes = []
    assigned = [-1] * m
    for i in range(m):
        if assigned[i] >= 0:
            continue
        members = [j for j in range(m) if same[i, j]]
        for j in members:
            assigned[j] = len(classes)
        classes.append(members)
    if len(classes) != k:
        raise ClassificationFailed(
            f"anchor comparison found {len(classes)} communities, expected {k}"
        )

    reps = [int(rng.choice(members)) for members in classes]
    rep_layers = [anchor_layers[i] for i in reps]
    rep_self_z = [
        _z_pair(rep_layers[s], rep_layers[s], split, spectral, hyper.c, r, rp, n)
        for s in range(k)
    ]

    labels = np.empty(n, dtype=np.int64)
    forced = 0
    for v in range(n):
        try:
            layers_v = neighborhoods(work, v, rp, budget)
            sigma = vertex_classification(rep_layers, rep_self_z, layers_v, split,
                                          spectral, hyper, min_p, r, rp, n)
        except BudgetExceeded:
            sigma = None
        if sigma is None:
            sigma = int(rng.integers(k))
            forced += 1
        labels[v] = sigma
    return SphereRun(labels=labels, forced_fraction=forced / n)


def discard_threshold(spectral, hyper, min_p, k):
    """Allowed disagreement fraction for the ensemble filter.

    4k e^{-A} / (1 - e^{-A B}); when B <= 0 the geometric series behind the
    bound diverges, so filtering is disabled (infinite threshold).
    """
    lam1 = spectral.lambda_max
    lam_eta = spectral.lambda_min_nonzero
    c, x = hyper.c, hyper.x
    A = ((1.0 - c) * x * x * lam_eta**2 * min_p
         / (16.0 * lam1 * k**1.5 * (min_p**-0.5 + x)))
    B = (1.0 - c) * lam_eta**4 / (4.0 * lam1**3) - 1.0
    if B <= 0 or A <= 0:
        return math.inf
    return 4.0 * k * math.exp(-A) / (1.0 - math.exp(-A * B))


def disagreement(labels_a, labels_b, k):
    """Bijection-minimized fraction of vertices on which two labelings differ."""
    _, agree = best_bijection(labels_a, labels_b, k)
    return 1.0 - agree / len(labels_a)


def filter_runs(labelings, threshold, k):
    """Indices of runs not disagreeing past the threshold with a majority."""
    nruns = len(labelings)
    if nruns <= 1 or not math.isfinite(threshold):
        return list(range(nruns))
    dis = np.zeros((nruns, nruns))
    for i in range(nruns):
        for j in range(i + 1, nruns):
            dis[i, j] = dis[j, i] = disagreement(labelings[i], labelings[j], k)
    keep = []
    for i in range(nruns):
        bad = sum(1 for j in range(nruns) if j != i and dis[i, j] > threshold)
        if bad <= (nruns - 1) / 2:
            keep.append(i)
    return keep


@dataclass(frozen=True)
class SphereResult:
    labels: np.ndarray
    forced_fraction: float
    runs_failed: int
    runs_discarded: int


def reliable_classification(graph, params, hyper, seed, spectral=None):
    """The full ensemble detector: T runs, outlier filter, majority combine."""
    if spectral is None:
        spectral = eigen_summary(params)
    k = params.k
    min_p = float(np.min(params.p))
    runs = []
    failed = 0
    for t in range(hyper.T):
        try:
            runs.append(unreliable_classification(graph, params, hyper,
                                                  _subseed(seed, t), spectral=spectral))
        except ClassificationFailed:
            failed += 1
    if not runs:
        raise AllRunsFailed(f"all {hyper.T} classification runs failed")

    threshold = discard_threshold(spectral, hyper, min_p, k)
    nruns = len(runs)
    keep = filter_runs([run.labels for run in runs], threshold, k)
    if not keep:
        raise AllRunsFailed("every run was discarded by the disagreement filter")
    survivors = [runs[i] for i in keep]

    base = survivors[0].labels
    n = graph.n
    maps = []
    for run in survivors:
        overlap = np.zeros((k, k))
        for j in range(k):
            mask = run.labels == j
            for jb in range(k):
                overlap[j, jb] = np.count_nonzero(base[mask] == jb)
        maps.append(np.argmax(overlap, axis=1))
    rng = stream(seed, "sphere-combine")
    picks = rng.integers(len(survivors), size=n)
    labels = np.empty(n, dtype=np.int64)
    for v in range(n):
        run = survivors[picks[v]]
        labels[v] = maps[picks[v]][run.labels[v]]
    forced = float(np.mean([run.forced_fraction for run in survivors]))
    return SphereResult(labels=labels, forced_fraction=forced,
                        runs_failed=failed, runs_discarded=nruns - len(keep))


def _subseed(seed, t):
    # distinct 64-bit streams per ensemble member
    return (int(seed) * 1000003 + t + 1) & 0xFFFFFFFFFFFFFFFF


def default_hyperparams(params, n, spectral=None):
    """Hyperparameters from the theory's stated defaults, with fallbacks.

    epsilon is the midpoint of its admissible interval when that interval
    is nonempty, x is half the feasible upper bound when one exists, and c
    is the largest split probability keeping the filter series convergent.
    """
    from .spectral import theorem1_conditions

    if spectral is None:
        spectral = eigen_summary(params)
    min_p = float(np.min(params.p))
    k = params.k
    m = math.ceil(math.log(4 * k) / min_p)
    T = math.ceil(math.log(n))

    lam = spectral.lambda_max
    lamp = spectral.lambda_min_nonzero
    eps_lo = None
    with np.errstate(divide="ignore", invalid="ignore"):
        cands = []
        d1 = math.log(lamp**2 / lam) if lamp**2 != lam else 0.0
        if d1 > 0:
            cands.append(math.log(lam**2 / lamp**2) / d1)
        d2 = math.log(2 * lam**3 / lamp**2) if 2 * lam**3 != lamp**2 else 0.0
        if d2 > 0:
            cands.append(math.log(2 * lam**2 / lamp**2) / d2)
        if cands:
            eps_lo = 3.0 * max(cands)
    conditions = theorem1_conditions(params)
    if eps_lo is not None and 0.0 < eps_lo < 1.0:
        epsilon = 0.5 * (eps_lo + 1.0)
    else:
        epsilon = 0.5
    if conditions.feasible_x_interval:
        x = 0.5 * conditions.feasible_x_interval[1]
    else:
        x = 0.1 * math.sqrt(min_p)
    c = 0.05
    for cand in (0.2, 0.1, 0.05, 0.02):
        if (1.0 - cand) * lamp**4 > 4.0 * lam**3:
            c = cand
            break
    hold = (conditions.rho_gt_4 and conditions.pow7_lt_pow8
            and conditions.four_cube_lt_fourth and bool(conditions.feasible_x_interval))
    return SphereHyperparams(c=c, m=m, epsilon=epsilon, x=x, T=T,
                             theorem_conditions_hold=hold)
