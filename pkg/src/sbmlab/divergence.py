"""CH-divergence calculus: D_t, D+, profile matrices, finest partition.

The objective t -> sum_x [t*mu + (1-t)*nu - mu^t nu^(1-t)] is concave on
[0,1] (each -mu^t nu^(1-t) term is minus an exponential of an affine
function of t), so the maximum is located by ternary search.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BadPartition, IndexOutOfRange, LengthMismatch, ZeroEntry

THRESHOLD_BAND = 1e-9
TERNARY_TOL = 1e-12
TERNARY_MAX_ITER = 300


def _check_pair(mu, nu, strict):
    mu = np.asarray(mu, dtype=float).reshape(-1)
    nu = np.asarray(nu, dtype=float).reshape(-1)
    if mu.shape != nu.shape:
        raise LengthMismatch(f"profile lengths differ: {len(mu)} vs {len(nu)}")
    if np.any(mu < 0) or np.any(nu < 0):
        raise ZeroEntry("profiles must be nonnegative")
    if strict and (np.any(mu == 0) or np.any(nu == 0)):
        raise ZeroEntry("profiles must be strictly positive in strict mode")
    return mu, nu


def d_t(mu, nu, t, strict=True):
    """Divergence sum_x [t*mu(x) + (1-t)*nu(x) - mu(x)^t * nu(x)^(1-t)].

    With zero entries (strict=False) the convention 0^s = 0 for s > 0 applies,
    which is what numpy power already does for t in (0,1).
    """
    mu, nu = _check_pair(mu, nu, strict)
    if not 0.0 <= t <= 1.0:
        raise ZeroEntry(f"t={t} outside [0,1]")
    with np.errstate(divide="ignore", invalid="ignore"):
        geo = np.power(mu, t) * np.power(nu, 1.0 - t)
    # at the endpoints x^0 should read as 1 only when the base is positive
    geo = np.where(np.isnan(geo), 0.0, geo)
    return float(np.sum(t * mu + (1.0 - t) * nu - geo))


def ch_divergence(mu, nu, strict=True):
    """Maximize d_t over t in [0,1]; returns (value, argmax t).

    Ternary search to 1e-12 in t; exact because the objective is concave.
    """
    mu, nu = _check_pair(mu, nu, strict)
    lo, hi = (0.0, 1.0) if strict else (1e-9, 1.0 - 1e-9)

    def g(t):
        return d_t(mu, nu, t, strict=strict)

    a, b = lo, hi
    for _ in range(TERNARY_MAX_ITER):
        if b - a <= TERNARY_TOL:
            break
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        if g(m1) < g(m2):
            a = m1
        else:
            b = m2
    tstar = 0.5 * (a + b)
    candidates = [lo, tstar, hi]
    values = [g(t) for t in candidates]
    best = int(np.argmax(values))
    return max(values[best], 0.0), candidates[best]


def profile(params, j):
    """Community profile theta_j = column j of diag(p) Q (0-based index)."""
    if not 0 <= j < params.k:
        raise IndexOutOfRange(f"community index {j} outside [0, {params.k})")
    return params.p * params.Q[:, j]


@dataclass(frozen=True)
class DivergenceReport:
    dplus: np.ndarray
    argmax_t: np.ndarray
    finest: tuple = None  # partition of communities, or None if not computed


def divergence_matrix(params, strict=True):
    """Pairwise D+ between all community profiles."""
    k = params.k
    dplus = np.zeros((k, k))
    argmax_t = np.zeros((k, k))
    profiles = [profile(params, j) for j in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            value, tstar = ch_divergence(profiles[i], profiles[j], strict=strict)
            dplus[i, j] = dplus[j, i] = value
            argmax_t[i, j] = argmax_t[j, i] = tstar
    return DivergenceReport(dplus=dplus, argmax_t=argmax_t)


def finest_partition(params, strict=True):
    """Connected components of the graph on communities with an edge where D+ < 1.

    This is the partition with the most parts whose cross-part divergences
    are all >= 1: any valid partition has to keep each component together.
    """
    report = divergence_matrix(params, strict=strict)
    k = params.k
    parent = list(range(k))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(k):
        for j in range(i + 1, k):
            if report.dplus[i, j] < 1.0:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(k):
        groups.setdefault(find(i), []).append(i)
    finest = tuple(tuple(g) for g in sorted(groups.values()))
    return DivergenceReport(dplus=report.dplus, argmax_t=report.argmax_t, finest=finest)


def exact_recovery_solvable(params, partition, strict=True):
    """Verdict on whether the given community grouping is exactly recoverable.

    'solvable' if every cross-part pair has D+ >= 1 + 1e-9, 'boundary' if
    some cross pair lies within 1e-9 of 1, 'not_solvable' otherwise.
    """
    k = params.k
    flat = [c for part in partition for c in part]
    if sorted(flat) != list(range(k)):
        raise BadPartition(f"not a partition of 0..{k - 1}: {partition}")
    report = divergence_matrix(params, strict=strict)
    part_of = {}
    for s, part in enumerate(partition):
        for c in part:
            part_of[c] = s
    verdict = "solvable"
    for i in range(k):
        for j in range(i + 1, k):
            if part_of[i] == part_of[j]:
                continue
            d = report.dplus[i, j]
            if abs(d - 1.0) <= THRESHOLD_BAND:
                verdict = "boundary"
            elif d < 1.0:
                return "not_solvable"
    return verdict


def min_cross_divergence(params, partition, strict=True):
    """Smallest D+ between communities in different parts (inf if none)."""
    report = divergence_matrix(params, strict=strict)
    part_of = {}
    for s, part in enumerate(partition):
        for c in part:
            part_of[c] = s
    best = np.inf
    for i in range(params.k):
        for j in range(i + 1, params.k):
            if part_of[i] != part_of[j]:
                best = min(best, report.dplus[i, j])
    return best
