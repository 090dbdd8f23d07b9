"""Graph container, quasi-linear SBM sampling, and edge splitting.

Neighbor lists are kept as sorted numpy arrays so membership tests run in
O(log deg); sampling uses geometric skipping per community pair instead of
O(n^2) Bernoulli trials.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ProbabilityOverflow
from .seeding import stream


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with optional hidden community labels."""

    n: int
    adjacency: tuple  # per-vertex sorted int arrays
    labels: np.ndarray | None = None

    @property
    def edge_count(self):
        return sum(len(a) for a in self.adjacency) // 2

    def neighbors(self, v):
        return self.adjacency[v]

    def degree(self, v):
        return len(self.adjacency[v])

    def has_edge(self, u, v):
        a = self.adjacency[u]
        i = np.searchsorted(a, v)
        return i < len(a) and a[i] == v

    def edges(self):
        """Iterate unordered edges as (u, v) with u < v."""
        for u in range(self.n):
            for v in self.adjacency[u]:
                if u < int(v):
                    yield u, int(v)

    def unlabeled(self):
        """The observable view handed to detection algorithms."""
        if self.labels is None:
            return self
        return Graph(n=self.n, adjacency=self.adjacency, labels=None)


def from_edges(n, edges, labels=None):
    """Build a Graph from an iterable of (u, v) pairs; deduplicates and sorts."""
    adj = [[] for _ in range(n)]
    seen = set()
    for u, v in edges:
        if u == v:
            continue
        key = (u, v) if u < v else (v, u)
        if key in seen:
            continue
        seen.add(key)
        adj[u].append(v)
        adj[v].append(u)
    arrays = tuple(np.array(sorted(a), dtype=np.int64) for a in adj)
    return Graph(n=n, adjacency=arrays, labels=labels)


def _pair_from_index(t, s):
    """Decode linear index t in [0, s*(s-1)/2) to a pair (u, v), u < v < s."""
    u = int((2 * s - 1 - math.sqrt((2 * s - 1) ** 2 - 8 * t)) // 2)
    v = t - u * s + u * (u + 1) // 2 + u + 1
    return u, int(v)


def _skip_sample(total, q, rng):
    """Indices of successes among `total` Bernoulli(q) trials via geometric gaps."""
    if q <= 0.0 or total <= 0:
        return []
    if q >= 1.0:
        return list(range(total))
    out = []
    pos = -1
    # draw gaps in batches; expected q*total successes overall
    batch = max(16, int(q * total * 1.2) + 16)
    while True:
        gaps = rng.geometric(q, size=batch)
        for g in gaps:
            pos += int(g)
            if pos >= total:
                return out
            out.append(pos)


def sample_graph(params, n, seed):
    """Draw a labeled graph from the model at size n; deterministic given seed.

    Labels are i.i.d. from p; each unordered pair is present independently
    with the regime-scaled kernel probability.
    """
    n = int(n)
    if n < 1:
        raise ProbabilityOverflow(f"n={n} must be >= 1")
    probs = params.edge_probability(n)
    if np.any(probs > 1.0):
        raise ProbabilityOverflow(
            f"scaled edge probability {probs.max():.4g} exceeds 1 at n={n}"
        )
    rng_labels = stream(seed, "sample-labels")
    rng_edges = stream(seed, "sample-edges")
    labels = rng_labels.choice(params.k, size=n, p=params.p)
    members = [np.flatnonzero(labels == i) for i in range(params.k)]

    edges = []
    for i in range(params.k):
        ci = members[i]
        # within-community pairs
        q = probs[i, i]
        s = len(ci)
        for t in _skip_sample(s * (s - 1) // 2, q, rng_edges):
            u, v = _pair_from_index(t, s)
            edges.append((int(ci[u]), int(ci[v])))
        # cross-community blocks
        for j in range(i + 1, params.k):
            cj = members[j]
            q = probs[i, j]
            for t in _skip_sample(len(ci) * len(cj), q, rng_edges):
                edges.append((int(ci[t // len(cj)]), int(cj[t % len(cj)])))

    return from_edges(n, edges, labels=labels)


@dataclass(frozen=True)
class EdgeSplit:
    """A random bipartition of a graph's edges.

    selected holds the edges drawn into E; remainder is the graph on the
    same vertex set containing exactly the other edges.
    """

    selected: tuple
    remainder: Graph
    _adjacency: dict = field(default=None, repr=False, compare=False)

    @property
    def selected_adjacency(self):
        """vertex -> list of E-neighbors, built on first use."""
        if self._adjacency is None:
            adj = {}
            for u, v in self.selected:
                adj.setdefault(u, []).append(v)
                adj.setdefault(v, []).append(u)
            object.__setattr__(self, "_adjacency", adj)
        return self._adjacency

    def selected_neighbors(self, v):
        return self.selected_adjacency.get(v, ())


def split_edges(graph, prob, seed):
    """Assign each edge independently to the selected set with probability prob."""
    if not 0.0 <= prob <= 1.0:
        raise ProbabilityOverflow(f"split probability {prob} outside [0, 1]")
    rng = stream(seed, "edge-split")
    all_edges = list(graph.edges())
    mask = rng.random(len(all_edges)) < prob
    selected = tuple(e for e, m in zip(all_edges, mask) if m)
    rest = [e for e, m in zip(all_edges, mask) if not m]
    remainder = from_edges(graph.n, rest, labels=graph.labels)
    return EdgeSplit(selected=selected, remainder=remainder)


def selected_as_graph(split, n, labels=None):
    """View the selected edge set of a split as a Graph."""
    return from_edges(n, split.selected, labels=labels)


def save_graph(graph, path, labels_path=None):
    with open(path, "w") as fh:
        fh.write(f"n {graph.n}\n")
        for u, v in graph.edges():
            fh.write(f"{u} {v}\n")
    if labels_path is not None and graph.labels is not None:
        with open(labels_path, "w") as fh:
            for v, lab in enumerate(graph.labels):
                fh.write(f"{v} {int(lab)}\n")


def load_graph(path, labels_path=None):
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2 or header[0] != "n":
            raise ValueError(f"{path}: expected header 'n <count>'")
        n = int(header[1])
        edges = []
        for line in fh:
            if line.strip():
                u, v = line.split()
                edges.append((int(u), int(v)))
    labels = None
    if labels_path is not None:
        labels = np.zeros(n, dtype=np.int64)
        with open(labels_path) as fh:
            for line in fh:
                if line.strip():
                    v, lab = line.split()
                    labels[int(v)] = int(lab)
    return from_edges(n, edges, labels=labels)
