"""Undirected weighted graph with the structural metrics used everywhere else.

Nodes are dense integer indices 0..n-1; external labels live in a side
map attached at ingestion. Graphs are immutable after construction and
all metric functions are read-only. Shortest paths are hop counts
(unweighted BFS) even on weighted graphs; edge weights are covariates,
never distances.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np


@dataclass
class CentralityVector:
    """Per-node centrality scores with a kind tag and normalization flag."""

    values: np.ndarray
    kind: str  # degree | betweenness | clustering
    normalized: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if np.any(self.values < 0):
            raise ValueError("centrality values must be non-negative")


def normalize_by_max(c: CentralityVector) -> CentralityVector:
    """Divide by the vector maximum so the largest value becomes 1.

    An all-zero vector is returned unchanged (flag still set).
    """
    m = c.values.max() if c.values.size else 0.0
    vals = c.values / m if m > 0 else c.values.copy()
    return replace(c, values=vals, normalized=True)


class Graph:
    """Undirected graph on dense node ids with optional weights, labels,
    coordinates, and block labels."""

    def __init__(self, n, edges, weights=None, labels=None, coords=None, blocks=None):
        if n < 0:
            raise ValueError("node count must be non-negative")
        self.n = int(n)
        edges = [(int(u), int(v)) if u < v else (int(v), int(u)) for u, v in edges]
        seen = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u},{v}) outside node range")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u},{v})")
            seen.add((u, v))
        if weights is None:
            weights = np.ones(len(edges))
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (len(edges),):
            raise ValueError("weights must align with edges")
        if np.any(weights < 0):
            raise ValueError("edge weights must be non-negative")

        order = sorted(range(len(edges)), key=lambda i: edges[i])
        self._edges = [edges[i] for i in order]
        self._w = weights[order]
        self._weight_map = {e: w for e, w in zip(self._edges, self._w)}

        adj = [[] for _ in range(self.n)]
        for u, v in self._edges:
            adj[u].append(v)
            adj[v].append(u)
        self._adj = [np.array(sorted(a), dtype=np.int64) for a in adj]
        self._adj_sets = [set(a) for a in adj]

        self.labels = list(labels) if labels is not None else None
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError("labels must cover every node")
        self.coords = None
        if coords is not None:
            self.coords = np.asarray(coords, dtype=float)
            if self.coords.shape != (self.n, 2):
                raise ValueError("coords must be n x 2")
        self.blocks = np.asarray(blocks, dtype=np.int64) if blocks is not None else None

    # -- basic accessors -------------------------------------------------

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def edge_list(self):
        """Edges as (u, v) with u < v, in ascending order."""
        return list(self._edges)

    def edge_array(self) -> np.ndarray:
        if not self._edges:
            return np.empty((0, 2), dtype=np.int64)
        return np.array(self._edges, dtype=np.int64)

    def edge_weights(self) -> np.ndarray:
        return self._w.copy()

    def neighbors(self, v: int) -> np.ndarray:
        return self._adj[v]

    def neighbor_sets(self):
        return self._adj_sets

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj_sets[u]

    def weight(self, u: int, v: int) -> float:
        key = (u, v) if u < v else (v, u)
        return float(self._weight_map[key])

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self._adj], dtype=np.int64)

    def label_of(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)

    def adjacency_matrix(self, dtype=float) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=dtype)
        for u, v in self._edges:
            a[u, v] = 1
            a[v, u] = 1
        return a

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.edge_count})"


# -- structural metrics ---------------------------------------------------


def degree_distribution(g: Graph) -> dict:
    """Fraction of nodes at each degree; fractions sum to 1."""
    if g.n == 0:
        raise ValueError("empty graph")
    counts = {}
    for d in g.degrees():
        counts[int(d)] = counts.get(int(d), 0) + 1
    return {k: c / g.n for k, c in sorted(counts.items())}


def _bfs_hops(g: Graph, source: int) -> np.ndarray:
    dist = np.full(g.n, np.inf)
    dist[source] = 0
    q = deque([source])
    while q:
        u = q.popleft()
        du = dist[u]
        for v in g.neighbors(u):
            if dist[v] == np.inf:
                dist[v] = du + 1
                q.append(v)
    return dist


def path_lengths(g: Graph) -> np.ndarray:
    """All-pairs shortest-path hop counts; inf marks disconnected pairs."""
    out = np.empty((g.n, g.n))
    for s in range(g.n):
        out[s] = _bfs_hops(g, s)
    return out


def average_path_length(g: Graph) -> float:
    """Mean hop count over ordered node pairs of a connected graph."""
    if g.n < 2:
        raise ValueError("need at least two nodes")
    lengths = path_lengths(g)
    if np.isinf(lengths).any():
        raise ValueError("disconnected: restrict to giant component")
    return float(lengths.sum() / (g.n * (g.n - 1)))


def diameter(g: Graph) -> int:
    """Longest shortest path of a connected graph."""
    if g.n == 0:
        raise ValueError("empty graph")
    lengths = path_lengths(g)
    if np.isinf(lengths).any():
        raise ValueError("disconnected: restrict to giant component")
    return int(lengths.max())


def clustering_coefficient(g: Graph, v: int) -> float:
    """Fraction of neighbor pairs of v that are themselves connected.

    Defined as 0 for degree < 2.
    """
    nbrs = g.neighbors(v)
    k = len(nbrs)
    if k < 2:
        return 0.0
    links = 0
    sets = g.neighbor_sets()
    for i in range(k):
        si = sets[nbrs[i]]
        for j in range(i + 1, k):
            if nbrs[j] in si:
                links += 1
    return 2.0 * links / (k * (k - 1))


def degree_centrality(g: Graph) -> CentralityVector:
    return CentralityVector(g.degrees().astype(float), kind="degree")


def clustering_centrality(g: Graph) -> CentralityVector:
    vals = np.array([clustering_coefficient(g, v) for v in range(g.n)])
    return CentralityVector(vals, kind="clustering")


def betweenness_centrality(g: Graph, normalized: bool = False) -> CentralityVector:
    """Betweenness via Brandes single-source accumulation.

    Accumulates shortest-path dependencies over ordered pairs, then
    halves the totals to report on unordered pairs.
    """
    bc = np.zeros(g.n)
    for s in range(g.n):
        # single-source shortest paths with path counts
        dist = np.full(g.n, -1, dtype=np.int64)
        sigma = np.zeros(g.n)
        preds = [[] for _ in range(g.n)]
        dist[s] = 0
        sigma[s] = 1.0
        order = []
        q = deque([s])
        while q:
            u = q.popleft()
            order.append(u)
            for v in g.neighbors(u):
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    q.append(v)
                if dist[v] == dist[u] + 1:
                    sigma[v] += sigma[u]
                    preds[v].append(u)
        delta = np.zeros(g.n)
        for w in reversed(order):
            for u in preds[w]:
                delta[u] += sigma[u] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    bc /= 2.0
    vec = CentralityVector(bc, kind="betweenness")
    return normalize_by_max(vec) if normalized else vec


def connected_components(g: Graph):
    """Components as sorted node lists, ordered by (-size, smallest id)."""
    if g.n == 0:
        raise ValueError("empty graph")
    seen = np.zeros(g.n, dtype=bool)
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        comp = []
        seen[s] = True
        q = deque([s])
        while q:
            u = q.popleft()
            comp.append(u)
            for v in g.neighbors(u):
                if not seen[v]:
                    seen[v] = True
                    q.append(v)
        comps.append(sorted(comp))
    comps.sort(key=lambda c: (-len(c), c[0]))
    return comps


def subgraph(g: Graph, nodes) -> Graph:
    """Dense re-indexed induced subgraph; labels carry node identity."""
    nodes = sorted(nodes)
    index = {v: i for i, v in enumerate(nodes)}
    node_set = set(nodes)
    edges = []
    weights = []
    for (u, v), w in zip(g.edge_list(), g.edge_weights()):
        if u in node_set and v in node_set:
            edges.append((index[u], index[v]))
            weights.append(w)
    labels = [g.label_of(v) for v in nodes]
    coords = g.coords[nodes] if g.coords is not None else None
    blocks = g.blocks[nodes] if g.blocks is not None else None
    return Graph(len(nodes), edges, weights=np.array(weights), labels=labels,
                 coords=coords, blocks=blocks)


def giant_component(g: Graph) -> Graph:
    """Largest connected component (ties to the one holding the smallest id)."""
    comps = connected_components(g)
    top = comps[0]
    if len(top) == g.n:
        return g
    return subgraph(g, top)
