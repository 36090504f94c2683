"""Edge-disjoint 4-node motif census via Weisfeiler-Lehman hashing.

Six connected 4-node templates (path4, star4, cycle4, paw, diamond,
clique4) are counted greedily: candidates come from a star expansion
and a path expansion around each node in ascending id order, each
candidate's induced subgraph is WL-hashed and matched against the
template library densest-first, and a match claims all induced edges so
no edge is ever counted twice. The greedy claiming makes the census a
conservative lower bound that depends on the fixed scan order; a full
lexicographic enumeration (`brute_force_census`) serves as the small-
graph oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from hashlib import blake2b
from itertools import combinations

import numpy as np

from netdiff.graph import Graph

_CANONICAL_EDGES = {
    "clique4": ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)),
    "diamond": ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3)),
    "paw": ((0, 1), (0, 2), (0, 3), (1, 2)),
    "cycle4": ((0, 1), (1, 2), (2, 3), (0, 3)),
    "star4": ((0, 1), (0, 2), (0, 3)),
    "path4": ((0, 1), (1, 2), (2, 3)),
}

# densest-first match priority ("reverse" template order)
MATCH_ORDER = ("clique4", "diamond", "paw", "cycle4", "star4", "path4")

TEMPLATE_NAMES = ("path4", "star4", "cycle4", "paw", "diamond", "clique4")


def _digest(text: str) -> str:
    return blake2b(text.encode("ascii"), digest_size=8).hexdigest()


def wl_hash(g: Graph, iterations: int = 3) -> str:
    """Isomorphism-invariant digest of a 4-node graph.

    Labels start as degrees; each round hashes (own label, sorted
    neighbor labels); the digest hashes the sorted final label multiset.
    """
    if g.n != 4:
        raise ValueError("WL hash is defined on 4-node graphs")
    labels = [str(g.degree(v)) for v in range(4)]
    for _ in range(iterations):
        labels = [
            _digest(labels[v] + "|" + ",".join(sorted(labels[w] for w in g.neighbors(v))))
            for v in range(4)
        ]
    return _digest(",".join(sorted(labels)))


@dataclass(frozen=True)
class MotifTemplate:
    name: str
    edges: tuple
    edge_count: int
    wl_signature: str
    degree_multiset: tuple


def _build_templates():
    out = []
    for name in MATCH_ORDER:
        edges = _CANONICAL_EDGES[name]
        g = Graph(4, edges)
        out.append(MotifTemplate(
            name=name,
            edges=edges,
            edge_count=len(edges),
            wl_signature=wl_hash(g),
            degree_multiset=tuple(sorted(int(d) for d in g.degrees())),
        ))
    return tuple(out)


TEMPLATES = _build_templates()

# pair slots of a sorted 4-tuple, in lexicographic order
_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def _build_mask_table():
    """Classify each of the 64 labeled 4-node edge sets once, via WL.

    Maps the 6-bit induced-edge mask to a template name (None when the
    induced graph is disconnected and so matches no template).
    """
    table = [None] * 64
    for mask in range(64):
        edges = [_PAIRS[i] for i in range(6) if mask >> i & 1]
        g = Graph(4, edges)
        h = wl_hash(g)
        for tpl in TEMPLATES:  # densest-first
            if h == tpl.wl_signature:
                table[mask] = tpl.name
                break
    return tuple(table)


_MASK_TEMPLATE = _build_mask_table()
_TEMPLATE_EDGE_COUNT = {t.name: t.edge_count for t in TEMPLATES}


@dataclass
class MotifCensus:
    counts: dict
    used_edges: set

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def concentration(census: MotifCensus) -> dict:
    """C_i = N_i / sum(N); concentrations sum to 1."""
    total = census.total
    if total == 0:
        raise ValueError("no motifs found")
    return {name: census.counts[name] / total for name in TEMPLATE_NAMES}


def _scan(g: Graph, candidates):
    """Shared matcher: claim edge-disjoint instances in candidate order."""
    edge_id = {}
    for i, e in enumerate(g.edge_list()):
        edge_id[e] = i
    used = np.zeros(len(edge_id), dtype=bool)
    counts = {name: 0 for name in TEMPLATE_NAMES}
    adj = g.neighbor_sets()

    for s in candidates(used, edge_id):
        mask = 0
        eids = []
        blocked = False
        for slot, (i, j) in enumerate(_PAIRS):
            u, v = s[i], s[j]
            if v in adj[u]:
                eid = edge_id[(u, v)]
                if used[eid]:
                    blocked = True
                    break
                mask |= 1 << slot
                eids.append(eid)
        if blocked:
            continue
        name = _MASK_TEMPLATE[mask]
        if name is None:
            continue  # induced subgraph disconnected
        counts[name] += 1
        for eid in eids:
            used[eid] = True

    edge_list = g.edge_list()
    used_edges = {edge_list[i] for i in np.nonzero(used)[0]}
    return MotifCensus(counts=counts, used_edges=used_edges)


def _candidate_pool(g: Graph) -> list:
    """Unique 4-sets from the star and path expansions, in ascending order.

    The pool is exactly the connected 4-subsets: a connected 4-node
    graph either has a degree-3 node (star expansion finds it) or a
    spanning path (path expansion walks it). Walks are generated from
    both endpoints, so only the direction with the smaller start is
    taken.
    """
    adj = [[int(x) for x in g.neighbors(v)] for v in range(g.n)]
    seen = set()
    add = seen.add
    for u in range(g.n):
        nbrs = adj[u]
        if len(nbrs) >= 3:
            for v, w, x in combinations(nbrs, 3):
                a, b, c, d = sorted((u, v, w, x))
                add(a << 30 | b << 20 | c << 10 | d)
        for v in nbrs:
            for w in adj[v]:
                if w == u:
                    continue
                for x in adj[w]:
                    if x == u or x == v or x < u:
                        continue
                    a, b, c, d = sorted((u, v, w, x))
                    add(a << 30 | b << 20 | c << 10 | d)
    out = []
    for key in sorted(seen):
        out.append((key >> 30, key >> 20 & 1023, key >> 10 & 1023, key & 1023))
    return out


def census(g: Graph) -> MotifCensus:
    """Greedy edge-disjoint census over star- and path-expansion candidates.

    Candidate 4-sets are collected from the two expansions around every
    node, then matched in ascending (lexicographic) order so the claim
    sequence is deterministic and coincides with the brute-force
    oracle's. Greedy claiming still makes counts a conservative lower
    bound on overlapping occurrence counts.
    """
    if g.n >= 1024:
        return _scan(g, lambda used, edge_id: iter(_candidate_pool_wide(g)))
    pool = _candidate_pool(g)
    return _scan(g, lambda used, edge_id: iter(pool))


def _candidate_pool_wide(g: Graph) -> list:
    """Tuple-keyed variant of the pool for graphs too large to bit-pack."""
    adj = [[int(x) for x in g.neighbors(v)] for v in range(g.n)]
    seen = set()
    for u in range(g.n):
        nbrs = adj[u]
        if len(nbrs) >= 3:
            for combo in combinations(nbrs, 3):
                seen.add(tuple(sorted((u,) + combo)))
        for v in nbrs:
            for w in adj[v]:
                if w == u:
                    continue
                for x in adj[w]:
                    if x == u or x == v or x < u:
                        continue
                    seen.add(tuple(sorted((u, v, w, x))))
    return sorted(seen)


def brute_force_census(g: Graph) -> MotifCensus:
    """Oracle: identical matching over all 4-subsets in lexicographic order."""
    if g.n > 30:
        raise ValueError("brute force census limited to 30 nodes")

    def candidates(used, edge_id):
        yield from combinations(range(g.n), 4)

    return _scan(g, candidates)
