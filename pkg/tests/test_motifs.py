import itertools

import numpy as np
import pytest

from netdiff.generators import erdos_renyi
from netdiff.graph import Graph
from netdiff.motifs import (MATCH_ORDER, TEMPLATE_NAMES, TEMPLATES, MotifCensus,
                            brute_force_census, census, concentration, wl_hash)

from conftest import complete_graph, cycle_graph, star_graph


def _relabel(edges, perm):
    return [(perm[u], perm[v]) for u, v in edges]


def test_wl_hash_isomorphism_invariance():
    paw = [(0, 1), (0, 2), (0, 3), (1, 2)]
    base = wl_hash(Graph(4, paw))
    for perm in itertools.permutations(range(4)):
        assert wl_hash(Graph(4, _relabel(paw, perm))) == base


def test_wl_hash_distinguishes_all_templates():
    sigs = {t.name: t.wl_signature for t in TEMPLATES}
    assert len(set(sigs.values())) == 6
    assert sigs["clique4"] != sigs["cycle4"]


def test_wl_hash_wrong_node_count():
    with pytest.raises(ValueError):
        wl_hash(complete_graph(5))


def test_template_degree_multisets():
    got = {t.name: t.degree_multiset for t in TEMPLATES}
    assert got == {
        "path4": (1, 1, 2, 2),
        "star4": (1, 1, 1, 3),
        "cycle4": (2, 2, 2, 2),
        "paw": (1, 2, 2, 3),
        "diamond": (2, 2, 3, 3),
        "clique4": (3, 3, 3, 3),
    }
    assert MATCH_ORDER[0] == "clique4"  # densest-first priority


def test_wl_matches_degree_multiset_classification():
    """On 4 nodes the degree multiset already separates the six shapes;
    WL must agree with it for every labeled 4-node graph."""
    by_degrees = {t.degree_multiset: t.name for t in TEMPLATES}
    pairs = list(itertools.combinations(range(4), 2))
    for mask in range(64):
        edges = [pairs[i] for i in range(6) if mask >> i & 1]
        g = Graph(4, edges)
        h = wl_hash(g)
        wl_name = next((t.name for t in TEMPLATES if t.wl_signature == h), None)
        degs = tuple(sorted(int(d) for d in g.degrees()))
        assert wl_name == by_degrees.get(degs)


def test_census_k4(k4):
    c = census(k4)
    assert c.counts == {"path4": 0, "star4": 0, "cycle4": 0, "paw": 0,
                        "diamond": 0, "clique4": 1}


def test_census_star(star4):
    assert census(star4).counts["star4"] == 1
    assert census(star4).total == 1


def test_census_two_k4_sharing_an_edge():
    edges = set()
    for a, b in itertools.combinations(range(4), 2):
        edges.add((a, b))
    for a, b in itertools.combinations([2, 3, 4, 5], 2):
        edges.add((a, b))
    g = Graph(6, sorted(edges))
    c = census(g)
    assert c.counts["clique4"] == 1 and c.total == 1
    assert brute_force_census(g).counts == c.counts


def test_census_six_cycle_golden():
    """Golden value recorded from the lexicographic oracle: the first P4
    claims {01,12,23} and {0,3,4,5} still induces a free P4."""
    c = brute_force_census(cycle_graph(6))
    assert c.counts["path4"] == 2 and c.total == 2
    assert census(cycle_graph(6)).counts == c.counts


def test_concentration():
    c = MotifCensus(counts={"star4": 2, "path4": 2, "cycle4": 0, "paw": 0,
                            "diamond": 0, "clique4": 0}, used_edges=set())
    conc = concentration(c)
    assert conc["star4"] == 0.5 and conc["path4"] == 0.5

    single = MotifCensus(counts={n: (1 if n == "paw" else 0) for n in TEMPLATE_NAMES},
                         used_edges=set())
    assert concentration(single)["paw"] == 1.0

    with pytest.raises(ValueError, match="no motifs"):
        concentration(MotifCensus(counts={n: 0 for n in TEMPLATE_NAMES}, used_edges=set()))


def test_concentration_sums_to_one():
    for seed in range(10):
        g = erdos_renyi(30, 0.15, seed=seed)
        c = census(g)
        if c.total:
            assert sum(concentration(c).values()) == pytest.approx(1.0, abs=1e-12)


def test_brute_force_guard():
    with pytest.raises(ValueError, match="30"):
        brute_force_census(erdos_renyi(31, 0.1, seed=1))


def test_census_equals_brute_force_sweep():
    for seed in range(50):
        g = erdos_renyi(8, 0.4, seed=5000 + seed)
        a, b = census(g), brute_force_census(g)
        assert a.counts == b.counts
        assert a.used_edges == b.used_edges


def test_edge_disjointness_bookkeeping():
    for seed in range(20):
        g = erdos_renyi(25, 0.2, seed=seed)
        c = census(g)
        per_template = {t.name: t.edge_count for t in TEMPLATES}
        claimed = sum(c.counts[n] * per_template[n] for n in TEMPLATE_NAMES)
        assert claimed == len(c.used_edges)
        assert len(c.used_edges) <= g.edge_count
        assert c.used_edges <= set(g.edge_list())
        n4 = g.n * (g.n - 1) * (g.n - 2) * (g.n - 3) / 24
        assert c.total <= n4


def test_census_exact_on_vertex_transitive_relabelings():
    """Counts on cycles and cliques are identical across relabelings."""
    rng = np.random.default_rng(3)
    for base in (cycle_graph(8), complete_graph(6)):
        ref = census(base).counts
        for _ in range(5):
            perm = rng.permutation(base.n)
            g = Graph(base.n, [(int(perm[u]), int(perm[v])) for u, v in base.edge_list()])
            assert census(g).counts == ref
