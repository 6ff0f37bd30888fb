import numpy as np
import pytest

from heterorec import (
    build_graph,
    coreness_influence,
    degree_influence,
    hetero_inf,
    hetero_inf_all,
    heteroinf_scores,
    load_scores,
    save_scores,
)
from heterorec.errors import InvalidCapacity
from conftest import random_graph


def naive_coreness(adj_sets):
    """Oracle: for each k, repeatedly strip nodes with fewer than k remaining
    neighbors; a node's core number is the largest k it survives."""
    n = len(adj_sets)
    core = [0] * n
    k = 1
    while True:
        alive = set(range(n))
        changed = True
        while changed:
            changed = False
            for v in list(alive):
                if len(adj_sets[v] & alive) < k:
                    alive.discard(v)
                    changed = True
        if not alive:
            break
        for v in alive:
            core[v] = k
        k += 1
    return core


class TestHeteroInf:
    def test_top_w_sum(self):
        g = build_graph(
            [1.0, 0.45, 0.40, 0.18],
            [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)],
        )
        assert hetero_inf(g, 0, w=2) == pytest.approx(0.85)

    def test_isolated_is_zero(self):
        g = build_graph([1.0, 1.0], [(0, 1, 0.5)])
        assert hetero_inf(g, 1, w=7) == 0.0

    def test_saturation(self, rng):
        g = random_graph(rng, 12, 40)
        for u in range(g.n):
            dst, s = g.spread_out(u)
            assert hetero_inf(g, u, w=g.n) == pytest.approx(float(s.sum()), abs=1e-12)

    def test_invalid_capacity(self):
        g = build_graph([1.0, 1.0], [(0, 1, 0.5)])
        with pytest.raises(InvalidCapacity):
            hetero_inf(g, 0, w=0)

    def test_nondecreasing_in_w_and_bounded(self, rng):
        g = random_graph(rng, 15, 60)
        for u in range(g.n):
            prev = 0.0
            for w in range(1, 8):
                val = hetero_inf(g, u, w)
                assert val >= prev - 1e-12
                assert val <= min(w, g.out_degree(u)) + 1e-12
                prev = val

    def test_tie_break_ascending_id(self):
        # equal spread to nodes 2 and 1: w=1 must keep the smaller id
        g = build_graph([1.0, 0.5, 0.5], [(0, 1, 0.6), (0, 2, 0.6)])
        assert hetero_inf(g, 0, w=1) == pytest.approx(0.3)
        all_scores = hetero_inf_all(g, w=1)
        assert all_scores[0] == pytest.approx(0.3)


class TestDegree:
    def test_values(self):
        g = build_graph([1.0] * 5, [(0, 1, 0.5), (0, 2, 0.5), (0, 3, 0.5)])
        assert degree_influence(g, 0) == 3
        assert degree_influence(g, 4) == 0

    def test_star(self):
        n = 9
        g = build_graph([1.0] * n, [(0, i, 0.5) for i in range(1, n)])
        assert degree_influence(g, 0) == n - 1


class TestCoreness:
    def test_triangle(self):
        g = build_graph([1.0] * 3, [(0, 1, 0.5), (1, 2, 0.5), (2, 0, 0.5)])
        assert list(coreness_influence(g)) == [2, 2, 2]

    def test_star(self):
        g = build_graph([1.0] * 5, [(0, i, 0.5) for i in range(1, 5)])
        assert list(coreness_influence(g)) == [1, 1, 1, 1, 1]

    def test_matches_naive_peeling(self, rng):
        g = random_graph(rng, 30, 120)
        adj = [set() for _ in range(g.n)]
        for u in range(g.n):
            dst, _ = g.out_edges(u)
            for v in dst:
                adj[u].add(int(v))
                adj[int(v)].add(u)
        assert list(coreness_influence(g)) == naive_coreness(adj)

    def test_invariant_to_edge_permutation(self, rng):
        n = 20
        pairs = set()
        while len(pairs) < 50:
            u, v = rng.integers(0, n, 2)
            if u != v:
                pairs.add((int(u), int(v)))
        edges = [(u, v, 0.5) for u, v in pairs]
        g1 = build_graph([1.0] * n, edges)
        perm = list(edges)
        rng.shuffle(perm)
        g2 = build_graph([1.0] * n, perm)
        assert np.array_equal(coreness_influence(g1), coreness_influence(g2))


def test_scores_file_round_trip(tmp_path, rng):
    g = random_graph(rng, 10, 30)
    scores = heteroinf_scores(g, w=3)
    save_scores(scores, g, tmp_path / "s.tsv")
    loaded = load_scores(tmp_path / "s.tsv")
    assert set(loaded) == set(int(e) for e in g.external_ids)
    for i in range(g.n):
        assert loaded[int(g.external_ids[i])] == pytest.approx(scores.scores[i])
