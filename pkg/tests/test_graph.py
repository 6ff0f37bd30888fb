import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heterorec import build_graph, derive_candidates, load_graph, save_graph, save_id_map
from heterorec.errors import (
    DanglingEndpoint,
    DuplicateEdge,
    EmptyInviterSet,
    MalformedRow,
    NoSuchEdge,
    ProbabilityOutOfRange,
    SelfLoop,
    UnknownNode,
)
from conftest import random_graph


def _load(nodes: str, edges: str):
    return load_graph(io.StringIO(nodes), io.StringIO(edges))


class TestLoadGraph:
    def test_basic_construction(self):
        g = _load("0\t1.0\n1\t0.5\n", "0\t1\t0.8\n")
        assert g.n == 2
        assert g.m == 1
        assert g.spread_prob(0, 1) == pytest.approx(0.4)

    def test_self_loop_rejected(self):
        with pytest.raises(SelfLoop):
            _load("0\t1.0\n1\t0.5\n", "0\t0\t0.5\n")

    def test_dangling_endpoint_rejected(self):
        with pytest.raises(DanglingEndpoint):
            _load("0\t1.0\n1\t0.5\n", "0\t7\t0.5\n")

    def test_duplicate_edge_rejected(self):
        with pytest.raises(DuplicateEdge):
            _load("0\t1.0\n1\t0.5\n", "0\t1\t0.5\n0\t1\t0.2\n")

    def test_probability_out_of_range(self):
        with pytest.raises(ProbabilityOutOfRange):
            _load("0\t1.0\n1\t1.5\n", "")
        with pytest.raises(ProbabilityOutOfRange):
            _load("0\t1.0\n1\t0.5\n", "0\t1\t-0.1\n")

    def test_malformed_rows(self):
        with pytest.raises(MalformedRow):
            _load("0\n", "")
        with pytest.raises(MalformedRow):
            _load("0\tabc\n", "")
        with pytest.raises(MalformedRow):
            _load("0\t1.0\n1\t0.5\n", "0\t1\n")
        with pytest.raises(MalformedRow):
            _load("-3\t1.0\n", "")
        with pytest.raises(MalformedRow):
            _load("0\t1.0\n0\t0.5\n", "")

    def test_remap_first_appearance_order(self):
        g = _load("900\t0.1\n5\t0.2\n77\t0.3\n", "900\t77\t0.5\n")
        assert list(g.external_ids) == [900, 5, 77]
        assert g.internal_id(77) == 2
        assert g.spread_prob(0, 2) == pytest.approx(0.15)
        with pytest.raises(UnknownNode):
            g.internal_id(123)

    def test_deterministic(self):
        nodes = "4\t0.25\n9\t0.75\n2\t0.5\n"
        edges = "4\t9\t0.125\n9\t2\t0.5\n"
        g1 = _load(nodes, edges)
        g2 = _load(nodes, edges)
        assert np.array_equal(g1.external_ids, g2.external_ids)
        assert np.array_equal(g1.out_dst, g2.out_dst)
        assert np.array_equal(g1.out_p, g2.out_p)
        assert np.array_equal(g1.accept, g2.accept)


class TestSpreadProb:
    def test_values(self):
        g = build_graph([1.0, 0.5, 1.0, 1.0], [(0, 1, 0.8), (0, 2, 0.0), (0, 3, 1.0)])
        assert g.spread_prob(0, 1) == pytest.approx(0.4)
        assert g.spread_prob(0, 2) == 0.0
        assert g.spread_prob(0, 3) == 1.0

    def test_no_such_edge(self):
        g = build_graph([1.0, 1.0], [(0, 1, 0.5)])
        with pytest.raises(NoSuchEdge):
            g.spread_prob(1, 0)

    def test_bounded_by_factors(self, rng):
        g = random_graph(rng, 25, 120)
        for u in range(g.n):
            dst, p = g.out_edges(u)
            for j, v in enumerate(dst):
                s = g.spread_prob(u, int(v))
                assert 0.0 <= s <= min(p[j], g.accept[v]) + 1e-15


class TestDeriveCandidates:
    def test_union_of_out_neighbors(self):
        g = build_graph([1.0] * 3, [(0, 1, 0.5), (0, 2, 0.5)])
        assert derive_candidates(g, {0}) == {1, 2}

    def test_inviters_can_be_candidates(self):
        g = build_graph([1.0] * 2, [(0, 1, 0.5), (1, 0, 0.5)])
        assert derive_candidates(g, {0, 1}) == {0, 1}

    def test_no_out_edges_gives_empty_set(self):
        g = build_graph([1.0] * 2, [(0, 1, 0.5)])
        assert derive_candidates(g, {1}) == set()

    def test_empty_inviter_set(self):
        g = build_graph([1.0] * 2, [(0, 1, 0.5)])
        with pytest.raises(EmptyInviterSet):
            derive_candidates(g, set())


@st.composite
def edge_lists(draw):
    n = draw(st.integers(min_value=2, max_value=12))
    universe = [(u, v) for u in range(n) for v in range(n) if u != v]
    pairs = draw(st.lists(st.sampled_from(universe), unique=True, max_size=30))
    return n, pairs


@given(edge_lists())
@settings(max_examples=60, deadline=None)
def test_transpose_round_trip(data):
    n, pairs = data
    edges = [(u, v, 0.5) for u, v in pairs]
    g = build_graph([0.5] * n, edges)
    rebuilt = set()
    for v in range(n):
        src, _ = g.in_edges(v)
        for u in src:
            rebuilt.add((int(u), v))
    assert rebuilt == set(pairs)
    # and the forward direction matches too
    forward = set()
    for u in range(n):
        dst, _ = g.out_edges(u)
        forward.update((u, int(v)) for v in dst)
    assert forward == set(pairs)


def test_save_and_reload_round_trip(tmp_path, rng):
    g = random_graph(rng, 15, 60)
    save_graph(g, tmp_path / "nodes.tsv", tmp_path / "edges.tsv")
    save_id_map(g, tmp_path / "map.tsv")
    g2 = load_graph(tmp_path / "nodes.tsv", tmp_path / "edges.tsv")
    assert np.array_equal(g.out_dst, g2.out_dst)
    assert np.allclose(g.out_p, g2.out_p)
    assert np.allclose(g.accept, g2.accept)
    lines = (tmp_path / "map.tsv").read_text().splitlines()
    assert lines[0] == "0\t0"
    assert len(lines) == g.n


def test_graph_arrays_are_immutable(rng):
    g = random_graph(rng, 5, 8)
    with pytest.raises(ValueError):
        g.accept[0] = 0.0
    with pytest.raises(ValueError):
        g.out_p[0] = 0.0
