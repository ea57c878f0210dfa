import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dymond.motif_census import (
    Triplet,
    census,
    classify,
    decode_triplets,
    edge_context,
    encode_triplets,
    remaining_counts,
    transition_matrix,
)
from dymond.temporal_graph import Snapshot, TemporalGraph

from oracles import brute_census, brute_transitions, random_temporal_graph


def snap(edges, nodes=range(4)):
    return Snapshot(1, frozenset(nodes), {e: 1 for e in edges})


@pytest.mark.parametrize("edges, expected", [
    ([], 0),
    ([(1, 2), (2, 3)], 2),
    ([(1, 2), (2, 3), (1, 3)], 3),
    ([(0, 1)], 0),
])
def test_classify(edges, expected):
    assert classify(Triplet(1, 2, 3), snap(edges)) == expected


def test_triplet_ordering():
    assert Triplet.of(3, 1, 2) == Triplet(1, 2, 3)
    with pytest.raises(ValueError):
        Triplet.of(1, 1, 2)


def test_encoding_roundtrip():
    a, b, c = np.array([0, 1]), np.array([2, 5]), np.array([3, 9])
    codes = encode_triplets(a, b, c, 10)
    for x, y in zip(decode_triplets(codes, 10), (a, b, c)):
        assert (x == y).all()


def test_type_upgraded_over_time():
    g = TemporalGraph.from_edge_sets([[(1, 2), (2, 3)], [(1, 2), (2, 3), (1, 3)]], labels=range(4))
    assert census(g).type_of((1, 2, 3)) == 3


def test_isolated_active_node_forms_one_edge_motif():
    g = TemporalGraph.from_edge_sets([[(1, 2)]], active=[[1, 2, 3]], labels=range(4))
    cen = census(g)
    assert cen.types_by_triplet() == {(1, 2, 3): 1}


def test_empty_graph_census():
    g = TemporalGraph.from_edge_sets([[]], active=[[0, 1, 2]], labels=range(3))
    assert len(census(g)) == 0


def test_type_counts():
    g = TemporalGraph.from_edge_sets([[(0, 1), (1, 2), (0, 2), (2, 3)]], labels=range(4))
    # triangle {0,1,2}; wedges {0,2,3}, {1,2,3}; triplet {0,1,3} has edge (0,1)
    assert census(g).type_counts().tolist() == [0, 1, 2, 1]


@pytest.mark.parametrize("c, n3, n2, n1, expected", [
    (2, 1, 2, 0, (1, 1, 0)),
    (1, 0, 0, 1, (0, 0, 0)),
    (1, 0, 1, 0, (0, 0, 0)),
    (3, 2, 5, 5, (2, 2, 2)),
])
def test_remaining_chain(c, n3, n2, n1, expected):
    assert tuple(int(x) for x in remaining_counts(c, n3, n2, n1)) == expected


def test_edge_context_of_shared_triangle_edge():
    # edge (0,1) twice: one triangle {0,1,2}, wedges {0,1,3} and {0,1,4}
    es = [[(0, 1), (0, 1), (0, 2), (1, 2), (1, 3), (0, 4)]]
    g = TemporalGraph.from_edge_sets(es, labels=range(5))
    ctx = {c.pair: c for c in edge_context(g, census(g))}[(0, 1)]
    assert (ctx.c_t, ctx.n3, ctx.n2, ctx.n1) == (2, 1, 2, 0)
    assert (ctx.r3, ctx.r2, ctx.r1) == (1, 1, 0)


def test_transition_examples():
    g = TemporalGraph.from_edge_sets([[(1, 2), (2, 3)], []], active=[[1, 2, 3]] * 2, labels=range(4))
    assert transition_matrix(g).counts[2, 0] == 1
    g = TemporalGraph.from_edge_sets([[(1, 2)], [(1, 2), (2, 3), (1, 3)]], active=[[1, 2, 3]] * 2,
                                     labels=range(4))
    assert transition_matrix(g).counts[1, 3] == 1


def test_persistent_graph_is_diagonal():
    es = [[(0, 1), (1, 2), (0, 2), (2, 3)]] * 4
    tm = transition_matrix(TemporalGraph.from_edge_sets(es, labels=range(5)))
    off = tm.counts - np.diag(np.diag(tm.counts))
    assert off.sum() == 0
    p = tm.probabilities
    for i in range(4):
        assert p[i].sum() == pytest.approx(1.0) or i in tm.empty_rows


def test_transition_needs_two_snapshots(triangle_graph):
    with pytest.raises(ValueError, match="two snapshots"):
        transition_matrix(TemporalGraph(triangle_graph.snapshots[:1], triangle_graph.labels))


def test_transition_csv(tmp_path, triangle_graph):
    p = tmp_path / "t.csv"
    transition_matrix(triangle_graph).to_csv(p, header=("dymond test",))
    lines = p.read_text().splitlines()
    assert lines[0] == "# dymond test"
    assert lines[1].startswith("# empty row counts only")
    assert lines[2] == "from,empty,1-edge,wedge,triangle"
    assert lines[6] == "triangle,0.000000,0.000000,0.000000,1.000000"


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 12), st.integers(1, 5), st.floats(0, 0.7))
def test_census_matches_brute_force(seed, n, T, density):
    g = random_temporal_graph(np.random.default_rng(seed), n, T, density)
    assert census(g).types_by_triplet() == brute_census(g)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 10), st.integers(2, 5), st.floats(0, 0.7))
def test_transitions_match_brute_force(seed, n, T, density):
    g = random_temporal_graph(np.random.default_rng(seed), n, T, density)
    tm = transition_matrix(g)
    assert (tm.counts == brute_transitions(g)).all()
    # one observation per eligible triplet per consecutive pair
    total = sum(len(list(itertools.combinations(g[t].active_nodes & g[t + 1].active_nodes, 3)))
                for t in range(1, g.T))
    assert tm.counts.sum() == total
    rows = tm.probabilities.sum(axis=1)
    for i in range(4):
        assert rows[i] == pytest.approx(0.0 if i in tm.empty_rows else 1.0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 12), st.integers(1, 4))
def test_remaining_counts_ordered(seed, n, T):
    g = random_temporal_graph(np.random.default_rng(seed), n, T, 0.4)
    for c in edge_context(g, census(g)):
        assert 0 <= c.r1 <= c.r2 <= c.r3 <= c.c_t
