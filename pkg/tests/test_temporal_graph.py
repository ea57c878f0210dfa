import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dymond.temporal_graph import (
    RawEvent,
    Snapshot,
    TemporalGraph,
    ingest,
    load_any_graph,
    load_graph,
    node_first_arrivals,
    read_edge_list,
    read_events,
    save_graph,
    write_edge_list,
)


def test_two_events_two_windows():
    g = ingest([(1, 2, 10), (2, 3, 25)], window=20)
    assert g.T == 2
    # dense ids: 1->0, 2->1, 3->2
    assert g[1].edges == {(0, 1)}
    assert g[2].edges == {(1, 2)}
    assert g.labels == (1, 2, 3)


def test_self_loops_only_is_empty():
    with pytest.raises(ValueError, match="empty graph"):
        ingest([(1, 1, 5)], window=10)


def test_no_events():
    with pytest.raises(ValueError, match="no events"):
        ingest([], window=10)


def test_multiplicity_kept_in_one_window():
    g = ingest([(1, 2, 0), (1, 2, 1)], window=10)
    assert g.T == 1
    assert g[1].edge_counts[(0, 1)] == 2


def test_direction_ignored():
    g = ingest([(2, 1, 0), (1, 2, 3)], window=10)
    assert g[1].edge_counts == {(0, 1): 2}


def test_num_windows_last_absorbs_max():
    g = ingest([(1, 2, 0), (2, 3, 50), (3, 4, 100)], num_windows=2)
    assert g.T == 2
    assert g[2].edges == {(1, 2), (2, 3)}


def test_window_arguments_validated():
    with pytest.raises(ValueError):
        ingest([(1, 2, 0)], window=0)
    with pytest.raises(ValueError):
        ingest([(1, 2, 0)], window=5, num_windows=2)
    with pytest.raises(ValueError):
        ingest([(1, 2, 0)])


def test_first_arrivals():
    g = TemporalGraph.from_edge_sets([[(0, 1)], [], [(1, 2)]], labels=[7, 8, 9])
    assert node_first_arrivals(g) == {0: 1, 1: 1, 2: 3}
    assert g[2].active_nodes == {0, 1}  # activity persists without edges


def test_never_connected_node_absent():
    g = TemporalGraph.from_edge_sets([[(0, 1)]], labels=range(3))
    assert 2 not in g.first_active
    assert g.N == 2


def test_single_node_from_t1():
    g = TemporalGraph.from_edge_sets([[]], active=[[0]], labels=[0])
    assert g.first_active == {0: 1}


def test_snapshot_invariants():
    with pytest.raises(ValueError):
        Snapshot(1, frozenset({0}), {(0, 1): 1})
    with pytest.raises(ValueError):
        Snapshot(1, frozenset({0, 1}), {(1, 0): 1})
    with pytest.raises(ValueError):
        Snapshot(1, frozenset({0, 1}), {(0, 1): 0})


def test_read_events_formats(tmp_path):
    p = tmp_path / "ev.txt"
    p.write_text("# header\n1 2 10\n3,4,11\n\n5\t6\t12.0\n")
    assert read_events(p) == [RawEvent(1, 2, 10), RawEvent(3, 4, 11), RawEvent(5, 6, 12)]
    p.write_text("1 2\n")
    with pytest.raises(ValueError, match="expected"):
        read_events(p)


def test_edge_list_roundtrip(tmp_path):
    g = TemporalGraph.from_edge_sets([[(0, 1), (0, 1)], [], [(1, 2)]], labels=range(4))
    p = tmp_path / "g.txt"
    write_edge_list(g, p, header=["T=3", "N=4"])
    h = read_edge_list(p)
    assert h.T == 3 and h.labels == g.labels
    assert [s.edge_counts for s in h.snapshots] == [s.edge_counts for s in g.snapshots]
    assert load_any_graph(p).T == 3


def test_json_schema_tag(tmp_path):
    g = ingest([(1, 2, 10), (2, 3, 25)], window=20)
    p = tmp_path / "g.json"
    save_graph(g, p, meta={"tool": "x"})
    d = json.loads(p.read_text())
    assert d["schema"] == "dymond.temporal-graph/1" and d["meta"] == {"tool": "x"}
    assert load_graph(p) == g
    d["schema"] = "other"
    with pytest.raises(ValueError):
        TemporalGraph.from_dict(d)


events = st.lists(st.tuples(st.integers(0, 8), st.integers(0, 8), st.integers(0, 200)), min_size=1, max_size=60)


@settings(max_examples=60, deadline=None)
@given(events, st.integers(1, 50))
def test_ingest_properties(ev, w):
    non_loop = [e for e in ev if e[0] != e[1]]
    if not non_loop:
        with pytest.raises(ValueError):
            ingest(ev, window=w)
        return
    g = ingest(ev, window=w)
    assert g.n_events() == len(non_loop)
    for s in g.snapshots:
        for u, v in s.edges:
            assert u in s.active_nodes and v in s.active_nodes
    for t in range(1, g.T):
        assert g[t].active_nodes <= g[t + 1].active_nodes
    for p, ts in g.edge_timesteps.items():
        assert ts == [s.index for s in g.snapshots if p in s.edge_counts]
    for v, t in g.first_active.items():
        assert t == min(s.index for s in g.snapshots if v in s.active_nodes)
    # serialise, then re-ingest the written events with the same windowing
    again = TemporalGraph.from_dict(json.loads(json.dumps(g.to_dict())))
    assert again == g
    base = min(e[2] for e in non_loop) // w
    raw = [(g.labels[u], g.labels[v], (base + t - 1) * w) for t, s in enumerate(g.snapshots, 1)
           for (u, v), c in s.edge_counts.items() for _ in range(c)]
    assert ingest(raw, window=w) == g
