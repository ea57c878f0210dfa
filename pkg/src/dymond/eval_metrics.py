"""Snapshot structure metrics, node-aligned behaviour metrics and KS comparisons."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, NamedTuple, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .temporal_graph import Snapshot, TemporalGraph

GRAPH_METRICS = ("density", "avg_local_clustering", "global_clustering", "avg_path_length", "s_metric")
NODE_METRICS = ("activity_rate", "degree", "local_clustering", "closeness", "component_size")


class GraphMetrics(NamedTuple):
    density: float
    avg_local_clustering: float
    global_clustering: float
    avg_path_length: float
    s_metric: float


def _triangles_per_node(adj: Mapping[int, set]) -> dict[int, int]:
    return {u: sum(len(adj[u] & adj[v]) for v in nbrs) // 2 for u, nbrs in adj.items()}


def _local(tri: int, deg: int) -> float:
    return 0.0 if deg < 2 else tri / (deg * (deg - 1) / 2)


def global_clustering(snapshot: Snapshot) -> float:
    adj = snapshot.adjacency()
    tri = _triangles_per_node(adj)
    wedges = sum(len(n) * (len(n) - 1) // 2 for n in adj.values())
    return 0.0 if wedges == 0 else sum(tri.values()) / wedges


def _distances(nodes: list, adj: Mapping[int, set]) -> np.ndarray:
    index = {v: i for i, v in enumerate(nodes)}
    rows = [index[u] for u in nodes for _ in adj[u]]
    cols = [index[v] for u in nodes for v in adj[u]]
    mat = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(nodes), len(nodes)))
    return shortest_path(mat, method="D", unweighted=True, directed=False)


def _components(nodes: list, adj: Mapping[int, set]) -> np.ndarray:
    index = {v: i for i, v in enumerate(nodes)}
    rows = [index[u] for u in nodes for _ in adj[u]]
    cols = [index[v] for u in nodes for v in adj[u]]
    mat = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(nodes), len(nodes)))
    return connected_components(mat, directed=False)[1]


def largest_component(nodes: list, labels: np.ndarray) -> list:
    """Largest component by size; ties go to the one holding the smallest node."""
    sizes = np.bincount(labels)
    best = max(range(len(sizes)), key=lambda c: (sizes[c], -min(n for n, l in zip(nodes, labels) if l == c)))
    return [n for n, l in zip(nodes, labels) if l == best]


def graph_metrics(snapshot: Snapshot) -> GraphMetrics:
    """Structure metrics of one snapshot over its active nodes.

    A snapshot without active nodes yields all zeros.
    """
    nodes = sorted(snapshot.active_nodes)
    n = len(nodes)
    if n == 0:
        return GraphMetrics(0.0, 0.0, 0.0, 0.0, 0.0)
    adj = snapshot.adjacency()
    m = len(snapshot.edge_counts)
    deg = {u: len(adj[u]) for u in nodes}
    tri = _triangles_per_node(adj)

    density = 0.0 if n < 2 else 2 * m / (n * (n - 1))
    avg_local = math.fsum(_local(tri[u], deg[u]) for u in nodes) / n
    wedges = sum(d * (d - 1) // 2 for d in deg.values())
    glob = 0.0 if wedges == 0 else sum(tri.values()) / wedges

    lcc = largest_component(nodes, _components(nodes, adj))
    k = len(lcc)
    if k < 2:
        apl = 0.0
    else:
        dist = _distances(lcc, {u: adj[u] for u in lcc})
        apl = int(dist.sum()) / (k * (k - 1))
    s = sum(deg[u] * deg[v] for u, v in snapshot.edge_counts)
    return GraphMetrics(density, avg_local, glob, apl, float(s))


def graph_metric_series(g: TemporalGraph) -> dict[str, list[float]]:
    rows = [graph_metrics(s) for s in g.snapshots]
    return {name: [getattr(r, name) for r in rows] for name in GRAPH_METRICS}


def node_metrics(g: TemporalGraph) -> dict[str, dict[int, list[float]]]:
    """Per-node value lists over the snapshots where the node is active.

    ``activity_rate`` holds a single value per node: the fraction of its
    active snapshots in which it has at least one edge.
    """
    out = {name: {} for name in NODE_METRICS}
    busy: dict[int, int] = {}
    seen: dict[int, int] = {}
    for snap in g.snapshots:
        nodes = sorted(snap.active_nodes)
        if not nodes:
            continue
        adj = snap.adjacency()
        tri = _triangles_per_node(adj)
        dist = _distances(nodes, adj)
        comp = _components(nodes, adj)
        sizes = np.bincount(comp)
        with np.errstate(divide="ignore"):
            inv = np.where(np.isfinite(dist) & (dist > 0), 1.0 / dist, 0.0)
        closeness = inv.sum(axis=1)
        for i, u in enumerate(nodes):
            d = len(adj[u])
            out["degree"].setdefault(u, []).append(float(d))
            out["local_clustering"].setdefault(u, []).append(_local(tri[u], d))
            out["closeness"].setdefault(u, []).append(float(closeness[i]))
            out["component_size"].setdefault(u, []).append(float(sizes[comp[i]]))
            seen[u] = seen.get(u, 0) + 1
            busy[u] = busy.get(u, 0) + (d > 0)
    out["activity_rate"] = {u: [busy[u] / seen[u]] for u in sorted(seen)}
    return out


def iqr_points(series: Mapping[int, Sequence[float]]) -> np.ndarray:
    """``(Q1, Q3)`` per node using linear-interpolation quantiles."""
    pts = [np.percentile(np.asarray(v, dtype=float), [25, 75]) for _, v in sorted(series.items()) if len(v)]
    return np.array(pts, dtype=float).reshape(-1, 2)


def ks_statistic(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic ``sup |F_a - F_b|``."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if len(a) == 0 or len(b) == 0:
        raise ValueError("KS statistic needs two non-empty samples")
    x = np.concatenate([a, b])
    na, nb = len(a), len(b)
    # integer cross-multiplied gap keeps ties between models exact
    ca = np.searchsorted(a, x, side="right").astype(np.int64)
    cb = np.searchsorted(b, x, side="right").astype(np.int64)
    return float(np.max(np.abs(ca * nb - cb * na))) / (na * nb)


def _quadrant_counts(sample: np.ndarray, anchors: np.ndarray) -> np.ndarray:
    right = sample[None, :, 0] > anchors[:, None, 0]
    up = sample[None, :, 1] > anchors[:, None, 1]
    quads = np.stack([right & up, ~right & up, ~right & ~up, right & ~up], axis=-1)
    return quads.sum(axis=1, dtype=np.int64)


def ks2d_statistic(a, b) -> float:
    """Fasano-Franceschini two-sample statistic on 2-D points.

    Every point of either sample anchors four quadrants (``x > x0`` vs
    ``x <= x0`` crossed with the same for ``y``); the statistic is the largest
    absolute difference of the samples' quadrant fractions.
    """
    a = np.asarray(a, dtype=float).reshape(-1, 2)
    b = np.asarray(b, dtype=float).reshape(-1, 2)
    if len(a) == 0 or len(b) == 0:
        raise ValueError("2-D KS statistic needs two non-empty samples")
    anchors = np.concatenate([a, b])
    na, nb = len(a), len(b)
    best = 0
    for lo in range(0, len(anchors), 512):
        chunk = anchors[lo:lo + 512]
        diff = np.abs(_quadrant_counts(a, chunk) * nb - _quadrant_counts(b, chunk) * na)
        best = max(best, int(diff.max()))
    return best / (na * nb)


def competition_ranks(values: Mapping[str, float]) -> dict[str, int]:
    """Rank ascending; tied values share the smallest rank."""
    return {k: 1 + sum(other < v for other in values.values()) for k, v in values.items()}


def mrr(ks_tables: Mapping[str, Mapping[str, float]], method: str = "per_metric") -> dict[str, float]:
    """Mean reciprocal rank of each model's KS statistics (smaller is better).

    ``per_metric`` ranks models separately for every metric and averages the
    reciprocal ranks; ``mean_ks`` ranks models once by their mean statistic.
    """
    models = list(ks_tables)
    if not models:
        return {}
    if method == "mean_ks":
        means = {m: float(np.mean(list(ks_tables[m].values()))) for m in models}
        return {m: 1.0 / r for m, r in competition_ranks(means).items()}
    if method != "per_metric":
        raise ValueError(f"unknown MRR method {method!r}")
    metrics = sorted(set().union(*(ks_tables[m].keys() for m in models)))
    recip = {m: [] for m in models}
    for metric in metrics:
        ranks = competition_ranks({m: ks_tables[m][metric] for m in models})
        for m, r in ranks.items():
            recip[m].append(1.0 / r)
    return {m: float(np.mean(v)) for m, v in recip.items()}


@dataclass
class EvalReport:
    graph_ks: dict  # model -> metric -> KS statistic
    node_ks2d: dict  # model -> metric -> 2-D KS statistic
    mrr_graph: dict
    mrr_node: dict
    notes: list = field(default_factory=list)
    mrr_method: str = "per_metric"

    def rows(self):
        for table in (self.graph_ks, self.node_ks2d):
            for model, stats in table.items():
                for metric, value in stats.items():
                    yield metric, model, value

    def to_csv(self, path, header: Sequence[str] = ()) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            for h in header:
                fh.write(f"# {h}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["metric", "model", "statistic"])
            for metric, model, value in self.rows():
                w.writerow([metric, model, f"{value:.6f}"])

    def summary(self) -> dict:
        return {
            "graph_structure_ks": self.graph_ks,
            "node_behavior_ks2d": self.node_ks2d,
            "mrr": {"method": self.mrr_method, "graph_structure": self.mrr_graph,
                    "node_behavior": self.mrr_node},
            "notes": self.notes,
        }

    def to_json(self, path, meta: Mapping | None = None) -> None:
        d = {"meta": dict(meta)} if meta else {}
        d.update(self.summary())
        Path(path).write_text(json.dumps(d, indent=2, sort_keys=False) + "\n", encoding="utf-8")

    def format_tables(self) -> str:
        lines = []
        for title, table in (("Graph Structure Mean Reciprocal Rank", self.mrr_graph),
                             ("Node Behavior Metrics Mean Reciprocal Rank", self.mrr_node)):
            lines.append(title)
            lines.extend(f"  {m:<12s} {v:.2f}" for m, v in table.items())
        return "\n".join(lines)


def evaluate(observed: TemporalGraph, generated: Mapping[str, TemporalGraph],
             mrr_method: str = "per_metric") -> EvalReport:
    obs_series = graph_metric_series(observed)
    obs_nodes = {k: iqr_points(v) for k, v in node_metrics(observed).items()}
    graph_ks, node_ks, notes = {}, {}, []
    for name, g in generated.items():
        if g.T != observed.T:
            notes.append(f"{name}: T={g.T} differs from observed T={observed.T}; "
                         "distributions are compared regardless")
        series = graph_metric_series(g)
        graph_ks[name] = {m: ks_statistic(obs_series[m], series[m]) for m in GRAPH_METRICS}
        nodes = node_metrics(g)
        node_ks[name] = {}
        for m in NODE_METRICS:
            pts = iqr_points(nodes[m])
            if len(pts) == 0 or len(obs_nodes[m]) == 0:
                notes.append(f"{name}: no active nodes for {m}; statistic set to 1")
                node_ks[name][m] = 1.0
            else:
                node_ks[name][m] = ks2d_statistic(obs_nodes[m], pts)
    return EvalReport(graph_ks, node_ks, mrr(graph_ks, mrr_method), mrr(node_ks, mrr_method),
                      notes, mrr_method)
