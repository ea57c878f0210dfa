"""Slow, obviously-correct reference implementations used as test oracles.

Everything here works on plain Python containers and loops over all
candidates; nothing is shared with the package beyond the input types.
"""
from __future__ import annotations

import itertools
import math
from collections import defaultdict

import numpy as np

from dymond.temporal_graph import TemporalGraph

ROLES = ("equal3", "hub", "spoke", "equal2", "outlier")


def random_temporal_graph(rng: np.random.Generator, n: int, T: int, density: float,
                          max_mult: int = 3, arrivals: bool = True) -> TemporalGraph:
    """Random snapshots; edges only between nodes that have already arrived."""
    first = rng.integers(1, T + 1, size=n) if arrivals else np.ones(n, dtype=int)
    edge_sets, active = [], []
    for t in range(1, T + 1):
        alive = [v for v in range(n) if first[v] <= t]
        es = []
        for u, v in itertools.combinations(alive, 2):
            if rng.random() < density:
                es.extend([(u, v)] * int(rng.integers(1, max_mult + 1)))
        edge_sets.append(es)
        active.append(alive)
    return TemporalGraph.from_edge_sets(edge_sets, active=active, labels=range(n))


def edge_type(snapshot, tri) -> int:
    a, b, c = tri
    e = snapshot.edge_counts
    return ((min(a, b), max(a, b)) in e) + ((min(a, c), max(a, c)) in e) + ((min(b, c), max(b, c)) in e)


def brute_census(g: TemporalGraph) -> dict:
    """Max edge count over the snapshots where all three nodes are active, kept if >= 1."""
    out = {}
    for tri in itertools.combinations(range(len(g.labels)), 3):
        best = max((edge_type(s, tri) for s in g.snapshots if s.active_nodes.issuperset(tri)), default=0)
        if best:
            out[tri] = best
    return out


def _pairs(tri):
    a, b, c = tri
    return [(a, b), (a, c), (b, c)]


def role_of(snapshot, tri, node) -> str:
    present = [p for p in _pairs(tri) if p in snapshot.edge_counts]
    if len(present) == 3:
        return "equal3"
    if len(present) == 2:
        return "hub" if all(node in p for p in present) else "spoke"
    if len(present) == 1:
        return "equal2" if node in present[0] else "outlier"
    raise ValueError("no role in empty motif")


def brute_learn(g: TemporalGraph):
    """Line-by-line transcription of the learning rules.

    Returns ``(lambda_v, p_m, rates, lambda_m_type, role_counts)`` with
    ``rates`` a dict triplet -> rate and ``role_counts`` a dict
    ``(node, role) -> float``.
    """
    n = len(g.labels)
    cen = brute_census(g)
    first = g.first_active
    lambda_v = sum(first.values()) / len(first)
    total = math.comb(n, 3)
    p = [sum(1 for x in cen.values() if x == i) / total for i in (1, 2, 3)]
    p_m = [1 - sum(p)] + p

    # |N^(i)(u,v)|: census motifs of recorded type i containing the pair
    nbr = defaultdict(lambda: [0, 0, 0, 0])
    thirds = defaultdict(list)
    for tri, i in cen.items():
        for pr in _pairs(tri):
            nbr[pr][i] += 1
            w = next(x for x in tri if x not in pr)
            thirds[pr].append((w, tri, i))

    count = defaultdict(float)
    csum = defaultdict(float)
    for snap in g.snapshots:
        W = {}
        for (u, v), c in snap.edge_counts.items():
            n1, n2, n3 = nbr[(u, v)][1], nbr[(u, v)][2], nbr[(u, v)][3]
            r3 = min(c, n3)
            r2 = min(r3, n2)
            r1 = min(r2, n1)
            W[(u, v)] = {3: r3 / n3 if n3 else 0.0, 2: r2 / n2 if n2 else 0.0, 1: r1 / n1 if n1 else 0.0}
            if n3 > 0:
                rw = min(c, n3) / (n3 / 3)
                for w, tri, i in thirds[(u, v)]:
                    if i != 3:
                        continue
                    for node in (u, v, w):
                        count[(node, "equal3")] += rw
            if n2 > 0 and r2 > 0:
                rw = min(r2, n2) / (n2 / 2)
                for w, tri, i in thirds[(u, v)]:
                    if i != 2:
                        continue
                    for node in (u, v, w):
                        if role_of(snap, tri, node) == "hub":
                            count[(node, "hub")] += rw
                        else:
                            count[(node, "spoke")] += rw / 2
            if n1 > 0 and r1 > 0:
                rw = min(r1, n1) / n1
                for w, tri, i in thirds[(u, v)]:
                    if i != 1:
                        continue
                    for node in (u, v, w):
                        if role_of(snap, tri, node) == "equal2":
                            count[(node, "equal2")] += min(r1, n1)
                        else:
                            count[(node, "outlier")] += rw
        for tri, i in cen.items():
            present = [pr for pr in _pairs(tri) if pr in snap.edge_counts]
            if present:
                csum[tri] += sum(W[pr][i] for pr in present) / len(present)
    rates = {tri: csum[tri] / g.T for tri in cen}
    lam = []
    for i in (1, 2, 3):
        vals = [rates[tri] for tri, x in cen.items() if x == i]
        lam.append(sum(vals) / len(vals) if vals else None)
    return lambda_v, p_m, rates, tuple(lam), dict(count)


def brute_transitions(g: TemporalGraph) -> np.ndarray:
    counts = np.zeros((4, 4), dtype=np.int64)
    for t in range(1, g.T):
        s0, s1 = g[t], g[t + 1]
        both = sorted(s0.active_nodes & s1.active_nodes)
        for tri in itertools.combinations(both, 3):
            counts[edge_type(s0, tri), edge_type(s1, tri)] += 1
    return counts


def naive_graph_metrics(snapshot) -> dict:
    """Adjacency matrix, triple loops and Floyd-Warshall."""
    nodes = sorted(snapshot.active_nodes)
    n = len(nodes)
    if n == 0:
        return dict(density=0.0, avg_local_clustering=0.0, global_clustering=0.0,
                    avg_path_length=0.0, s_metric=0.0)
    idx = {v: i for i, v in enumerate(nodes)}
    A = [[0] * n for _ in range(n)]
    for u, v in snapshot.edge_counts:
        A[idx[u]][idx[v]] = A[idx[v]][idx[u]] = 1
    deg = [sum(row) for row in A]
    m = sum(deg) // 2
    density = 0.0 if n < 2 else 2 * m / (n * (n - 1))
    tri = [0] * n
    for i in range(n):
        for j in range(n):
            for k in range(j + 1, n):
                if A[i][j] and A[i][k] and A[j][k]:
                    tri[i] += 1
    local = [0.0 if deg[i] < 2 else tri[i] / (deg[i] * (deg[i] - 1) / 2) for i in range(n)]
    wedges = sum(d * (d - 1) // 2 for d in deg)
    glob = 0.0 if wedges == 0 else sum(tri) / wedges

    INF = float("inf")
    D = [[0 if i == j else (1 if A[i][j] else INF) for j in range(n)] for i in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if D[i][k] + D[k][j] < D[i][j]:
                    D[i][j] = D[i][k] + D[k][j]
    comps = []
    seen = set()
    for i in range(n):
        if i not in seen:
            comp = [j for j in range(n) if D[i][j] < INF]
            seen.update(comp)
            comps.append(comp)
    lcc = max(comps, key=lambda c: (len(c), -min(c)))
    k = len(lcc)
    apl = 0.0 if k < 2 else sum(D[i][j] for i in lcc for j in lcc if i != j) / (k * (k - 1))
    s = 0
    for i in range(n):
        for j in range(i + 1, n):
            if A[i][j]:
                s += deg[i] * deg[j]
    return dict(density=density, avg_local_clustering=math.fsum(local) / n, global_clustering=glob,
                avg_path_length=apl, s_metric=float(s))


def brute_ks(a, b) -> float:
    best = 0.0
    for x in list(a) + list(b):
        fa = sum(1 for y in a if y <= x) / len(a)
        fb = sum(1 for y in b if y <= x) / len(b)
        best = max(best, abs(fa - fb))
    return best


def brute_ks2d(a, b) -> float:
    """Scan every anchor from both samples and all four quadrants."""
    def frac(sample, x0, y0, right, up):
        hits = 0
        for x, y in sample:
            if ((x > x0) == right) and ((y > y0) == up):
                hits += 1
        return hits / len(sample)

    best = 0.0
    for x0, y0 in list(a) + list(b):
        for right in (True, False):
            for up in (True, False):
                best = max(best, abs(frac(a, x0, y0, right, up) - frac(b, x0, y0, right, up)))
    return best
