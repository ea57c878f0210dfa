"""Three-node motif census, edge-level motif context and type transitions.

Triplets are encoded as ``u*n*n + v*n + w`` with ``u < v < w`` where ``n`` is
the node-id space of the graph (``len(g.labels)``). Pairs use ``u*n + v``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from math import comb
from typing import Iterator, NamedTuple

import numpy as np

from .temporal_graph import Snapshot, TemporalGraph

TYPE_NAMES = ("empty", "1-edge", "wedge", "triangle")
EMPTY_ROW_NOTE = "empty row counts only triplets whose three nodes are active in both snapshots"

# bound on edge x third-node expansion held in memory at once
_CHUNK = 1 << 22


class Triplet(NamedTuple):
    u: int
    v: int
    w: int

    @classmethod
    def of(cls, a, b, c) -> "Triplet":
        x, y, z = sorted((int(a), int(b), int(c)))
        if x == y or y == z:
            raise ValueError(f"triplet needs three distinct nodes, got {(a, b, c)}")
        return cls(x, y, z)

    def pairs(self):
        return ((self.u, self.v), (self.u, self.w), (self.v, self.w))


def classify(triplet, snapshot: Snapshot) -> int:
    """Number of the triplet's three pairs present in the snapshot."""
    t = Triplet.of(*triplet)
    return sum(p in snapshot.edge_counts for p in t.pairs())


def encode_triplets(a, b, c, n: int) -> np.ndarray:
    s = np.sort(np.stack([np.asarray(a), np.asarray(b), np.asarray(c)]).astype(np.int64), axis=0)
    return (s[0] * n + s[1]) * n + s[2]


def decode_triplets(codes, n: int):
    codes = np.asarray(codes, dtype=np.int64)
    return codes // (n * n), (codes // n) % n, codes % n


def snapshot_pair_keys(snapshot: Snapshot, n: int):
    """Sorted pair keys and matching multiplicities for one snapshot."""
    if not snapshot.edge_counts:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    arr = np.array([(u, v, c) for (u, v), c in snapshot.edge_counts.items()], dtype=np.int64)
    keys = arr[:, 0] * n + arr[:, 1]
    order = np.argsort(keys)
    return keys[order], arr[order, 2]


def _member(sorted_keys, query):
    if len(sorted_keys) == 0:
        return np.zeros(np.shape(query), dtype=bool), np.zeros(np.shape(query), dtype=np.int64)
    pos = np.searchsorted(sorted_keys, query)
    pos_c = np.minimum(pos, len(sorted_keys) - 1)
    return sorted_keys[pos_c] == query, pos_c


def _pair_key(a, b, n):
    return np.minimum(a, b) * n + np.maximum(a, b)


def _reduce_max(codes, types):
    """Unique codes keeping the largest type per code."""
    if len(codes) == 0:
        return codes, types
    order = np.lexsort((types, codes))
    codes, types = codes[order], types[order]
    last = np.r_[codes[1:] != codes[:-1], True]
    return codes[last], types[last]


@dataclass(frozen=True)
class EdgeExpansion:
    """Every (edge at t, third node) combination of one snapshot, in chunks."""

    edge_pos: np.ndarray  # index into the snapshot's sorted edge arrays
    third: np.ndarray
    current_type: np.ndarray  # edges of {u, v, third} present in this snapshot
    codes: np.ndarray
    has_uw: np.ndarray
    has_vw: np.ndarray


def iter_expansion(keys: np.ndarray, n: int, thirds: np.ndarray) -> Iterator[EdgeExpansion]:
    """Expand each edge of a snapshot against the candidate third nodes."""
    m, k = len(keys), len(thirds)
    if m == 0 or k == 0:
        return
    us, vs = keys // n, keys % n
    step = max(1, _CHUNK // k)
    for lo in range(0, m, step):
        hi = min(m, lo + step)
        pos = np.repeat(np.arange(lo, hi), k)
        w = np.tile(thirds, hi - lo)
        u, v = us[pos], vs[pos]
        keep = (w != u) & (w != v)
        pos, w, u, v = pos[keep], w[keep], u[keep], v[keep]
        uw = _member(keys, _pair_key(u, w, n))[0]
        vw = _member(keys, _pair_key(v, w, n))[0]
        cur = (1 + uw.astype(np.int8) + vw).astype(np.int8)
        yield EdgeExpansion(pos, w, cur, encode_triplets(u, v, w, n), uw, vw)


@dataclass(frozen=True)
class MotifCensus:
    """Triplets with at least one edge in some snapshot and their recorded type."""

    n: int
    codes: np.ndarray  # sorted
    types: np.ndarray

    def __len__(self):
        return len(self.codes)

    def __contains__(self, triplet) -> bool:
        return self.type_of(triplet) > 0

    @property
    def motifs(self) -> set:
        return set(self.types_by_triplet())

    def types_by_triplet(self) -> dict[Triplet, int]:
        a, b, c = decode_triplets(self.codes, self.n)
        return {Triplet(int(x), int(y), int(z)): int(i)
                for x, y, z, i in zip(a, b, c, self.types)}

    def lookup(self, codes):
        """Census index and type for each code (type 0 when absent)."""
        hit, pos = _member(self.codes, codes)
        return pos, np.where(hit, self.types[pos] if len(self.types) else 0, 0)

    def type_of(self, triplet) -> int:
        t = Triplet.of(*triplet)
        return int(self.lookup(np.array([(t.u * self.n + t.v) * self.n + t.w]))[1][0])

    def type_counts(self) -> np.ndarray:
        """Counts of recorded types 0..3 (type 0 is never recorded)."""
        return np.bincount(self.types, minlength=4)[:4]


def census(g: TemporalGraph) -> MotifCensus:
    """Edge-anchored motif census, keeping the highest type seen per triplet."""
    n = len(g.labels)
    acc_c, acc_t, buffered = [], [], 0
    codes = np.empty(0, np.int64)
    types = np.empty(0, np.int8)
    for snap in g.snapshots:
        keys, _ = snapshot_pair_keys(snap, n)
        active = np.array(sorted(snap.active_nodes), dtype=np.int64)
        for ex in iter_expansion(keys, n, active):
            c, t = _reduce_max(ex.codes, ex.current_type)
            acc_c.append(c)
            acc_t.append(t)
            buffered += len(c)
        if buffered > _CHUNK * 4:
            codes, types = _reduce_max(np.concatenate([codes, *acc_c]), np.concatenate([types, *acc_t]))
            acc_c, acc_t, buffered = [], [], 0
    if acc_c:
        codes, types = _reduce_max(np.concatenate([codes, *acc_c]), np.concatenate([types, *acc_t]))
    return MotifCensus(n, codes, types.astype(np.int8))


class EdgeMotifContext(NamedTuple):
    pair: tuple
    t: int
    c_t: int
    n3: int
    n2: int
    n1: int
    r3: int
    r2: int
    r1: int


def remaining_counts(c_t, n3, n2, n1):
    """Remaining edge counts handed down from triangles to 1-edge motifs."""
    r3 = np.minimum(c_t, n3)
    r2 = np.minimum(r3, n2)
    r1 = np.minimum(r2, n1)
    return r3, r2, r1


@dataclass(frozen=True)
class SnapshotContext:
    """Per-edge motif context of one snapshot; arrays align with ``keys``."""

    t: int
    keys: np.ndarray
    counts: np.ndarray
    nbr: np.ndarray  # shape (m, 4): census motifs of each recorded type holding the pair
    remaining: np.ndarray  # shape (m, 4): r^(i) for i = 1..3 in columns 1..3

    def weights(self) -> np.ndarray:
        """``r^(i) / |N^(i)|`` per edge and type, 0 where the pair has no such motif."""
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(self.nbr > 0, self.remaining / np.maximum(self.nbr, 1), 0.0)
        w[:, 0] = 0.0
        return w


def iter_snapshot_contexts(g: TemporalGraph, cen: MotifCensus) -> Iterator[tuple]:
    """Yield ``(SnapshotContext, expansions)`` per snapshot.

    The expansion covers every node id as third node, so census motifs whose
    third node is not yet active are counted in the pair neighbourhoods too.
    """
    n = cen.n
    everyone = np.arange(n, dtype=np.int64)
    for snap in g.snapshots:
        keys, counts = snapshot_pair_keys(snap, n)
        nbr = np.zeros((len(keys), 4), dtype=np.int64)
        expansions = []
        for ex in iter_expansion(keys, n, everyone):
            idx, typ = cen.lookup(ex.codes)
            found = typ > 0
            np.add.at(nbr, (ex.edge_pos[found], typ[found].astype(np.int64)), 1)
            expansions.append((ex, idx, typ))
        rem = np.zeros_like(nbr)
        rem[:, 3], rem[:, 2], rem[:, 1] = remaining_counts(counts, nbr[:, 3], nbr[:, 2], nbr[:, 1])
        yield SnapshotContext(snap.index, keys, counts, nbr, rem), expansions


def edge_context(g: TemporalGraph, cen: MotifCensus) -> list[EdgeMotifContext]:
    out = []
    n = cen.n
    for ctx, _ in iter_snapshot_contexts(g, cen):
        for k, c, nb, r in zip(ctx.keys, ctx.counts, ctx.nbr, ctx.remaining):
            out.append(EdgeMotifContext((int(k // n), int(k % n)), ctx.t, int(c),
                                        int(nb[3]), int(nb[2]), int(nb[1]),
                                        int(r[3]), int(r[2]), int(r[1])))
    return out


@dataclass(frozen=True)
class TransitionMatrix:
    counts: np.ndarray

    @property
    def probabilities(self) -> np.ndarray:
        rows = self.counts.sum(axis=1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(rows > 0, self.counts / np.maximum(rows, 1), 0.0)

    @property
    def empty_rows(self) -> list[int]:
        """Rows without any observation (left all-zero in ``probabilities``)."""
        return [i for i in range(4) if self.counts[i].sum() == 0]

    def to_csv(self, path, header: tuple = ()) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            for h in (*header, EMPTY_ROW_NOTE):
                fh.write(f"# {h}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["from", *TYPE_NAMES])
            for name, row in zip(TYPE_NAMES, self.probabilities):
                w.writerow([name, *(f"{x:.6f}" for x in row)])


def transition_observations(g: TemporalGraph, t: int):
    """Non-empty triplet observations between snapshots ``t`` and ``t+1``.

    Returns ``(codes, type_t, type_next, eligible)`` where ``codes`` covers the
    eligible triplets with an edge in either snapshot and ``eligible`` is the
    number of triplets whose nodes are active in both.
    """
    n = len(g.labels)
    s0, s1 = g[t], g[t + 1]
    both = s0.active_nodes & s1.active_nodes
    eligible = comb(len(both), 3)
    both_arr = np.array(sorted(both), dtype=np.int64)
    k0, _ = snapshot_pair_keys(s0, n)
    k1, _ = snapshot_pair_keys(s1, n)
    found = []
    for keys in (k0, k1):
        inside = np.isin(keys // n, both_arr) & np.isin(keys % n, both_arr)
        for ex in iter_expansion(keys[inside], n, both_arr):
            found.append(ex.codes)
    if not found:
        return np.empty(0, np.int64), np.empty(0, np.int8), np.empty(0, np.int8), eligible
    codes = np.unique(np.concatenate(found))
    a, b, c = decode_triplets(codes, n)

    def typ(keys):
        return (_member(keys, a * n + b)[0].astype(np.int8) + _member(keys, a * n + c)[0]
                + _member(keys, b * n + c)[0])

    return codes, typ(k0), typ(k1), eligible


def transition_matrix(g: TemporalGraph) -> TransitionMatrix:
    """Count motif-type changes of triplets active in consecutive snapshots."""
    if g.T < 2:
        raise ValueError("need at least two snapshots")
    counts = np.zeros((4, 4), dtype=np.int64)
    for t in range(1, g.T):
        codes, ty0, ty1, eligible = transition_observations(g, t)
        np.add.at(counts, (ty0.astype(np.int64), ty1.astype(np.int64)), 1)
        counts[0, 0] += eligible - len(codes)
    return TransitionMatrix(counts)
