"""Snapshot-based dynamic network container and edge-list ingestion."""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

Pair = tuple[int, int]

GRAPH_SCHEMA = "dymond.temporal-graph/1"


class RawEvent(NamedTuple):
    u: int
    v: int
    t_raw: int


def pair(u: int, v: int) -> Pair:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Snapshot:
    """One time window: active nodes and the multiset of edges seen in it."""

    index: int
    active_nodes: frozenset
    edge_counts: Mapping[Pair, int]

    @property
    def edges(self) -> frozenset:
        return frozenset(self.edge_counts)

    def __post_init__(self):
        for (u, v), c in self.edge_counts.items():
            if not u < v:
                raise ValueError(f"edge ({u}, {v}) is not stored as u < v")
            if c < 1:
                raise ValueError(f"edge ({u}, {v}) has count {c}")
            if u not in self.active_nodes or v not in self.active_nodes:
                raise ValueError(f"edge ({u}, {v}) at t={self.index} has an inactive endpoint")

    def degrees(self) -> dict[int, int]:
        deg = dict.fromkeys(self.active_nodes, 0)
        for u, v in self.edge_counts:
            deg[u] += 1
            deg[v] += 1
        return deg

    def adjacency(self) -> dict[int, set]:
        adj = {n: set() for n in self.active_nodes}
        for u, v in self.edge_counts:
            adj[u].add(v)
            adj[v].add(u)
        return adj


@dataclass(frozen=True)
class TemporalGraph:
    """Sequence of snapshots ``1..T`` over densely indexed nodes ``0..N-1``.

    ``labels[i]`` is the original id of node ``i``.
    """

    snapshots: tuple
    labels: tuple
    _first_active: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.snapshots) < 1:
            raise ValueError("a temporal graph needs at least one snapshot")
        first: dict[int, int] = {}
        for i, snap in enumerate(self.snapshots, start=1):
            if snap.index != i:
                raise ValueError(f"snapshot {i} carries index {snap.index}")
            for n in snap.active_nodes:
                if not 0 <= n < len(self.labels):
                    raise ValueError(f"node {n} outside 0..{len(self.labels) - 1}")
                first.setdefault(n, i)
        object.__setattr__(self, "_first_active", dict(sorted(first.items())))

    @property
    def T(self) -> int:
        return len(self.snapshots)

    @property
    def node_count(self) -> int:
        return len(self._first_active)

    @property
    def N(self) -> int:
        return self.node_count

    @property
    def first_active(self) -> dict[int, int]:
        return dict(self._first_active)

    def __getitem__(self, t: int) -> Snapshot:
        """Snapshot at timestep ``t`` (1-based)."""
        if not 1 <= t <= self.T:
            raise IndexError(t)
        return self.snapshots[t - 1]

    @property
    def edge_timesteps(self) -> dict[Pair, list[int]]:
        out: dict[Pair, list[int]] = {}
        for snap in self.snapshots:
            for e in snap.edge_counts:
                out.setdefault(e, []).append(snap.index)
        return dict(sorted(out.items()))

    def n_events(self) -> int:
        return sum(sum(s.edge_counts.values()) for s in self.snapshots)

    def n_edges(self) -> int:
        return sum(len(s.edge_counts) for s in self.snapshots)

    @classmethod
    def from_edge_sets(cls, edge_sets: Sequence[Iterable], active: Sequence[Iterable] | None = None,
                       labels: Sequence[int] | None = None) -> "TemporalGraph":
        """Build from per-snapshot edge iterables (repeats add multiplicity).

        Without ``active``, a node is active from its first edge onwards.
        """
        counts = []
        for edges in edge_sets:
            c: dict[Pair, int] = {}
            for u, v in edges:
                if u == v:
                    continue
                p = pair(int(u), int(v))
                c[p] = c.get(p, 0) + 1
            counts.append(c)
        if active is None:
            seen: set = set()
            active = []
            for c in counts:
                for u, v in c:
                    seen.add(u)
                    seen.add(v)
                active.append(frozenset(seen))
        nodes = set().union(*map(set, active)) if len(active) else set()
        n_labels = max(nodes) + 1 if nodes else 0
        if labels is None:
            labels = range(n_labels)
        snaps = tuple(
            Snapshot(i, frozenset(int(n) for n in a), dict(sorted(c.items())))
            for i, (c, a) in enumerate(zip(counts, active), start=1)
        )
        return cls(snaps, tuple(int(x) for x in labels))

    def to_dict(self) -> dict:
        return {
            "schema": GRAPH_SCHEMA,
            "T": self.T,
            "N": self.node_count,
            "labels": list(self.labels),
            "snapshots": [
                {
                    "t": s.index,
                    "active": sorted(s.active_nodes),
                    "edges": [[u, v, c] for (u, v), c in sorted(s.edge_counts.items())],
                }
                for s in self.snapshots
            ],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "TemporalGraph":
        if d.get("schema") != GRAPH_SCHEMA:
            raise ValueError(f"unsupported graph schema {d.get('schema')!r}")
        snaps = tuple(
            Snapshot(
                int(s["t"]),
                frozenset(int(n) for n in s["active"]),
                {pair(int(u), int(v)): int(c) for u, v, c in s["edges"]},
            )
            for s in d["snapshots"]
        )
        g = cls(snaps, tuple(int(x) for x in d["labels"]))
        if g.T != d["T"] or g.node_count != d["N"]:
            raise ValueError("graph header does not match its snapshots")
        return g


def node_first_arrivals(g: TemporalGraph) -> dict[int, int]:
    return g.first_active


def _split_line(line: str) -> list[str]:
    return [tok for tok in re.split(r"[,\s]+", line.strip()) if tok]


def read_events(path) -> list[RawEvent]:
    """Parse ``u v t`` lines (whitespace or comma separated, ``#`` comments)."""
    events = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            toks = _split_line(line)
            if len(toks) < 3:
                raise ValueError(f"{path}:{lineno}: expected 'u v t', got {line.strip()!r}")
            try:
                events.append(RawEvent(int(toks[0]), int(toks[1]), int(float(toks[2]))))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-integer field in {line.strip()!r}") from None
    return events


def _window_index(events: Sequence[RawEvent], window: float | None, num_windows: int | None):
    ts = np.array([e.t_raw for e in events], dtype=np.int64)
    lo, hi = int(ts.min()), int(ts.max())
    if window is not None:
        if num_windows is not None:
            raise ValueError("give either a window length or a window count, not both")
        if not window > 0:
            raise ValueError("window length must be positive")
        # windows are aligned to multiples of the window length
        base = math.floor(lo / window)
        idx = np.floor(ts / window).astype(np.int64) - base
        T = int(math.floor(hi / window)) - base + 1
    elif num_windows is not None:
        if num_windows < 1:
            raise ValueError("window count must be >= 1")
        T = int(num_windows)
        span = hi - lo
        if span == 0:
            idx = np.zeros(len(ts), dtype=np.int64)
        else:
            idx = np.floor((ts - lo) * T / span).astype(np.int64)
            idx = np.minimum(idx, T - 1)  # last window absorbs the maximum
    else:
        raise ValueError("a window length or a window count is required")
    return idx + 1, T


def ingest(events: Sequence[RawEvent], window: float | None = None,
           num_windows: int | None = None) -> TemporalGraph:
    """Bucket timestamped events into ``T`` consecutive snapshots.

    Parameters
    ----------
    events : sequence of RawEvent
        ``(u, v, t_raw)`` triples; direction is ignored.
    window : float, optional
        Window length in raw time units. Windows are ``[kW, (k+1)W)``.
    num_windows : int, optional
        Number of equal windows spanning ``[min t, max t]``.

    Returns
    -------
    TemporalGraph
        Nodes re-indexed densely by sorted original id. A node is active from
        the window of its first edge until the end.
    """
    events = [RawEvent(*map(int, e)) for e in events]
    if not events:
        raise ValueError("no events")
    kept = [e for e in events if e.u != e.v]
    if not kept:
        raise ValueError("empty graph")
    idx, T = _window_index(kept, window, num_windows)

    ids = sorted({e.u for e in kept} | {e.v for e in kept})
    dense = {orig: i for i, orig in enumerate(ids)}
    edge_sets: list[list[Pair]] = [[] for _ in range(T)]
    for e, t in zip(kept, idx):
        edge_sets[t - 1].append((dense[e.u], dense[e.v]))
    return TemporalGraph.from_edge_sets(edge_sets, labels=ids)


def save_graph(g: TemporalGraph, path, meta: Mapping | None = None) -> None:
    d = g.to_dict()
    if meta:
        d = {"meta": dict(meta), **d}
    Path(path).write_text(json.dumps(d, separators=(",", ":")) + "\n", encoding="utf-8")


def load_graph(path) -> TemporalGraph:
    return TemporalGraph.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def write_edge_list(g: TemporalGraph, path, header: Sequence[str] = ()) -> None:
    """Write ``label_u label_v t`` lines, one per event (multiplicity repeated)."""
    lines = [f"# {h}" for h in header]
    for s in g.snapshots:
        for (u, v), c in sorted(s.edge_counts.items()):
            lines.extend([f"{g.labels[u]} {g.labels[v]} {s.index}"] * c)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_edge_list(path) -> TemporalGraph:
    """Read ``u v t`` lines whose ``t`` is already a snapshot index.

    ``# T=<int>`` and ``# N=<int>`` header lines, when present, fix the horizon
    and the node id range (ids are then taken as dense indices).
    """
    header: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            m = re.match(r"#\s*([TN])=(\d+)\s*$", line)
            if m:
                header[m.group(1)] = int(m.group(2))
    events = read_events(path)
    T = header.get("T", max((e.t_raw for e in events), default=0))
    if T < 1:
        raise ValueError("empty graph")
    if "N" in header:
        labels = range(header["N"])
        index = {v: v for v in labels}
    else:
        labels = sorted({e.u for e in events} | {e.v for e in events})
        index = {v: i for i, v in enumerate(labels)}
    edge_sets: list[list[Pair]] = [[] for _ in range(T)]
    for e in events:
        if not 1 <= e.t_raw <= T:
            raise ValueError(f"snapshot index {e.t_raw} outside 1..{T}")
        if e.u != e.v:
            edge_sets[e.t_raw - 1].append((index[e.u], index[e.v]))
    return TemporalGraph.from_edge_sets(edge_sets, labels=labels)


def load_any_graph(path) -> TemporalGraph:
    """Load a JSON graph file, or fall back to a snapshot-indexed edge list."""
    with open(path, encoding="utf-8") as fh:
        head = fh.read(64).lstrip()
    return load_graph(path) if head.startswith("{") else read_edge_list(path)
