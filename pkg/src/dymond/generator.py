"""Sample a synthetic dynamic network from learned motif-model parameters."""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from math import comb
from pathlib import Path
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .motif_census import Triplet, decode_triplets
from .param_learning import (
    EQUAL2,
    EQUAL3,
    HUB,
    OUTLIER,
    ROLES,
    SPOKE,
    ModelParams,
    role_probabilities,
    type_probabilities,
)
from .temporal_graph import TemporalGraph, pair

log = logging.getLogger(__name__)

_ROLE_INDEX = {r: i for i, r in enumerate(ROLES)}


@dataclass(frozen=True)
class MotifRecord:
    triplet: Triplet
    type: int
    rate: float
    timesteps: tuple
    roles: dict
    edges: tuple

    def to_json(self) -> str:
        return json.dumps({
            "triplet": list(self.triplet),
            "type": self.type,
            "rate": self.rate,
            "roles": {str(k): v for k, v in sorted(self.roles.items())},
            "timesteps": list(self.timesteps),
            "edges": [list(e) for e in self.edges],
        }, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "MotifRecord":
        d = json.loads(line)
        return cls(Triplet(*d["triplet"]), int(d["type"]), float(d["rate"]), tuple(d["timesteps"]),
                   {int(k): v for k, v in d["roles"].items()}, tuple(tuple(e) for e in d["edges"]))


@dataclass
class GenerationConfig:
    T: int
    N: int
    seed: int
    params: ModelParams

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("T must be >= 1")
        if self.N < 3:
            raise ValueError("N must be >= 3")


class GenerationResult(NamedTuple):
    graph: TemporalGraph
    motif_log: list
    arrivals: np.ndarray  # activation timestep per node, T + 1 when never active
    selected: np.ndarray  # motifs drawn per type before timestep filtering


@dataclass
class RoleState:
    """Remaining role budget per node and the probabilities derived from it."""

    counts: np.ndarray
    probs: np.ndarray = field(init=False)

    def __post_init__(self):
        self.counts = np.clip(np.array(self.counts, dtype=float), 0, None)
        self.probs = role_probabilities(self.counts)

    def refresh(self, nodes) -> None:
        for v in nodes:
            self.probs[v] = role_probabilities(self.counts[v])


def get_active_nodes(T: int, N: int, lambda_v: float, rng: np.random.Generator):
    """Draw an Exponential arrival (mean ``lambda_v``) per node.

    Returns the activation timestep per node (``T + 1`` for nodes arriving
    after the horizon) and the active set of every timestep.
    """
    if not lambda_v > 0:
        raise ValueError("lambda_v must be positive")
    a = rng.exponential(lambda_v, size=N)
    step = np.maximum(1, np.ceil(a)).astype(np.int64)
    step[step > T] = T + 1
    active = [frozenset(np.flatnonzero(step <= t).tolist()) for t in range(1, T + 1)]
    return step, active


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def n_new_triplets(n_new: int, n_old: int) -> int:
    return comb(n_new, 3) + comb(n_new, 2) * n_old + n_new * comb(n_old, 2)


def iter_new_triplets(new: np.ndarray, old: np.ndarray) -> Iterator[np.ndarray]:
    """Triplets with at least one new node, grouped by their first new node.

    Each yielded array has shape ``(k, 3)``; every triplet appears once.
    """
    new = np.sort(np.asarray(new, dtype=np.int64))
    old = np.sort(np.asarray(old, dtype=np.int64))
    for k, a in enumerate(new):
        others = np.concatenate([old, new[k + 1:]])
        if len(others) < 2:
            continue
        i, j = np.triu_indices(len(others), 1)
        yield np.stack([np.full(len(i), a), others[i], others[j]], axis=1)


def _encode(tr: np.ndarray, n: int) -> np.ndarray:
    s = np.sort(tr, axis=1)
    return (s[:, 0] * n + s[:, 1]) * n + s[:, 2]


def _top(keys, codes, k):
    if len(keys) <= k:
        return keys, codes
    part = np.argpartition(-keys, k - 1)[:k]
    return keys[part], codes[part]


def weighted_sample_without_replacement(new, old, n_draw: int, motif_type: int, role_probs,
                                        exclude: np.ndarray, n: int, rng) -> np.ndarray:
    """Draw ``n_draw`` triplet codes from the pool, weight ``p_T`` of the type.

    Uses exponential keys ``log(U) / w``: taking the ``k`` largest keys has the
    same law as ``k`` successive draws renormalised over the remaining pool.
    Zero-weight triplets are only used, uniformly, once positive ones run out.
    Returned codes are in draw order.
    """
    budget = n_draw + len(exclude)
    pos_k, pos_c = np.empty(0), np.empty(0, np.int64)
    zero_k, zero_c = np.empty(0), np.empty(0, np.int64)
    for tr in iter_new_triplets(new, old):
        codes = _encode(tr, n)
        w = type_probabilities(role_probs, tr[:, 0], tr[:, 1], tr[:, 2], motif_type)
        u = rng.random(len(tr))
        positive = w > 0
        with np.errstate(divide="ignore"):
            key = np.log(u[positive]) / w[positive]
        pos_k, pos_c = np.concatenate([pos_k, key]), np.concatenate([pos_c, codes[positive]])
        zero_k, zero_c = np.concatenate([zero_k, u[~positive]]), np.concatenate([zero_c, codes[~positive]])
        if len(pos_k) > 2 * budget:
            pos_k, pos_c = _top(pos_k, pos_c, budget)
        if len(zero_k) > 2 * budget:
            zero_k, zero_c = _top(zero_k, zero_c, budget)

    out = []
    for keys, codes in ((pos_k, pos_c), (zero_k, zero_c)):
        keep = ~np.isin(codes, exclude)
        keys, codes = keys[keep], codes[keep]
        order = np.lexsort((codes, -keys))
        take = codes[order][: n_draw - sum(map(len, out))]
        if out and len(take):
            log.warning("only %d triplets with positive type-%d weight; %d drawn uniformly",
                        len(out[0]), motif_type, len(take))
        out.append(take)
    return np.concatenate(out)


def sample_motif_timesteps(t: int, T: int, mean_rate: float, rng, size: int | None = None):
    """Occurrence timesteps of motifs that became eligible at timestep ``t``.

    Each motif draws its own rate ``beta ~ Exp(mean mean_rate)`` and then
    occurrences with Exponential gaps of mean ``1 / beta`` on a continuous clock
    starting at ``t - 1``; snapshot ``s`` covers clock time ``[s - 1, s)``.
    Returns ``(rates, timesteps)`` with one tuple (possibly empty) per motif.
    """
    k = 1 if size is None else size
    beta = rng.exponential(mean_rate, size=k)
    while np.any(beta == 0):
        zero = beta == 0
        beta[zero] = rng.exponential(mean_rate, size=int(zero.sum()))
    clock = (t - 1) + rng.exponential(1.0 / beta)
    steps = []
    for b, c in zip(beta, clock):
        seen = []
        while c < T:
            s = int(math.floor(c)) + 1
            if not seen or seen[-1] != s:
                seen.append(s)
            c += rng.exponential(1.0 / b)
        steps.append(tuple(seen))
    if size is None:
        return float(beta[0]), steps[0]
    return beta, steps


def _pick(weights, rng) -> int:
    total = float(np.sum(weights))
    if total <= 0:
        return int(rng.integers(len(weights)))
    return int(np.searchsorted(np.cumsum(weights), rng.random() * total, side="right").clip(0, len(weights) - 1))


def sample_node_roles(triplet, motif_type: int, n_steps: int, state: RoleState, rng) -> dict:
    """Assign roles inside a motif and spend the nodes' role budget."""
    nodes = list(triplet)
    if motif_type == 3:
        roles = dict.fromkeys(nodes, "equal3")
    else:
        centre, side = ("hub", "spoke") if motif_type == 2 else ("outlier", "equal2")
        c = nodes[_pick(state.probs[nodes, _ROLE_INDEX[centre]], rng)]
        roles = {v: centre if v == c else side for v in nodes}
    for v, r in roles.items():
        state.counts[v, _ROLE_INDEX[r]] = max(0.0, state.counts[v, _ROLE_INDEX[r]] - n_steps)
    state.refresh(nodes)
    return roles


def place_motif_edges(triplet, motif_type: int, roles: dict) -> tuple:
    nodes = list(triplet)
    if motif_type == 3:
        return (pair(nodes[0], nodes[1]), pair(nodes[0], nodes[2]), pair(nodes[1], nodes[2]))
    if motif_type == 2:
        h = next(v for v in nodes if roles[v] == "hub")
        return tuple(sorted(pair(h, s) for s in nodes if s != h))
    if motif_type == 1:
        e1, e2 = [v for v in nodes if roles[v] == "equal2"]
        return (pair(e1, e2),)
    raise ValueError(f"cannot place edges for motif type {motif_type}")


def sample_motifs(t: int, new, old, p_m, lambda_m_type, state: RoleState, T: int, n: int, rng):
    """Sample the motifs among the triplets that became eligible at ``t``.

    Returns the retained records and the number of triplets drawn per type.
    """
    pool = n_new_triplets(len(new), len(old))
    left = pool
    chosen = np.empty(0, np.int64)
    records, drawn = [], np.zeros(4, dtype=np.int64)
    for i in (3, 2, 1):
        rate = lambda_m_type[i - 1]
        if rate is None or not rate > 0:
            continue
        k = min(round_half_up(pool * p_m[i]), left)
        if k == 0:
            continue
        codes = weighted_sample_without_replacement(new, old, k, i, state.probs, chosen, n, rng)
        chosen = np.concatenate([chosen, codes])
        left -= len(codes)
        drawn[i] += len(codes)
        rates, steps = sample_motif_timesteps(t, T, rate, rng, size=len(codes))
        a, b, c = decode_triplets(codes, n)
        for x, y, z, r, s in zip(a, b, c, rates, steps):
            if not s:
                continue
            tri = Triplet(int(x), int(y), int(z))
            roles = sample_node_roles(tri, i, len(s), state, rng)
            records.append(MotifRecord(tri, i, float(r), s, roles, place_motif_edges(tri, i, roles)))
    return records, drawn


def construct_graph(records: Sequence[MotifRecord], T: int, N: int | None = None) -> TemporalGraph:
    """Place every record's edges at its timesteps; nodes stay active from their first one."""
    first: dict[int, int] = {}
    counts: list[dict] = [dict() for _ in range(T)]
    for m in records:
        t0 = min(m.timesteps)
        for v in m.triplet:
            first[v] = min(first.get(v, t0), t0)
        for s in m.timesteps:
            for e in m.edges:
                counts[s - 1][e] = counts[s - 1].get(e, 0) + 1
    n_ids = N if N is not None else (max(first) + 1 if first else 0)
    active = [[v for v, f in first.items() if f <= t] for t in range(1, T + 1)]
    edge_sets = [[e for e, c in sorted(cs.items()) for _ in range(c)] for cs in counts]
    return TemporalGraph.from_edge_sets(edge_sets, active=active, labels=range(n_ids))


def _role_table(params: ModelParams, N: int) -> np.ndarray:
    rows = params.role_counts
    if len(rows) == 0:
        return np.zeros((N, len(ROLES)))
    # generated node j reuses learned row j, cycling when N exceeds the table
    return rows[np.arange(N) % len(rows)].copy()


def generate(config: GenerationConfig) -> GenerationResult:
    p = config.params
    T, N = config.T, config.N
    rng = np.random.default_rng(config.seed)
    arrivals, active = get_active_nodes(T, N, p.lambda_v, rng)
    state = RoleState(_role_table(p, N))
    records, drawn = [], np.zeros(4, dtype=np.int64)
    for t in range(1, T + 1):
        new = np.flatnonzero(arrivals == t)
        if len(new) == 0:
            continue
        old = np.flatnonzero(arrivals < t)
        recs, d = sample_motifs(t, new, old, p.p_m, p.lambda_m_type, state, T, N, rng)
        records.extend(recs)
        drawn += d
    log.info("generated %d motif records over %d timesteps", len(records), T)
    return GenerationResult(construct_graph(records, T, N), records, arrivals, drawn)


def write_motif_log(records: Sequence[MotifRecord], path, header: Sequence[str] = ()) -> None:
    lines = [f"# {h}" for h in header] + [m.to_json() for m in records]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_motif_log(path) -> list[MotifRecord]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip() and not line.startswith("#"):
            out.append(MotifRecord.from_json(line))
    return out


@dataclass
class TransitionAudit:
    """Changes between two non-empty motif types, explained against the motif log.

    ``attributable`` lists changes whose edges all come from one record (a
    record never changes its own edge set, so this should stay empty);
    ``induced`` lists changes produced by overlapping records, with the record
    indices placing the triplet's edges; ``unexplained`` lists changes with an
    edge that no record placed.
    """

    observations: int
    attributable: list
    induced: list
    unexplained: list

    @property
    def attributable_mass(self) -> float:
        return len(self.attributable) / self.observations if self.observations else 0.0


def audit_transitions(g: TemporalGraph, records: Sequence[MotifRecord]) -> TransitionAudit:
    from .motif_census import transition_observations

    placed: dict[tuple, list] = {}
    for k, m in enumerate(records):
        for s in m.timesteps:
            for e in m.edges:
                placed.setdefault((s, e), []).append(k)
    n = len(g.labels)
    total, attributable, induced, unexplained = 0, [], [], []
    for t in range(1, g.T):
        codes, ty0, ty1, eligible = transition_observations(g, t)
        total += eligible
        change = (ty0 > 0) & (ty1 > 0) & (ty0 != ty1)
        a, b, c = decode_triplets(codes[change], n)
        for x, y, z, i0, i1 in zip(a, b, c, ty0[change], ty1[change]):
            tri = Triplet(int(x), int(y), int(z))
            sources, missing = set(), False
            for s in (t, t + 1):
                for e in tri.pairs():
                    if e in g[s].edge_counts:
                        who = placed.get((s, e))
                        if not who:
                            missing = True
                        else:
                            sources.update(who)
            entry = {"triplet": list(tri), "t": t, "from": int(i0), "to": int(i1),
                     "records": sorted(sources)}
            if missing:
                unexplained.append(entry)
            elif len(sources) <= 1:
                attributable.append(entry)
            else:
                induced.append(entry)
    return TransitionAudit(total, attributable, induced, unexplained)
