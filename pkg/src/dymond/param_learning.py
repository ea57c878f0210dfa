"""Estimate motif-model parameters from an observed dynamic network."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from math import comb
from pathlib import Path
from typing import Mapping

import numpy as np

from .motif_census import (
    MotifCensus,
    Triplet,
    census,
    decode_triplets,
    iter_snapshot_contexts,
)
from .temporal_graph import Snapshot, TemporalGraph

log = logging.getLogger(__name__)

PARAMS_SCHEMA = "dymond.params/1"

ROLES = ("equal3", "hub", "spoke", "equal2", "outlier")
EQUAL3, HUB, SPOKE, EQUAL2, OUTLIER = range(5)


@dataclass
class MotifRateTable:
    """Per-motif inter-arrival rate, aligned with the census arrays."""

    census: MotifCensus
    rates: np.ndarray

    def rate_of(self, triplet) -> float:
        t = Triplet.of(*triplet)
        n = self.census.n
        idx, typ = self.census.lookup(np.array([(t.u * n + t.v) * n + t.w]))
        if typ[0] == 0:
            raise KeyError(triplet)
        return float(self.rates[idx[0]])

    def as_dict(self) -> dict[Triplet, float]:
        a, b, c = decode_triplets(self.census.codes, self.census.n)
        return {Triplet(int(x), int(y), int(z)): float(r) for x, y, z, r in zip(a, b, c, self.rates)}


@dataclass
class ModelParams:
    lambda_v: float
    p_m: np.ndarray
    lambda_m_type: tuple  # None marks a type without observed motifs
    role_counts: np.ndarray  # (node, role)
    role_probs: np.ndarray
    n_nodes: int
    n_timesteps: int
    flags: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema": PARAMS_SCHEMA,
            "lambda_v": float(self.lambda_v),
            "p_m": [float(x) for x in self.p_m],
            "lambda_m_type": [None if x is None else float(x) for x in self.lambda_m_type],
            "n_nodes": int(self.n_nodes),
            "n_timesteps": int(self.n_timesteps),
            "roles": list(ROLES),
            "role_counts": [[float(x) for x in row] for row in self.role_counts],
            "role_probs": [[float(x) for x in row] for row in self.role_probs],
            "flags": self.flags,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ModelParams":
        if d.get("schema") != PARAMS_SCHEMA:
            raise ValueError(f"unsupported params schema {d.get('schema')!r}")
        if tuple(d["roles"]) != ROLES:
            raise ValueError("role table columns do not match")
        params = cls(
            lambda_v=float(d["lambda_v"]),
            p_m=np.array(d["p_m"], dtype=float),
            lambda_m_type=tuple(None if x is None else float(x) for x in d["lambda_m_type"]),
            role_counts=np.array(d["role_counts"], dtype=float).reshape(-1, 5),
            role_probs=np.array(d["role_probs"], dtype=float).reshape(-1, 5),
            n_nodes=int(d["n_nodes"]),
            n_timesteps=int(d["n_timesteps"]),
            flags=dict(d.get("flags", {})),
        )
        validate_params(params)
        return params


def validate_params(p: ModelParams) -> None:
    if p.p_m.shape != (4,) or np.any(p.p_m < 0) or abs(p.p_m.sum() - 1) > 1e-9:
        raise ValueError("p_m must be a non-negative 4-vector summing to 1")
    if len(p.lambda_m_type) != 3:
        raise ValueError("lambda_m_type needs one entry per non-empty motif type")
    if p.role_counts.shape != p.role_probs.shape:
        raise ValueError("role count and probability tables differ in shape")
    if np.any(p.role_counts < 0):
        raise ValueError("negative role counts")
    if len(p.role_probs) and np.max(np.abs(p.role_probs.sum(axis=1) - 1)) > 1e-9:
        raise ValueError("role probability rows must sum to 1")
    if not p.lambda_v > 0:
        raise ValueError("lambda_v must be positive")


def node_arrival_rate(g: TemporalGraph) -> float:
    """Mean timestep at which nodes first become active."""
    first = g.first_active
    if not first:
        raise ValueError("empty graph")
    return sum(first.values()) / len(first)


def motif_proportions(cen: MotifCensus, n_nodes: int) -> np.ndarray:
    if n_nodes < 3:
        raise ValueError(f"motif proportions need at least 3 nodes, got {n_nodes}")
    total = comb(n_nodes, 3)
    counts = cen.type_counts()
    p = np.zeros(4)
    p[1:] = counts[1:] / total
    p[0] = 1.0 - p[1:].sum()
    return p


def weighted_motif_count(triplet, motif_type: int, snapshot: Snapshot, weights: Mapping) -> float:
    """Mean edge weight of the triplet's edges present at this snapshot.

    ``weights`` maps each present pair to its per-type weights (indexable by
    motif type).
    """
    present = [p for p in Triplet.of(*triplet).pairs() if p in snapshot.edge_counts]
    if not present:
        return 0.0
    return sum(weights[p][motif_type] for p in present) / len(present)


def role_at_timestep(snapshot: Snapshot, triplet, node: int) -> str:
    """Role of ``node`` inside ``triplet`` given the edges present at this snapshot."""
    t = Triplet.of(*triplet)
    if node not in t:
        raise ValueError(f"node {node} not in triplet {tuple(t)}")
    present = [p for p in t.pairs() if p in snapshot.edge_counts]
    if not present:
        raise ValueError("no role in empty motif")
    if len(present) == 3:
        return "equal3"
    if len(present) == 2:
        return "hub" if all(node in p for p in present) else "spoke"
    return "equal2" if node in present[0] else "outlier"


def role_probabilities(counts: np.ndarray) -> np.ndarray:
    """Row-normalise role counts; all-zero rows become uniform."""
    counts = np.clip(np.asarray(counts, dtype=float), 0, None)
    totals = counts.sum(axis=-1, keepdims=True)
    uniform = np.full_like(counts, 1.0 / len(ROLES))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(totals > 0, counts / np.where(totals > 0, totals, 1), uniform)


def triplet_type_probability(role_probs: np.ndarray, triplet, motif_type: int) -> float:
    u, v, w = Triplet.of(*triplet)
    return float(type_probabilities(role_probs, np.array([u]), np.array([v]), np.array([w]), motif_type)[0])


def type_probabilities(role_probs, a, b, c, motif_type: int) -> np.ndarray:
    """Probability that nodes ``a, b, c`` take the roles of ``motif_type``.

    Wedges and 1-edges sum over the three choices of hub / outlier.
    """
    pa, pb, pc = role_probs[a], role_probs[b], role_probs[c]
    if motif_type == 3:
        return pa[:, EQUAL3] * pb[:, EQUAL3] * pc[:, EQUAL3]
    if motif_type == 2:
        centre, side = HUB, SPOKE
    elif motif_type == 1:
        centre, side = OUTLIER, EQUAL2
    else:
        raise ValueError(f"no role model for motif type {motif_type}")
    return (pa[:, centre] * pb[:, side] * pc[:, side]
            + pa[:, side] * pb[:, centre] * pc[:, side]
            + pa[:, side] * pb[:, side] * pc[:, centre])


def _accumulate(g: TemporalGraph, cen: MotifCensus):
    """Single pass producing motif rate sums and role counts."""
    n = cen.n
    rate_sum = np.zeros(len(cen))
    roles = np.zeros((n, len(ROLES)))
    for ctx, expansions in iter_snapshot_contexts(g, cen):
        if len(ctx.keys) == 0:
            continue
        weights = ctx.weights()
        nbr, rem = ctx.nbr, ctx.remaining
        us, vs = ctx.keys // n, ctx.keys % n
        with np.errstate(divide="ignore", invalid="ignore"):
            rw3 = np.where(nbr[:, 3] > 0, rem[:, 3] / (nbr[:, 3] / 3), 0.0)
            rw2 = np.where((nbr[:, 2] > 0) & (rem[:, 2] > 0), rem[:, 2] / (nbr[:, 2] / 2), 0.0)
            rw1 = np.where((nbr[:, 1] > 0) & (rem[:, 1] > 0), rem[:, 1] / np.maximum(nbr[:, 1], 1), 0.0)
        amount_eq2 = np.where(rw1 > 0, rem[:, 1], 0)
        for ex, idx, typ in expansions:
            found = typ > 0
            e, w, cur = ex.edge_pos[found], ex.third[found], ex.current_type[found]
            i, mi = typ[found].astype(np.int64), idx[found]
            uw, vw = ex.has_uw[found], ex.has_vw[found]
            u, v = us[e], vs[e]

            np.add.at(rate_sum, mi, weights[e, i] / cur)

            tri = i == 3
            amt = rw3[e[tri]]
            for node in (u[tri], v[tri], w[tri]):
                np.add.at(roles[:, EQUAL3], node, amt)

            wed = (i == 2) & (rw2[e] > 0)
            amt = rw2[e[wed]]
            cw, uw2, vw2 = cur[wed], uw[wed], vw[wed]
            u_hub = (cw == 2) & uw2
            v_hub = (cw == 2) & vw2
            for node, hub in ((u[wed], u_hub), (v[wed], v_hub), (w[wed], np.zeros_like(u_hub))):
                np.add.at(roles[:, HUB], node[hub], amt[hub])
                np.add.at(roles[:, SPOKE], node[~hub], amt[~hub] / 2)

            one = (i == 1) & (rw1[e] > 0)
            amt, full = rw1[e[one]], amount_eq2[e[one]]
            single = cur[one] == 1
            np.add.at(roles[:, EQUAL2], u[one][single], full[single])
            np.add.at(roles[:, EQUAL2], v[one][single], full[single])
            np.add.at(roles[:, OUTLIER], u[one][~single], amt[~single])
            np.add.at(roles[:, OUTLIER], v[one][~single], amt[~single])
            np.add.at(roles[:, OUTLIER], w[one], amt)
    return rate_sum, roles


def motif_rates(g: TemporalGraph, cen: MotifCensus) -> MotifRateTable:
    rate_sum, _ = _accumulate(g, cen)
    return MotifRateTable(cen, rate_sum / g.T)


def role_counts(g: TemporalGraph, cen: MotifCensus) -> np.ndarray:
    return _accumulate(g, cen)[1]


def type_rate_of_rates(table: MotifRateTable) -> tuple:
    out = []
    for i in (1, 2, 3):
        sel = table.census.types == i
        out.append(float(table.rates[sel].mean()) if sel.any() else None)
    return tuple(out)


def learn(g: TemporalGraph) -> tuple[ModelParams, MotifRateTable]:
    """Estimate all model parameters from ``g``.

    Returns
    -------
    params : ModelParams
    rates : MotifRateTable
        Per-motif rates, kept for auditing and serialisation.
    """
    if g.n_edges() == 0:
        raise ValueError("empty graph")
    cen = census(g)
    rate_sum, counts = _accumulate(g, cen)
    table = MotifRateTable(cen, rate_sum / g.T)
    lam_type = type_rate_of_rates(table)

    flags = {
        "absent_types": [i for i, x in zip((1, 2, 3), lam_type) if x is None],
        "zero_rate_motifs": {str(i): int(np.sum((cen.types == i) & (table.rates == 0))) for i in (1, 2, 3)},
        "nodes_without_roles": [int(v) for v in np.flatnonzero(counts.sum(axis=1) == 0)],
    }
    if flags["absent_types"]:
        log.info("no observed motifs of type(s) %s", flags["absent_types"])
    params = ModelParams(
        lambda_v=node_arrival_rate(g),
        p_m=motif_proportions(cen, g.N),
        lambda_m_type=lam_type,
        role_counts=counts,
        role_probs=role_probabilities(counts),
        n_nodes=len(g.labels),
        n_timesteps=g.T,
        flags=flags,
    )
    return params, table


def save_params(params: ModelParams, path, table: MotifRateTable | None = None,
                extra: Mapping | None = None, meta: Mapping | None = None) -> None:
    d = {}
    if meta:
        d["meta"] = dict(meta)
    d.update(params.to_dict())
    if table is not None:
        a, b, c = decode_triplets(table.census.codes, table.census.n)
        d["motif_rates"] = {
            "triplets": np.stack([a, b, c], axis=1).tolist(),
            "types": table.census.types.astype(int).tolist(),
            "rates": [float(x) for x in table.rates],
        }
    if extra:
        d.update(extra)
    Path(path).write_text(json.dumps(d, separators=(",", ":")) + "\n", encoding="utf-8")


def load_params(path) -> ModelParams:
    return ModelParams.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
