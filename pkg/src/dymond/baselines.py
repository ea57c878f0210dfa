"""Reference generators: static network with link dynamics (SNLD) and an
activity-driven network with memory and triadic closure (ADN)."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .eval_metrics import global_clustering
from .temporal_graph import TemporalGraph, pair

_EXPONENT_BOUNDS = (-10.0, 10.0)


def truncated_power_law_mle(values, lo: float, hi: float) -> float:
    """Continuous MLE of ``alpha`` for density ``x**-alpha`` on ``[lo, hi]``."""
    x = np.asarray(values, dtype=float)
    if len(x) == 0 or not hi > lo:
        return 0.0
    s = np.log(x).sum()
    k = len(x)
    log_lo, log_hi = math.log(lo), math.log(hi)

    def nll(a):
        if abs(a - 1) < 1e-9:
            log_z = math.log(log_hi - log_lo)
        else:
            # log of (hi**(1-a) - lo**(1-a)) / (1-a), kept in log space
            e_hi, e_lo = (1 - a) * log_hi, (1 - a) * log_lo
            big, small = max(e_hi, e_lo), min(e_hi, e_lo)
            log_z = big + math.log1p(-math.exp(small - big)) - math.log(abs(1 - a))
        return a * s + k * log_z

    res = minimize_scalar(nll, bounds=_EXPONENT_BOUNDS, method="bounded", options={"xatol": 1e-10})
    return float(res.x)


def sample_discrete_power_law(alpha: float, lo: int, hi: int, size: int, rng) -> np.ndarray:
    """Inverse-CDF draws from ``P(k) ~ k**-alpha`` on ``lo..hi``."""
    support = np.arange(lo, hi + 1)
    pmf = support.astype(float) ** -alpha
    cdf = np.cumsum(pmf / pmf.sum())
    idx = np.searchsorted(cdf, rng.random(size), side="right")
    return support[np.minimum(idx, len(support) - 1)]


def sample_continuous_power_law(alpha: float, lo: float, hi: float, size: int, rng) -> np.ndarray:
    u = rng.random(size)
    if hi <= lo:
        return np.full(size, float(lo))
    if abs(alpha - 1) < 1e-9:
        return lo * (hi / lo) ** u
    a = 1 - alpha
    return (lo ** a + u * (hi ** a - lo ** a)) ** (1 / a)


def _event_steps(mean_gap: float, T: int, rng) -> list[int]:
    out = []
    clock = rng.exponential(mean_gap)
    while clock < T:
        s = int(math.floor(clock)) + 1
        if not out or out[-1] != s:
            out.append(s)
        clock += rng.exponential(mean_gap)
    return out


@dataclass
class SnldParams:
    powerlaw_exponent: float
    degree_min: int
    degree_max: int
    edge_event_rate: float  # mean inter-event gap per edge, in timesteps
    N: int
    T: int
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 1 <= self.degree_min <= self.degree_max:
            raise ValueError("need 1 <= degree_min <= degree_max")
        if self.degree_max > self.N - 1:
            raise ValueError("degree_max cannot exceed N - 1")
        if not self.edge_event_rate > 0:
            raise ValueError("edge_event_rate must be positive")

    def to_dict(self):
        return asdict(self)


def stub_matching(degrees, rng, retry_factor: int = 100) -> list[tuple[int, int]]:
    """Pair stubs uniformly at random, rejecting loops and repeated edges.

    After ``retry_factor * stubs`` rejected proposals, each further rejection
    drops the offending stub.
    """
    degrees = np.array(degrees, dtype=np.int64)
    if degrees.sum() % 2:
        holders = np.flatnonzero(degrees > 0)
        degrees[holders[rng.integers(len(holders))]] -= 1
    stubs = list(np.repeat(np.arange(len(degrees)), degrees))
    budget = retry_factor * len(stubs)
    edges: set = set()
    while len(stubs) >= 2:
        i, j = rng.choice(len(stubs), size=2, replace=False)
        a, b = stubs[i], stubs[j]
        if a != b and pair(a, b) not in edges:
            edges.add(pair(int(a), int(b)))
            for k in sorted((i, j), reverse=True):
                stubs[k] = stubs[-1]
                stubs.pop()
            continue
        budget -= 1
        if budget < 0:
            stubs[i] = stubs[-1]
            stubs.pop()
    return sorted(edges)


def snld_generate(params: SnldParams, seed) -> TemporalGraph:
    rng = np.random.default_rng(seed)
    deg = sample_discrete_power_law(params.powerlaw_exponent, params.degree_min, params.degree_max,
                                    params.N, rng)
    static = stub_matching(deg, rng)
    edge_sets: list[list] = [[] for _ in range(params.T)]
    for e in static:
        for s in _event_steps(params.edge_event_rate, params.T, rng):
            edge_sets[s - 1].append(e)
    everyone = frozenset(range(params.N))
    return TemporalGraph.from_edge_sets(edge_sets, active=[everyone] * params.T, labels=range(params.N))


def snld_fit(g: TemporalGraph) -> SnldParams:
    """Fit degree and inter-event parameters on the aggregated simple graph."""
    steps = g.edge_timesteps
    if not steps:
        raise ValueError("empty graph")
    deg: dict[int, int] = {}
    for u, v in steps:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    k = np.array(list(deg.values()))
    lo, hi = int(k.min()), int(k.max())
    gaps = [b - a for ts in steps.values() for a, b in zip(ts, ts[1:])]
    flags = {}
    if gaps:
        rate = float(np.mean(gaps))
    else:
        rate = float(g.T)
        flags["edge_event_rate"] = "no repeated edges; fell back to the horizon length"
    n = max(g.N, hi + 1)
    return SnldParams(truncated_power_law_mle(k, lo, hi), lo, hi, rate, n, g.T, flags)


@dataclass
class AdnParams:
    activity_exponent: float  # power law over per-timestep mean degree
    activity_min: float
    activity_max: float
    p_delete: float
    p_triadic: float
    N: int
    T: int

    def __post_init__(self):
        for name in ("p_delete", "p_triadic"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")
        if not 0 <= self.activity_min <= self.activity_max:
            raise ValueError("need 0 <= activity_min <= activity_max")

    def to_dict(self):
        return asdict(self)


def _draw_activity(params: AdnParams, rng, size=None):
    k = sample_continuous_power_law(params.activity_exponent, params.activity_min,
                                    params.activity_max, 1 if size is None else size, rng)
    # each contact adds one to the degree of both endpoints
    a = np.minimum(1.0, k / 2)
    return float(a[0]) if size is None else a


def adn_generate(params: AdnParams, seed, activity=None) -> TemporalGraph:
    """Simulate the activity-driven model with memory and triadic closure.

    ``activity`` overrides the initial per-node activation probabilities.
    """
    rng = np.random.default_rng(seed)
    N = params.N
    act = np.array(activity, dtype=float) if activity is not None else _draw_activity(params, rng, N)
    memory: list[dict] = [dict() for _ in range(N)]
    edge_sets = []
    for _ in range(params.T):
        edges: set = set()
        for i in rng.permutation(N).tolist():
            if rng.random() < params.p_delete:
                for j in memory[i]:
                    memory[j].pop(i, None)
                memory[i] = {}
                edges = {e for e in edges if i not in e}
                act[i] = _draw_activity(params, rng)
                continue
            if not rng.random() < act[i]:
                continue
            target = _choose_target(i, memory, params.p_triadic, N, rng)
            if target is None or pair(i, target) in edges:
                continue
            edges.add(pair(i, target))
            memory[i][target] = memory[i].get(target, 0) + 1
            memory[target][i] = memory[target].get(i, 0) + 1
        edge_sets.append(sorted(edges))
    everyone = frozenset(range(N))
    return TemporalGraph.from_edge_sets(edge_sets, active=[everyone] * params.T, labels=range(N))


def _weighted_key(d: dict, rng, exclude=()):
    keys = [k for k in sorted(d) if k not in exclude]
    if not keys:
        return None
    w = np.array([d[k] for k in keys], dtype=float)
    return keys[int(np.searchsorted(np.cumsum(w), rng.random() * w.sum(), side="right").clip(0, len(keys) - 1))]


def _choose_target(i: int, memory, p_triadic: float, N: int, rng):
    mem = memory[i]
    if mem and rng.random() < p_triadic:
        j = _weighted_key(mem, rng)
        k = _weighted_key(memory[j], rng, exclude=(i,))
        if k is not None:
            return k
    # reinforcement: a known contact with probability k / (k + 1)
    if mem and rng.random() < len(mem) / (len(mem) + 1):
        return _weighted_key(mem, rng)
    if N < 2:
        return None
    j = int(rng.integers(N - 1))
    return j + 1 if j >= i else j


def adn_fit(g: TemporalGraph) -> AdnParams:
    if g.T < 2:
        raise ValueError("need at least two snapshots")
    degs = [s.degrees() for s in g.snapshots]
    totals: dict[int, list] = {}
    for d in degs:
        for v, k in d.items():
            totals.setdefault(v, []).append(k)
    mean_deg = np.array([np.mean(ks) for ks in totals.values()])
    mean_deg = mean_deg[mean_deg > 0]
    lo, hi = (float(mean_deg.min()), float(mean_deg.max())) if len(mean_deg) else (0.0, 0.0)
    exponent = truncated_power_law_mle(mean_deg, lo, hi) if hi > lo > 0 else 0.0

    ratios = []
    for d0, d1 in zip(degs, degs[1:]):
        busy = [v for v, k in d0.items() if k > 0]
        if busy:
            ratios.append(sum(d1.get(v, 0) == 0 for v in busy) / len(busy))
    p_delete = float(np.mean(ratios)) if ratios else 0.0
    p_triadic = float(np.mean([global_clustering(s) for s in g.snapshots]))
    return AdnParams(exponent, lo, hi, p_delete, p_triadic, len(g.labels), g.T)
