"""Command-line entry point: ingest, learn, generate, evaluate, transitions."""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import AdnParams, SnldParams, adn_fit, adn_generate, snld_fit, snld_generate
from .data import dataset_path
from .eval_metrics import evaluate
from .generator import GenerationConfig, generate, write_motif_log
from .motif_census import transition_matrix
from .param_learning import learn, load_params, save_params
from .temporal_graph import (
    TemporalGraph,
    ingest,
    load_any_graph,
    load_graph,
    read_events,
    save_graph,
    write_edge_list,
)

log = logging.getLogger("dymond")

TOOL = f"dymond {__version__}"
MODELS = ("dymond", "snld", "adn")


class UsageError(Exception):
    """Bad invocation detected after argument parsing (exit code 2)."""


def sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _meta(**extra) -> dict:
    return {"tool": TOOL, **extra}


def _header(meta: dict) -> list[str]:
    return [f"{k}={v}" if k != "tool" else v for k, v in meta.items()]


def _stream(seed: int, model: str) -> np.random.SeedSequence:
    # one child stream per model, all derived from the invocation seed
    return np.random.SeedSequence(seed, spawn_key=(MODELS.index(model),))


def cmd_ingest(args) -> int:
    if args.window_seconds is not None and args.window_seconds <= 0:
        raise UsageError("--window-seconds must be positive")
    if args.num_windows is not None and args.num_windows < 1:
        raise UsageError("--num-windows must be at least 1")
    if args.bundled:
        with dataset_path() as p:
            events, digest = read_events(p), sha256(p)
    elif args.input is None:
        raise UsageError("give an input file or --bundled")
    else:
        events, digest = read_events(args.input), sha256(args.input)
    g = ingest(events, window=args.window_seconds, num_windows=args.num_windows)
    window = ({"window_seconds": args.window_seconds} if args.window_seconds is not None
              else {"num_windows": args.num_windows})
    save_graph(g, args.out, meta=_meta(input_sha256=digest, **window))
    print(f"N={g.N} T={g.T} events={g.n_events()}")
    return 0


def _baseline_fits(g: TemporalGraph) -> dict:
    out = {}
    for name, fit in (("snld", snld_fit), ("adn", adn_fit)):
        try:
            out[name] = fit(g).to_dict()
        except ValueError as exc:
            out[name] = None
            log.warning("%s baseline not fitted: %s", name, exc)
    return out


def cmd_learn(args) -> int:
    g = load_graph(args.graph)
    params, table = learn(g)
    save_params(params, args.out, table=table, extra={"baselines": _baseline_fits(g)},
                meta=_meta(input_sha256=sha256(args.graph)))
    lam = ", ".join("absent" if x is None else f"{x:.4g}" for x in params.lambda_m_type)
    print(f"lambda_v={params.lambda_v:.4g} p_m={np.round(params.p_m, 6).tolist()} lambda_m=({lam})")
    return 0


def _baseline_params(raw: dict, model: str, T: int, N: int):
    fitted = raw.get("baselines", {}).get(model)
    if fitted is None:
        raise ValueError(f"params file has no fitted {model} baseline")
    if model == "snld":
        p = SnldParams(**fitted)
        hi = min(p.degree_max, N - 1)
        return dataclasses.replace(p, N=N, T=T, degree_max=hi, degree_min=min(p.degree_min, hi))
    return dataclasses.replace(AdnParams(**fitted), N=N, T=T)


def cmd_generate(args) -> int:
    if args.emit_motif_log and args.model != "dymond":
        raise UsageError("--emit-motif-log only applies to --model dymond")
    seed = args.seed
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % 2**64)
        print(f"seed={seed}", file=sys.stderr)
    raw = json.loads(Path(args.params).read_text(encoding="utf-8"))
    params = load_params(args.params)
    T = args.timesteps if args.timesteps is not None else params.n_timesteps
    N = args.nodes if args.nodes is not None else params.n_nodes
    if T < 1 or N < 3:
        raise UsageError("--timesteps must be >= 1 and --nodes >= 3")
    stream = _stream(seed, args.model)
    if args.model == "dymond":
        res = generate(GenerationConfig(T, N, stream, params))
        g = res.graph
    elif args.model == "snld":
        g = snld_generate(_baseline_params(raw, "snld", T, N), stream)
    else:
        g = adn_generate(_baseline_params(raw, "adn", T, N), stream)

    meta = _meta(model=args.model, seed=seed, params_sha256=sha256(args.params), T=g.T, N=len(g.labels))
    write_edge_list(g, args.out, header=_header(meta))
    if args.graph_out:
        save_graph(g, args.graph_out, meta=meta)
    if args.emit_motif_log:
        write_motif_log(res.motif_log, args.emit_motif_log, header=_header(meta))
    print(f"model={args.model} seed={seed} N={len(g.labels)} T={g.T} events={g.n_events()}")
    return 0


def _named(item: str) -> tuple[str, str]:
    name, sep, path = item.partition("=")
    return (name, path) if sep and name else (Path(item).stem, item)


def cmd_evaluate(args) -> int:
    observed = load_any_graph(args.observed)
    generated, digests = {}, {"observed": sha256(args.observed)}
    for item in args.generated:
        name, path = _named(item)
        if name in generated:
            raise UsageError(f"duplicate model name {name!r}")
        generated[name] = load_any_graph(path)
        digests[name] = sha256(path)
    report = evaluate(observed, generated, mrr_method=args.mrr_method)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = _meta(mrr_method=args.mrr_method, **{f"{k}_sha256": v for k, v in digests.items()})
    report.to_csv(out / "ks_report.csv", header=_header(meta))
    report.to_json(out / "summary.json", meta=meta)
    print(report.format_tables())
    for note in report.notes:
        print(f"note: {note}")
    return 0


def cmd_transitions(args) -> int:
    g = load_any_graph(args.graph)
    tm = transition_matrix(g)
    tm.to_csv(args.out, header=tuple(_header(_meta(input_sha256=sha256(args.graph)))))
    for line in Path(args.out).read_text(encoding="utf-8").splitlines():
        if not line.startswith("#"):
            print(line)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dymond", description="Dynamic network motif model toolkit.")
    p.add_argument("--version", action="version", version=TOOL)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", help="bucket a timestamped edge list into snapshots")
    s.add_argument("input", nargs="?", help="'u v t' text file")
    s.add_argument("--bundled", action="store_true", help="use the bundled synthetic email dataset")
    win = s.add_mutually_exclusive_group(required=True)
    win.add_argument("--window-seconds", type=float)
    win.add_argument("--num-windows", type=int)
    s.add_argument("--out", required=True, help="graph JSON output")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("learn", help="estimate model and baseline parameters")
    s.add_argument("graph", help="graph JSON from ingest")
    s.add_argument("--out", required=True, help="parameter JSON output")
    s.set_defaults(func=cmd_learn)

    s = sub.add_parser("generate", help="sample a synthetic dynamic network")
    s.add_argument("params", help="parameter JSON from learn")
    s.add_argument("--model", choices=MODELS, default="dymond")
    s.add_argument("--timesteps", type=int, help="default: learned horizon")
    s.add_argument("--nodes", type=int, help="default: learned node count")
    s.add_argument("--seed", type=int, help="64-bit seed; drawn and printed when omitted")
    s.add_argument("--emit-motif-log", metavar="PATH")
    s.add_argument("--graph-out", metavar="PATH", help="also write the graph as JSON")
    s.add_argument("--out", required=True, help="edge list output ('u v t', t = snapshot)")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("evaluate", help="compare generated graphs with an observed one")
    s.add_argument("observed", help="graph JSON or snapshot edge list")
    s.add_argument("generated", nargs="+", help="NAME=PATH (NAME defaults to the file stem)")
    s.add_argument("--mrr-method", choices=("per_metric", "mean_ks"), default="per_metric")
    s.add_argument("--out", required=True, help="report directory")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("transitions", help="observed motif transition probabilities")
    s.add_argument("graph", help="graph JSON or snapshot edge list")
    s.add_argument("--out", required=True, help="CSV output")
    s.set_defaults(func=cmd_transitions)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"dymond {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"dymond {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, TypeError) as exc:
        print(f"dymond {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
