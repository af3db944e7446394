"""Command-line entry point.

Exit codes: 0 success, 1 internal invariant failure (a proof inequality or
the embedding validator failed), 2 hypothesis or precondition failure
(bad input, host too sparse, failed construction certificate), 64 usage
error.  The default seed can be set with ``TREEEMBED_SEED``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema

from . import graph6
from .errors import PreconditionError, ProofInvariantError, TreeEmbedError
from .graph import Graph, complete, parse_edge_list, random_gnp
from .trees import Tree, sample_labelled_tree

FORMAT_VERSION = 1
EXIT_OK, EXIT_INVARIANT, EXIT_PRECONDITION, EXIT_USAGE = 0, 1, 2, 64
SEED_ENV = "TREEEMBED_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _schema() -> dict:
    return json.loads(resources.files("treeembed").joinpath("report_schema.json").read_text())


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}")


# -- inputs ---------------------------------------------------------------------


def load_tree(spec: str, seed: int = 0) -> Tree:
    """A tree from ``gen:labelled:N`` or a file holding one parent-array line."""
    if spec.startswith("gen:"):
        parts = spec.split(":")
        if len(parts) == 3 and parts[1] == "labelled":
            return sample_labelled_tree(int(parts[2]), seed)
        raise PreconditionError(f"unknown tree generator {spec!r}")
    text = Path(spec).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise PreconditionError(f"{spec}: no tree line")
    return Tree.from_parent_line(lines[0])


def load_host(spec: str, seed: int = 0, n: int | None = None):
    """A host and optional planted clusters.

    ``gen:blowup`` (planted 10-cluster fixture), ``gen:complete:N``,
    ``gen:gnp:N:P``, a graph6 file (first graph) or an edge-list file.
    """
    if spec.startswith("gen:"):
        parts = spec.split(":")
        if parts[1] == "blowup":
            from .fixtures import planted_blowup

            return planted_blowup(n or 3000, 10, seed)
        if parts[1] == "complete" and len(parts) == 3:
            return complete(int(parts[2])), None
        if parts[1] == "gnp" and len(parts) == 4:
            return random_gnp(int(parts[2]), float(parts[3]), seed), None
        raise PreconditionError(f"unknown host generator {spec!r}")
    path = Path(spec)
    data = path.read_bytes()
    if path.suffix == ".g6":
        first = next((ln for ln in data.splitlines() if ln.strip()), b"")
        return graph6.decode(first), None
    return parse_edge_list(data.decode()), None


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _k_range(text: str) -> list[int]:
    out = []
    try:
        for part in text.split(","):
            if "-" in part:
                a, b = part.split("-")
                out.extend(range(int(a), int(b) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad k range {text!r}")
    return out


# -- commands -------------------------------------------------------------------


def cmd_partition(args) -> tuple[int, dict]:
    from .partition import fine_partition, one_sided_partition, validate_fine_partition, validate_one_sided

    t = load_tree(args.tree, args.seed).oriented()
    k = t.n - 1
    ell = args.ell if args.ell is not None else max(1, -(-k // 10))
    fine = fine_partition(t, ell)
    one = one_sided_partition(t, ell, fine)
    rf, ro = validate_fine_partition(t, fine), validate_one_sided(t, one)
    result = {
        "k": k,
        "ell": ell,
        "fine": {"W_A": len(fine.W_A), "W_B": len(fine.W_B), "D_A": len(fine.D_A), "D_B": len(fine.D_B),
                 "valid": rf.ok, "checks": rf.to_json()},
        "one_sided": {"W": len(one.W), "D_prime": len(one.D_prime), "D_doubleprime": len(one.D_doubleprime),
                      "valid": ro.ok, "checks": ro.to_json()},
    }
    if args.full:
        result["fine"]["partition"] = fine.to_json()
        result["one_sided"]["partition"] = one.to_json()
    return (EXIT_OK if rf.ok and ro.ok else EXIT_INVARIANT), result


def cmd_embed(args) -> tuple[int, dict]:
    from .embedding import greedy_embed
    from .oracle import decide
    from .validate import validate_embedding

    t = load_tree(args.tree, args.seed)
    g, _ = load_host(args.host, args.seed)
    if args.method == "greedy":
        mapping = greedy_embed(t, g).map
        verdict = "CONTAINED"
    else:
        res = decide(t, g, args.budget)
        mapping, verdict = res.embedding, res.verdict
    result = {"method": args.method, "verdict": verdict,
              "embedding": None if mapping is None else {str(x): h for x, h in sorted(mapping.items())}}
    if mapping is not None:
        rep = validate_embedding(t, g, mapping, require_total=True)
        result["validator"] = rep.to_json()
        if not rep.ok:
            return EXIT_INVARIANT, result
    return EXIT_OK, result


def cmd_pipeline(args) -> tuple[int, dict]:
    from .constants import derive_constants
    from .fixtures import pipeline_tree
    from .saturation import run_three_phases

    g, clusters = load_host(args.host, args.seed, args.n)
    if args.tree:
        t = load_tree(args.tree, args.seed)
    else:
        t = pipeline_tree(args.k, args.dmax, args.r, args.seed)
    overrides = {}
    if args.mode == "practical":
        for key in ("d", "eps", "beta", "gamma"):
            val = getattr(args, key)
            if val is not None:
                overrides[key] = val
    schedule = derive_constants(args.eta, args.r, args.mode, **overrides)
    res = run_three_phases(g, t, schedule, reg_eps=args.reg_eps, m=args.m if clusters is None else None,
                           initial=clusters, seed=args.seed, audit_mode=args.audit)
    rep = res.report
    if not args.placements:
        rep.pop("placements", None)
    rep["ok"] = res.ok
    if args.embedding:
        rep["embedding"] = res.embedding.to_json()
    failed = rep.get("audit", {}).get("failed", [])
    return (EXIT_OK if res.ok and not failed else EXIT_INVARIANT), rep


def cmd_construct(args) -> tuple[int, dict]:
    from .constructions import broom_pair, skew_counterexample, sqrt_tightness

    if args.name == "broom":
        rep = broom_pair(args.k, args.kind)
    elif args.name == "sqrt":
        rep = sqrt_tightness(args.k)
    else:
        rep = skew_counterexample(args.r, args.eta, args.n, round_down=args.round_down)
    result = rep.to_json()
    if args.host_out:
        Path(args.host_out).write_bytes(graph6.encode(rep.host) + b"\n")
    if args.tree_out:
        Path(args.tree_out).write_text(rep.tree.to_parent_line() + "\n")
    result["tree"] = rep.tree.to_parent_line() if rep.tree.n <= 1000 else None
    result["host_graph6"] = graph6.encode(rep.host).decode() if rep.host.n <= 1000 else None
    if args.check:
        from .oracle import decide

        result["oracle"] = decide(rep.tree, rep.host, args.budget).verdict
    return (EXIT_OK if rep.ok else EXIT_PRECONDITION), result


def cmd_oracle(args) -> tuple[int, dict]:
    from .oracle import decide
    from .validate import validate_embedding

    t = load_tree(args.tree, args.seed)
    g, _ = load_host(args.host, args.seed)
    res = decide(t, g, args.budget)
    print(res.verdict)
    result = res.to_json()
    if res.embedding is not None:
        rep = validate_embedding(t, g, res.embedding, require_total=True)
        result["validator"] = rep.to_json()
        if not rep.ok:
            return EXIT_INVARIANT, result
    return EXIT_OK, result


def cmd_scan(args) -> tuple[int, dict]:
    from .scans import conjecture13_scan, erdos_sos_scan, iter_hosts

    hosts = iter_hosts(args.corpus)
    if args.which == "es":
        rep = erdos_sos_scan(hosts, args.k_range, budget=args.budget, jobs=args.jobs)
    else:
        rep = conjecture13_scan(hosts, args.k_range, budget=args.budget, jobs=args.jobs)
    return (EXIT_OK if rep.ok else EXIT_INVARIANT), rep.to_json()


def cmd_experiment(args) -> tuple[int, dict]:
    from .scans import balanced_equivalence, balanced_tree_experiment, loglog_slope, rows_to_csv

    rows = balanced_tree_experiment(args.k, args.samples, args.seed, method=args.method, jobs=args.jobs)
    text = rows_to_csv(rows)
    if args.csv:
        Path(args.csv).write_text(text)
    else:
        sys.stdout.write(text)
    result = {"rows": len(rows)}
    sampled = [r for r in rows if r.method == "sampled"]
    if len(sampled) >= 2:
        result["loglog_slope_sampled"] = loglog_slope(sampled)
    if args.equivalence:
        result["equivalence"] = [balanced_equivalence(k, budget=args.budget) for k in args.k if k <= 12]
        if any(e["mismatches"] or e["timeouts"] for e in result["equivalence"]):
            return EXIT_INVARIANT, result
    return EXIT_OK, result


# -- parser ---------------------------------------------------------------------


def _global_flags(p: argparse.ArgumentParser, default) -> None:
    p.add_argument("--seed", type=int, default=default, help=f"random seed (default ${SEED_ENV} or 0)")
    p.add_argument("--out", default=default, help="write the JSON report here instead of stdout")
    p.add_argument("--config", default=default, help="JSON file of flag defaults")


def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    _global_flags(common, argparse.SUPPRESS)
    p = _Parser(prog="treeembed", description="Tree embedding toolkit.")
    _global_flags(p, None)
    sub = p.add_subparsers(dest="command", required=True)
    orig = sub.add_parser

    def add_parser(name, **kw):
        return orig(name, parents=[common], **kw)

    sub.add_parser = add_parser

    s = sub.add_parser("partition", help="fine and one-sided partitions of a tree")
    s.add_argument("--tree", required=True, help="parent-array file or gen:labelled:N")
    s.add_argument("--ell", type=int)
    s.add_argument("--full", action="store_true", help="include the partitions themselves")
    s.set_defaults(func=cmd_partition)

    s = sub.add_parser("embed", help="embed a tree greedily or exactly")
    s.add_argument("--tree", required=True)
    s.add_argument("--host", required=True)
    s.add_argument("--method", choices=["greedy", "exact"], default="greedy")
    s.add_argument("--budget", type=int, default=10**8)
    s.set_defaults(func=cmd_embed)

    s = sub.add_parser("pipeline", help="full saturation embedding")
    s.add_argument("--host", default="gen:blowup")
    s.add_argument("--n", type=int, help="host order for gen:blowup")
    s.add_argument("--tree", help="tree file; default is a random bounded-degree tree")
    s.add_argument("--k", type=int, default=1500)
    s.add_argument("--dmax", type=int, default=8)
    s.add_argument("--eta", type=_frac, default=Fraction(1, 10))
    s.add_argument("--r", type=_frac, default=Fraction(1, 2))
    s.add_argument("--mode", choices=["practical", "theoretical"], default="practical")
    s.add_argument("--d", type=_frac)
    s.add_argument("--eps", type=_frac)
    s.add_argument("--beta", type=_frac)
    s.add_argument("--gamma", type=_frac)
    s.add_argument("--reg-eps", type=_frac, default=Fraction(1, 4))
    s.add_argument("--m", type=int, help="number of clusters when none are planted")
    s.add_argument("--audit", choices=["practical", "theoretical"], default="practical")
    s.add_argument("--placements", action="store_true", help="keep the per-placement log")
    s.add_argument("--embedding", action="store_true", help="include the embedding")
    s.set_defaults(func=cmd_pipeline)

    s = sub.add_parser("construct", help="extremal constructions with certificates")
    s.add_argument("name", choices=["broom", "sqrt", "skew"])
    s.add_argument("--k", type=int, default=12)
    s.add_argument("--kind", choices=["TwoCliques", "CompleteBipartite"], default="TwoCliques")
    s.add_argument("--r", type=_frac, default=Fraction(1, 4))
    s.add_argument("--eta", type=_frac, default=Fraction(1, 100))
    s.add_argument("--n", type=int, default=30000)
    s.add_argument("--round-down", action="store_true")
    s.add_argument("--host-out", help="write the host as graph6")
    s.add_argument("--tree-out", help="write the tree as a parent array")
    s.add_argument("--check", action="store_true", help="also run the exact oracle")
    s.add_argument("--budget", type=int, default=10**8)
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("oracle", help="decide whether a tree is contained in a host")
    s.add_argument("--tree", required=True)
    s.add_argument("--host", required=True)
    s.add_argument("--budget", type=int, default=10**8)
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("scan", help="exhaustive conjecture scans over a graph6 corpus")
    s.add_argument("which", choices=["es", "c13"])
    s.add_argument("--corpus", nargs="+", required=True)
    s.add_argument("--k-range", type=_k_range, default=_k_range("1-7"))
    s.add_argument("--budget", type=int, default=10**8)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("experiment", help="balanced-tree fractions as CSV")
    s.add_argument("which", choices=["balanced"])
    s.add_argument("--k", type=_k_range, default=_k_range("4,6,8,10,12"))
    s.add_argument("--samples", type=int, default=10**4)
    s.add_argument("--method", choices=["auto", "exact", "sampled", "both"], default="auto")
    s.add_argument("--csv", help="write CSV here instead of stdout")
    s.add_argument("--equivalence", action="store_true", help="cross-check against the two-clique host for k <= 12")
    s.add_argument("--budget", type=int, default=10**8)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_experiment)
    return p


def _config_value(v):
    if isinstance(v, Fraction):
        return str(v)
    return v


def _apply_config(parser: _Parser, argv: list[str]) -> argparse.Namespace:
    """Parse ``argv``; values from ``--config`` fill every flag left at its default."""
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config {args.config}: {exc}")
    if not isinstance(cfg, dict):
        parser.error("config must be a JSON object")
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction)).choices[args.command]
    for key, val in cfg.items():
        dest = key.replace("-", "_")
        if dest in ("command", "config", "func") or not hasattr(args, dest):
            parser.error(f"unknown config key {key!r}")
        default = parser.get_default(dest) if dest in ("seed", "out") else sub.get_default(dest)
        if getattr(args, dest) == default:
            setattr(args, dest, Fraction(val) if isinstance(default, Fraction) else val)
    return args


def envelope(args, status: str, code: int, error: str | None, result) -> dict:
    config = {k: _config_value(v) for k, v in sorted(vars(args).items()) if k != "func"}
    return {
        "format_version": FORMAT_VERSION,
        "command": args.command,
        "config": config,
        "status": status,
        "exit_code": code,
        "error": error,
        "result": result,
    }


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        if args.seed is None:
            args.seed = _default_seed()
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    except UsageError as exc:
        print(f"treeembed: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        code, result = args.func(args)
        status, error = ("ok" if code == EXIT_OK else "failed"), None
    except ProofInvariantError as exc:
        code, status, error = EXIT_INVARIANT, "invariant", str(exc)
        audit = getattr(exc, "audit", None)
        result = {"audit": audit.to_json()} if audit is not None else None
    except (PreconditionError, OSError) as exc:
        code, status, error, result = EXIT_PRECONDITION, "precondition", str(exc), None
    except TreeEmbedError as exc:
        code, status, error, result = EXIT_INVARIANT, "failed", f"{type(exc).__name__}: {exc}", None
    if status == "failed" and code == EXIT_PRECONDITION:
        status = "precondition"
    if error:
        print(f"treeembed: {error}", file=sys.stderr)

    report = envelope(args, status, code, error, result)
    jsonschema.validate(report, _schema())
    text = json.dumps(report, indent=2, sort_keys=True, default=_config_value) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    elif args.command not in ("oracle", "experiment"):
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
