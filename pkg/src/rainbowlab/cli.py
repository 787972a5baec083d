"""Command-line entry point: ``rainbowlab <subcommand> ...``.

Every output embeds a manifest (format version plus the normalised
arguments) from which ``rainbowlab replay`` regenerates it byte for byte.
JSON outputs carry it under ``"manifest"``; text outputs (``.cg`` graphs,
sweep CSV) carry it on a leading ``# rainbowlab-manifest`` comment line.

Exit codes: 0 success, 64 usage error, 65 domain refusal or bad input
data, 74 I/O error.  ``solve`` and ``pipeline`` return 1 when no structure
was found and ``solve`` returns 2 when its search budget ran out; ``audit``
returns 1 when an exactly checked property fails.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

from . import __version__
from .core import ModelParams, generate
from .graphio import format_graph, parse_graph, write_atomic

FORMAT_VERSION = 1
MANIFEST_TAG = "# rainbowlab-manifest "

EX_USAGE, EX_DATAERR, EX_IOERR = 64, 65, 74

# arguments that only say where output goes; they never change its bytes
_NOT_IN_MANIFEST = {"command", "handler", "out", "workers"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {raw!r}") from None


# -- inputs ----------------------------------------------------------------------

def _read_input(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_graph(text), hashlib.sha256(text.encode()).hexdigest()


def _graph(args):
    """Graph from --input, else drawn from the model flags (k = 2)."""
    if args.input:
        G, digest = _read_input(args.input)
        if getattr(args, "input_sha256", None) not in (None, digest):
            raise ValueError(f"input {args.input} changed since the manifest was written")
        args.input_sha256 = digest
        return G
    missing = [f"--{f}" for f in ("n", "p", "c") if getattr(args, f) is None]
    if missing:
        raise UsageError(f"{args.command}: give --input or all of {', '.join(missing)}")
    return generate(ModelParams(args.n, getattr(args, "k", 2) or 2, args.p, args.c, args.seed))


def _params(args, *, need_c=True):
    missing = [f"--{f}" for f in ("n", "p") + (("c",) if need_c else ())
               if getattr(args, f) is None]
    if missing:
        raise UsageError(f"{args.command}: missing {', '.join(missing)}")
    return ModelParams(args.n, args.k, args.p, args.c if need_c else 1, args.seed)


# -- subcommands -------------------------------------------------------------------
# each returns (payload, exit code); payload is a dict (JSON) or a str (text)

def cmd_gen(args):
    return format_graph(generate(_params(args))), 0


def cmd_solve(args):
    from .oracle import (BudgetExhausted, SearchBudget, find_rainbow_ell_cycle,
                         find_rainbow_hamilton_cycle, rainbow_perfect_matching)
    from .verify import check_certificate

    G = _graph(args)
    budget = SearchBudget(node_limit=args.node_limit, time_limit=args.time_limit)
    t0 = time.perf_counter()
    try:
        if args.kind == "hc":
            cert = find_rainbow_hamilton_cycle(G, budget)
        elif args.kind == "pm":
            cert = rainbow_perfect_matching(G, budget)
        else:
            if args.ell is None:
                raise UsageError("solve --kind ell needs --ell")
            cert = find_rainbow_ell_cycle(G, args.ell, budget)
    except BudgetExhausted as e:
        return {"status": "budget-exhausted", "nodes": e.nodes}, 2
    out = {"status": "found" if cert else "none",
           "certificate": cert.to_dict() if cert else None}
    if cert:
        assert check_certificate(G, cert)
    if args.timings:
        out["elapsed_ms"] = (time.perf_counter() - t0) * 1e3
    return out, 0 if cert else 1


def cmd_pipeline(args):
    from .pipeline import PipelineConfig, run_pipeline_on

    if args.config and not args.config_text:
        with open(args.config, encoding="utf-8") as fh:
            args.config_text = fh.read()
    cfg = PipelineConfig.from_text(args.config_text) if args.config_text else PipelineConfig()
    G = _graph(args)
    if G.k != 2:
        raise ValueError("the construction is defined for graphs (k = 2)")
    t0 = time.perf_counter()
    cert, trace = run_pipeline_on(G, cfg, args.seed)
    out = {"status": "found" if cert else "failed",
           "certificate": cert.to_dict() if cert else None,
           "trace": json.loads(trace.to_json())}
    if args.timings:
        out["elapsed_ms"] = (time.perf_counter() - t0) * 1e3
    return out, 0 if cert else 1


def _family(args):
    from .coupling import family

    return family(args.family, args.n, args.k, args.c, overlap=args.ell, richness=args.richness)


def cmd_coupling(args):
    from .coupling import check_dominance, stepwise_monotonicity

    params = _params(args)
    fam = _family(args)
    if args.i is None and not args.sweep_i:
        rep = check_dominance(params, fam, args.trials, members=args.members)
        return rep.to_dict(), 0
    steps = range(1, params.num_slots + 1) if args.sweep_i else [args.i]
    reports = [stepwise_monotonicity(params, fam, i, args.trials, q=args.q).to_dict()
               for i in steps]
    return {"family": fam.name, "steps": reports}, 0


def cmd_sweep(args):
    from .experiments import SweepSpec, sweep_csv, threshold_sweep

    if bool(args.x) == bool(args.p):
        raise UsageError("sweep: give exactly one of --x or --p")
    if bool(args.eps) == bool(args.c):
        raise UsageError("sweep: give exactly one of --eps or --c")
    spec = SweepSpec(ns=tuple(args.n), trials=args.trials, method=args.method,
                     xs=tuple(args.x or ()), ps=tuple(args.p or ()), eps=tuple(args.eps or ()),
                     cs=tuple(args.c or ()), seed=args.seed, node_limit=args.node_limit)
    res = threshold_sweep(spec, workers=args.workers)
    return sweep_csv(res, timings=args.timings), 0


def cmd_pack(args):
    from .experiments import packing_extract

    G = _graph(args)
    rep = packing_extract(G, args.eps, p=args.p, method=args.method, seed=args.seed)
    return rep.to_dict(), 0


def cmd_rich(args):
    from .experiments import rich_experiment

    params = _params(args, need_c=False)
    rep = rich_experiment(args.family, params, args.eps, overlap=args.ell, trials=args.trials,
                          members=args.members)
    return rep.to_dict(), 0


def cmd_audit(args):
    from .verify import audit_properties

    G = _graph(args)
    rep = audit_properties(G, args.eps, args.delta, p=args.p, samples=args.samples, seed=args.seed)
    return json.loads(json.dumps(rep.to_dict(), default=_plain)), 0 if rep.exact_ok else 1


def _plain(o):
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(type(o).__name__)


# -- parser ------------------------------------------------------------------------

def _model_flags(p, *, k=True, c=True, p_required=False):
    p.add_argument("--n", type=int, help="number of vertices")
    if k:
        p.add_argument("--k", type=int, default=2, help="uniformity (default 2)")
    p.add_argument("--p", type=float, required=p_required, help="edge probability")
    if c:
        p.add_argument("--c", type=int, help="number of colours")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="base seed (default $RAINBOWLAB_SEED or 0)")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--timings", action="store_true",
                        help="include wall-clock timings (breaks byte-identical replay)")
    common.add_argument("--workers", type=int, default=None,
                        help="worker processes (default $RAINBOWLAB_WORKERS or CPU count)")

    ap = _Parser(prog="rainbowlab", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=f"rainbowlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", parents=[common], help="draw a coloured random hypergraph (.cg)")
    _model_flags(g)
    g.set_defaults(handler=cmd_gen)

    s = sub.add_parser("solve", parents=[common], help="exact rainbow structure search")
    s.add_argument("--input", required=True, help=".cg file")
    s.add_argument("--kind", choices=("hc", "pm", "ell"), default="hc")
    s.add_argument("--ell", type=int, help="overlap for --kind ell")
    s.add_argument("--node-limit", type=int, default=10**9)
    s.add_argument("--time-limit", type=float, default=600.0)
    s.set_defaults(handler=cmd_solve)

    pl = sub.add_parser("pipeline", parents=[common], help="staged rainbow Hamilton cycle construction")
    pl.add_argument("--input", help=".cg file (otherwise drawn from --n/--p/--c)")
    _model_flags(pl, k=False)
    pl.add_argument("--config", help="key = value file overriding pipeline constants")
    pl.set_defaults(handler=cmd_pipeline, config_text=None)

    cp = sub.add_parser("coupling", parents=[common], help="coloured vs uncoloured dominance")
    cp.add_argument("--family", required=True,
                    choices=("triangle", "rainbow-pm", "rainbow-hc", "rainbow-ell-cycle"))
    _model_flags(cp)
    cp.add_argument("--ell", type=int, help="overlap of the ell-cycle family")
    cp.add_argument("--richness", type=int, help="claimed richness (default c - m + 1)")
    cp.add_argument("--trials", type=int, default=10**5)
    cp.add_argument("--members", type=int, default=100, help="members for the richness check")
    cp.add_argument("--i", type=int, help="report the single interpolation step i")
    cp.add_argument("--sweep-i", action="store_true", help="report every interpolation step")
    cp.add_argument("--q", type=float, help="coloured edge probability for step reports")
    cp.set_defaults(handler=cmd_coupling)

    sw = sub.add_parser("sweep", parents=[common], help="threshold sweep to CSV")
    sw.add_argument("--n", type=int, nargs="+", required=True)
    sw.add_argument("--x", type=float, nargs="+", help="offsets: p = (ln n + ln ln n + x)/n")
    sw.add_argument("--p", type=float, nargs="+", help="explicit edge probabilities")
    sw.add_argument("--eps", type=float, nargs="+", help="c = ceil((1 + eps) n)")
    sw.add_argument("--c", type=int, nargs="+", help="explicit colour counts")
    sw.add_argument("--trials", type=int, required=True)
    sw.add_argument("--method", choices=("oracle", "pipeline", "both"), default="oracle")
    sw.add_argument("--node-limit", type=int, default=10**7)
    sw.set_defaults(handler=cmd_sweep)

    pk = sub.add_parser("pack", parents=[common], help="greedy edge-disjoint rainbow Hamilton cycles")
    pk.add_argument("--input", help=".cg file (otherwise drawn from --n/--p/--c)")
    _model_flags(pk, k=False)
    pk.add_argument("--eps", type=float, default=0.1)
    pk.add_argument("--method", choices=("oracle", "pipeline"))
    pk.set_defaults(handler=cmd_pack)

    ri = sub.add_parser("rich", parents=[common], help="dominance with c = ceil((1 + eps) m)")
    ri.add_argument("--family", required=True,
                    choices=("triangle", "rainbow-pm", "rainbow-hc", "rainbow-ell-cycle"))
    _model_flags(ri, c=False)
    ri.add_argument("--eps", type=float, required=True)
    ri.add_argument("--ell", type=int)
    ri.add_argument("--trials", type=int, default=10**5)
    ri.add_argument("--members", type=int, default=100)
    ri.set_defaults(handler=cmd_rich)

    au = sub.add_parser("audit", parents=[common], help="typical-graph property audit")
    au.add_argument("--input", help=".cg file (otherwise drawn from --n/--p/--c)")
    _model_flags(au, k=False)
    au.add_argument("--eps", type=float, default=0.2)
    au.add_argument("--delta", type=float, default=0.05)
    au.add_argument("--samples", type=int, default=10**5)
    au.set_defaults(handler=cmd_audit)

    rp = sub.add_parser("replay", help="regenerate an output from its embedded manifest")
    rp.add_argument("source", help="an output file or a manifest JSON file")
    rp.add_argument("--out", help="output file (default stdout)")
    rp.add_argument("--check", action="store_true",
                    help="compare with SOURCE instead of writing; exit 1 on any difference")
    ap.subcommands = sub.choices
    return ap


# -- manifests and output ------------------------------------------------------------

def manifest_of(args) -> dict:
    keep = {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_IN_MANIFEST}
    return {"format_version": FORMAT_VERSION, "command": args.command, "args": keep}


def render(payload, manifest) -> str:
    if isinstance(payload, str):
        return MANIFEST_TAG + json.dumps(manifest, sort_keys=True) + "\n" + payload
    return json.dumps({"manifest": manifest, "result": payload}, sort_keys=True, indent=2,
                      default=_plain) + "\n"


def extract_manifest(text: str) -> dict:
    if text.startswith(MANIFEST_TAG):
        return json.loads(text.splitlines()[0][len(MANIFEST_TAG):])
    doc = json.loads(text)
    return doc.get("manifest", doc)


def _emit(text, out):
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _run(args):
    payload, code = args.handler(args)
    return render(payload, manifest_of(args)), code


def _replay(args, parser):
    with open(args.source, encoding="utf-8") as fh:
        original = fh.read()
    man = extract_manifest(original)
    if man.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported manifest format_version {man.get('format_version')!r}")
    sub = parser.subcommands.get(man.get("command"))
    if sub is None or man["command"] == "replay":
        raise ValueError(f"manifest names unknown command {man.get('command')!r}")
    # defaults first, so manifests from before a new flag existed still replay
    ns = argparse.Namespace(**{a.dest: a.default for a in sub._actions if a.dest != "help"})
    for k, v in sub._defaults.items():
        setattr(ns, k, v)
    for k, v in man["args"].items():
        setattr(ns, k, v)
    ns.command = man["command"]
    ns.out = None
    ns.workers = _env_int("RAINBOWLAB_WORKERS", os.cpu_count() or 1)
    text, code = _run(ns)
    if args.check:
        same = text == original
        sys.stdout.write("identical\n" if same else "DIFFERENT\n")
        return 0 if same else 1
    _emit(text, args.out)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "replay":
            return _replay(args, parser)
        if args.seed is None:
            args.seed = _env_int("RAINBOWLAB_SEED", 0)
        if args.workers is None:
            args.workers = _env_int("RAINBOWLAB_WORKERS", os.cpu_count() or 1)
        if args.workers < 1:
            raise UsageError("--workers must be >= 1")
        text, code = _run(args)
        _emit(text, args.out)
        return code
    except UsageError as e:
        print(e, file=sys.stderr)
        return EX_USAGE
    except OSError as e:
        print(f"rainbowlab: {e}", file=sys.stderr)
        return EX_IOERR
    except ValueError as e:
        # ModelError, GraphFormatError, RichnessError and other refusals
        print(f"rainbowlab: {e}", file=sys.stderr)
        return EX_DATAERR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
