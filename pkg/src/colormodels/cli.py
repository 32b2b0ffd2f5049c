"""Command-line interface: JSON in, one JSON document out.

Exit codes: 0 success (verdicts are data), 1 bad input, 2 numerical failure.
Model and graph arguments take a JSON file path or ``builtin:<name>``.
"""

import argparse
import json
import logging
import sys

import numpy as np

from . import __version__
from .connection import (
    connection_matrix,
    edge_invariant,
    psd_check,
    vertex_invariant,
    witness_search,
)
from .erp import erp_decide_complex, verdict_to_json
from .errors import ModelError, NumericalError
from .graph_core import (
    canonical_key,
    complete_graph,
    cycle_graph,
    enumerate_fragments,
    fragment_from_json,
    graph_from_json,
    path_graph,
)
from .kempf_ness import find_conjugating_g, point_to_json
from .models import (
    VertexModel,
    edge_model_from_json,
    edge_model_to_json,
    eval_edge,
    eval_vertex,
    independent_set_model,
    is_twin_free,
    proper_coloring_model,
    twin_reduce,
    vertex_model_from_json,
    vertex_model_to_json,
)
from .szegedy import materialize, transform_to_json, vertex_to_edge
from .tolerance import DEFAULT

log = logging.getLogger("colormodels")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _builtin_model(name):
    if name.startswith("proper-"):
        return proper_coloring_model(int(name.split("-", 1)[1]))
    if name == "indepset":
        return independent_set_model()
    if name == "antiferro":
        return VertexModel([1, 1], [[0, -1], [-1, 0]])
    raise ModelError("UNKNOWN_BUILTIN", name)


def _builtin_graph(name):
    kind, _, size = name.partition("-")
    n = int(size)
    table = {"cycle": cycle_graph, "complete": complete_graph, "path": path_graph}
    if kind not in table:
        raise ModelError("UNKNOWN_BUILTIN", name)
    return table[kind](n)


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelError("BAD_INPUT", f"{path}: {exc}") from exc


def _load_model(source):
    if source.startswith("builtin:"):
        return _builtin_model(source[len("builtin:"):])
    return _wrap(vertex_model_from_json, _load_json(source))


def _load_edge_model(source):
    if source.startswith("builtin:"):
        return vertex_to_edge(_builtin_model(source[len("builtin:"):])).edge_model
    return _wrap(edge_model_from_json, _load_json(source))


def _load_graph(source):
    if source.startswith("builtin:"):
        return _builtin_graph(source[len("builtin:"):])
    return _wrap(graph_from_json, _load_json(source))


def _wrap(fn, data):
    try:
        return fn(data)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError("BAD_INPUT", repr(exc)) from exc


def _c(z):
    z = complex(z)
    return [z.real, z.imag]


def _invariant(args):
    if args.model and args.edge_model:
        raise UsageError("give either --model or --edge-model, not both")
    if args.model:
        return vertex_invariant(_load_model(args.model))
    if args.edge_model:
        return edge_invariant(_load_edge_model(args.edge_model))
    raise UsageError("--model or --edge-model is required")


def _circle_value(text):
    if text is None:
        return None
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"bad circle value {text!r}") from exc


def cmd_eval(args):
    g = _load_graph(args.graph)
    cv = _circle_value(args.circle_value)
    if args.model and args.edge_model:
        raise UsageError("give either --model or --edge-model, not both")
    if args.model:
        value = eval_vertex(_load_model(args.model), g, cv, backend=args.backend)
    elif args.edge_model:
        value = eval_edge(_load_edge_model(args.edge_model), g, backend=args.backend)
    else:
        raise UsageError("--model or --edge-model is required")
    return {"value": _c(value)}


def cmd_transform(args):
    m = _load_model(args.model)
    res = vertex_to_edge(m, tol=args.tol)
    out = transform_to_json(res)
    if args.degree is not None:
        out["table"] = edge_model_to_json(materialize(res.edge_model, args.degree))
    return out


def cmd_twin_reduce(args):
    m = _load_model(args.model)
    r = twin_reduce(m, args.tol)
    return {"model": vertex_model_to_json(r), "n_before": m.n, "n_after": r.n}


def cmd_erp_check(args):
    m = _load_model(args.model)
    notes = []
    if not is_twin_free(m, args.tol):
        r = twin_reduce(m, args.tol)
        notes.append(f"twin reduction: {m.n} -> {r.n} colours")
        m = r
    if not m.is_real(args.tol) and args.seed is None:
        raise UsageError("complex models need --seed for the randomized search")
    seed = 0 if args.seed is None else args.seed
    v = erp_decide_complex(m, args.tol, budget=args.budget, seed=seed)
    v.notes[:0] = notes
    return verdict_to_json(v)


def _matrix_json(M):
    return [[_c(z) for z in row] for row in np.asarray(M)]


def _fragments(args, l):
    if args.fragments:
        data = _load_json(args.fragments)
        frags = [_wrap(fragment_from_json, d) for d in data]
        return frags
    return enumerate_fragments(l, args.max_vertices, args.max_edges, args.allow_bare_edges)


def cmd_connection_matrix(args):
    if args.l is None:
        raise UsageError("--l is required")
    p = _invariant(args)
    frags = _fragments(args, args.l)
    cm = connection_matrix(p, args.l, frags, _circle_value(args.circle_value))
    res = psd_check(cm.M, args.psd_tol)
    return {
        "l": args.l,
        "fragments": [k.decode() for k in cm.keys],
        "M": _matrix_json(cm.M),
        "psd": res.psd,
        "min_eigenvalue": res.min_eigenvalue,
        "witness": list(res.witness) if res.witness is not None else None,
    }


def cmd_witness(args):
    if not args.model:
        raise UsageError("--model is required")
    m = _load_model(args.model)
    cvs = [_circle_value(x) for x in (args.circle_value_list or [])]
    w = witness_search(
        m, args.l or 3, args.max_vertices, args.max_edges, circle_values=cvs, tol=args.psd_tol
    )
    if w is None:
        return {"l": None, "fragments": [], "M": [], "psd": True, "min_eigenvalue": None,
                "witness": None, "value": None}
    return {
        "l": w.l,
        "fragments": [k.decode() for k in w.matrix.keys],
        "M": _matrix_json(w.matrix.M),
        "psd": False,
        "min_eigenvalue": w.min_eigenvalue,
        "witness": [float(x) for x in w.coefficients],
        "witness_fragments": [canonical_key(F).decode() for F in w.fragments],
        "value": w.value,
    }


def cmd_kempf_ness_search(args):
    if args.seed is None:
        raise UsageError("--seed is required")
    if args.model:
        h = vertex_to_edge(_load_model(args.model)).edge_model
    elif args.edge_model:
        h = _load_edge_model(args.edge_model)
        if not hasattr(h, "U"):
            raise UsageError("kempf-ness-search needs an edge model in evaluation form")
    else:
        raise UsageError("--model or --edge-model is required")
    l = h.k if args.l is None else args.l
    res = find_conjugating_g(
        h, l, budget=args.iters * args.restarts, seed=args.seed,
        restarts=args.restarts, step=args.step,
    )
    return {"found": res.found, "g": point_to_json(res.point), "f_history": res.f_history}


def cmd_selftest(args):
    from .acceptance import run_all

    results = run_all(verbose=False)
    return {
        "passed": all(r.passed for r in results),
        "criteria": [
            {"id": r.id, "name": r.name, "passed": r.passed, "detail": r.detail,
             "seconds": round(r.seconds, 3)}
            for r in results
        ],
    }


def build_parser():
    parser = _Parser(prog="colormodels", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, tol=True):
        p.add_argument("--model", "--vertex-model", dest="model")
        p.add_argument("--edge-model")
        if tol:
            p.add_argument("--tol", type=float, default=DEFAULT.eq)
        p.add_argument("-v", "--verbose", action="store_true")
        return p

    p = common(sub.add_parser("eval", help="partition function of a model on a graph"))
    p.add_argument("--graph", required=True)
    p.add_argument("--circle-value")
    p.add_argument("--backend", choices=["fast", "reference"], default="fast")
    p.set_defaults(func=cmd_eval)

    p = common(sub.add_parser("transform", help="vertex model -> edge model"))
    p.add_argument("--degree", type=int)
    p.set_defaults(func=cmd_transform)

    p = common(sub.add_parser("twin-reduce", help="merge or delete twin colours"))
    p.set_defaults(func=cmd_twin_reduce)

    p = common(sub.add_parser("erp-check", help="decide edge reflection positivity"))
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=int, default=4000)
    p.set_defaults(func=cmd_erp_check)

    def corpus(p):
        p.add_argument("--l", type=int)
        p.add_argument("--fragments")
        p.add_argument("--max-vertices", type=int, default=2)
        p.add_argument("--max-edges", type=int, default=4)
        p.add_argument("--allow-bare-edges", action="store_true")
        p.add_argument("--psd-tol", type=float, default=DEFAULT.psd)

    p = common(sub.add_parser("connection-matrix", help="edge connection matrix and PSD test"))
    corpus(p)
    p.add_argument("--circle-value")
    p.set_defaults(func=cmd_connection_matrix)

    p = common(sub.add_parser("witness", help="search for a negative connection-matrix direction"))
    corpus(p)
    p.set_defaults(max_vertices=1)
    p.add_argument("--circle-value", action="append", dest="circle_value_list")
    p.set_defaults(func=cmd_witness)

    p = common(sub.add_parser("kempf-ness-search", help="search O_l(C) for a conjugating element"))
    p.add_argument("--l", type=int)
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--step", type=float, default=0.1)
    p.add_argument("--seed", type=int)
    p.add_argument("--restarts", type=int, default=8)
    p.set_defaults(func=cmd_kempf_ness_search)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_selftest)
    return parser


def run(argv=None, stdout=None):
    """Run one command; returns the exit code and writes JSON to ``stdout``."""
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("a command is required")
        logging.basicConfig(
            level=logging.DEBUG if args.verbose else logging.WARNING,
            stream=sys.stderr,
            format="%(levelname)s %(name)s: %(message)s",
        )
        out = args.func(args)
    except (UsageError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    stdout.write(json.dumps(out, indent=2) + "\n")
    if args.command == "selftest" and not out["passed"]:
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
