"""Batch command-line front end.

Every library operation is reachable from exactly one subcommand (the
mapping is the OPERATION_SUBCOMMANDS registry below, which the test suite
checks for coverage).  All input and output is JSON; output is
byte-stable: keys sorted, floats printed with 17 significant digits.

Exit codes: 0 success or all checks passed, 2 an inequality suite or
verification reported failures, 3 an operation exceeded its budget,
4 invalid inputs (including malformed JSON, reported with line/column).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import commonality, cutnorm, graphon, graphs, lemmas, spectral, witness
from .errors import BudgetError, ValidationError

OPERATION_SUBCOMMANDS = {
    "density": "density",
    "hom_density": "density",
    "hom_density_graph": "density",
    "rooted_density": "rooted",
    "cut_norm_exact": "cutnorm",
    "sandwich_check": "cutnorm",
    "c4_deviation_bound": "cutnorm",
    "counting_lemma_bound": "cutnorm",
    "decompose": "spectrum",
    "cycle_density_spectral": "spectrum",
    "path_density_spectral": "spectrum",
    "project": "spectrum",
    "estimate_report": "spectrum",
    "subset_expansion": "expand",
    "classify_subset": "classify",
    "construct_family": "construct",
    "rooted_sum": "construct",
    "edge_subgraph": "construct",
    "build_witness": "construct",
    "build_target": "construct",
    "random_high_girth": "construct",
    "girth": "construct",
    "chromatic_number": "construct",
    "is_locally_dense": "construct",
    "complement": "construct",
    "deviation": "construct",
    "restrict": "construct",
    "validate_coloring": "construct",
    "verify": "verify",
    "omega_alpha": "verify",
    "omega_alpha_check": "verify",
    "random_suite": "suite",
    "search_counterexample": "search",
    "commonality_value": "search",
    "k_common_value": "search",
    "gradient": "search",
    "theorem_regime_check": "regime",
    "independence_ratio": "indep-ratio",
}

SUBCOMMANDS = (
    "density", "rooted", "cutnorm", "spectrum", "expand", "classify",
    "construct", "verify", "suite", "search", "regime", "indep-ratio",
)


# ----------------------------------------------------------------------
# Canonical JSON


def _format_float(x):
    if math.isnan(x) or math.isinf(x):
        raise ValidationError("cannot serialize non-finite float; use null instead")
    return f"{x:.17g}"


def _emit(obj, out):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(", ")
            out.append(json.dumps(str(key)))
            out.append(": ")
            _emit(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        out.append("[")
        for i, item in enumerate(seq):
            if i:
                out.append(", ")
            _emit(item, out)
        out.append("]")
    else:
        raise ValidationError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj):
    out = []
    _emit(obj, out)
    out.append("\n")
    return "".join(out)


# ----------------------------------------------------------------------
# Input loading


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ValidationError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"malformed JSON in {path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None


def _load_graph(path):
    return graphs.graph_from_json(_read_json(path))


def _load_plain_graph(path):
    g = _load_graph(path)
    return g.graph if isinstance(g, graphs.RootedGraph) else g


def _load_rooted(path):
    g = _load_graph(path)
    if not isinstance(g, graphs.RootedGraph):
        raise ValidationError(f"{path} has no roots; a rooted graph is required")
    return g


def _load_step(path):
    return graphon.graphon_from_json(_read_json(path))


def _load_graphon(path):
    w = _load_step(path)
    if not isinstance(w, graphon.StepGraphon):
        raise ValidationError(f"{path} is a kernel; a graphon is required")
    return w


def _load_kernel(path):
    w = _load_step(path)
    if isinstance(w, graphon.StepKernel):
        return w
    raise ValidationError(f"{path} is a graphon; a kernel is required (kind: kernel)")


def _load_block_function(path, k):
    data = _read_json(path)
    values = data["values"] if isinstance(data, dict) else data
    return graphon.BlockFunction(k, np.asarray(values, dtype=float))


def _parse_edge_list(text):
    try:
        edges = json.loads(text)
        return [tuple(e) for e in edges]
    except (json.JSONDecodeError, TypeError) as exc:
        raise ValidationError(f"bad edge list {text!r}: {exc}") from None


# ----------------------------------------------------------------------
# Subcommand handlers (each returns (payload, exit_code))


def _cmd_density(args):
    if args.graphon:
        w = _load_step(args.graphon)
        if args.graph is None:
            return {"density": graphon.density(w)}, 0
        h = _load_plain_graph(args.graph)
        return {"t": graphon.hom_density(h, w, method=args.method, budget=args.budget)}, 0
    if args.target is None or args.graph is None:
        raise ValidationError("density needs --graph with --graphon or --target")
    h = _load_plain_graph(args.graph)
    g = _load_plain_graph(args.target)
    return {"t": graphs.hom_density_graph(h, g, method=args.method, budget=args.budget)}, 0


def _cmd_rooted(args):
    h = _load_rooted(args.graph)
    w = _load_step(args.graphon)
    tensor = graphon.rooted_density(h, w, budget=args.budget)
    return {"roots": list(h.roots), "tensor": tensor}, 0


def _bound_payload(records):
    payload = cutnorm.bounds_to_json(records)
    ok = all(r["pass"] for r in payload)
    return payload, 0 if ok else 2


def _cmd_cutnorm(args):
    if args.check == "none":
        u = _load_kernel(args.kernel)
        return cutnorm.cut_norm_exact(u).to_json(), 0
    if args.check == "sandwich":
        u = _load_kernel(args.kernel)
        return _bound_payload(cutnorm.sandwich_check(u, budget=args.budget))
    if args.check == "c4-deviation":
        w = _load_graphon(args.graphon)
        return _bound_payload(cutnorm.c4_deviation_bound(w, budget=args.budget))
    h = _load_plain_graph(args.graph)
    w1 = _load_graphon(args.graphon)
    w2 = _load_graphon(args.graphon2)
    return _bound_payload(cutnorm.counting_lemma_bound(h, w1, w2, budget=args.budget))


def _cmd_spectrum(args):
    w = _load_step(args.input)
    s = spectral.decompose(w)
    payload = {
        "eigenvalues": s.eigenvalues,
        "eigenfunctions": s.eigenfunctions,
        "overlaps": s.overlaps,
        "delta": s.delta,
        "gamma": s.gamma,
        "density": s.density,
    }
    code = 0
    if args.cycles:
        payload["cycle_densities"] = {
            str(n): spectral.cycle_density_spectral(s, n)
            for n in _parse_ints(args.cycles)
        }
    if args.paths:
        payload["path_densities"] = {
            str(n): spectral.path_density_spectral(s, n)
            for n in _parse_ints(args.paths)
        }
    if args.project:
        g = _load_block_function(args.project, w.block_count)
        payload["projection"] = spectral.project(g, s)
    if args.estimates:
        records = spectral.estimate_report(s, w)
        payload["estimates"] = spectral.report_to_json(records)
        if not all(r.passed for r in records):
            code = 2
    return payload, code


def _parse_ints(text):
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError as exc:
        raise ValidationError(f"bad integer list {text!r}") from exc


def _cmd_expand(args):
    h = _load_plain_graph(args.graph)
    w = _load_graphon(args.graphon)
    report = graphon.subset_expansion(h, w, budget=args.budget)
    direct = graphon.hom_density(h, w, budget=args.budget)
    gap = abs(report.total - direct) / max(1.0, abs(direct))
    terms = report.nonzero_terms(1e-15) if args.nonzero_only else report.terms
    payload = {
        "base": report.base,
        "base_term": report.base_term,
        "total": report.total,
        "direct": direct,
        "relative_gap": gap,
        "terms": [
            {
                "edges": [list(e) for e in t.edges],
                "coefficient": t.coefficient,
                "term_density": t.term_density,
                "value": t.value,
            }
            for t in terms
        ],
    }
    return payload, 0


def _cmd_classify(args):
    base = _load_plain_graph(args.base)
    chain = witness.build_witness_chain(base, args.ell, args.attach[0], args.attach[1])
    subset = _parse_edge_list(args.subset)
    return {"group": witness.classify_subset(chain, subset)}, 0


def _cmd_construct(args):
    kind = args.kind
    if kind == "family":
        spec = graphs.FamilySpec.parse(args.family)
        return graphs.graph_to_json(graphs.construct_family(spec)), 0
    if kind == "rooted-sum":
        g = _load_rooted(args.input)
        h = _load_rooted(args.other)
        return graphs.graph_to_json(graphs.rooted_sum(g, h)), 0
    if kind == "edge-subgraph":
        g = _load_plain_graph(args.input)
        return graphs.graph_to_json(graphs.edge_subgraph(g, _parse_edge_list(args.subset))), 0
    if kind == "witness":
        g = _load_plain_graph(args.input)
        return graphs.graph_to_json(witness.build_witness(g, args.attach[0], args.attach[1])), 0
    if kind == "target":
        h = _load_rooted(args.input)
        target = witness.build_target(h, args.m, args.n, args.ell, args.regime)
        return graphs.graph_to_json(target), 0
    if kind == "random-high-girth":
        report = graphs.random_high_girth(args.n, args.girth_target, args.seed)
        return {
            "graph": graphs.graph_to_json(report.graph),
            "girth": None if math.isinf(report.girth) else report.girth,
            "requested_girth": report.requested_girth,
            "n_sampled": report.n_sampled,
            "n_final": report.n_final,
            "edge_probability": report.edge_probability,
            "independence_number": report.independence_number,
            "alpha_method": report.alpha_method,
            "chromatic_lower_bound": report.chromatic_lower_bound,
            "certified": report.certified,
            "seed": report.seed,
        }, 0
    if kind == "girth":
        g = _load_plain_graph(args.input)
        value = graphs.girth(g)
        return {"girth": None if math.isinf(value) else value}, 0
    if kind == "chromatic":
        g = _load_plain_graph(args.input)
        return {"chromatic_number": graphs.chromatic_number(g, args.max_vertices)}, 0
    if kind == "locally-dense":
        g = _load_plain_graph(args.input)
        report = graphs.is_locally_dense(g, args.rho, args.d, seed=args.seed)
        return {
            "dense": report.dense,
            "witness": list(report.witness) if report.witness else None,
            "mode": report.mode,
            "subsets_checked": report.subsets_checked,
        }, 0
    if kind == "complement":
        w = _load_graphon(args.input)
        return graphon.graphon_to_json(graphon.complement(w)), 0
    if kind == "deviation":
        w = _load_graphon(args.input)
        p, u = graphon.deviation(w)
        return {"p": p, "kernel": graphon.graphon_to_json(u)}, 0
    if kind == "restrict":
        w = _load_graphon(args.input)
        h = _load_block_function(args.weights, w.block_count)
        return graphon.graphon_to_json(graphon.restrict(w, h)), 0
    if kind == "validate-coloring":
        ws = [_load_graphon(p) for p in args.coloring]
        ok = graphon.validate_coloring(ws)
        return {"valid": ok}, 0 if ok else 2
    raise ValidationError(f"unknown construct kind {kind!r}")


def _load_lemma_inputs(path):
    data = _read_json(path)
    if not isinstance(data, dict):
        raise ValidationError("lemma inputs must be a JSON object")
    out = {}
    for key, value in data.items():
        if key == "factors":
            out[key] = [
                (tuple(vs), np.asarray(arr, dtype=float)) for vs, arr in value
            ]
        elif key == "measures":
            out[key] = np.asarray(value, dtype=float)
        elif isinstance(value, dict) and "measures" in value:
            out[key] = graphon.graphon_from_json(value)
        elif isinstance(value, dict) and "n" in value:
            out[key] = graphs.graph_from_json(value)
        else:
            out[key] = value
    return out


def _cmd_verify(args):
    if args.what == "lemma":
        inst = lemmas.verify(args.lemma, **_load_lemma_inputs(args.inputs))
        payload = {
            "lemma": inst.lemma,
            "lhs": inst.lhs,
            "rhs": inst.rhs,
            "margin": inst.margin,
            "pass": inst.passed,
            "parts": [
                {"name": n, "lhs": l, "rhs": r, "margin": m}
                for n, l, r, m in inst.parts
            ],
        }
        return payload, 0 if inst.passed else 2
    if args.what == "omega-alpha":
        consts = lemmas.omega_alpha(args.delta, args.rmax)
        return {
            "delta": consts.delta,
            "table": [{"r": r, "omega": o, "alpha": a} for r, o, a in consts.table],
        }, 0
    report = lemmas.omega_alpha_check(
        _load_graphon(args.graphon), _load_plain_graph(args.graph),
        args.delta, args.resolution, budget=args.budget,
    )
    payload = {
        "density_value": report.density_value,
        "omega_bound": report.omega_bound,
        "alpha_value": report.alpha_value,
        "alpha_bound": report.alpha_bound,
        "density_disjunct": report.density_disjunct,
        "sparse_disjunct": report.sparse_disjunct,
        "holds": report.holds,
        "rechecked": report.rechecked,
        "resolution_used": report.resolution_used,
    }
    return payload, 0 if report.holds else 2


def _cmd_suite(args):
    ids = None if args.lemmas == "all" else tuple(args.lemmas.split(","))
    summaries = lemmas.random_suite(args.seed, args.trials, ids, budget=args.budget)
    payload = [s.to_json() for s in summaries]
    code = 0 if all(s.failures == 0 for s in summaries) else 2
    return payload, code


def _cmd_search(args):
    h = _load_plain_graph(args.graph)
    if args.value_only:
        if args.coloring:
            ws = [_load_graphon(p) for p in args.coloring]
            res = commonality.k_common_value(h, ws, budget=args.budget)
        else:
            w = _load_graphon(args.graphon)
            res = commonality.commonality_value(h, w, budget=args.budget)
        return {"value": res.value, "threshold": res.threshold, "margin": res.margin}, 0
    if args.gradient_only:
        w = _load_graphon(args.graphon)
        return {"gradient": commonality.gradient(h, w, budget=args.budget)}, 0
    state = commonality.search_counterexample(
        h, k=args.k, blocks=args.blocks, seed=args.seed,
        restarts=args.restarts, iters=args.iters, step=args.step,
        budget=args.budget, threads=args.threads,
    )
    return state.to_json(), 0


def _cmd_regime(args):
    h = _load_rooted(args.rooted)
    w = _load_graphon(args.graphon)
    report = commonality.theorem_regime_check(
        h, w, args.m, args.n, args.ell, args.regime, budget=args.budget
    )
    return report.to_json(), 0


def _cmd_indep_ratio(args):
    w = _load_graphon(args.graphon)
    alpha, h = graphon.independence_ratio(w, args.delta, args.resolution)
    return {"alpha": alpha, "witness": h.values}, 0


# ----------------------------------------------------------------------
# Parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def build_parser():
    parser = _Parser(prog="graphonlab", description=__doc__)
    parser.add_argument("--output", "-o", help="write JSON here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(handler=handler)
        p.add_argument("--budget", type=int, default=None,
                       help="elementary-operation budget override")
        return p

    p = add("density", _cmd_density, help="edge / homomorphism densities")
    p.add_argument("--graph", help="pattern graph JSON")
    p.add_argument("--graphon", help="step graphon or kernel JSON")
    p.add_argument("--target", help="finite host graph JSON")
    p.add_argument("--method", default="auto", choices=["auto", "dp", "enumerate"])

    p = add("rooted", _cmd_rooted, help="rooted density tensor")
    p.add_argument("--graph", required=True, help="rooted pattern graph JSON")
    p.add_argument("--graphon", required=True)

    p = add("cutnorm", _cmd_cutnorm, help="exact cut norm and its bounds")
    p.add_argument("--kernel", help="step kernel JSON")
    p.add_argument("--graphon", help="step graphon JSON")
    p.add_argument("--graphon2", help="second graphon (counting bound)")
    p.add_argument("--graph", help="pattern graph (counting bound)")
    p.add_argument("--check", default="none",
                   choices=["none", "sandwich", "c4-deviation", "counting"])

    p = add("spectrum", _cmd_spectrum, help="operator spectrum and estimates")
    p.add_argument("--input", required=True, help="graphon or kernel JSON")
    p.add_argument("--cycles", help="comma list of cycle lengths")
    p.add_argument("--paths", help="comma list of path vertex counts")
    p.add_argument("--project", help="block function JSON to project")
    p.add_argument("--estimates", action="store_true")

    p = add("expand", _cmd_expand, help="deviation-kernel subset expansion")
    p.add_argument("--graph", required=True)
    p.add_argument("--graphon", required=True)
    p.add_argument("--nonzero-only", action="store_true")

    p = add("classify", _cmd_classify, help="classify a chain edge subset")
    p.add_argument("--base", required=True, help="base graph JSON")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--attach", type=int, nargs=2, default=(0, 1))
    p.add_argument("--subset", required=True, help='edge list, e.g. "[[0,1],[1,2]]"')

    p = add("construct", _cmd_construct, help="build and measure objects")
    p.add_argument("kind", choices=[
        "family", "rooted-sum", "edge-subgraph", "witness", "target",
        "random-high-girth", "girth", "chromatic", "locally-dense",
        "complement", "deviation", "restrict", "validate-coloring",
    ])
    p.add_argument("--family", help="family name, e.g. P5, C4, K3, K2,3, K2|3,4")
    p.add_argument("--input", help="primary input JSON")
    p.add_argument("--other", help="second rooted graph (rooted-sum)")
    p.add_argument("--subset", help="edge list (edge-subgraph)")
    p.add_argument("--attach", type=int, nargs=2, default=(0, 1))
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--regime", default="none",
                   choices=["local", "nonlocal", "multicolor", "none"])
    p.add_argument("--girth-target", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rho", type=float)
    p.add_argument("--d", type=float)
    p.add_argument("--max-vertices", type=int, default=40)
    p.add_argument("--weights", help="block function JSON (restrict)")
    p.add_argument("--coloring", nargs="+", help="graphon JSONs (validate-coloring)")

    p = add("verify", _cmd_verify, help="verify one inequality or the disjunction")
    p.add_argument("what", choices=["lemma", "omega-alpha", "omega-alpha-check"])
    p.add_argument("--lemma", help="lemma id")
    p.add_argument("--inputs", help="JSON file with the lemma's inputs")
    p.add_argument("--delta", type=float)
    p.add_argument("--rmax", type=int, default=6)
    p.add_argument("--graphon")
    p.add_argument("--graph")
    p.add_argument("--resolution", type=int, default=16)

    p = add("suite", _cmd_suite, help="seeded random inequality suites")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--lemmas", default="all")

    p = add("search", _cmd_search, help="commonality values and counterexample search")
    p.add_argument("--graph", required=True)
    p.add_argument("--graphon")
    p.add_argument("--coloring", nargs="+")
    p.add_argument("--value-only", action="store_true")
    p.add_argument("--gradient-only", action="store_true")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--blocks", type=int, default=3)
    p.add_argument("--seed", type=int, required=False, default=None)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--iters", type=int, default=2000)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--threads", type=int, default=1)

    p = add("regime", _cmd_regime, help="empirical regime probe")
    p.add_argument("--rooted", required=True, help="rooted graph JSON")
    p.add_argument("--graphon", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--regime", required=True,
                   choices=["local", "nonlocal", "multicolor"])

    p = add("indep-ratio", _cmd_indep_ratio, help="almost-independent mass")
    p.add_argument("--graphon", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--resolution", type=int, default=16)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "search" and not args.value_only and not args.gradient_only:
            if args.seed is None:
                raise ValidationError("search requires an explicit --seed")
        if args.command == "construct" and args.kind == "random-high-girth":
            if args.girth_target is None:
                raise ValidationError("random-high-girth requires --girth-target")
        payload, code = args.handler(args)
        text = canonical_json(payload)
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return code
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
