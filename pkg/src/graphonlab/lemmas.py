"""Registry of verifiable density inequalities and their random suites.

Every entry pairs a hypothesis check (parity of parameters, structural
predicates on graphs, boundedness of kernels) with an exact evaluation of
both sides of the inequality.  A pass means lhs <= rhs + 1e-10*max(1,|rhs|).
All registered inequalities are proven facts: a failure on a valid
instance is an implementation bug, and the randomized suites hammer each
one on seeded hypothesis-satisfying instances to catch exactly that.

Kernels for the suites are generated as deviations of random step
graphons, which guarantees zero density and values bounded by one.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import _contract
from .errors import ValidationError
from .graphon import (
    StepGraphon,
    StepKernel,
    deviation,
    hom_density,
    independence_ratio,
)
from .graphs import (
    Graph,
    bipartition,
    complete_bipartite,
    cycle_graph,
    girth,
    hom_density_graph,
    is_complete_bipartite,
    is_cycle_graph,
    is_star,
    is_tree,
    path_graph,
    pathed_bipartite,
)

TOLERANCE = 1e-10


@dataclass(frozen=True)
class LemmaInstance:
    lemma: str
    inputs: dict = field(repr=False)
    lhs: float
    rhs: float
    margin: float
    passed: bool
    parts: tuple = ()


def _instance(lemma, inputs, parts):
    """Fold one or more (name, lhs, rhs) parts into a LemmaInstance.

    The reported lhs/rhs come from the binding part (smallest margin).
    """
    detail = []
    for name, lhs, rhs in parts:
        margin = rhs - lhs
        detail.append((name, float(lhs), float(rhs), float(margin)))
    binding = min(detail, key=lambda p: p[3])
    passed = all(m >= -TOLERANCE * max(1.0, abs(r)) for _, _, r, m in detail)
    return LemmaInstance(
        lemma=lemma,
        inputs=inputs,
        lhs=binding[1],
        rhs=binding[2],
        margin=binding[3],
        passed=passed,
        parts=tuple(detail),
    )


def _require(cond, lemma, message):
    if not cond:
        raise ValidationError(f"{lemma}: hypothesis violated: {message}")


def _require_kernel(u, lemma):
    _require(isinstance(u, StepKernel), lemma, "input must be a step kernel")
    _require(np.abs(u.values).max() <= 1 + 1e-12, lemma, "kernel must be bounded by one")


def _c4(u, budget=None):
    return hom_density(cycle_graph(4), u, budget=budget)


def _p3(u, budget=None):
    return hom_density(path_graph(3), u, budget=budget)


# ----------------------------------------------------------------------
# Individual checks


def _check_jensen_rows(w, m, n, mprime, budget=None):
    _require(isinstance(w, StepGraphon), "jensen_rows", "input must be a graphon")
    _require(1 <= mprime <= m and n >= 1, "jensen_rows", "need m >= m' >= 1 and n >= 1")
    big = hom_density(complete_bipartite(m, n), w, budget=budget)
    small = hom_density(complete_bipartite(mprime, n), w, budget=budget)
    return _instance(
        "jensen_rows",
        {"w": w, "m": m, "n": n, "mprime": mprime},
        [("row_power", small ** (m / mprime), big)],
    )


def _check_kmn_c4(w, m, n, budget=None):
    _require(isinstance(w, StepGraphon), "kmn_c4", "input must be a graphon")
    _require(m >= 2 and n >= 2, "kmn_c4", "need m, n >= 2")
    kmn = hom_density(complete_bipartite(m, n), w, budget=budget)
    c4 = hom_density(cycle_graph(4), w, budget=budget)
    return _instance(
        "kmn_c4",
        {"w": w, "m": m, "n": n},
        [("c4_power", c4 ** (m * n / 4.0), kmn)],
    )


def _check_cs_p3(u, budget=None):
    _require_kernel(u, "cs_p3")
    p3 = _p3(u, budget)
    c4 = _c4(u, budget)
    return _instance(
        "cs_p3",
        {"u": u},
        [("nonneg", 0.0, p3), ("cauchy_schwarz", p3, math.sqrt(max(c4, 0.0)))],
    )


def _check_star_bounds(u, k, budget=None):
    """Star and double-star densities against their two-leaf cases.

    Upper bounds (any k >= 2): |t(K_{1,k},U)| <= t(K_{1,2},U) and
    |t(K_{2,k},U)| <= t(C4,U), by Cauchy-Schwarz and boundedness.  For even
    k, Jensen gives the power forms as lower bounds:
    t(K_{1,2},U)^(k/2) <= t(K_{1,k},U) and t(C4,U)^(k/2) <= t(K_{2,k},U).
    (The power forms are NOT upper bounds; a two-block kernel with degree
    concentrated on a small block violates them.)
    """
    _require_kernel(u, "star_bounds")
    _require(k >= 2, "star_bounds", "need k >= 2")
    p3 = _p3(u, budget)
    c4 = _c4(u, budget)
    star = hom_density(complete_bipartite(1, k), u, budget=budget)
    double_star = hom_density(complete_bipartite(2, k), u, budget=budget)
    parts = [
        ("one_row_upper", abs(star), p3),
        ("two_rows_upper", abs(double_star), c4),
    ]
    if k % 2 == 0:
        parts.append(("one_row_jensen", p3 ** (k / 2.0), star))
        parts.append(("two_rows_jensen", c4 ** (k / 2.0), double_star))
    return _instance("star_bounds", {"u": u, "k": k}, parts)


def _weighted_integral(num_vars, factors, mu):
    ops = [(tuple(vs), np.asarray(arr, dtype=float)) for vs, arr in factors]
    ops += [((v,), mu) for v in range(num_vars)]
    return float(_contract._einsum(ops, ()))


def _check_gen_cs(factors, measures, num_vars):
    """Generalized Cauchy-Schwarz: if every variable appears in at most two
    factors, the integral of the product is at most the product of L2
    norms.  The variable-incidence hypothesis is checked syntactically."""
    mu = np.asarray(measures, dtype=float)
    _require(num_vars >= 1, "gen_cs", "need at least one variable")
    _require(len(factors) >= 1, "gen_cs", "need at least one factor")
    usage = {v: 0 for v in range(num_vars)}
    for vs, arr in factors:
        arr = np.asarray(arr, dtype=float)
        _require(
            arr.shape == (mu.size,) * len(vs),
            "gen_cs",
            "factor table shape must match its variable list",
        )
        for v in vs:
            _require(0 <= v < num_vars, "gen_cs", f"variable {v} out of range")
            usage[v] += 1
    _require(
        max(usage.values()) <= 2,
        "gen_cs",
        "some variable appears in more than two factors",
    )
    lhs = _weighted_integral(num_vars, factors, mu)
    rhs = 1.0
    for vs, arr in factors:
        sq = _weighted_integral(len(vs), [(tuple(range(len(vs))), np.asarray(arr) ** 2)], mu)
        rhs *= math.sqrt(max(sq, 0.0))
    return _instance(
        "gen_cs",
        {"factors": factors, "measures": measures, "num_vars": num_vars},
        [("product_integral", lhs, rhs)],
    )


def _check_even_cycle(u, k, budget=None):
    _require_kernel(u, "even_cycle")
    _require(k >= 2, "even_cycle", "need k >= 2")
    c2k = hom_density(cycle_graph(2 * k), u, budget=budget)
    c4 = _c4(u, budget)
    return _instance(
        "even_cycle", {"u": u, "k": k}, [("even_cycle", c2k, c4 ** (k / 2.0))]
    )


def _check_long_path(u, k, budget=None):
    _require_kernel(u, "long_path")
    _require(k >= 1, "long_path", "need k >= 1")
    pk3 = hom_density(path_graph(k + 3), u, budget=budget)
    p3 = _p3(u, budget)
    c4 = _c4(u, budget)
    return _instance(
        "long_path",
        {"u": u, "k": k},
        [
            ("fourth_power", pk3**4, p3**4 * c4**k),
            ("chain", p3**4 * c4**k, c4 ** (k + 2)),
        ],
    )


def _check_girth4_bip(u, g, budget=None):
    _require_kernel(u, "girth4_bip")
    _require(bipartition(g) is not None, "girth4_bip", "graph must be bipartite")
    _require(min(g.degrees()) >= 2, "girth4_bip", "minimum degree must be at least two")
    _require(girth(g) >= 4, "girth4_bip", "girth must be at least four")
    _require(not is_cycle_graph(g), "girth4_bip", "graph must not be a single cycle")
    _require(not is_complete_bipartite(g), "girth4_bip", "graph must not be complete bipartite")
    val = hom_density(g, u, budget=budget)
    c4 = _c4(u, budget)
    return _instance(
        "girth4_bip", {"u": u, "g": g}, [("dense_bipartite", abs(val), c4**1.25)]
    )


def _check_tree_not_star(u, t, budget=None):
    _require_kernel(u, "tree_not_star")
    _require(is_tree(t), "tree_not_star", "graph must be a tree")
    _require(not is_star(t), "tree_not_star", "tree must not be a star")
    val = hom_density(t, u, budget=budget)
    p3 = _p3(u, budget)
    c4 = _c4(u, budget)
    return _instance(
        "tree_not_star", {"u": u, "t": t}, [("tree", abs(val), p3 * c4**0.25)]
    )


def _check_one_leaf(u, g, budget=None):
    _require_kernel(u, "one_leaf")
    _require(bipartition(g) is not None, "one_leaf", "graph must be bipartite")
    _require(girth(g) >= 4, "one_leaf", "girth must be at least four")
    degs = g.degrees()
    _require(min(degs) >= 1, "one_leaf", "graph must have no isolated vertices")
    _require(
        sum(1 for d in degs if d == 1) == 1,
        "one_leaf",
        "graph must have exactly one vertex of degree one",
    )
    val = hom_density(g, u, budget=budget)
    p3 = _p3(u, budget)
    c4 = _c4(u, budget)
    return _instance(
        "one_leaf",
        {"u": u, "g": g},
        [("one_leaf", abs(val), (c4 + p3) * c4**0.125 / 2.0)],
    )


def _check_entropy_kab(g, a, b, ell, budget=None):
    _require(isinstance(g, Graph), "entropy_kab", "host must be a finite graph")
    for name, val in (("a", a), ("b", b), ("ell", ell)):
        _require(val >= 2 and val % 2 == 0, "entropy_kab", f"{name} must be a positive even integer")
    pattern = pathed_bipartite(a, ell, b)
    rhs = hom_density_graph(pattern, g, budget=budget)
    p3 = hom_density_graph(path_graph(3), g, budget=budget)
    return _instance(
        "entropy_kab",
        {"g": g, "a": a, "b": b, "ell": ell},
        [("entropy", p3 ** ((a * b + ell) / 2.0), rhs)],
    )


def _check_kab_quant(w, a, b, ell, budget=None):
    from .cutnorm import cut_norm_exact

    _require(isinstance(w, StepGraphon), "kab_quant", "input must be a graphon")
    for name, val in (("a", a), ("b", b), ("ell", ell)):
        _require(val >= 2 and val % 2 == 0, "kab_quant", f"{name} must be a positive even integer")
    _require(4 * ell <= a * b, "kab_quant", "need ell <= a*b/4")
    p, u = deviation(w)
    eps = cut_norm_exact(u).value
    lhs = p ** (a * b + ell) * (1.0 + 1e-9 * eps**16) ** (a * b / 4.0 + ell / 4.0)
    rhs = hom_density(pathed_bipartite(a, ell, b), w, budget=budget)
    return _instance(
        "kab_quant", {"w": w, "a": a, "b": b, "ell": ell}, [("quantitative", lhs, rhs)]
    )


_CHECKS = {
    "jensen_rows": _check_jensen_rows,
    "kmn_c4": _check_kmn_c4,
    "cs_p3": _check_cs_p3,
    "star_bounds": _check_star_bounds,
    "gen_cs": _check_gen_cs,
    "even_cycle": _check_even_cycle,
    "long_path": _check_long_path,
    "girth4_bip": _check_girth4_bip,
    "tree_not_star": _check_tree_not_star,
    "one_leaf": _check_one_leaf,
    "entropy_kab": _check_entropy_kab,
    "kab_quant": _check_kab_quant,
}

LEMMA_IDS = tuple(sorted(_CHECKS))


def verify(lemma_id, **inputs) -> LemmaInstance:
    """Check one registered inequality on explicit inputs.

    Raises ValidationError when the instance violates the inequality's
    hypotheses; the message names the failed hypothesis.
    """
    if lemma_id not in _CHECKS:
        raise ValidationError(f"unknown lemma id {lemma_id!r}; known: {LEMMA_IDS}")
    return _CHECKS[lemma_id](**inputs)


# ----------------------------------------------------------------------
# Random instance generation


def random_step_graphon(rng, max_blocks=4, min_blocks=1):
    k = int(rng.integers(min_blocks, max_blocks + 1))
    mu = rng.dirichlet(np.ones(k))
    mu = np.clip(mu, 0.05 / k, None)
    mu /= mu.sum()
    vals = rng.uniform(0.0, 1.0, size=(k, k))
    vals = (vals + vals.T) / 2
    return StepGraphon(mu, vals)


def random_step_kernel(rng, max_blocks=4):
    _, u = deviation(random_step_graphon(rng, max_blocks, min_blocks=2))
    return u


def _random_graph(rng, n, p):
    edges = set()
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.add((u, v))
    return Graph(n, frozenset(edges))


def _random_bipartite_core(rng):
    """Bipartite graph with minimum degree two, not a cycle, not complete."""
    for _ in range(500):
        a = int(rng.integers(2, 5))
        b = int(rng.integers(2, 5))
        edges = {(i, a + j) for i in range(a) for j in range(b) if rng.random() < 0.7}
        g = Graph(a + b, frozenset(edges))
        if not g.edges or min(g.degrees()) < 2:
            continue
        if is_cycle_graph(g) or is_complete_bipartite(g):
            continue
        return g
    raise RuntimeError("failed to sample a bipartite core")


def _random_tree(rng, n):
    edges = {(int(rng.integers(0, i)), i) for i in range(1, n)}
    return Graph(n, frozenset(edges))


def _gen_inputs(lemma_id, rng):
    if lemma_id == "jensen_rows":
        m = int(rng.integers(2, 6))
        return {
            "w": random_step_graphon(rng),
            "m": m,
            "n": int(rng.integers(1, 4)),
            "mprime": int(rng.integers(1, m + 1)),
        }
    if lemma_id == "kmn_c4":
        return {
            "w": random_step_graphon(rng),
            "m": int(rng.integers(2, 5)),
            "n": int(rng.integers(2, 4)),
        }
    if lemma_id == "cs_p3":
        return {"u": random_step_kernel(rng)}
    if lemma_id == "star_bounds":
        return {"u": random_step_kernel(rng), "k": int(rng.integers(2, 6))}
    if lemma_id == "gen_cs":
        num_vars = int(rng.integers(2, 5))
        k = int(rng.integers(2, 4))
        mu = rng.dirichlet(np.ones(k))
        mu = np.clip(mu, 0.05 / k, None)
        mu /= mu.sum()
        slots = list(range(num_vars)) * 2
        rng.shuffle(slots)
        factors = []
        while slots:
            take = min(len(slots), int(rng.integers(1, 3)))
            vs = slots[:take]
            if len(set(vs)) != len(vs):
                vs = slots[:1]
            slots = slots[len(vs):]
            factors.append(
                (tuple(vs), rng.uniform(-1, 1, size=(k,) * len(vs)))
            )
        return {"factors": factors, "measures": mu, "num_vars": num_vars}
    if lemma_id == "even_cycle":
        return {"u": random_step_kernel(rng), "k": int(rng.integers(2, 5))}
    if lemma_id == "long_path":
        return {"u": random_step_kernel(rng), "k": int(rng.integers(1, 5))}
    if lemma_id == "girth4_bip":
        return {"u": random_step_kernel(rng), "g": _random_bipartite_core(rng)}
    if lemma_id == "tree_not_star":
        for _ in range(500):
            t = _random_tree(rng, int(rng.integers(4, 8)))
            if not is_star(t):
                return {"u": random_step_kernel(rng), "t": t}
        raise RuntimeError("failed to sample a non-star tree")
    if lemma_id == "one_leaf":
        core = _random_bipartite_core(rng)
        n = core.vertex_count
        anchor = int(rng.integers(0, n))
        g = Graph(n + 1, core.edges | {(anchor, n)})
        return {"u": random_step_kernel(rng), "g": g}
    if lemma_id == "entropy_kab":
        return {
            "g": _random_graph(rng, int(rng.integers(4, 9)), rng.uniform(0.3, 0.8)),
            "a": int(rng.choice([2, 4])),
            "b": int(rng.choice([2, 4])),
            "ell": int(rng.choice([2, 4])),
        }
    if lemma_id == "kab_quant":
        a, b = [(2, 4), (4, 2), (4, 4)][int(rng.integers(0, 3))]
        ell = int(rng.choice([2, 4])) if a * b >= 16 else 2
        return {"w": random_step_graphon(rng), "a": a, "b": b, "ell": ell}
    raise ValidationError(f"no generator for lemma id {lemma_id!r}")


@dataclass(frozen=True)
class SuiteSummary:
    lemma: str
    trials: int
    failures: int
    worst_margin: float
    seed: int
    margin_histogram: tuple

    def to_json(self):
        return {
            "lemma": self.lemma,
            "trials": self.trials,
            "failures": self.failures,
            "worst_margin": self.worst_margin,
            "seed": self.seed,
            "margin_histogram": list(self.margin_histogram),
        }


def _histogram(margins):
    """Decade counts of positive margins plus a bucket for non-positive."""
    buckets = [0] * 12
    for m in margins:
        if m <= 0:
            buckets[0] += 1
        else:
            decade = min(max(int(-math.log10(max(m, 1e-300))), 0), 10)
            buckets[decade + 1] += 1
    return tuple(buckets)


def random_suite(seed, trials, ids=None, budget=None):
    """Run seeded random instances of each lemma; deterministic in seed."""
    if trials < 1:
        raise ValidationError("trials must be at least one")
    ids = LEMMA_IDS if ids is None else tuple(ids)
    for lemma_id in ids:
        if lemma_id not in _CHECKS:
            raise ValidationError(f"unknown lemma id {lemma_id!r}")
    summaries = []
    for lemma_id in ids:
        rng = np.random.default_rng([seed, zlib.crc32(lemma_id.encode())])
        margins = []
        failures = 0
        for _ in range(trials):
            inputs = _gen_inputs(lemma_id, rng)
            if budget is not None:
                inputs = {**inputs, "budget": budget}
            inst = _CHECKS[lemma_id](**inputs)
            margins.append(inst.margin)
            if not inst.passed:
                failures += 1
        summaries.append(
            SuiteSummary(
                lemma=lemma_id,
                trials=trials,
                failures=failures,
                worst_margin=min(margins),
                seed=seed,
                margin_histogram=_histogram(margins),
            )
        )
    return summaries


# ----------------------------------------------------------------------
# The sparse-or-dense disjunction


@dataclass(frozen=True)
class OmegaAlphaConstants:
    delta: float
    table: tuple  # (r, omega_r, alpha_r), r = 1..r_max

    def omega(self, r):
        return self.table[r - 1][1]

    def alpha(self, r):
        return self.table[r - 1][2]


def omega_alpha(delta, r_max) -> OmegaAlphaConstants:
    """Density/independence constants by the recursion

        omega_1 = 1,  omega_r = (1 - delta) * delta^(r-1) * omega_{r-1}
        alpha_1 = 1,  alpha_r = delta * alpha_{r-1}

    The base alpha_1 may be any value in (0, 1]; 1 is used, so the
    constants are valid but not claimed optimal.
    """
    if not 0 < delta < 1:
        raise ValidationError("delta must lie in (0, 1)")
    if r_max < 1:
        raise ValidationError("r_max must be at least one")
    omega, alpha = 1.0, 1.0
    rows = [(1, omega, alpha)]
    for r in range(2, r_max + 1):
        omega = (1 - delta) * delta ** (r - 1) * omega
        alpha = delta * alpha
        rows.append((r, omega, alpha))
    return OmegaAlphaConstants(delta, tuple(rows))


@dataclass(frozen=True)
class OmegaAlphaReport:
    density_value: float
    omega_bound: float
    alpha_value: float
    alpha_bound: float
    density_disjunct: bool
    sparse_disjunct: bool
    holds: bool
    rechecked: bool
    resolution_used: int


def omega_alpha_check(w: StepGraphon, h: Graph, delta, resolution=16, budget=None):
    """Evaluate the disjunction: either h is dense in w, or w has a large
    almost-independent part.  The independence side is an inner
    approximation, so when both disjuncts fail the check reruns at four
    times the resolution before reporting."""
    if h.vertex_count < 1:
        raise ValidationError("pattern graph must have vertices")
    consts = omega_alpha(delta, h.vertex_count)
    omega_bound = consts.omega(h.vertex_count)
    alpha_bound = consts.alpha(h.vertex_count)
    t = hom_density(h, w, budget=budget)
    density_ok = t >= omega_bound - 1e-12
    alpha_val, _ = independence_ratio(w, delta, resolution)
    sparse_ok = alpha_val >= alpha_bound - 1e-12
    rechecked = False
    used = resolution
    if not density_ok and not sparse_ok:
        used = resolution * 4
        alpha_val, _ = independence_ratio(w, delta, used)
        sparse_ok = alpha_val >= alpha_bound - 1e-12
        rechecked = True
    return OmegaAlphaReport(
        density_value=t,
        omega_bound=omega_bound,
        alpha_value=alpha_val,
        alpha_bound=alpha_bound,
        density_disjunct=bool(density_ok),
        sparse_disjunct=bool(sparse_ok),
        holds=bool(density_ok or sparse_ok),
        rechecked=rechecked,
        resolution_used=used,
    )
