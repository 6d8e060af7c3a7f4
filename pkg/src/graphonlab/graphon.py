"""Step graphons, step kernels, and exact density functionals.

A step function is a symmetric block matrix of values together with a
vector of block measures summing to one.  Graphons take values in [0, 1],
kernels in [-1, 1].  All densities are exact sums over block assignments,
evaluated either by full enumeration with compensated summation or by
variable-elimination DP; the two routes agree to double precision and are
cross-checked in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _contract
from .errors import BudgetError, ValidationError
from .graphs import Graph, RootedGraph

MIN_BLOCK_MEASURE = 1e-12


def _validate_blocks(measures, values, low, high, kind):
    mu = np.asarray(measures, dtype=float).copy()
    m = np.asarray(values, dtype=float).copy()
    if mu.ndim != 1 or mu.size < 1:
        raise ValidationError("measures must be a non-empty vector")
    k = mu.size
    if m.shape != (k, k):
        raise ValidationError(f"values must be {k}x{k} to match {k} block measures")
    if np.any(mu < MIN_BLOCK_MEASURE):
        raise ValidationError(
            f"degenerate block measure below {MIN_BLOCK_MEASURE:g}; drop the block instead"
        )
    total = mu.sum()
    if abs(total - 1.0) > 1e-12:
        raise ValidationError(f"block measures sum to {total!r}, expected 1")
    mu /= total
    asym = np.abs(m - m.T).max()
    if asym > 1e-12:
        raise ValidationError(f"values matrix is asymmetric by {asym:g}")
    m = (m + m.T) / 2.0
    overshoot = max(low - m.min(), m.max() - high, 0.0)
    if overshoot > 1e-9:
        raise ValidationError(
            f"{kind} values must lie in [{low}, {high}] (violated by {overshoot:g})"
        )
    np.clip(m, low, high, out=m)
    mu.setflags(write=False)
    m.setflags(write=False)
    return mu, m


@dataclass(frozen=True, eq=False)
class StepGraphon:
    """Symmetric step function [0,1]^2 -> [0,1] with block measures."""

    measures: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        mu, m = _validate_blocks(self.measures, self.values, 0.0, 1.0, "graphon")
        object.__setattr__(self, "measures", mu)
        object.__setattr__(self, "values", m)

    @property
    def block_count(self):
        return self.measures.size

    @classmethod
    def constant(cls, p):
        return cls(np.array([1.0]), np.array([[float(p)]]))

    @classmethod
    def from_graph(cls, g: Graph):
        """Adjacency step graphon: one block per vertex, uniform measures."""
        if g.vertex_count < 1:
            raise ValidationError("need at least one vertex")
        n = g.vertex_count
        return cls(np.full(n, 1.0 / n), g.adjacency_matrix())


@dataclass(frozen=True, eq=False)
class StepKernel:
    """Symmetric step function [0,1]^2 -> [-1,1] with block measures."""

    measures: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        mu, m = _validate_blocks(self.measures, self.values, -1.0, 1.0, "kernel")
        object.__setattr__(self, "measures", mu)
        object.__setattr__(self, "values", m)

    @property
    def block_count(self):
        return self.measures.size


@dataclass(frozen=True, eq=False)
class BlockFunction:
    """Piecewise-constant function [0,1] -> R over a graphon's blocks."""

    block_count: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).copy()
        if v.shape != (self.block_count,):
            raise ValidationError("block function length must match block count")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def ones(cls, k):
        return cls(k, np.ones(k))


def same_blocks(a, b, tol=1e-12):
    """True when two step objects share block count and measures."""
    return (
        a.block_count == b.block_count
        and np.abs(a.measures - b.measures).max() <= tol
    )


# ----------------------------------------------------------------------
# Basic functionals


def density(w):
    """Edge density: the two-variable integral of the step function."""
    mu = w.measures
    return float(mu @ w.values @ mu)


def hom_density(h: Graph, w, method="auto", budget=None):
    """Homomorphism density of h in a step graphon or kernel.

    Sum over block assignments of the product of block measures and edge
    values.  Isolated vertices of h integrate to one.
    """
    out = _contract.evaluate(
        h.vertex_count, sorted(h.edges), w.values, w.measures,
        method=method, budget=budget,
    )
    return float(out)


def rooted_density(h: RootedGraph, w, method="auto", budget=None):
    """Rooted homomorphism density tensor.

    One axis per root (in root order); entry [a, b, ...] conditions the
    roots on blocks a, b, ... and integrates the remaining vertices.
    Contracting every axis against the measures recovers the unrooted
    density.
    """
    out = _contract.evaluate(
        h.vertex_count, sorted(h.graph.edges), w.values, w.measures,
        roots=h.roots, method=method, budget=budget,
    )
    return np.asarray(out)


def rooted_profile(h: RootedGraph, w, method="auto", budget=None):
    """Single-root rooted density as a BlockFunction."""
    if len(h.roots) != 1:
        raise ValidationError("rooted profile needs exactly one root")
    return BlockFunction(w.block_count, rooted_density(h, w, method, budget))


def degree_function(w):
    """Per-block degree: row sums weighted by the measures."""
    return BlockFunction(w.block_count, np.asarray(w.values @ w.measures))


def complement(w: StepGraphon) -> StepGraphon:
    return StepGraphon(w.measures, 1.0 - w.values)


def deviation(w: StepGraphon):
    """Split w into its density p and the centered kernel w - p."""
    p = density(w)
    return p, StepKernel(w.measures, w.values - p)


def restrict(w: StepGraphon, h: BlockFunction) -> StepGraphon:
    """Restriction of w to the weight function h, rescaled to mass one.

    Block b keeps value rows/columns unchanged and gets measure
    mu_b h_b / ||h||_1; blocks with h_b = 0 are dropped.  For step
    graphons, restricting to a block-constant h loses no generality:
    the density of any restriction depends on h only through the per-block
    masses mu_b h_b.
    """
    hv = h.values
    if h.block_count != w.block_count:
        raise ValidationError("weight function must match the graphon's blocks")
    if np.any(hv < 0) or np.any(hv > 1):
        raise ValidationError("restriction weights must lie in [0, 1]")
    mass = float(w.measures @ hv)
    if mass <= 0:
        raise ValidationError("restriction weight has zero mass")
    keep = np.flatnonzero(hv > 0)
    mu = w.measures[keep] * hv[keep] / mass
    if np.any(mu < MIN_BLOCK_MEASURE):
        raise ValidationError(
            "restriction produces a block of measure below 1e-12; prune the weight first"
        )
    return StepGraphon(mu, w.values[np.ix_(keep, keep)])


def hom_density_weighted(h: Graph, w, weights, budget=None):
    """Weighted-integral density: every vertex carries measure mu*weights.

    This is the unnormalized integral behind restriction identities; with
    weights == 1 it reduces to hom_density.
    """
    wv = np.asarray(weights, dtype=float)
    if wv.shape != (w.block_count,):
        raise ValidationError("weights must have one entry per block")
    return float(
        _contract.evaluate(
            h.vertex_count, sorted(h.edges), w.values, w.measures * wv,
            method="dp", budget=budget,
        )
    )


def validate_coloring(ws):
    """True when the step graphons share blocks and their values sum to 1."""
    if not ws:
        raise ValidationError("need at least one graphon")
    first = ws[0]
    for w in ws[1:]:
        if not same_blocks(first, w):
            raise ValidationError("coloring graphons must share block structure")
    total = sum(w.values for w in ws)
    return bool(np.abs(total - 1.0).max() <= 1e-10)


# ----------------------------------------------------------------------
# Refinement


def refine(w, r):
    """Split every block into r equal sub-blocks (values repeated).

    Step functions are exact under refinement, so every density functional
    is unchanged; used as an independent discretization oracle in tests.
    """
    if r < 1:
        raise ValidationError("refinement factor must be positive")
    k = w.block_count
    mu = np.repeat(w.measures / r, r)
    vals = np.repeat(np.repeat(w.values, r, axis=0), r, axis=1)
    cls = type(w)
    return cls(mu, vals)


def common_refinement(w1, w2):
    """Re-express two step functions over shared blocks.

    Blocks are read as consecutive intervals of [0, 1] in index order; the
    merged breakpoint set defines the refinement.
    """
    cuts = {0.0, 1.0}
    for w in (w1, w2):
        acc = 0.0
        for m in w.measures[:-1]:
            acc += float(m)
            cuts.add(round(acc, 15))
    points = sorted(cuts)
    merged = []
    for a, b in zip(points, points[1:]):
        if b - a > MIN_BLOCK_MEASURE:
            merged.append((a, b))
    mu = np.array([b - a for a, b in merged])
    mu /= mu.sum()

    def expand(w):
        bounds = np.concatenate([[0.0], np.cumsum(w.measures)])
        bounds[-1] = 1.0
        idx = []
        for a, b in merged:
            mid = (a + b) / 2
            idx.append(min(int(np.searchsorted(bounds, mid) - 1), w.block_count - 1))
        idx = np.asarray(idx)
        return type(w)(mu, w.values[np.ix_(idx, idx)])

    return expand(w1), expand(w2)


# ----------------------------------------------------------------------
# Deviation-kernel subset expansion


@dataclass(frozen=True)
class ExpansionTerm:
    edges: tuple
    coefficient: float
    term_density: float
    value: float
    group: str | None = None


@dataclass(frozen=True, eq=False)
class ExpansionReport:
    base: float
    base_term: float
    terms: tuple
    total: float
    graph: Graph = field(repr=False)

    def nonzero_terms(self, tol=0.0):
        return [t for t in self.terms if abs(t.value) > tol]


def subset_expansion(h: Graph, w: StepGraphon, budget=None, classifier=None):
    """Expand t(h, p + U) over edge subsets of h, with U = w - p.

    Each non-empty subset F contributes p^(||h|| - |F|) t(h<F>, U); adding
    the base term p^||h|| recovers the plain density exactly.  Subset terms
    factor over the connected components of F, which are memoized, so the
    2^||h|| walk stays fast.  ``classifier`` optionally labels each subset.
    """
    m = h.edge_count
    if m > 20:
        raise BudgetError(f"subset expansion over {m} edges exceeds the 2^20 cap")
    p, u = deviation(w)
    edges = sorted(h.edges)
    comp_cache = {}

    def component_value(comp_edges):
        key = comp_edges
        val = comp_cache.get(key)
        if val is None:
            verts = sorted({v for e in comp_edges for v in e})
            relabel = {v: i for i, v in enumerate(verts)}
            sub = [(relabel[a], relabel[b]) for a, b in comp_edges]
            val = float(
                _contract.evaluate(len(verts), sub, u.values, u.measures, budget=budget)
            )
            comp_cache[key] = val
        return val

    terms = []
    powers = [p**j for j in range(m + 1)]
    for mask in range(1, 1 << m):
        subset = tuple(edges[i] for i in range(m) if mask >> i & 1)
        comps = _edge_components(subset)
        val = 1.0
        for comp in comps:
            val *= component_value(comp)
            if val == 0.0:
                break
        coeff = powers[m - len(subset)]
        group = classifier(subset) if classifier is not None else None
        terms.append(ExpansionTerm(subset, coeff, val, coeff * val, group))
    total = math.fsum([powers[m]] + [t.value for t in terms])
    return ExpansionReport(p, powers[m], tuple(terms), total, h)


def _edge_components(subset):
    """Connected components of an edge set, as sorted edge tuples."""
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in subset:
        parent.setdefault(u, u)
        parent.setdefault(v, v)
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    groups = {}
    for e in subset:
        groups.setdefault(find(e[0]), []).append(e)
    return [tuple(sorted(g)) for g in groups.values()]


# ----------------------------------------------------------------------
# Independence ratio


def independence_ratio(w: StepGraphon, delta, resolution=16, refine_passes=3):
    """Largest mass of a block-constant weight h with density(w[h]) <= delta.

    Grid search over [0,1]^k at the given per-coordinate resolution, then
    coordinate-wise sweeps at a finer scale.  The result is an inner
    approximation (a feasible witness is returned with it); block-constant
    weights are fully general for step graphons, but the continuous
    optimization is solved only to grid accuracy.  Returns (0, zero
    function) when no feasible weight is found.
    """
    if not 0 < delta < 1:
        raise ValidationError("delta must lie in (0, 1)")
    if resolution < 1:
        raise ValidationError("resolution must be positive")
    k = w.block_count
    points = (resolution + 1) ** k
    if points > 5_000_000:
        raise BudgetError(
            f"grid of {points:.3g} points is too large; lower the resolution"
        )
    mu, m = w.measures, w.values
    levels = np.linspace(0.0, 1.0, resolution + 1)
    grids = np.meshgrid(*([levels] * k), indexing="ij")
    hs = np.stack([g.ravel() for g in grids], axis=1)
    q = hs * mu
    mass = q.sum(axis=1)
    num = np.einsum("ia,ab,ib->i", q, m, q)
    with np.errstate(divide="ignore", invalid="ignore"):
        feasible = (num <= delta * mass**2 + 1e-12) & (mass > 0)
    if not feasible.any():
        return 0.0, BlockFunction(k, np.zeros(k))
    idx = int(np.argmax(np.where(feasible, mass, -1.0)))
    h = hs[idx].copy()

    fine = np.linspace(0.0, 1.0, 64 * resolution + 1)
    for _ in range(refine_passes):
        for b in range(k):
            cand = np.tile(h, (fine.size, 1))
            cand[:, b] = fine
            qc = cand * mu
            mc = qc.sum(axis=1)
            nc = np.einsum("ia,ab,ib->i", qc, m, qc)
            ok = (nc <= delta * mc**2 + 1e-12) & (mc > 0)
            if ok.any():
                j = int(np.argmax(np.where(ok, mc, -1.0)))
                if mc[j] > float((h * mu).sum()):
                    h = cand[j]
    alpha = float((h * mu).sum())
    return alpha, BlockFunction(k, h)


# ----------------------------------------------------------------------
# JSON


def graphon_to_json(w):
    d = {
        "measures": [float(x) for x in w.measures],
        "values": [[float(x) for x in row] for row in w.values],
    }
    if isinstance(w, StepKernel):
        d["kind"] = "kernel"
    return d


def graphon_from_json(data):
    if not isinstance(data, dict) or "measures" not in data or "values" not in data:
        raise ValidationError("step-function JSON needs 'measures' and 'values'")
    kind = data.get("kind", "graphon")
    try:
        mu = np.asarray(data["measures"], dtype=float)
        vals = np.asarray(data["values"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad step-function JSON: {exc}") from exc
    if kind == "kernel":
        return StepKernel(mu, vals)
    if kind == "graphon":
        return StepGraphon(mu, vals)
    raise ValidationError(f"unknown step-function kind {kind!r}")
