"""Shared tensor-contraction engine for homomorphism densities.

A homomorphism density of a pattern graph in a step function is a sum over
block assignments of products of edge values and vertex weights.  Two
evaluation routes are provided:

* ``contract`` performs variable elimination along a greedy minimum-fill
  order, contracting one vertex at a time with numpy.  Cost is governed by
  the elimination width rather than the vertex count.
* ``enumerate_sum`` walks every assignment in interpreted code and
  accumulates with ``math.fsum`` (exact compensated summation).  It is the
  independent oracle and the preferred route for small instances.

Root vertices are left free and unweighted; the result then carries one
axis per root, indexed in root order.
"""

import functools
import itertools
import math

import numpy as np

from .budget import ENUM_CROSSOVER, resolve_budget
from .errors import BudgetError


@functools.lru_cache(maxsize=4096)
def _elimination_order_cached(n, edges, keep):
    return _elimination_order(n, edges, keep)


def elimination_order(n, edges, keep=()):
    return _elimination_order_cached(n, tuple(sorted(edges)), tuple(keep))


def _elimination_order(n, edges, keep=()):
    """Greedy minimum-fill elimination order over vertices not in ``keep``.

    Ties break toward the smaller vertex index, so the order is
    deterministic.  Returns (order, widths) where widths[i] is the scope
    size (eliminated vertex plus live neighbors) of step i.
    """
    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    alive = set(range(n))
    candidates = set(range(n)) - set(keep)
    order = []
    widths = []
    while candidates:
        best_v, best_fill = None, None
        for v in sorted(candidates):
            nbrs = adj[v]
            fill = 0
            for x in nbrs:
                for y in nbrs:
                    if x < y and y not in adj[x]:
                        fill += 1
            if best_fill is None or fill < best_fill:
                best_v, best_fill = v, fill
        nbrs = sorted(adj[best_v])
        for x in nbrs:
            for y in nbrs:
                if x < y:
                    adj[x].add(y)
                    adj[y].add(x)
        for x in nbrs:
            adj[x].discard(best_v)
        alive.discard(best_v)
        candidates.discard(best_v)
        order.append(best_v)
        widths.append(1 + len(nbrs))
    return order, widths


def contraction_cost(n, edges, k, keep=()):
    """Estimated elementary operations of ``contract`` on this network."""
    _, widths = elimination_order(n, edges, keep)
    cost = sum(k**w for w in widths)
    cost += k ** len(keep)
    return cost


def enumeration_cost(n, edges, k):
    return (k**n) * (len(edges) + n + 1)


_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _einsum(factors, out_vars):
    """Contract a list of (vars, array) factors down to ``out_vars``."""
    var_ids = sorted({v for vs, _ in factors for v in vs} | set(out_vars))
    if len(var_ids) > len(_LETTERS):
        raise BudgetError(f"contraction scope too wide: {len(var_ids)} variables")
    letter = {v: _LETTERS[i] for i, v in enumerate(var_ids)}
    lhs = ",".join("".join(letter[v] for v in vs) for vs, _ in factors)
    rhs = "".join(letter[v] for v in out_vars)
    return np.einsum(lhs + "->" + rhs, *[arr for _, arr in factors])


def contract(n, edges, matrix, weights, roots=(), budget=None):
    """Sum over block assignments phi of

        prod_{v not a root} weights[phi(v)] * prod_{uv in edges} matrix[phi(u), phi(v)]

    with root assignments left free.  Returns a float when ``roots`` is
    empty, else an ndarray with one length-k axis per root (in root order).
    """
    matrix = np.asarray(matrix, dtype=float)
    weights = np.asarray(weights, dtype=float)
    k = len(weights)
    cost = contraction_cost(n, edges, k, roots)
    limit = resolve_budget(budget)
    if cost > limit:
        raise BudgetError(
            f"contraction needs ~{cost:.3g} operations, budget is {limit:.3g}"
        )
    order, _ = elimination_order(n, edges, roots)
    factors = [((u, v), matrix) for u, v in edges]
    scalar = 1.0
    for v in order:
        involved = [f for f in factors if v in f[0]]
        if not involved:
            scalar *= float(weights.sum())
            continue
        factors = [f for f in factors if v not in f[0]]
        involved.append(((v,), weights))
        scope = sorted({x for vs, _ in involved for x in vs} - {v})
        result = _einsum(involved, tuple(scope))
        if scope:
            factors.append((tuple(scope), result))
        else:
            scalar *= float(result)
    if not roots:
        return scalar
    covered = {v for vs, _ in factors for v in vs}
    for r in roots:
        if r not in covered:
            factors.append(((r,), np.ones(k)))
    if factors:
        out = _einsum(factors, tuple(roots))
    else:
        out = np.ones((k,) * len(roots))
    return scalar * out


def enumerate_sum(n, edges, matrix, weights, roots=(), budget=None):
    """Oracle evaluation by full enumeration with compensated summation."""
    k = len(weights)
    cost = enumeration_cost(n, edges, k)
    limit = resolve_budget(budget)
    if cost > limit:
        raise BudgetError(
            f"enumeration needs ~{cost:.3g} operations, budget is {limit:.3g}"
        )
    matrix = [[float(matrix[a][b]) for b in range(k)] for a in range(k)]
    weights = [float(w) for w in weights]
    root_set = set(roots)
    free = [v for v in range(n) if v not in root_set]
    if not roots:
        terms = []
        for phi in itertools.product(range(k), repeat=n):
            t = 1.0
            for v in free:
                t *= weights[phi[v]]
            for u, v in edges:
                t *= matrix[phi[u]][phi[v]]
            terms.append(t)
        return math.fsum(terms)
    cells = {idx: [] for idx in itertools.product(range(k), repeat=len(roots))}
    for phi in itertools.product(range(k), repeat=n):
        t = 1.0
        for v in free:
            t *= weights[phi[v]]
        for u, v in edges:
            t *= matrix[phi[u]][phi[v]]
        cells[tuple(phi[r] for r in roots)].append(t)
    out = np.empty((k,) * len(roots))
    for idx, terms in cells.items():
        out[idx] = math.fsum(terms)
    return out


def auto_method(n, edges, k, roots=()):
    """Pick "enumerate" when full enumeration is cheap, else "dp"."""
    if enumeration_cost(n, edges, k) <= ENUM_CROSSOVER:
        return "enumerate"
    return "dp"


def evaluate(n, edges, matrix, weights, roots=(), method="auto", budget=None):
    if method == "auto":
        method = auto_method(n, edges, len(weights), roots)
    if method == "dp":
        return contract(n, edges, matrix, weights, roots, budget)
    if method == "enumerate":
        return enumerate_sum(n, edges, matrix, weights, roots, budget)
    raise ValueError(f"unknown method {method!r}")
