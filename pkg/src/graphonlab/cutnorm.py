"""Exact cut norm of step kernels and the bounds built on it.

For a step kernel the cut-norm objective sum_{S x T} mu_a mu_b U[a,b] is
bilinear in the per-block fractional occupancies of S and T, so some
maximizer sits at a vertex of the box: S and T can be taken to be unions
of whole blocks.  The exact algorithm enumerates S over block subsets and
picks T greedily from row-sum signs.  Because the absolute value is not
greedy-safe directly, the enumeration runs twice, maximizing +sum and
-sum separately, and takes the larger.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, ValidationError
from .graphon import StepGraphon, density, deviation, hom_density, same_blocks

CUT_NORM_MAX_BLOCKS = 24


@dataclass(frozen=True)
class CutWitness:
    value: float
    s_blocks: tuple
    t_blocks: tuple

    def to_json(self):
        return {
            "value": self.value,
            "S": list(self.s_blocks),
            "T": list(self.t_blocks),
        }


def _weighted(u):
    mu = u.measures
    return mu[:, None] * u.values * mu[None, :]


def _indicator_matrix(k):
    masks = np.arange(1 << k)[:, None]
    return ((masks >> np.arange(k)[None, :]) & 1).astype(float)


def _mask_to_tuple(mask, k):
    return tuple(b for b in range(k) if mask >> b & 1)


def cut_norm_exact(u) -> CutWitness:
    """Exact cut norm with an attaining pair of block subsets.

    Ties in the greedy inner step include the block (row sum zero counts
    as both signs); ties across outer subsets resolve to the
    lexicographically smallest (S, T) pair.
    """
    k = u.block_count
    if k > CUT_NORM_MAX_BLOCKS:
        raise BudgetError(
            f"{k} blocks exceeds the exact cut-norm limit of {CUT_NORM_MAX_BLOCKS}; "
            "a greedy pass would only give a lower bound"
        )
    a = _weighted(u)
    ind = _indicator_matrix(k)
    rows = ind @ a  # row sums over S, one row per subset mask
    pos = np.clip(rows, 0.0, None).sum(axis=1)
    neg = np.clip(-rows, 0.0, None).sum(axis=1)
    value = float(max(pos.max(), neg.max(), 0.0))
    best = None
    for mask in range(1 << k):
        for sign, vals in ((1.0, pos), (-1.0, neg)):
            if vals[mask] >= value - 1e-15:
                s = _mask_to_tuple(mask, k)
                t = tuple(b for b in range(k) if sign * rows[mask, b] >= 0.0)
                if best is None or (s, t) < best:
                    best = (s, t)
    return CutWitness(value, best[0], best[1])


def cut_norm_bruteforce(u) -> CutWitness:
    """Independent oracle: full enumeration of both block subsets."""
    k = u.block_count
    if k > 20:
        raise BudgetError("brute-force cut norm is capped at 20 blocks")
    a = _weighted(u)
    ind = _indicator_matrix(k)
    table = np.abs(ind @ a @ ind.T)
    smask, tmask = np.unravel_index(int(np.argmax(table)), table.shape)
    return CutWitness(
        float(table[smask, tmask]),
        _mask_to_tuple(int(smask), k),
        _mask_to_tuple(int(tmask), k),
    )


def cut_norm_deviation(w: StepGraphon):
    """Cut norm of w minus its density."""
    _, u = deviation(w)
    return cut_norm_exact(u).value


@dataclass(frozen=True)
class BoundRecord:
    inequality: str
    lhs: float
    rhs: float
    margin: float
    passed: bool


def _bound(name, lhs, rhs, tol=1e-10):
    margin = rhs - lhs
    return BoundRecord(name, float(lhs), float(rhs), float(margin),
                       bool(margin >= -tol * max(1.0, abs(rhs))))


def sandwich_check(u, budget=None):
    """The cut-norm sandwich for kernels bounded by one:

        ||U||^4 <= t(C4, U) <= 4 ||U||   and   t(P2, U) <= 2 ||U||.
    """
    if np.abs(u.values).max() > 1.0 + 1e-12:
        raise ValidationError("sandwich bounds need a kernel bounded by one")
    from .graphs import cycle_graph

    norm = cut_norm_exact(u).value
    c4 = hom_density(cycle_graph(4), u, budget=budget)
    p2 = density(u)
    return [
        _bound("cut_norm_fourth_vs_c4", norm**4, c4),
        _bound("c4_vs_cut_norm", c4, 4 * norm),
        _bound("edge_vs_cut_norm", p2, 2 * norm),
    ]


def c4_deviation_bound(w: StepGraphon, budget=None):
    """Four-cycle density exceeds p^4 by at least cutnorm^4 / 8."""
    from .graphs import cycle_graph

    p, u = deviation(w)
    norm = cut_norm_exact(u).value
    c4 = hom_density(cycle_graph(4), w, budget=budget)
    return _bound("c4_deviation_lower", p**4 + norm**4 / 8.0, c4)


def counting_lemma_bound(h, w1: StepGraphon, w2: StepGraphon, budget=None):
    """Density difference of h is at most ||h|| times the cut distance.

    Graphons on different block structures are first moved to their common
    refinement (blocks read as consecutive intervals).
    """
    from .graphon import StepKernel, common_refinement

    if not same_blocks(w1, w2):
        w1, w2 = common_refinement(w1, w2)
    diff = StepKernel(w1.measures, w1.values - w2.values)
    norm = cut_norm_exact(diff).value
    lhs = abs(hom_density(h, w1, budget=budget) - hom_density(h, w2, budget=budget))
    return _bound("counting_lemma", lhs, h.edge_count * norm)


def bounds_to_json(records):
    if isinstance(records, BoundRecord):
        records = [records]
    return [
        {
            "inequality": r.inequality,
            "lhs": r.lhs,
            "rhs": r.rhs,
            "margin": r.margin,
            "pass": r.passed,
        }
        for r in records
    ]
