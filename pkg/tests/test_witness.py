"""Witness construction arithmetic and the eight-way subset classification."""

import itertools
import math

import numpy as np
import pytest

import graphonlab as gl
from graphonlab.errors import ValidationError
from graphonlab.witness import (
    build_witness_chain,
    build_witness_parts,
    classify_subset,
    group_predicates,
)

ALL_GROUPS = tuple("abcdefgh")


def test_build_witness_counts():
    for base in (gl.cycle_graph(5), gl.petersen_graph(), gl.path_graph(4)):
        h = gl.build_witness(base)
        assert h.vertex_count == base.vertex_count + 18
        assert h.edge_count == base.edge_count + 19
        assert h.graph.degrees()[h.roots[0]] == 1


def test_build_witness_girth():
    for base in (gl.cycle_graph(5), gl.petersen_graph()):
        h = gl.build_witness(base)
        assert gl.girth(h.graph) == min(gl.girth(base), 4)
    tree = gl.path_graph(6)
    assert gl.girth(gl.build_witness(tree).graph) == 4


def test_build_witness_contains_base_induced():
    base = gl.cycle_graph(5)
    h = gl.build_witness(base).graph
    inside = {
        (u, v) for u, v in h.edges
        if u < base.vertex_count and v < base.vertex_count
    }
    assert inside == base.edges


def test_build_witness_rejects_equal_attachments():
    with pytest.raises(ValidationError):
        gl.build_witness(gl.cycle_graph(5), 2, 2)


def test_build_target_counts():
    h = gl.build_witness(gl.cycle_graph(5))
    m, n = 10, 4
    ell = n + h.edge_count
    target = gl.build_target(h, m, n, ell, regime="local")
    assert target.edge_count == h.edge_count + m * n + ell
    assert target.vertex_count == h.vertex_count + m + n + ell - 1


def test_build_target_single_rooted_edge():
    k2 = gl.RootedGraph(gl.path_graph(2), (0,))
    target = gl.build_target(k2, 2, 2, 3)
    assert target.edge_count == 1 + 4 + 3


def test_regime_validators():
    h = gl.build_witness(gl.cycle_graph(5))
    e = h.edge_count
    gl.validate_regime("local", 10, 4, e + 4, e)
    with pytest.raises(ValidationError, match="divisible by 5"):
        gl.validate_regime("local", 4, 4, e + 4, e)
    with pytest.raises(ValidationError, match="even"):
        gl.validate_regime("local", 5, 4, e + 5, e)
    with pytest.raises(ValidationError, match="ell >= n"):
        gl.validate_regime("local", 10, 4, 4, e)
    gl.validate_regime("nonlocal", 4, 4, 4, e)
    with pytest.raises(ValidationError, match=r"m\*n/4"):
        gl.validate_regime("nonlocal", 4, 4, 5, e)
    gl.validate_regime("multicolor", 10, 4, e + 4, e)
    with pytest.raises(ValidationError, match="ell == n"):
        gl.validate_regime("multicolor", 10, 4, e + 5, e)
    with pytest.raises(ValidationError, match="unknown regime"):
        gl.validate_regime("fast", 2, 2, 2, e)


def test_chain_layout():
    chain = build_witness_chain(gl.cycle_graph(5), 10)
    assert chain.graph.edge_count == 5 + 19 + 9
    assert len(chain.chain_edges) == 9
    assert chain.v8 == chain.chain_vertices[8]
    assert len(chain.hstar_edges) == 24
    short = build_witness_chain(gl.cycle_graph(5), 6)
    assert short.v8 is None


def _chain_pools(chain):
    """Edge pools used by the truncated exhaustive classification."""
    parts = build_witness_parts(gl.cycle_graph(5))
    root = parts.rooted.roots[0]
    root_edge = next(e for e in parts.path3_edges if root in e)
    chain_prefix = [e for e in sorted(chain.chain_edges)][:8]
    tail_edge = sorted(parts.path12_edges)[-1]
    c4_tail = next(
        e for e in chain.c4_edges
        if any(v in e for v in _edge_vertices(parts.path12_edges))
    )
    pool_a = [root_edge] + chain_prefix + sorted(chain.c4_edges) + [tail_edge]
    pool_b = sorted(chain.g_edges) + [root_edge]
    return pool_a, pool_b


def _edge_vertices(edges):
    return {v for e in edges for v in e}


def test_classification_partition_truncated():
    """Every subset in a ~2^14 designed truncation gets exactly one label,
    and all eight labels appear."""
    chain = build_witness_chain(gl.cycle_graph(5), 10)
    pool_a, pool_b = _chain_pools(chain)
    assert len(pool_a) == 14
    seen = set()
    labels = set()
    count = 0
    for pool in (pool_a, pool_b):
        for mask in range(1, 1 << len(pool)):
            subset = frozenset(pool[i] for i in range(len(pool)) if mask >> i & 1)
            if subset in seen:
                continue
            seen.add(subset)
            count += 1
            preds = group_predicates(chain, subset)
            true_labels = [g for g in ALL_GROUPS if preds[g]]
            assert len(true_labels) == 1, (sorted(subset), true_labels)
            assert classify_subset(chain, subset) == true_labels[0]
            labels.add(true_labels[0])
    assert labels == set(ALL_GROUPS)
    assert count <= 2**14 + 2**6


def test_classification_partition_random_subsets():
    chain = build_witness_chain(gl.cycle_graph(5), 10)
    edges = sorted(chain.graph.edges)
    rng = np.random.default_rng(2)
    for _ in range(3000):
        size = int(rng.integers(1, len(edges) + 1))
        subset = frozenset(
            edges[i] for i in rng.choice(len(edges), size=size, replace=False)
        )
        preds = group_predicates(chain, subset)
        true_labels = [g for g in ALL_GROUPS if preds[g]]
        assert len(true_labels) == 1
        assert classify_subset(chain, subset) == true_labels[0]


def test_classification_short_chain_has_no_group_d():
    chain = build_witness_chain(gl.complete_graph(3), 6)
    edges = sorted(chain.graph.edges)
    rng = np.random.default_rng(4)
    labels = set()
    for _ in range(2000):
        size = int(rng.integers(1, len(edges) + 1))
        subset = frozenset(
            edges[i] for i in rng.choice(len(edges), size=size, replace=False)
        )
        preds = group_predicates(chain, subset)
        true_labels = [g for g in ALL_GROUPS if preds[g]]
        assert len(true_labels) == 1
        assert classify_subset(chain, subset) == true_labels[0]
        labels.add(true_labels[0])
    assert "d" not in labels


def test_classify_known_examples():
    chain = build_witness_chain(gl.cycle_graph(5), 10)
    parts = build_witness_parts(gl.cycle_graph(5))
    # chain-only edges: no core component
    some_chain_edges = sorted(chain.chain_edges)[2:5]
    assert classify_subset(chain, some_chain_edges) == "a"
    # exactly the attached four-cycle
    assert classify_subset(chain, chain.c4_edges) == "b"
    # two base edges at one vertex: a star
    g_edges = sorted(chain.g_edges)
    star = [e for e in g_edges if 0 in e]
    assert len(star) == 2
    assert classify_subset(chain, star) == "c"
    # connect the root into the chain up to the index-8 vertex
    root = parts.rooted.roots[0]
    root_edge = next(e for e in parts.path3_edges if root in e)
    chain_prefix = sorted(chain.chain_edges)[:8]
    assert classify_subset(chain, [root_edge] + chain_prefix) == "d"
    # the full base cycle
    assert classify_subset(chain, g_edges) == "e"
    # four-cycle plus the adjacent path edge
    tail_edge = sorted(parts.path12_edges)[-1]
    assert classify_subset(chain, list(chain.c4_edges) + [tail_edge]) == "f"
    # a three-edge path inside the base graph is a non-star tree
    path3 = [e for e in g_edges if set(e) <= {0, 1, 2, 3}]
    assert classify_subset(chain, path3) == "g"
    # two disjoint single base edges: two star components
    assert classify_subset(chain, [g_edges[0], (2, 3)]) == "h"


def test_classify_rejects_bad_input():
    chain = build_witness_chain(gl.cycle_graph(5), 10)
    with pytest.raises(ValidationError):
        classify_subset(chain, [])
    with pytest.raises(ValidationError):
        classify_subset(chain, [(0, 2)])
