"""Witness constructions and the eight-way edge-subset classification.

The witness family starts from a base graph G: attach a 3-edge path and a
12-edge path to two distinct vertices, glue a four-cycle to the far end of
the 12-edge path, and root the whole thing at the far end of the 3-edge
path.  Gluing a further path (or a pathed complete bipartite graph) onto
the root produces the target graphs whose densities the rest of the
package studies.

For the chain variant (witness plus an appended path) every non-empty edge
subset falls into exactly one of eight structural groups, determined by
its core components: the components that contain at least one edge of the
witness itself (as opposed to appended-path edges).  The four-cycle tests
below always refer to the attached four-cycle, which keeps the eight cases
a partition even when G itself contains four-cycles.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError
from .graphs import Graph, RootedGraph, pathed_bipartite_rooted, rooted_sum, _normalize_edge


@dataclass(frozen=True)
class WitnessParts:
    """A built witness together with its edge provenance."""

    rooted: RootedGraph
    g_edges: frozenset
    path3_edges: frozenset
    path12_edges: frozenset
    c4_edges: frozenset
    attach_a: int
    attach_b: int


def build_witness_parts(g: Graph, attach_a=0, attach_b=1) -> WitnessParts:
    n = g.vertex_count
    if attach_a == attach_b:
        raise ValidationError("attachment vertices must differ")
    for v in (attach_a, attach_b):
        if not 0 <= v < n:
            raise ValidationError(f"attachment vertex {v} out of range")
    edges = set(g.edges)
    # 3-edge path: attach_a - n - n+1 - n+2, rooted at its far end
    path3 = {(attach_a, n), (n, n + 1), (n + 1, n + 2)}
    root = n + 2
    # 12-edge path: attach_b - n+3 - ... - n+14
    path12 = {(attach_b, n + 3)}
    for i in range(n + 3, n + 14):
        path12.add((i, i + 1))
    tail = n + 14
    c4 = {(tail, n + 15), (n + 15, n + 16), (n + 16, n + 17), (tail, n + 17)}
    for part in (path3, path12, c4):
        edges |= {_normalize_edge(e) for e in part}
    rooted = RootedGraph(Graph(n + 18, frozenset(edges)), (root,))
    norm = lambda part: frozenset(_normalize_edge(e) for e in part)
    return WitnessParts(rooted, g.edges, norm(path3), norm(path12), norm(c4),
                        attach_a, attach_b)


def build_witness(g: Graph, attach_a=0, attach_b=1) -> RootedGraph:
    """Attach a 3-edge path, a 12-edge path, and a hanging four-cycle to g.

    Adds 18 vertices and 19 edges; the root is the degree-one end of the
    3-edge path.  The attachment vertices default to the two lowest
    indices so the construction is reproducible.
    """
    return build_witness_parts(g, attach_a, attach_b).rooted


def validate_regime(regime, m, n, ell, h_edge_count):
    """Check the (m, n, ell) constraints for the named parameter regime.

    local      : m, n, ell even, m divisible by 5, ell >= n + h_edge_count
    nonlocal   : m, n even, 1 <= ell <= m*n/4
    multicolor : m, n even, m divisible by 5, ell == n + h_edge_count
    none       : construction only, no checks
    """
    if regime == "none":
        return
    if regime not in ("local", "nonlocal", "multicolor"):
        raise ValidationError(f"unknown regime {regime!r}")
    if m % 2 or n % 2:
        raise ValidationError(f"regime {regime}: m and n must be even (got m={m}, n={n})")
    if regime == "local":
        if ell % 2:
            raise ValidationError(f"regime local: ell must be even (got {ell})")
        if m % 5:
            raise ValidationError(f"regime local: m must be divisible by 5 (got {m})")
        if ell < n + h_edge_count:
            raise ValidationError(
                f"regime local: ell >= n + ||H|| required ({ell} < {n + h_edge_count})"
            )
    elif regime == "nonlocal":
        if ell < 1:
            raise ValidationError("regime nonlocal: ell must be positive")
        if 4 * ell > m * n:
            raise ValidationError(
                f"regime nonlocal: ell <= m*n/4 required ({ell} > {m * n / 4:g})"
            )
    else:
        if m % 5:
            raise ValidationError(f"regime multicolor: m must be divisible by 5 (got {m})")
        if ell != n + h_edge_count:
            raise ValidationError(
                f"regime multicolor: ell == n + ||H|| required ({ell} != {n + h_edge_count})"
            )


def build_target(h: RootedGraph, m, n, ell, regime="none") -> Graph:
    """Glue h (single root) onto a pathed complete bipartite graph.

    The result has ||h|| + m*n + ell edges and |h| + m + n + ell - 1
    vertices.  The regime tag validates the parameters first and names the
    violated constraint on failure.
    """
    if len(h.roots) != 1:
        raise ValidationError("target construction needs a single-rooted graph")
    if min(m, n) < 1 or ell < 0:
        raise ValidationError("m, n must be positive and ell non-negative")
    validate_regime(regime, m, n, ell, h.edge_count)
    return rooted_sum(h, pathed_bipartite_rooted(m, ell, n))


# ----------------------------------------------------------------------
# Witness chain and subset classification


@dataclass(frozen=True)
class WitnessChain:
    """A witness with an appended chain: the gluing of the witness root
    onto an ell-vertex path.  Chain vertices are v_0 (the root itself)
    through v_{ell-1}; the index-8 chain vertex exists only for ell >= 9,
    so the group that requires it is unreachable below that."""

    graph: Graph
    hstar_edges: frozenset
    chain_edges: frozenset
    chain_vertices: tuple
    g_edges: frozenset
    c4_edges: frozenset
    ell: int

    @property
    def v8(self):
        return self.chain_vertices[8] if self.ell >= 9 else None


def build_witness_chain(g: Graph, ell, attach_a=0, attach_b=1) -> WitnessChain:
    if ell < 2:
        raise ValidationError("chain needs at least two vertices")
    parts = build_witness_parts(g, attach_a, attach_b)
    hstar = parts.rooted
    base = hstar.vertex_count
    root = hstar.roots[0]
    chain_vertices = [root] + list(range(base, base + ell - 1))
    chain_edges = set()
    for a, b in zip(chain_vertices, chain_vertices[1:]):
        chain_edges.add(_normalize_edge((a, b)))
    graph = Graph(base + ell - 1, hstar.graph.edges | chain_edges)
    return WitnessChain(
        graph=graph,
        hstar_edges=hstar.graph.edges,
        chain_edges=frozenset(chain_edges),
        chain_vertices=tuple(chain_vertices),
        g_edges=parts.g_edges,
        c4_edges=parts.c4_edges,
        ell=ell,
    )


def edge_components(edges):
    """Connected components of an edge set, as frozensets of edges."""
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        parent.setdefault(u, u)
        parent.setdefault(v, v)
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    groups = {}
    for e in edges:
        groups.setdefault(find(e[0]), set()).add(e)
    return [frozenset(g) for g in groups.values()]


def _has_cycle(edges):
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        parent.setdefault(u, u)
        parent.setdefault(v, v)
        ru, rv = find(u), find(v)
        if ru == rv:
            return True
        parent[ru] = rv
    return False


def _vertices(edges):
    return {v for e in edges for v in e}


def _component_is_star(edges):
    if _has_cycle(edges):
        return False
    deg = {}
    for u, v in edges:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    return sum(1 for d in deg.values() if d >= 2) <= 1


def _core_components(chain, f):
    return [c for c in edge_components(f) if c & chain.hstar_edges]


def _normalize_subset(chain, f):
    fset = frozenset(_normalize_edge(e) for e in f)
    if not fset:
        raise ValidationError("edge subset must be non-empty")
    if not fset <= chain.graph.edges:
        raise ValidationError("subset contains non-edges of the chain graph")
    return fset


def classify_subset(chain: WitnessChain, f) -> str:
    """Assign a non-empty edge subset to its unique structural group.

    a: no core component
    b: the single core component is the attached four-cycle
    c: the single core component is a star
    d: a core component contains the index-8 chain vertex
    e: (not d) and a core component contains a cycle of the base graph
    f: (not d, e) the attached four-cycle is present, its core component
       is strictly larger than the four-cycle
    g: (not d, e, f) some acyclic core component is not a star
    h: (not d..g) all core components are stars or the four-cycle, and
       there are at least two of them
    """
    fset = _normalize_subset(chain, f)
    cores = _core_components(chain, fset)
    if not cores:
        return "a"
    v8 = chain.v8
    if v8 is not None and any(v8 in _vertices(c) for c in cores):
        return "d"
    if any(_has_cycle(c & chain.g_edges) for c in cores):
        return "e"
    if chain.c4_edges <= fset:
        holder = next(c for c in cores if chain.c4_edges <= c)
        if holder != chain.c4_edges:
            return "f"
    if any(c != chain.c4_edges and not _component_is_star(c) for c in cores):
        return "g"
    if len(cores) >= 2:
        return "h"
    return "b" if cores[0] == chain.c4_edges else "c"


def group_predicates(chain: WitnessChain, f):
    """The eight defining predicates, evaluated independently.

    Exactly one must hold for every non-empty subset; the partition tests
    check this against ``classify_subset``.
    """
    fset = _normalize_subset(chain, f)
    cores = _core_components(chain, fset)
    v8 = chain.v8
    has_v8 = v8 is not None and any(v8 in _vertices(c) for c in cores)
    has_g_cycle = any(_has_cycle(c & chain.g_edges) for c in cores)
    c4 = chain.c4_edges
    c4_present = c4 <= fset
    only_cycle_is_c4 = c4_present and not has_g_cycle
    c4_holder = next((c for c in cores if c4 <= c), None)
    acyclic_or_c4 = all(c == c4 or not _has_cycle(c) for c in cores)
    star_or_c4 = all(c == c4 or _component_is_star(c) for c in cores)
    return {
        "a": not cores,
        "b": len(cores) == 1 and cores[0] == c4,
        "c": len(cores) == 1 and _component_is_star(cores[0]),
        "d": has_v8,
        "e": not has_v8 and has_g_cycle,
        "f": not has_v8
        and only_cycle_is_c4
        and c4_holder is not None
        and c4_holder != c4,
        "g": bool(cores)
        and not has_v8
        and acyclic_or_c4
        and any(not _has_cycle(c) and not _component_is_star(c) for c in cores),
        "h": not has_v8 and star_or_c4 and len(cores) >= 2,
    }
