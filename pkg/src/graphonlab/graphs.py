"""Finite simple graphs, rooted graphs, and the named families.

Vertices are the integers 0..n-1.  Edges are unordered pairs of distinct
vertices; loops and multi-edges are rejected.  Rooted graphs carry an
ordered list of roots which must form an independent set, so that gluing
two rooted graphs along their roots never merges edges.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _contract
from .errors import BudgetError, ValidationError


def _normalize_edge(e):
    u, v = int(e[0]), int(e[1])
    if u == v:
        raise ValidationError(f"loop at vertex {u} is not allowed")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Finite simple graph on vertices 0..vertex_count-1."""

    vertex_count: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        n = self.vertex_count
        if n < 0:
            raise ValidationError("vertex_count must be non-negative")
        norm = frozenset(_normalize_edge(e) for e in self.edges)
        for u, v in norm:
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError(f"edge ({u},{v}) out of range for {n} vertices")
        object.__setattr__(self, "edges", norm)

    @property
    def edge_count(self):
        return len(self.edges)

    def sorted_edges(self):
        return sorted(self.edges)

    def adjacency(self):
        adj = [set() for _ in range(self.vertex_count)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def degrees(self):
        deg = [0] * self.vertex_count
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def has_edge(self, u, v):
        return _normalize_edge((u, v)) in self.edges

    def adjacency_matrix(self):
        a = np.zeros((self.vertex_count, self.vertex_count))
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1.0
        return a


@dataclass(frozen=True)
class RootedGraph:
    """Graph with an ordered list of distinct roots forming an independent set."""

    graph: Graph
    roots: tuple

    def __post_init__(self):
        roots = tuple(int(r) for r in self.roots)
        if not roots:
            raise ValidationError("root list must be non-empty")
        if len(set(roots)) != len(roots):
            raise ValidationError("roots must be distinct")
        n = self.graph.vertex_count
        for r in roots:
            if not 0 <= r < n:
                raise ValidationError(f"root {r} out of range")
        for a, b in itertools.combinations(roots, 2):
            if self.graph.has_edge(a, b):
                raise ValidationError(f"roots {a},{b} are adjacent; root sets must be independent")
        object.__setattr__(self, "roots", roots)

    @property
    def vertex_count(self):
        return self.graph.vertex_count

    @property
    def edge_count(self):
        return self.graph.edge_count


# ----------------------------------------------------------------------
# Named families


def path_graph(n):
    """Path on n vertices (n-1 edges)."""
    if n < 1:
        raise ValidationError("path needs at least one vertex")
    return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))


def cycle_graph(n):
    if n < 3:
        raise ValidationError("cycle needs at least three vertices")
    return Graph(n, frozenset((i, (i + 1) % n) for i in range(n)))


def complete_graph(n):
    if n < 1:
        raise ValidationError("complete graph needs at least one vertex")
    return Graph(n, frozenset(itertools.combinations(range(n), 2)))


def complete_bipartite(a, b):
    """K_{a,b} with the a-side on vertices 0..a-1."""
    if a < 1 or b < 1:
        raise ValidationError("both sides of a complete bipartite graph must be non-empty")
    return Graph(a + b, frozenset((i, a + j) for i in range(a) for j in range(b)))


def pathed_bipartite(a, ell, b):
    """K_{a,b} with an ell-edge path appended to vertex 0 of the a-side.

    The zero-length case is plain K_{a,b}.  Path vertices are a+b, ...,
    a+b+ell-1, ordered outward from the attachment vertex.
    """
    if a < 1 or b < 1:
        raise ValidationError("both sides of a complete bipartite graph must be non-empty")
    if ell < 0:
        raise ValidationError("path length must be non-negative")
    g = complete_bipartite(a, b)
    edges = set(g.edges)
    prev = 0
    for i in range(ell):
        nxt = a + b + i
        edges.add(_normalize_edge((prev, nxt)))
        prev = nxt
    return Graph(a + b + ell, frozenset(edges))


def path_rooted(n):
    """Path on n vertices rooted at an end vertex."""
    return RootedGraph(path_graph(n), (0,))


def complete_bipartite_rooted(a, b):
    """K_{a,b} rooted at a vertex of the a-side."""
    return RootedGraph(complete_bipartite(a, b), (0,))


def pathed_bipartite_rooted(a, ell, b):
    """K_{a|ell,b} rooted at the free end of the appended path."""
    g = pathed_bipartite(a, ell, b)
    root = a + b + ell - 1 if ell > 0 else 0
    return RootedGraph(g, (root,))


_FAMILIES = ("path", "cycle", "complete", "complete_bipartite", "pathed_bipartite")


@dataclass(frozen=True)
class FamilySpec:
    """Parameters for one of the named graph families."""

    family: str
    a: int
    b: int = 0
    ell: int = 0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValidationError(f"unknown family {self.family!r}; expected one of {_FAMILIES}")
        if self.a < 1:
            raise ValidationError("family parameter must be positive")
        if self.family in ("complete_bipartite", "pathed_bipartite") and self.b < 1:
            raise ValidationError("family parameter must be positive")
        if self.ell < 0:
            raise ValidationError("path length must be non-negative")

    @classmethod
    def parse(cls, text):
        """Parse compact names: P5, C4, K3, K2,3 and K2|3,4 (a|ell,b)."""
        s = text.strip()
        try:
            if s[0] in "Pp":
                return cls("path", int(s[1:]))
            if s[0] in "Cc":
                return cls("cycle", int(s[1:]))
            if s[0] in "Kk":
                body = s[1:]
                if "|" in body:
                    a, rest = body.split("|")
                    ell, b = rest.split(",")
                    return cls("pathed_bipartite", int(a), int(b), int(ell))
                if "," in body:
                    a, b = body.split(",")
                    return cls("complete_bipartite", int(a), int(b))
                return cls("complete", int(body))
        except (ValueError, IndexError):
            pass
        raise ValidationError(f"cannot parse family name {text!r}")


def construct_family(spec: FamilySpec) -> RootedGraph:
    """Build the named graph with its conventional rooting.

    Paths are rooted at an end vertex, K_{a,b} at an a-side vertex,
    K_{a|ell,b} at the free end of the appended path.  Cycles and complete
    graphs have no conventional root; vertex 0 is used.
    """
    if spec.family == "path":
        return path_rooted(spec.a)
    if spec.family == "cycle":
        return RootedGraph(cycle_graph(spec.a), (0,))
    if spec.family == "complete":
        return RootedGraph(complete_graph(spec.a), (0,))
    if spec.family == "complete_bipartite":
        return complete_bipartite_rooted(spec.a, spec.b)
    return pathed_bipartite_rooted(spec.a, spec.ell, spec.b)


# ----------------------------------------------------------------------
# Operations


def rooted_sum(g: RootedGraph, h: RootedGraph) -> Graph:
    """Glue two rooted graphs by identifying corresponding roots.

    The result keeps g's vertex labels; non-root vertices of h are appended
    in increasing label order.  Because both root sets are independent the
    two edge sets stay disjoint.
    """
    if len(g.roots) != len(h.roots):
        raise ValidationError(
            f"root count mismatch: {len(g.roots)} vs {len(h.roots)}"
        )
    mapping = {}
    for hr, gr in zip(h.roots, g.roots):
        mapping[hr] = gr
    nxt = g.vertex_count
    for v in range(h.vertex_count):
        if v not in mapping:
            mapping[v] = nxt
            nxt += 1
    edges = set(g.graph.edges)
    for u, v in h.graph.edges:
        e = _normalize_edge((mapping[u], mapping[v]))
        if e in edges:
            raise ValidationError("gluing would merge edges; roots are not independent")
        edges.add(e)
    return Graph(nxt, frozenset(edges))


def edge_subgraph(g: Graph, f) -> Graph:
    """Spanning subgraph with edge set f (isolated vertices retained)."""
    fset = frozenset(_normalize_edge(e) for e in f)
    if not fset <= g.edges:
        bad = sorted(fset - g.edges)[0]
        raise ValidationError(f"{bad} is not an edge of the graph")
    return Graph(g.vertex_count, fset)


def girth(g: Graph):
    """Length of the shortest cycle; math.inf for forests.

    BFS from every vertex; a non-tree edge seen at depths d(x), d(y) closes
    a walk of length d(x)+d(y)+1 through the BFS root, which is a cycle
    length upper bound, and the minimum over all roots is exact.
    """
    adj = g.adjacency()
    best = math.inf
    for s in range(g.vertex_count):
        dist = {s: 0}
        parent = {s: -1}
        queue = [s]
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            if dist[v] * 2 >= best:
                break
            for w in sorted(adj[v]):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    parent[w] = v
                    queue.append(w)
                elif parent[v] != w and parent[w] != v:
                    best = min(best, dist[v] + dist[w] + 1)
    return best


def _find_short_cycle(adj, alive, bound):
    """Return vertices of some closed walk shorter than bound, or None."""
    for s in sorted(alive):
        dist = {s: 0}
        parent = {s: -1}
        queue = [s]
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            if dist[v] * 2 >= bound:
                break
            for w in sorted(adj[v]):
                if w not in alive:
                    continue
                if w not in dist:
                    dist[w] = dist[v] + 1
                    parent[w] = v
                    queue.append(w)
                elif parent[v] != w and parent[w] != v:
                    if dist[v] + dist[w] + 1 < bound:
                        walk = set()
                        for x in (v, w):
                            while x != -1:
                                walk.add(x)
                                x = parent[x]
                        return walk
    return None


def connected_components(g: Graph):
    """Vertex sets of the connected components (singletons included)."""
    adj = g.adjacency()
    seen = [False] * g.vertex_count
    comps = []
    for s in range(g.vertex_count):
        if seen[s]:
            continue
        stack = [s]
        seen[s] = True
        comp = []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def is_connected(g: Graph):
    return len(connected_components(g)) <= 1


def is_bipartite(g: Graph):
    side = bipartition(g)
    return side is not None


def bipartition(g: Graph):
    """Return a 0/1 side list if g is bipartite, else None."""
    adj = g.adjacency()
    side = [None] * g.vertex_count
    for s in range(g.vertex_count):
        if side[s] is not None:
            continue
        side[s] = 0
        queue = [s]
        while queue:
            v = queue.pop()
            for w in adj[v]:
                if side[w] is None:
                    side[w] = 1 - side[v]
                    queue.append(w)
                elif side[w] == side[v]:
                    return None
    return side


def is_tree(g: Graph):
    return is_connected(g) and g.edge_count == g.vertex_count - 1


def is_star(g: Graph):
    """K_{1,d} for some d >= 1 (a single edge counts)."""
    if not is_tree(g) or g.vertex_count < 2:
        return False
    return sum(1 for d in g.degrees() if d >= 2) <= 1


def is_cycle_graph(g: Graph):
    return (
        g.vertex_count >= 3
        and is_connected(g)
        and all(d == 2 for d in g.degrees())
    )


def is_complete_bipartite(g: Graph):
    if not is_connected(g):
        return False
    side = bipartition(g)
    if side is None:
        return False
    a = sum(1 for s in side if s == 0)
    b = g.vertex_count - a
    return g.edge_count == a * b


# ----------------------------------------------------------------------
# Chromatic number (exact, DSATUR branch and bound)


def _greedy_clique(adj, n):
    order = sorted(range(n), key=lambda v: (-len(adj[v]), v))
    clique = []
    for v in order:
        if all(v in adj[u] for u in clique):
            clique.append(v)
    return clique


def _dsatur_greedy(adj, n):
    colors = [-1] * n
    saturation = [set() for _ in range(n)]
    for _ in range(n):
        v = max(
            (u for u in range(n) if colors[u] == -1),
            key=lambda u: (len(saturation[u]), len(adj[u]), -u),
        )
        c = 0
        while c in saturation[v]:
            c += 1
        colors[v] = c
        for w in adj[v]:
            saturation[w].add(c)
    return max(colors) + 1 if n else 0


def _colorable(adj, n, k):
    """Backtracking k-colorability with saturation ordering and symmetry
    breaking (a vertex may open at most one new color)."""
    colors = [-1] * n

    def rec(colored, max_used):
        if colored == n:
            return True
        v = max(
            (u for u in range(n) if colors[u] == -1),
            key=lambda u: (len({colors[w] for w in adj[u] if colors[w] != -1}), len(adj[u]), -u),
        )
        forbidden = {colors[w] for w in adj[v] if colors[w] != -1}
        limit = min(k, max_used + 2)
        for c in range(limit):
            if c in forbidden:
                continue
            colors[v] = c
            if rec(colored + 1, max(max_used, c)):
                return True
            colors[v] = -1
        return False

    return rec(0, -1)


def chromatic_number(g: Graph, max_vertices=40):
    """Exact chromatic number; refuses graphs above the vertex budget."""
    n = g.vertex_count
    if n > max_vertices:
        raise BudgetError(
            f"graph has {n} vertices, exact coloring budget is {max_vertices}"
        )
    if n == 0:
        return 0
    if not g.edges:
        return 1
    adj = g.adjacency()
    lb = len(_greedy_clique(adj, n))
    ub = _dsatur_greedy(adj, n)
    k = max(lb, 2)
    while k < ub:
        if _colorable(adj, n, k):
            return k
        k += 1
    return ub


# ----------------------------------------------------------------------
# Homomorphism densities in finite graphs


def hom_density_graph(h: Graph, g: Graph, method="auto", budget=None):
    """Fraction of mappings V(h) -> V(g) that are homomorphisms.

    Evaluated as a contraction over g's adjacency matrix with uniform
    vertex weights 1/|g|; picks enumeration or elimination DP by cost.
    """
    n = g.vertex_count
    if n < 1:
        raise ValidationError("host graph must have at least one vertex")
    weights = np.full(n, 1.0 / n)
    return float(
        _contract.evaluate(
            h.vertex_count, sorted(h.edges), g.adjacency_matrix(), weights,
            method=method, budget=budget,
        )
    )


def hom_count_bruteforce(h: Graph, g: Graph):
    """Exact homomorphism count by checking all |g|^|h| mappings."""
    adj = g.adjacency()
    edges = sorted(h.edges)
    count = 0
    for phi in itertools.product(range(g.vertex_count), repeat=h.vertex_count):
        if all(phi[v] in adj[phi[u]] for u, v in edges):
            count += 1
    return count


# ----------------------------------------------------------------------
# High-girth random graphs and local density


@dataclass(frozen=True)
class HighGirthReport:
    graph: Graph
    girth: float
    requested_girth: int
    n_sampled: int
    n_final: int
    edge_probability: float
    independence_number: int
    alpha_method: str
    chromatic_lower_bound: float
    certified: bool
    seed: int


def _max_independent_set(adj_masks, n):
    best = [0]

    def popcount(x):
        return bin(x).count("1")

    def rec(mask, size):
        if size + popcount(mask) <= best[0]:
            return
        if mask == 0:
            best[0] = max(best[0], size)
            return
        v = max(
            (i for i in range(n) if mask >> i & 1),
            key=lambda i: popcount(adj_masks[i] & mask),
        )
        rec(mask & ~(1 << v) & ~adj_masks[v], size + 1)
        rec(mask & ~(1 << v), size)

    rec((1 << n) - 1, 0)
    return best[0]


def _greedy_independent_set(adj, n):
    alive = set(range(n))
    size = 0
    while alive:
        v = min(alive, key=lambda u: (len(adj[u] & alive), u))
        size += 1
        alive -= adj[v] | {v}
    return size


def random_high_girth(n, g, seed):
    """Sample G(n, p) with p = n^(1/(g-1) - 1), then delete one vertex per
    short closed walk until the girth reaches g.  Deterministic in seed.

    The chromatic lower bound n'/alpha is certified only when the
    independence number is computed exactly (small final graphs); the
    greedy estimate may overstate it.
    """
    if g < 3:
        raise ValidationError("girth target must be at least 3")
    if n < 1:
        raise ValidationError("need at least one vertex")
    rng = np.random.default_rng(seed)
    p = float(n) ** (1.0 / (g - 1) - 1.0)
    edges = set()
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.add((u, v))
    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    alive = set(range(n))
    while True:
        walk = _find_short_cycle(adj, alive, g)
        if walk is None:
            break
        alive.discard(max(walk, key=lambda v: (len(adj[v] & alive), v)))
    relabel = {v: i for i, v in enumerate(sorted(alive))}
    final_edges = frozenset(
        (relabel[u], relabel[v]) for u, v in edges if u in alive and v in alive
    )
    graph = Graph(len(alive), final_edges)
    nf = graph.vertex_count
    if nf == 0:
        alpha, method = 0, "exact"
    elif nf <= 30:
        masks = [0] * nf
        for u, v in graph.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        alpha, method = _max_independent_set(masks, nf), "exact"
    else:
        alpha, method = _greedy_independent_set(graph.adjacency(), nf), "greedy"
    bound = nf / alpha if alpha else 0.0
    return HighGirthReport(
        graph=graph,
        girth=girth(graph),
        requested_girth=g,
        n_sampled=n,
        n_final=nf,
        edge_probability=p,
        independence_number=alpha,
        alpha_method=method,
        chromatic_lower_bound=bound,
        certified=(method == "exact"),
        seed=seed,
    )


@dataclass(frozen=True)
class LocalDensityReport:
    dense: bool
    witness: tuple | None
    mode: str
    subsets_checked: int


def is_locally_dense(g: Graph, rho, d, samples=2000, seed=0):
    """Check that every vertex subset of size >= rho*|g| induces edge
    density >= d.  Exact by subset enumeration up to 25 vertices, sampled
    beyond; a False verdict always carries a violating subset.

    Subsets with fewer than two vertices are vacuously dense.
    """
    n = g.vertex_count
    if not 0 < rho <= 1:
        raise ValidationError("rho must be in (0, 1]")
    min_size = max(math.ceil(rho * n), 2)
    masks = [0] * n
    for u, v in g.edges:
        masks[u] |= 1 << v
        masks[v] |= 1 << u

    def induced_density(subset):
        mask = 0
        for v in subset:
            mask |= 1 << v
        m2 = sum(bin(masks[v] & mask).count("1") for v in subset)
        s = len(subset)
        return (m2 / 2) / (s * (s - 1) / 2)

    if n <= 25:
        checked = 0
        for size in range(min_size, n + 1):
            for subset in itertools.combinations(range(n), size):
                checked += 1
                if induced_density(subset) < d - 1e-12:
                    return LocalDensityReport(False, subset, "exact", checked)
        return LocalDensityReport(True, None, "exact", checked)
    rng = np.random.default_rng(seed)
    for i in range(samples):
        size = int(rng.integers(min_size, n + 1))
        subset = tuple(sorted(rng.choice(n, size=size, replace=False).tolist()))
        if induced_density(subset) < d - 1e-12:
            return LocalDensityReport(False, subset, "sampled", i + 1)
    return LocalDensityReport(True, None, "sampled", samples)


# ----------------------------------------------------------------------
# JSON


def graph_to_json(g):
    """Serialize a Graph or RootedGraph; edges sorted for byte stability."""
    if isinstance(g, RootedGraph):
        d = graph_to_json(g.graph)
        d["roots"] = list(g.roots)
        return d
    return {"n": g.vertex_count, "edges": [list(e) for e in g.sorted_edges()]}


def graph_from_json(data):
    if not isinstance(data, dict) or "n" not in data:
        raise ValidationError("graph JSON must be an object with an 'n' field")
    try:
        g = Graph(int(data["n"]), frozenset(tuple(e) for e in data.get("edges", [])))
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad graph JSON: {exc}") from exc
    if "roots" in data:
        return RootedGraph(g, tuple(data["roots"]))
    return g


def petersen_graph():
    """The Petersen graph; a handy 3-regular girth-5 test instance."""
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, 5 + i) for i in range(5)]
    return Graph(10, frozenset(outer + inner + spokes))
