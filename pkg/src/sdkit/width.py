"""Chordality, clique trees, tree-width, and its complemented/layered/H variants.

The exact tree-width oracle runs branch-and-bound over elimination orderings
with a simplicial-vertex reduction, a degeneracy lower bound and a min-fill
upper bound; it is capped at TREEWIDTH_CAP vertices. The layered variant
additionally enumerates every layering (ordered set partition of the vertex
set) and is double exponential, hence its far smaller cap.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import (
    FinSet,
    Graph,
    GraphMorphism,
    SetFunction,
    Span,
    find_isomorphism,
    is_forest,
    object_size,
    ISO_VERTEX_CAP,
)
from .decomposition import (
    Adhesion,
    COMPLETE,
    FINSET,
    GRAPH,
    StructuredDecomposition,
    evaluate_colimit,
    is_tame,
    map_decomposition,
    validate,
)
from .errors import (
    EmptyDecomposition,
    NonFinSetValued,
    NonTreeShape,
    NotALayering,
    NotATreeDecomposition,
    NotChordal,
    NotTame,
    TooLarge,
    ValidationError,
)

TREEWIDTH_CAP = 12
LAYERED_CAP = 7


def peo(g: Graph):
    """A perfect elimination ordering of g, or None if g is not chordal.

    Runs maximum-cardinality search (ties broken by smallest label) and
    verifies the resulting ordering; MCS yields a valid ordering exactly on
    chordal graphs.
    """
    n = g.vertices
    nbrs = g.neighbor_sets()
    weight = [0] * n
    numbered = [False] * n
    visit = []
    for _ in range(n):
        v = max(
            (u for u in range(n) if not numbered[u]),
            key=lambda u: (weight[u], -u),
        )
        visit.append(v)
        numbered[v] = True
        for u in nbrs[v]:
            if not numbered[u]:
                weight[u] += 1
    order = tuple(reversed(visit))
    pos = {v: i for i, v in enumerate(order)}
    for v in order:
        later = [u for u in nbrs[v] if pos[u] > pos[v]]
        for a, b in itertools.combinations(later, 2):
            if b not in nbrs[a]:
                return None
    return order


def is_chordal(g: Graph) -> bool:
    return peo(g) is not None


def clique_number_chordal(g: Graph) -> int:
    """omega(g) for chordal g: 1 + the largest back-degree along a PEO."""
    if g.vertices == 0:
        return 0
    order = peo(g)
    if order is None:
        raise NotChordal("clique number via elimination orderings needs a chordal graph")
    nbrs = g.neighbor_sets()
    pos = {v: i for i, v in enumerate(order)}
    return 1 + max(sum(1 for u in nbrs[v] if pos[u] > pos[v]) for v in order)


def _require_forest_shape(d: StructuredDecomposition) -> None:
    if not is_forest(d.shape):
        raise NonTreeShape("the decomposition shape must be a tree or forest")


def chordal_from_decomposition(d: StructuredDecomposition) -> Graph:
    """Complete every bag and glue: tree-shaped tame input yields a chordal graph."""
    if d.value_kind != FINSET:
        raise NonFinSetValued("expected a finite-set-valued decomposition")
    _require_forest_shape(d)
    if not is_tame(d):
        raise NotTame("completion requires injective adhesion legs")
    glued, _ = evaluate_colimit(map_decomposition(COMPLETE, d))
    return glued


def maximal_cliques_chordal(g: Graph) -> list:
    """Maximal cliques of a chordal graph, as sorted tuples in sorted order."""
    order = peo(g)
    if order is None:
        raise NotChordal("maximal-clique extraction needs a chordal graph")
    nbrs = g.neighbor_sets()
    pos = {v: i for i, v in enumerate(order)}
    cands = {
        frozenset({v} | {u for u in nbrs[v] if pos[u] > pos[v]}) for v in order
    }
    maximal = [c for c in cands if not any(c < other for other in cands)]
    return sorted(tuple(sorted(c)) for c in maximal)


def decomposition_from_chordal(h: Graph) -> StructuredDecomposition:
    """A clique tree of a chordal graph as a finite-set-valued decomposition.

    Bags are the maximal cliques; the shape is a maximum-weight spanning
    forest of the clique intersection graph (Kruskal, ties broken by smallest
    clique index pair), which is exactly the classical clique-tree
    construction. Completing and gluing the result reproduces h up to
    isomorphism.
    """
    cliques = maximal_cliques_chordal(h)
    k = len(cliques)
    weighted = []
    for i, j in itertools.combinations(range(k), 2):
        shared = len(set(cliques[i]) & set(cliques[j]))
        if shared:
            weighted.append((-shared, i, j))
    parent = list(range(k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree_edges = []
    for _, i, j in sorted(weighted):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            tree_edges.append((i, j))
    shape = Graph(k, tree_edges)
    bags = tuple(FinSet(len(c)) for c in cliques)
    index = [{v: i for i, v in enumerate(c)} for c in cliques]
    adhesions = []
    for u, v in sorted(shape.edges):
        shared = sorted(set(cliques[u]) & set(cliques[v]))
        apex = FinSet(len(shared))
        left = SetFunction(apex, bags[u], tuple(index[u][w] for w in shared))
        right = SetFunction(apex, bags[v], tuple(index[v][w] for w in shared))
        adhesions.append(Adhesion((u, v), Span(left, right)))
    return StructuredDecomposition(shape, FINSET, bags, adhesions)


def tree_decomposition_reading(g: Graph, d: StructuredDecomposition, labeling=None):
    """Read d's bags as subgraphs of g, if d is a tree decomposition of g.

    Returns (labeling, colim_to_g) or None. labeling[i][b] is the g-vertex
    of local bag vertex b; colim_to_g translates evaluate_colimit(d) vertices
    into g vertices. With no supplied labeling the bags are read through the
    colimit, which must equal g or be isomorphic to it (brute-force search,
    so g must stay small in that case).
    """
    if d.value_kind != GRAPH or validate(d) or not is_forest(d.shape) or not is_tame(d):
        return None
    glued, cocone = evaluate_colimit(d)
    if labeling is None:
        if glued == g:
            iso = tuple(range(g.vertices))
        elif glued.vertices != g.vertices or len(glued.edges) != len(g.edges):
            return None
        else:
            if g.vertices > ISO_VERTEX_CAP:
                raise TooLarge(
                    "deriving a bag labeling needs an isomorphism search; "
                    f"supply a labeling for graphs over {ISO_VERTEX_CAP} vertices"
                )
            iso = find_isomorphism(glued, g)
            if iso is None:
                return None
        labeling = tuple(
            tuple(iso[leg(b)] for b in range(bag.vertices))
            for bag, leg in zip(d.bags, cocone)
        )
        colim_to_g = iso
    else:
        labeling = tuple(tuple(lab) for lab in labeling)
        if len(labeling) != len(d.bags):
            return None
        # the labels must factor through the gluing as a bijection onto g
        if glued.vertices != g.vertices:
            return None
        translate = [-1] * glued.vertices
        for lab, bag, leg in zip(labeling, d.bags, cocone):
            if len(lab) != bag.vertices:
                return None
            for b in range(bag.vertices):
                x = lab[b]
                if not isinstance(x, int) or not 0 <= x < g.vertices:
                    return None
                if translate[leg(b)] == -1:
                    translate[leg(b)] = x
                elif translate[leg(b)] != x:
                    return None
        if sorted(translate) != list(range(g.vertices)):
            return None
        colim_to_g = tuple(translate)
    for bag, lab in zip(d.bags, labeling):
        if len(set(lab)) != len(lab):
            return None
        for b, b2 in bag.edges:
            if not g.has_edge(lab[b], lab[b2]):
                return None
    for a in d.adhesions:
        u, v = a.edge
        for x in range(object_size(a.span.apex)):
            if labeling[u][a.span.left(x)] != labeling[v][a.span.right(x)]:
                return None
    # T1: every edge of g appears inside some bag
    covered = set()
    for bag, lab in zip(d.bags, labeling):
        for b, b2 in bag.edges:
            e = (lab[b], lab[b2])
            covered.add(e if e[0] < e[1] else (e[1], e[0]))
    if not set(g.edges) <= covered:
        return None
    # T2: each vertex's bag support is non-empty and connected in the shape
    support = [set() for _ in range(g.vertices)]
    for i, lab in enumerate(labeling):
        for x in lab:
            support[x].add(i)
    shape_nbrs = d.shape.neighbor_sets()
    for v in range(g.vertices):
        nodes = support[v]
        if not nodes:
            return None
        start = next(iter(nodes))
        seen = {start}
        stack = [start]
        while stack:
            t = stack.pop()
            for t2 in shape_nbrs[t]:
                if t2 in nodes and t2 not in seen:
                    seen.add(t2)
                    stack.append(t2)
        if seen != nodes:
            return None
    return labeling, colim_to_g


def is_tree_decomposition(g: Graph, d: StructuredDecomposition, labeling=None) -> bool:
    """Check the two tree-decomposition conditions: every edge of g lies in
    some bag, and each vertex's bag support induces a non-empty connected
    subtree of the shape."""
    return tree_decomposition_reading(g, d, labeling) is not None


def width(d: StructuredDecomposition) -> int:
    """Largest bag size minus one."""
    if not d.bags:
        raise EmptyDecomposition("width is undefined without bags")
    return max(object_size(b) for b in d.bags) - 1


def _greedy_fill_width(adj: dict) -> int:
    """Width attained by the min-fill elimination heuristic (an upper bound)."""
    adj = {v: set(s) for v, s in adj.items()}
    best = 0
    while adj:
        def fill_count(v):
            nb = adj[v]
            return sum(1 for a, b in itertools.combinations(sorted(nb), 2) if b not in adj[a])

        v = min(adj, key=lambda u: (fill_count(u), len(adj[u]), u))
        best = max(best, len(adj[v]))
        nb = adj.pop(v)
        for a in nb:
            adj[a].discard(v)
        for a, b in itertools.combinations(sorted(nb), 2):
            adj[a].add(b)
            adj[b].add(a)
    return best


def _degeneracy(adj: dict) -> int:
    """Max over the min-degree elimination of the degree seen (a lower bound)."""
    adj = {v: set(s) for v, s in adj.items()}
    best = 0
    while adj:
        v = min(adj, key=lambda u: (len(adj[u]), u))
        best = max(best, len(adj[v]))
        for a in adj.pop(v):
            adj[a].discard(v)
    return best


def treewidth_exact(g: Graph, cap: int = TREEWIDTH_CAP) -> int:
    """Exact tree-width by elimination-ordering search, capped at `cap` vertices.

    Simplicial vertices are eliminated outright (always optimal); the
    remaining kernel is searched with memoization on the set of surviving
    vertices, which determines the fill graph independently of order.
    """
    if g.vertices > cap:
        raise TooLarge(f"exact tree-width is limited to {cap} vertices")
    if g.vertices == 0:
        return 0
    adj = {v: set() for v in range(g.vertices)}
    for u, v in g.edges:
        adj[u].add(v)
        adj[v].add(u)

    floor = 0
    changed = True
    while changed:
        changed = False
        for v in sorted(adj):
            nb = adj[v]
            if all(b in adj[a] for a, b in itertools.combinations(sorted(nb), 2)):
                floor = max(floor, len(nb))
                for a in adj.pop(v):
                    adj[a].discard(v)
                changed = True
                break
    if not adj:
        return floor

    ub = max(floor, _greedy_fill_width(adj))
    lb = max(floor, _degeneracy(adj))
    if lb == ub:
        return ub

    kernel = sorted(adj)
    memo = {}

    def fill_neighbors(v, remaining):
        seen = {v}
        stack = [v]
        out = set()
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w in seen:
                    continue
                seen.add(w)
                if w in remaining:
                    out.add(w)
                else:
                    stack.append(w)
        return out

    def solve(remaining: frozenset) -> int:
        if len(remaining) <= 1:
            return 0
        cached = memo.get(remaining)
        if cached is not None:
            return cached
        degrees = {v: fill_neighbors(v, remaining) for v in remaining}
        simplicial = None
        for v in sorted(remaining):
            nb = degrees[v]
            if all(b in degrees[a] for a, b in itertools.combinations(sorted(nb), 2)):
                simplicial = v
                break
        if simplicial is not None:
            value = max(len(degrees[simplicial]), solve(remaining - {simplicial}))
        else:
            value = min(
                max(len(degrees[v]), solve(remaining - {v})) for v in sorted(remaining)
            )
        memo[remaining] = value
        return value

    return max(floor, solve(frozenset(kernel)))


def complemented_treewidth(g: Graph, cap: int = TREEWIDTH_CAP) -> int:
    """Tree-width of the complement graph."""
    from .core import complement

    return treewidth_exact(complement(g), cap=cap)


@dataclass(frozen=True)
class Layering:
    """An ordered partition of a vertex set into layers."""

    layers: tuple

    def __init__(self, layers):
        object.__setattr__(self, "layers", tuple(tuple(sorted(l)) for l in layers))

    def to_json(self) -> dict:
        return {"layers": [list(l) for l in self.layers]}

    @classmethod
    def from_json(cls, data) -> "Layering":
        if not isinstance(data, dict) or not isinstance(data.get("layers"), list):
            raise ValidationError("layering JSON must be {'layers': [[v, ..], ..]}")
        for layer in data["layers"]:
            if not isinstance(layer, list) or not all(isinstance(v, int) for v in layer):
                raise ValidationError(f"layer must be an array of vertex ids, got {layer!r}")
        return cls(data["layers"])


def is_layering(g: Graph, layering: Layering) -> bool:
    """Layers must partition the vertices; edges may not skip a layer."""
    seen = []
    for layer in layering.layers:
        seen.extend(layer)
    if len(seen) != len(set(seen)) or set(seen) != set(range(g.vertices)):
        return False
    level = {}
    for i, layer in enumerate(layering.layers):
        for v in layer:
            level[v] = i
    return all(abs(level[u] - level[v]) <= 1 for u, v in g.edges)


def layered_width(g: Graph, layering: Layering, d: StructuredDecomposition, labeling=None) -> int:
    """Largest number of vertices shared by any bag with any layer."""
    if not is_layering(g, layering):
        raise NotALayering("the layer sequence does not partition the graph properly")
    reading = tree_decomposition_reading(g, d, labeling)
    if reading is None:
        raise NotATreeDecomposition("layered width needs a valid tree decomposition")
    lab = reading[0]
    best = 0
    for bag_lab in lab:
        bag_set = set(bag_lab)
        for layer in layering.layers:
            best = max(best, len(bag_set & set(layer)))
    return best


def layer_join(sequence) -> Graph:
    """Disjoint union of the sequence plus all edges between consecutive members."""
    offsets = []
    total = 0
    for g in sequence:
        offsets.append(total)
        total += g.vertices
    edges = []
    for g, off in zip(sequence, offsets):
        edges.extend((off + u, off + v) for u, v in g.edges)
    for i in range(len(sequence) - 1):
        a, b = sequence[i], sequence[i + 1]
        edges.extend(
            (offsets[i] + u, offsets[i + 1] + v)
            for u in range(a.vertices)
            for v in range(b.vertices)
        )
    return Graph(total, edges)


def layer_join_on_morphisms(morphisms) -> GraphMorphism:
    """The action of the layer join on a levelwise sequence of morphisms."""
    dom = layer_join([m.dom for m in morphisms])
    cod = layer_join([m.cod for m in morphisms])
    mapping = []
    offset = 0
    for m in morphisms:
        mapping.extend(offset + m(x) for x in range(m.dom.vertices))
        offset += m.cod.vertices
    return GraphMorphism(dom, cod, tuple(mapping))


def _ordered_set_partitions(items):
    """All ways to split items into a sequence of non-empty blocks."""
    items = list(items)
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for sub in _ordered_set_partitions(rest):
        for i in range(len(sub)):
            yield sub[:i] + ((first,) + sub[i],) + sub[i + 1 :]
        for i in range(len(sub) + 1):
            yield sub[:i] + ((first,),) + sub[i:]


def _elimination_bag_families(g: Graph):
    """Distinct bag sets {v + later fill neighbors} over all elimination orders."""
    n = g.vertices
    base = {v: set() for v in range(n)}
    for u, v in g.edges:
        base[u].add(v)
        base[v].add(u)
    families = set()
    for order in itertools.permutations(range(n)):
        adj = {v: set(s) for v, s in base.items()}
        bags = []
        for v in order:
            nb = adj.pop(v)
            bags.append(frozenset(nb | {v}))
            for a in nb:
                adj[a].discard(v)
            for a, b in itertools.combinations(sorted(nb), 2):
                adj[a].add(b)
                adj[b].add(a)
        families.add(frozenset(bags))
    return families


def layered_treewidth_exact(g: Graph, cap: int = LAYERED_CAP) -> int:
    """Minimum layered width over every layering and tree decomposition.

    Enumerates ordered set partitions as layerings (empty layers never help)
    against the bag families of all elimination orderings; double exponential,
    so the cap is deliberately tiny.
    """
    if g.vertices > cap:
        raise TooLarge(f"exact layered tree-width is limited to {cap} vertices")
    if g.vertices == 0:
        return 0
    families = _elimination_bag_families(g)
    best = None
    for blocks in _ordered_set_partitions(range(g.vertices)):
        layering = Layering(blocks)
        if not is_layering(g, layering):
            continue
        layer_sets = [set(l) for l in layering.layers]
        for family in families:
            w = max(len(bag & layer) for bag in family for layer in layer_sets)
            if best is None or w < best:
                best = w
    return best


def h_width(d: StructuredDecomposition, in_h) -> int:
    """Size of the largest bag outside the bag class; 0 when every bag is inside.

    in_h must be closed under subgraphs for the resulting measure to behave;
    that is the caller's promise.
    """
    if d.value_kind != GRAPH:
        raise ValidationError("h-width is defined for graph-valued decompositions")
    _require_forest_shape(d)
    if not is_tame(d):
        raise NotTame("h-width requires injective adhesion legs")
    sizes = [b.vertices for b in d.bags if not in_h(b)]
    return max(sizes) if sizes else 0
