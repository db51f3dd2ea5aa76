"""Compositional optimization over predicate-closed subgraph tables.

A table holds every subobject of an ambient graph satisfying a
subgraph-closed predicate. Tables over the two feet of a monic span compose
into the table over the pushout: each pair of entries is glued along its
shared trace on the span apex (realized directly as the union of the two
cocone images, which adhesivity makes injective), kept when the predicate
accepts the glue, and the injected images of both input tables are unioned
in at the end. Folding this composition over a tree-shaped decomposition in
post-order computes the table of the decomposition's colimit; the pair loop
may run on several threads without changing the resulting table.
"""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from .core import (
    Graph,
    GraphMorphism,
    Span,
    _normalize_edge,
    connected_components,
    is_forest,
    pushout,
)
from .decomposition import (
    GRAPH,
    StructuredDecomposition,
    evaluate_colimit,
    is_tame,
    require_valid,
)
from .errors import (
    NonMonicSpan,
    NonTreeShape,
    NotATreeDecomposition,
    NotTame,
    TooLarge,
    ValidationError,
)
from .width import tree_decomposition_reading

DEFAULT_BRUTE_CAP = 10
BRUTE_CAP_ENV = "SDKIT_MAX_BRUTE"


def brute_force_cap(override=None) -> int:
    if override is not None:
        return override
    raw = os.environ.get(BRUTE_CAP_ENV)
    if raw is None:
        return DEFAULT_BRUTE_CAP
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"{BRUTE_CAP_ENV} must be an integer, got {raw!r}")


class Subobject(NamedTuple):
    """A subgraph of a fixed ambient graph: vertex subset + edge subset."""

    vertices: frozenset
    edges: frozenset

    def encoding(self) -> tuple:
        """Deterministic sort/tie-break key."""
        return (tuple(sorted(self.vertices)), tuple(sorted(self.edges)))

    def to_json(self) -> dict:
        return {
            "vertices": sorted(self.vertices),
            "edges": [list(e) for e in sorted(self.edges)],
        }

    @classmethod
    def from_json(cls, data) -> "Subobject":
        if (
            not isinstance(data, dict)
            or not isinstance(data.get("vertices"), list)
            or not isinstance(data.get("edges"), list)
        ):
            raise ValidationError("subobject JSON must be {'vertices': [..], 'edges': [[u,v], ..]}")
        verts = frozenset(data["vertices"])
        edges = frozenset(_normalize_edge(e[0], e[1]) for e in data["edges"])
        return cls(verts, edges)


EMPTY_SUBOBJECT = Subobject(frozenset(), frozenset())


def subobject_in(sub: Subobject, g: Graph) -> bool:
    """Well-formedness relative to an ambient graph."""
    if not all(isinstance(v, int) and 0 <= v < g.vertices for v in sub.vertices):
        return False
    return all(e in g.edges and e[0] in sub.vertices and e[1] in sub.vertices for e in sub.edges)


def _degrees(sub: Subobject) -> dict:
    deg = {}
    for u, v in sub.edges:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    return deg


def predicate_paths(sub: Subobject) -> bool:
    """Disjoint union of paths: acyclic with every degree at most 2."""
    deg = _degrees(sub)
    if any(x > 2 for x in deg.values()):
        return False
    parent = {v: v for v in sub.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in sub.edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def predicate_bipartite(sub: Subobject) -> bool:
    """2-colorable over the included edges."""
    nbrs = {v: [] for v in sub.vertices}
    for u, v in sub.edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    color = {}
    for start in sub.vertices:
        if start in color:
            continue
        color[start] = 0
        stack = [start]
        while stack:
            x = stack.pop()
            for y in nbrs[x]:
                if y not in color:
                    color[y] = 1 - color[x]
                    stack.append(y)
                elif color[y] == color[x]:
                    return False
    return True


_PLANARITY_CACHE = {}


def _simple_paths(adj, a, b, banned):
    """All simple a-b paths whose internal vertices avoid `banned`."""
    out = []
    stack = [(a, [a], {a})]
    while stack:
        v, path, seen = stack.pop()
        for w in adj.get(v, ()):
            if w == b:
                out.append(path + [b])
            elif w not in seen and w not in banned:
                stack.append((w, path + [w], seen | {w}))
    return out if a != b else []


def _link_pairs(adj, branch, pairs, used):
    """Vertex-disjoint linkage search: internal vertices are private per path
    and never branch vertices."""
    if not pairs:
        return True
    a, b = pairs[0]
    rest = pairs[1:]
    banned = (branch - {a, b}) | used
    for path in _simple_paths(adj, a, b, banned):
        internals = set(path[1:-1])
        if internals & used:
            continue
        if _link_pairs(adj, branch, rest, used | internals):
            return True
    return False


def _has_subdivision(adj, degrees, parts) -> bool:
    """parts = [5] searches for a K5 subdivision, [3, 3] for K3,3."""
    if len(parts) == 1:
        k = parts[0]
        need = k - 1
        candidates = [v for v in adj if degrees[v] >= need]
        for branch in itertools.combinations(candidates, k):
            pairs = list(itertools.combinations(branch, 2))
            if _link_pairs(adj, set(branch), pairs, set()):
                return True
        return False
    a, b = parts
    candidates = [v for v in adj if degrees[v] >= min(a, b)]
    for chosen in itertools.combinations(candidates, a + b):
        for left in itertools.combinations(chosen, a):
            if chosen.index(left[0]) != 0:
                break  # fix the first chosen vertex on the left to kill symmetry
            right = tuple(v for v in chosen if v not in left)
            pairs = [(x, y) for x in left for y in right]
            if _link_pairs(adj, set(chosen), pairs, set()):
                return True
    return False


def _component_planar(adj) -> bool:
    adj = {v: set(nb) for v, nb in adj.items()}
    # series reduction preserves planarity: drop degree<=1 vertices, smooth
    # degree-2 vertices (duplicate edges fold away in a simple graph)
    changed = True
    while changed:
        changed = False
        for v in list(adj):
            nb = adj[v]
            if len(nb) <= 1:
                for u in nb:
                    adj[u].discard(v)
                del adj[v]
                changed = True
            elif len(nb) == 2:
                x, y = sorted(nb)
                adj[x].discard(v)
                adj[y].discard(v)
                del adj[v]
                if x != y:
                    adj[x].add(y)
                    adj[y].add(x)
                changed = True
    n = len(adj)
    m = sum(len(nb) for nb in adj.values()) // 2
    if n <= 4 or m <= 8:
        return True
    if m > 3 * n - 6:
        return False
    degrees = {v: len(nb) for v, nb in adj.items()}
    if _has_subdivision(adj, degrees, [5]):
        return False
    if _has_subdivision(adj, degrees, [3, 3]):
        return False
    return True


def predicate_planar(sub: Subobject) -> bool:
    """Planarity via the edge-count bound plus exhaustive search for K5 and
    K3,3 subdivisions; meant for brute-force-scale subobjects."""
    touched = set()
    for e in sub.edges:
        touched.update(e)
    order = sorted(touched)
    rename = {v: i for i, v in enumerate(order)}
    key = (len(order), tuple(sorted((rename[u], rename[v]) for u, v in sub.edges)))
    cached = _PLANARITY_CACHE.get(key)
    if cached is not None:
        return cached
    n, edges = key
    if n >= 3 and len(edges) > 3 * n - 6:
        result = False
    else:
        adj = {v: set() for v in range(n)}
        for u, v in edges:
            adj[u].add(v)
            adj[v].add(u)
        result = True
        for comp in connected_components(Graph(n, edges)):
            if len(comp) >= 5:
                if not _component_planar({v: adj[v] for v in comp}):
                    result = False
                    break
    _PLANARITY_CACHE[key] = result
    return result


@dataclass(frozen=True)
class PropertyPredicate:
    """A named subgraph-closed property of subobjects."""

    name: str
    evaluator: Callable

    def __call__(self, sub: Subobject) -> bool:
        return self.evaluator(sub)


PATHS = PropertyPredicate("paths", predicate_paths)
BIPARTITE = PropertyPredicate("bipartite", predicate_bipartite)
PLANAR = PropertyPredicate("planar", predicate_planar)
PREDICATES = {p.name: p for p in (PATHS, BIPARTITE, PLANAR)}


def predicate_by_name(name: str) -> PropertyPredicate:
    if name not in PREDICATES:
        raise ValidationError(
            f"unknown property {name!r}; choose from {sorted(PREDICATES)}"
        )
    return PREDICATES[name]


@dataclass(frozen=True)
class Objective:
    """A weight on subobjects together with an optimization direction."""

    name: str
    weight: Callable
    direction: str

    def better(self, a, b) -> bool:
        return a > b if self.direction == "max" else a < b


MAX_EDGES = Objective("max-edges", lambda s: len(s.edges), "max")
MAX_VERTICES = Objective("max-vertices", lambda s: len(s.vertices), "max")
MIN_EDGES = Objective("min-edges", lambda s: len(s.edges), "min")
OBJECTIVES = {o.name: o for o in (MAX_EDGES, MAX_VERTICES, MIN_EDGES)}


def objective_by_name(name: str) -> Objective:
    if name not in OBJECTIVES:
        raise ValidationError(
            f"unknown objective {name!r}; choose from {sorted(OBJECTIVES)}"
        )
    return OBJECTIVES[name]


@dataclass(frozen=True)
class SubPTable:
    """Deduplicated subobjects of one ambient graph satisfying one predicate.

    op_counter records how many pair compositions built the table; it
    describes the computation, not the table, so it is excluded from
    equality.
    """

    ambient: Graph
    predicate_name: str
    entries: frozenset
    op_counter: int = field(default=0, compare=False)

    def sorted_entries(self) -> list:
        return sorted(self.entries, key=Subobject.encoding)


def enumerate_subp_bruteforce(g: Graph, predicate: PropertyPredicate, cap=None) -> SubPTable:
    """Every (vertex subset, edge subset) pair satisfying the predicate."""
    cap = brute_force_cap(cap)
    if g.vertices > cap:
        raise TooLarge(
            f"brute-force enumeration is limited to {cap} vertices "
            f"(override with {BRUTE_CAP_ENV})"
        )
    edge_list = g.edge_list()
    entries = set()
    for r in range(g.vertices + 1):
        for combo in itertools.combinations(range(g.vertices), r):
            vset = frozenset(combo)
            avail = [e for e in edge_list if e[0] in vset and e[1] in vset]
            for k in range(len(avail) + 1):
                for picked in itertools.combinations(avail, k):
                    sub = Subobject(vset, frozenset(picked))
                    if predicate(sub):
                        entries.add(sub)
    return SubPTable(g, predicate.name, frozenset(entries))


def _push_subobject(sub: Subobject, leg: GraphMorphism) -> Subobject:
    verts = frozenset(leg(v) for v in sub.vertices)
    edges = frozenset(_normalize_edge(leg(u), leg(v)) for u, v in sub.edges)
    return Subobject(verts, edges)


def _compose_entries(images_l, images_r, predicate, threads=1):
    """Glued pairs that satisfy the predicate. Deterministic in set terms."""
    cache = {}

    def evaluate(pair):
        a, b = pair
        candidate = Subobject(a.vertices | b.vertices, a.edges | b.edges)
        known = cache.get(candidate)
        if known is None:
            known = predicate(candidate)
            cache[candidate] = known
        return candidate if known else None

    pair_count = len(images_l) * len(images_r)
    pairs = itertools.product(images_l, images_r)
    kept = set()
    if threads > 1 and pair_count > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for result in pool.map(evaluate, pairs, chunksize=256):
                if result is not None:
                    kept.add(result)
    else:
        for pair in pairs:
            result = evaluate(pair)
            if result is not None:
                kept.add(result)
    return kept, pair_count


def compose(
    span: Span,
    sub_l: SubPTable,
    sub_r: SubPTable,
    predicate: PropertyPredicate,
    threads: int = 1,
):
    """Table over the pushout of a monic span from tables over its feet.

    Every pair (A, B) is glued along the shared trace on the span apex; the
    glue is realized as the union of the two pushout-cocone images (injective
    by adhesivity), added when the predicate holds. The injected images of
    both input tables are unioned in unconditionally. op_counter counts
    exactly |sub_l| * |sub_r| pair compositions.
    """
    if not span.is_monic():
        raise NonMonicSpan("table composition requires a monic span")
    if sub_l.ambient != span.left.cod or sub_r.ambient != span.right.cod:
        raise ValidationError("tables do not match the span feet")
    if sub_l.predicate_name != predicate.name or sub_r.predicate_name != predicate.name:
        raise ValidationError("tables were built for a different predicate")
    glued, cocone = pushout(span)
    images_l = [_push_subobject(a, cocone.left) for a in sub_l.sorted_entries()]
    images_r = [_push_subobject(b, cocone.right) for b in sub_r.sorted_entries()]
    kept, pair_count = _compose_entries(images_l, images_r, predicate, threads)
    kept.update(images_l)
    kept.update(images_r)
    return SubPTable(glued, predicate.name, frozenset(kept), pair_count)


def compose_optimize(
    span: Span,
    sub_l: SubPTable,
    sub_r: SubPTable,
    predicate: PropertyPredicate,
    objective: Objective,
    threads: int = 1,
) -> Subobject:
    """Best entry of the composed table; ties broken by smallest encoding."""
    table = compose(span, sub_l, sub_r, predicate, threads)
    return best_entry(table, objective)


def best_entry(table: SubPTable, objective: Objective):
    best = None
    best_value = None
    for sub in table.sorted_entries():
        value = objective.weight(sub)
        if best is None or objective.better(value, best_value):
            best, best_value = sub, value
    return best


@dataclass(frozen=True)
class SolveStats:
    pair_compositions: int
    table_sizes: tuple
    compositions: tuple


@dataclass(frozen=True)
class SolveResult:
    value: object
    witness: Subobject
    table: SubPTable
    stats: SolveStats


def _prune_table(entries, interface: GraphMorphism, glued_to_x, objective):
    """Experimental frontier pruning: keep the best entry per interface trace.

    Heuristic only; gluing feasibility depends on entry interiors (degrees,
    colorings) beyond the trace, so the true optimum can be lost.
    """
    interface_verts = [glued_to_x[interface(v)] for v in range(interface.dom.vertices)]
    interface_edges = [
        _normalize_edge(glued_to_x[interface(u)], glued_to_x[interface(v)])
        for u, v in interface.dom.edges
    ]
    best = {}
    for sub in sorted(entries, key=Subobject.encoding):
        trace = (
            frozenset(v for v in interface_verts if v in sub.vertices),
            frozenset(e for e in interface_edges if e in sub.edges),
        )
        incumbent = best.get(trace)
        if incumbent is None or objective.better(
            objective.weight(sub), objective.weight(incumbent)
        ):
            best[trace] = sub
    return set(best.values())


def solve_on_decomposition(
    d: StructuredDecomposition,
    predicate: PropertyPredicate,
    objective: Objective,
    cap=None,
    root=None,
    prune: bool = False,
    threads: int = 1,
) -> SolveResult:
    """Fold table composition over a tree-shaped tame decomposition.

    Leaves start from brute-force tables of their bags; every shape edge
    composes the child subtree's table with the parent's accumulated table
    along the adhesion span, re-expressed over the partial colimit. The final
    table is rewritten onto evaluate_colimit(d)'s canonical vertex numbering,
    so the result is independent of the chosen root. Forest shapes are folded
    per component and joined over the empty interface.
    """
    require_valid(d)
    if d.value_kind != GRAPH:
        raise ValidationError("solving needs a graph-valued decomposition")
    if not is_forest(d.shape):
        raise NonTreeShape("solving folds over a tree: the shape must be acyclic")
    if not is_tame(d):
        raise NotTame("solving requires injective adhesion legs")
    cap = brute_force_cap(cap)
    for bag in d.bags:
        if bag.vertices > cap:
            raise TooLarge(
                f"bag with {bag.vertices} vertices exceeds the brute-force cap {cap}"
            )
    glued, cocone = evaluate_colimit(d)
    table_sizes = []
    compositions = []
    pair_total = 0

    if not d.bags:
        entries = {EMPTY_SUBOBJECT} if predicate(EMPTY_SUBOBJECT) else set()
        table = SubPTable(glued, predicate.name, frozenset(entries))
        stats = SolveStats(0, (), ())
        witness = best_entry(table, objective)
        value = objective.weight(witness) if witness is not None else None
        return SolveResult(value, witness, table, stats)

    shape_nbrs = d.shape.neighbor_sets()
    components = connected_components(d.shape)
    if root is not None:
        if not 0 <= root < d.shape.vertices:
            raise ValidationError(f"root {root} is not a shape vertex")
        components.sort(key=lambda comp: (root not in comp, comp))

    def fold_component(component) -> tuple:
        start = root if root is not None and root in component else component[0]
        # iterative post-order over the tree component
        order = []
        parent = {start: None}
        stack = [start]
        while stack:
            v = stack.pop()
            order.append(v)
            for u in sorted(shape_nbrs[v], reverse=True):
                if u not in parent:
                    parent[u] = v
                    stack.append(u)
        state = {}  # vertex -> (partial graph, entry set, {shape vertex -> embedding})
        for v in reversed(order):
            part = d.bags[v]
            entries = set(enumerate_subp_bruteforce(part, predicate, cap).entries)
            table_sizes.append(len(entries))
            embeds = {v: GraphMorphism.identity(part)}
            for child in sorted(shape_nbrs[v]):
                if parent.get(child) != v:
                    continue
                child_part, child_entries, child_embeds = state.pop(child)
                adhesion = d.adhesion_at(v, child)
                u, w = adhesion.edge
                leg_parent = adhesion.span.left if u == v else adhesion.span.right
                leg_child = adhesion.span.right if u == v else adhesion.span.left
                span = Span(
                    leg_child.then(child_embeds[child]),
                    leg_parent.then(embeds[v]),
                )
                if prune:
                    child_entries = _prune_table(
                        child_entries,
                        span.left,
                        tuple(range(child_part.vertices)),
                        objective,
                    )
                new_part, cospan = pushout(span)
                images_l = [_push_subobject(a, cospan.left) for a in child_entries]
                images_r = [_push_subobject(b, cospan.right) for b in entries]
                kept, _ = _compose_entries(images_l, images_r, predicate, threads)
                kept.update(images_l)
                kept.update(images_r)
                compositions.append((len(child_entries), len(entries)))
                entries = kept
                table_sizes.append(len(entries))
                embeds = {
                    **{t: m.then(cospan.right) for t, m in embeds.items()},
                    **{t: m.then(cospan.left) for t, m in child_embeds.items()},
                }
                part = new_part
            state[v] = (part, entries, embeds)
        return state[start]

    part, entries, embeds = fold_component(components[0])
    for component in components[1:]:
        other_part, other_entries, other_embeds = fold_component(component)
        span = Span(
            GraphMorphism(Graph(0), part, ()),
            GraphMorphism(Graph(0), other_part, ()),
        )
        new_part, cospan = pushout(span)
        images_l = [_push_subobject(a, cospan.left) for a in entries]
        images_r = [_push_subobject(b, cospan.right) for b in other_entries]
        kept, _ = _compose_entries(images_l, images_r, predicate, threads)
        kept.update(images_l)
        kept.update(images_r)
        compositions.append((len(entries), len(other_entries)))
        entries = kept
        table_sizes.append(len(entries))
        embeds = {
            **{t: m.then(cospan.left) for t, m in embeds.items()},
            **{t: m.then(cospan.right) for t, m in other_embeds.items()},
        }
        part = new_part

    # rewrite onto the canonical colimit numbering
    translate = [-1] * part.vertices
    for t, emb in embeds.items():
        for b in range(d.bags[t].vertices):
            translate[emb(b)] = cocone[t](b)
    assert -1 not in translate, "every gluing class must contain a bag element"
    final_entries = frozenset(
        Subobject(
            frozenset(translate[v] for v in sub.vertices),
            frozenset(_normalize_edge(translate[u], translate[v]) for u, v in sub.edges),
        )
        for sub in entries
    )
    pair_total = sum(l * r for l, r in compositions)
    table = SubPTable(glued, predicate.name, final_entries, pair_total)
    stats = SolveStats(pair_total, tuple(table_sizes), tuple(compositions))
    witness = best_entry(table, objective)
    value = objective.weight(witness) if witness is not None else None
    return SolveResult(value, witness, table, stats)


def _is_single_path(sub: Subobject) -> bool:
    """A connected path (possibly a single vertex, not empty)."""
    if not sub.vertices:
        return False
    deg = _degrees(sub)
    if any(x > 2 for x in deg.values()):
        return False
    if len(sub.edges) != len(sub.vertices) - 1:
        return False
    # acyclic with n-1 edges and degrees <= 2 means one path component
    return predicate_paths(sub)


def translate_subobject(sub: Subobject, mapping) -> Subobject:
    return Subobject(
        frozenset(mapping[v] for v in sub.vertices),
        frozenset(_normalize_edge(mapping[u], mapping[v]) for u, v in sub.edges),
    )


def _solve_named(g, d, predicate, labeling, cap, threads, keep):
    reading = tree_decomposition_reading(g, d, labeling)
    if reading is None:
        raise NotATreeDecomposition(
            "the decomposition is not a tree decomposition of the graph"
        )
    _, colim_to_g = reading
    result = solve_on_decomposition(d, predicate, MAX_EDGES, cap=cap, threads=threads)
    candidates = [s for s in result.table.sorted_entries() if keep(s)]
    if not candidates:
        return 0, EMPTY_SUBOBJECT, result.stats
    best = None
    for sub in candidates:
        if best is None or len(sub.edges) > len(best.edges):
            best = sub
    return len(best.edges), translate_subobject(best, colim_to_g), result.stats


def longest_path(g: Graph, d: StructuredDecomposition, labeling=None, cap=None, threads=1):
    """Maximum edge count over single connected paths, with a witness in g's
    own numbering."""
    return _solve_named(g, d, PATHS, labeling, cap, threads, _is_single_path)


def max_bipartite_subgraph(g: Graph, d: StructuredDecomposition, labeling=None, cap=None, threads=1):
    return _solve_named(g, d, BIPARTITE, labeling, cap, threads, lambda s: True)


def max_planar_subgraph(g: Graph, d: StructuredDecomposition, labeling=None, cap=None, threads=1):
    return _solve_named(g, d, PLANAR, labeling, cap, threads, lambda s: True)
