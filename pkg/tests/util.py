"""Shared generators and independent oracles for the test suite."""
from __future__ import annotations

import itertools
import random

from sdkit import (
    Adhesion,
    FINSET,
    FinSet,
    GRAPH,
    Graph,
    GraphMorphism,
    SetFunction,
    Span,
    StructuredDecomposition,
    complete_graph,
)


def fs_adhesion(edge, pairs, bag_u, bag_v) -> Adhesion:
    """Adhesion whose apex elements map to the given (source, target) pairs."""
    apex = FinSet(len(pairs))
    return Adhesion(
        edge,
        Span(
            SetFunction(apex, bag_u, tuple(p[0] for p in pairs)),
            SetFunction(apex, bag_v, tuple(p[1] for p in pairs)),
        ),
    )


def random_graph(rng: random.Random, max_n: int, p: float = 0.5, min_n: int = 0) -> Graph:
    n = rng.randint(min_n, max_n)
    edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < p]
    return Graph(n, edges)


def random_tree_shape(rng: random.Random, max_bags: int, min_bags: int = 1) -> Graph:
    n = rng.randint(min_bags, max_bags)
    return Graph(n, [(rng.randrange(i), i) for i in range(1, n)])


def random_shape(rng: random.Random, max_bags: int, cycle_p: float = 0.3) -> Graph:
    """A connected shape, sometimes with extra (cycle-forming) edges."""
    tree = random_tree_shape(rng, max_bags)
    extra = [
        e
        for e in itertools.combinations(range(tree.vertices), 2)
        if e not in tree.edges and rng.random() < cycle_p / max(1, tree.vertices)
    ]
    return Graph(tree.vertices, list(tree.edges) + extra)


def random_monic_graph_span(rng: random.Random, max_n: int) -> Span:
    left_foot = random_graph(rng, max_n, min_n=0)
    right_foot = random_graph(rng, max_n, min_n=0)
    k = rng.randint(0, min(left_foot.vertices, right_foot.vertices))
    into_l = rng.sample(range(left_foot.vertices), k)
    into_r = rng.sample(range(right_foot.vertices), k)
    apex_edges = [
        (i, j)
        for i, j in itertools.combinations(range(k), 2)
        if left_foot.has_edge(into_l[i], into_l[j])
        and right_foot.has_edge(into_r[i], into_r[j])
        and rng.random() < 0.8
    ]
    apex = Graph(k, apex_edges)
    return Span(
        GraphMorphism(apex, left_foot, tuple(into_l)),
        GraphMorphism(apex, right_foot, tuple(into_r)),
    )


def random_finset_decomposition(
    rng: random.Random,
    max_bags: int,
    max_bag_size: int,
    tree: bool = True,
    tame: bool = True,
    min_bags: int = 1,
) -> StructuredDecomposition:
    shape = (
        random_tree_shape(rng, max_bags, min_bags)
        if tree
        else random_shape(rng, max_bags)
    )
    bags = tuple(FinSet(rng.randint(0, max_bag_size)) for _ in range(shape.vertices))
    adhesions = []
    for u, v in sorted(shape.edges):
        if tame:
            k = rng.randint(0, min(bags[u].size, bags[v].size))
            into_u = rng.sample(range(bags[u].size), k)
            into_v = rng.sample(range(bags[v].size), k)
        else:
            k = rng.randint(0, max_bag_size)
            if bags[u].size == 0 or bags[v].size == 0:
                k = 0
            into_u = [rng.randrange(bags[u].size) for _ in range(k)]
            into_v = [rng.randrange(bags[v].size) for _ in range(k)]
        adhesions.append(fs_adhesion((u, v), list(zip(into_u, into_v)), bags[u], bags[v]))
    return StructuredDecomposition(shape, FINSET, bags, adhesions)


def random_graph_decomposition(
    rng: random.Random,
    max_bags: int,
    max_bag_size: int,
    tree: bool = True,
    edge_p: float = 0.5,
) -> StructuredDecomposition:
    """A tame graph-valued decomposition with induced-subgraph-style adhesions."""
    shape = random_tree_shape(rng, max_bags) if tree else random_shape(rng, max_bags)
    bags = []
    for _ in range(shape.vertices):
        n = rng.randint(0, max_bag_size)
        edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < edge_p]
        bags.append(Graph(n, edges))
    adhesions = []
    for u, v in sorted(shape.edges):
        k = rng.randint(0, min(bags[u].vertices, bags[v].vertices))
        into_u = rng.sample(range(bags[u].vertices), k)
        into_v = rng.sample(range(bags[v].vertices), k)
        apex_edges = [
            (i, j)
            for i, j in itertools.combinations(range(k), 2)
            if bags[u].has_edge(into_u[i], into_u[j])
            and bags[v].has_edge(into_v[i], into_v[j])
            and rng.random() < 0.8
        ]
        apex = Graph(k, apex_edges)
        adhesions.append(
            Adhesion(
                (u, v),
                Span(
                    GraphMorphism(apex, bags[u], tuple(into_u)),
                    GraphMorphism(apex, bags[v], tuple(into_v)),
                ),
            )
        )
    return StructuredDecomposition(shape, GRAPH, tuple(bags), adhesions)


def random_subgraph_mono(rng: random.Random, g: Graph) -> GraphMorphism:
    """A random subgraph of g included by its sorted-vertex embedding."""
    keep = sorted(v for v in range(g.vertices) if rng.random() < 0.7)
    index = {v: i for i, v in enumerate(keep)}
    edges = [
        (index[u], index[v])
        for u, v in g.edges
        if u in index and v in index and rng.random() < 0.8
    ]
    sub = Graph(len(keep), edges)
    return GraphMorphism(sub, g, tuple(keep))


def random_chordal_graph(rng: random.Random, max_n: int) -> Graph:
    """Grow a chordal graph by repeatedly gluing a clique onto a clique subset."""
    size = rng.randint(1, max(1, max_n))
    g = complete_graph(rng.randint(0, min(3, size)))
    while g.vertices < size:
        new_clique = rng.randint(1, min(3, size - g.vertices + 1))
        glue_candidates = _some_clique(rng, g, max_size=new_clique)
        fresh = min(max(1, new_clique - len(glue_candidates)), size - g.vertices)
        base = g.vertices
        verts = base + fresh
        edges = set(g.edges)
        new_ids = list(glue_candidates) + list(range(base, verts))
        edges.update(
            (a, b) if a < b else (b, a) for a, b in itertools.combinations(new_ids, 2)
        )
        g = Graph(verts, edges)
    return g


def _some_clique(rng: random.Random, g: Graph, max_size: int) -> list:
    if g.vertices == 0 or max_size == 0:
        return []
    nbrs = g.neighbor_sets()
    clique = [rng.randrange(g.vertices)]
    while len(clique) < max_size:
        common = set(range(g.vertices))
        for v in clique:
            common &= nbrs[v]
        common -= set(clique)
        if not common:
            break
        clique.append(rng.choice(sorted(common)))
    take = rng.randint(0, len(clique))
    return sorted(rng.sample(clique, take))


def all_graphs_labeled(n: int):
    """Every labeled simple graph on n vertices."""
    pool = list(itertools.combinations(range(n), 2))
    for r in range(len(pool) + 1):
        for chosen in itertools.combinations(pool, r):
            yield Graph(n, chosen)


def graphs_up_to_iso(n: int) -> list:
    """Representatives of isomorphism classes of n-vertex graphs."""
    from sdkit import is_isomorphic

    reps = []
    for g in all_graphs_labeled(n):
        if not any(is_isomorphic(g, h) for h in reps):
            reps.append(g)
    return reps


def treewidth_by_all_orders(g: Graph) -> int:
    """Exhaustive elimination-order enumeration with bitmask adjacency."""
    n = g.vertices
    if n == 0:
        return 0
    base = [0] * n
    for u, v in g.edges:
        base[u] |= 1 << v
        base[v] |= 1 << u
    best = n
    for order in itertools.permutations(range(n)):
        adj = base[:]
        alive = (1 << n) - 1
        worst = 0
        for v in order:
            nb = adj[v] & alive & ~(1 << v)
            worst = max(worst, nb.bit_count())
            if worst >= best:
                break
            alive &= ~(1 << v)
            m = nb
            while m:
                low = m & -m
                u = low.bit_length() - 1
                adj[u] |= nb & ~low
                m ^= low
        else:
            best = min(best, worst)
    return best


def is_chordal_dirac(g: Graph, _memo={}) -> bool:
    """Literal clique-gluing recursion: complete, or split by a clique separator
    into two smaller chordal pieces."""
    key = (g.vertices, tuple(sorted(g.edges)))
    if key in _memo:
        return _memo[key]
    n = g.vertices
    complete = len(g.edges) == n * (n - 1) // 2
    result = complete
    if not result:
        nbrs = g.neighbor_sets()
        verts = set(range(n))
        for r in range(n - 1):
            for sep in itertools.combinations(range(n), r):
                sep_set = set(sep)
                if not all(g.has_edge(a, b) for a, b in itertools.combinations(sep, 2)):
                    continue
                rest = sorted(verts - sep_set)
                if len(rest) < 2:
                    continue
                comps = _components_within(nbrs, rest)
                if len(comps) < 2:
                    continue
                left = comps[0] | sep_set
                right = (verts - comps[0]) | sep_set
                g1 = g.induced_subgraph(sorted(left))
                g2 = g.induced_subgraph(sorted(right))
                if is_chordal_dirac(g1) and is_chordal_dirac(g2):
                    result = True
                    break
            if result:
                break
    _memo[key] = result
    return result


def _components_within(nbrs, rest):
    rest_set = set(rest)
    seen = set()
    comps = []
    for start in rest:
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            for u in nbrs[v]:
                if u in rest_set and u not in seen:
                    seen.add(u)
                    comp.add(u)
                    stack.append(u)
        comps.append(comp)
    return comps
