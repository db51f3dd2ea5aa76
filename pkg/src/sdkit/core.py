"""Finite sets, finite simple graphs, their morphisms, and co/limits.

All values are immutable after construction and every operation is a pure
function of its inputs, so everything here is safe to share across threads.
Colimits are computed by union-find on the disjoint union of the diagram's
objects and renumbered canonically (classes sorted by their smallest
(object index, element) member) so outputs are bit-stable across runs.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Union

from .errors import (
    CodomainMismatch,
    IllFormedDiagram,
    NonMonicSpan,
    TooLarge,
    ValidationError,
)

ISO_VERTEX_CAP = 8


@dataclass(frozen=True)
class FinSet:
    """A finite set whose elements are the canonical labels 0..size-1."""

    size: int

    def __post_init__(self):
        if self.size < 0:
            raise ValidationError(f"finite set size must be >= 0, got {self.size}")

    @property
    def elements(self) -> range:
        return range(self.size)

    def to_json(self) -> dict:
        return {"size": self.size}

    @classmethod
    def from_json(cls, data) -> "FinSet":
        if not isinstance(data, dict) or not isinstance(data.get("size"), int):
            raise ValidationError(f"finite set JSON must be {{'size': n}}, got {data!r}")
        return cls(data["size"])


@dataclass(frozen=True)
class SetFunction:
    """A total function between finite sets, stored as a lookup tuple."""

    dom: FinSet
    cod: FinSet
    mapping: tuple

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(self.mapping))
        if len(self.mapping) != self.dom.size:
            raise ValidationError(
                f"mapping has {len(self.mapping)} entries for a domain of size {self.dom.size}"
            )
        for x, y in enumerate(self.mapping):
            if not isinstance(y, int) or not 0 <= y < self.cod.size:
                raise ValidationError(
                    f"mapping sends {x} to {y!r}, outside codomain 0..{self.cod.size - 1}"
                )

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    @classmethod
    def identity(cls, obj: FinSet) -> "SetFunction":
        return cls(obj, obj, tuple(range(obj.size)))

    def then(self, other: "SetFunction") -> "SetFunction":
        """Composition in diagram order: (f.then(g))(x) = g(f(x))."""
        if self.cod != other.dom:
            raise CodomainMismatch("cannot compose: codomain differs from domain")
        return SetFunction(self.dom, other.cod, tuple(other.mapping[y] for y in self.mapping))

    def is_mono(self) -> bool:
        return len(set(self.mapping)) == len(self.mapping)

    def image(self) -> frozenset:
        return frozenset(self.mapping)

    def to_json(self) -> dict:
        return {"dom": self.dom.size, "cod": self.cod.size, "map": list(self.mapping)}

    @classmethod
    def from_json(cls, data) -> "SetFunction":
        if (
            not isinstance(data, dict)
            or not isinstance(data.get("dom"), int)
            or not isinstance(data.get("cod"), int)
            or not isinstance(data.get("map"), list)
        ):
            raise ValidationError(
                f"set function JSON must be {{'dom': n, 'cod': m, 'map': [..]}}, got {data!r}"
            )
        return cls(FinSet(data["dom"]), FinSet(data["cod"]), tuple(data["map"]))


def _normalize_edge(u: int, v: int) -> tuple:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """A finite simple undirected graph on vertices 0..vertices-1."""

    vertices: int
    edges: frozenset

    def __init__(self, vertices: int, edges=()):
        if vertices < 0:
            raise ValidationError(f"vertex count must be >= 0, got {vertices}")
        normalized = set()
        for e in edges:
            u, v = e
            if u == v:
                raise ValidationError(f"self-loop at vertex {u} is not allowed")
            if not (0 <= u < vertices and 0 <= v < vertices):
                raise ValidationError(f"edge {e!r} has an endpoint outside 0..{vertices - 1}")
            normalized.add(_normalize_edge(u, v))
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", frozenset(normalized))

    def has_edge(self, u: int, v: int) -> bool:
        return _normalize_edge(u, v) in self.edges

    def edge_list(self) -> list:
        return sorted(self.edges)

    def neighbor_sets(self) -> list:
        nbrs = [set() for _ in range(self.vertices)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return nbrs

    def degree_sequence(self) -> tuple:
        degs = [0] * self.vertices
        for u, v in self.edges:
            degs[u] += 1
            degs[v] += 1
        return tuple(sorted(degs))

    def induced_subgraph(self, vertex_set) -> "Graph":
        """Induced subgraph, renumbered along the sorted vertex list."""
        keep = sorted(vertex_set)
        index = {v: i for i, v in enumerate(keep)}
        edges = [
            (index[u], index[v]) for u, v in self.edges if u in index and v in index
        ]
        return Graph(len(keep), edges)

    def to_json(self) -> dict:
        return {"vertices": self.vertices, "edges": [list(e) for e in self.edge_list()]}

    @classmethod
    def from_json(cls, data) -> "Graph":
        if not isinstance(data, dict):
            raise ValidationError(f"graph JSON must be an object, got {data!r}")
        n = data.get("vertices")
        edges = data.get("edges")
        if not isinstance(n, int) or not isinstance(edges, list):
            raise ValidationError(
                f"graph JSON must be {{'vertices': n, 'edges': [[u,v], ..]}}, got {data!r}"
            )
        pairs = []
        for e in edges:
            if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)):
                raise ValidationError(f"graph edge must be a pair of vertex ids, got {e!r}")
            pairs.append((e[0], e[1]))
        return cls(n, pairs)


@dataclass(frozen=True)
class GraphMorphism:
    """A vertex map preserving edges (an edge may collapse onto a vertex)."""

    dom: Graph
    cod: Graph
    mapping: tuple

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(self.mapping))
        if len(self.mapping) != self.dom.vertices:
            raise ValidationError(
                f"vertex map has {len(self.mapping)} entries for {self.dom.vertices} vertices"
            )
        for x, y in enumerate(self.mapping):
            if not isinstance(y, int) or not 0 <= y < self.cod.vertices:
                raise ValidationError(
                    f"vertex map sends {x} to {y!r}, outside 0..{self.cod.vertices - 1}"
                )
        for u, v in self.dom.edges:
            fu, fv = self.mapping[u], self.mapping[v]
            if fu != fv and not self.cod.has_edge(fu, fv):
                raise ValidationError(
                    f"edge ({u},{v}) maps to non-edge ({fu},{fv}) of the codomain"
                )

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    @property
    def vertex_map(self) -> SetFunction:
        return SetFunction(FinSet(self.dom.vertices), FinSet(self.cod.vertices), self.mapping)

    @classmethod
    def identity(cls, g: Graph) -> "GraphMorphism":
        return cls(g, g, tuple(range(g.vertices)))

    def then(self, other: "GraphMorphism") -> "GraphMorphism":
        if self.cod != other.dom:
            raise CodomainMismatch("cannot compose: codomain differs from domain")
        return GraphMorphism(self.dom, other.cod, tuple(other.mapping[y] for y in self.mapping))

    def is_mono(self) -> bool:
        return len(set(self.mapping)) == len(self.mapping)

    def image_vertices(self) -> frozenset:
        return frozenset(self.mapping)

    def image_edges(self) -> frozenset:
        out = set()
        for u, v in self.dom.edges:
            fu, fv = self.mapping[u], self.mapping[v]
            if fu != fv:
                out.add(_normalize_edge(fu, fv))
        return frozenset(out)


Morphism = Union[SetFunction, GraphMorphism]
Object = Union[FinSet, Graph]


def object_size(obj: Object) -> int:
    return obj.size if isinstance(obj, FinSet) else obj.vertices


@dataclass(frozen=True)
class Span:
    """Two morphisms out of a common apex: left.dom == right.dom."""

    left: Morphism
    right: Morphism

    def __post_init__(self):
        if self.left.dom != self.right.dom:
            raise ValidationError("span legs must share their domain (the apex)")

    @property
    def apex(self) -> Object:
        return self.left.dom

    def is_monic(self) -> bool:
        return self.left.is_mono() and self.right.is_mono()


@dataclass(frozen=True)
class Cospan:
    """Two morphisms into a common apex: left.cod == right.cod."""

    left: Morphism
    right: Morphism

    def __post_init__(self):
        if self.left.cod != self.right.cod:
            raise CodomainMismatch("cospan legs must share their codomain")

    @property
    def apex(self) -> Object:
        return self.left.cod


@dataclass(frozen=True)
class Diagram:
    """Objects plus arrows tagged with (source index, target index)."""

    objects: tuple
    arrows: tuple

    def __init__(self, objects, arrows):
        objects = tuple(objects)
        arrows = tuple((int(s), int(t), f) for s, t, f in arrows)
        kinds = {type(o) for o in objects}
        if len(kinds) > 1:
            raise IllFormedDiagram("diagram mixes finite-set and graph objects")
        for s, t, f in arrows:
            if not 0 <= s < len(objects) or not 0 <= t < len(objects):
                raise IllFormedDiagram(f"arrow indices ({s},{t}) out of range")
            if f.dom != objects[s] or f.cod != objects[t]:
                raise IllFormedDiagram(
                    f"arrow {s}->{t} does not type-check against the stored objects"
                )
        object.__setattr__(self, "objects", objects)
        object.__setattr__(self, "arrows", arrows)

    @classmethod
    def of_span(cls, s: Span) -> "Diagram":
        """The three-object diagram (left foot, right foot, apex)."""
        return cls((s.left.cod, s.right.cod, s.apex), ((2, 0, s.left), (2, 1, s.right)))


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            # keep the smaller (objectIndex, element) pair as representative
            if ry < rx:
                rx, ry = ry, rx
            self.parent[ry] = rx


def colimit(d: Diagram):
    """Glue a diagram's objects along its arrows.

    Returns (object, cocone) where the cocone is one morphism per diagram
    object. Vertices of the result are equivalence classes of the disjoint
    union, renumbered by their smallest (object index, element) member.
    """
    if not d.objects:
        raise IllFormedDiagram("colimit of an empty diagram has no canonical object here")
    is_graph = isinstance(d.objects[0], Graph)
    elements = [
        (i, x) for i, obj in enumerate(d.objects) for x in range(object_size(obj))
    ]
    uf = _UnionFind(elements)
    for s, t, f in d.arrows:
        for x in range(object_size(d.objects[s])):
            uf.union((s, x), (t, f(x)))
    reps = sorted({uf.find(e) for e in elements})
    index = {rep: i for i, rep in enumerate(reps)}
    classof = {e: index[uf.find(e)] for e in elements}
    if is_graph:
        edges = set()
        for i, obj in enumerate(d.objects):
            for u, v in obj.edges:
                cu, cv = classof[(i, u)], classof[(i, v)]
                if cu != cv:
                    edges.add(_normalize_edge(cu, cv))
        result = Graph(len(reps), edges)
        cocone = tuple(
            GraphMorphism(obj, result, tuple(classof[(i, x)] for x in range(obj.vertices)))
            for i, obj in enumerate(d.objects)
        )
    else:
        result = FinSet(len(reps))
        cocone = tuple(
            SetFunction(obj, result, tuple(classof[(i, x)] for x in range(obj.size)))
            for i, obj in enumerate(d.objects)
        )
    return result, cocone


def pushout(s: Span):
    """Pushout of a monic span, returned with its cocone.

    Raises NonMonicSpan if a leg is not injective. Along monic legs the
    cocone legs are injective as well (adhesivity), which downstream
    algorithms rely on.
    """
    if not s.is_monic():
        raise NonMonicSpan("pushout requires both span legs to be injective")
    obj, cocone = colimit(Diagram.of_span(s))
    return obj, Cospan(cocone[0], cocone[1])


def pullback(c: Cospan):
    """Pullback of a cospan: pairs that agree in the apex, paired edges."""
    f, g = c.left, c.right
    if isinstance(f.cod, Graph) != isinstance(g.cod, Graph):
        raise CodomainMismatch("cospan legs live in different categories")
    pairs = [
        (a, b)
        for a in range(object_size(f.dom))
        for b in range(object_size(g.dom))
        if f(a) == g(b)
    ]
    index = {p: i for i, p in enumerate(pairs)}
    if isinstance(f.dom, Graph):
        edges = set()
        for (a, b), (a2, b2) in itertools.combinations(pairs, 2):
            if f.dom.has_edge(a, a2) and g.dom.has_edge(b, b2):
                edges.add(_normalize_edge(index[(a, b)], index[(a2, b2)]))
        obj = Graph(len(pairs), edges)
        left = GraphMorphism(obj, f.dom, tuple(p[0] for p in pairs))
        right = GraphMorphism(obj, g.dom, tuple(p[1] for p in pairs))
    else:
        obj = FinSet(len(pairs))
        left = SetFunction(obj, f.dom, tuple(p[0] for p in pairs))
        right = SetFunction(obj, g.dom, tuple(p[1] for p in pairs))
    return obj, Span(left, right)


def complete_graph(n_or_set) -> Graph:
    """K_n: every pair of distinct vertices is an edge."""
    n = n_or_set.size if isinstance(n_or_set, FinSet) else n_or_set
    return Graph(n, itertools.combinations(range(n), 2))


def complete_on_function(f: SetFunction) -> GraphMorphism:
    """The action of the complete-graph functor on a set function."""
    return GraphMorphism(complete_graph(f.dom.size), complete_graph(f.cod.size), f.mapping)


def discrete_graph(n_or_set) -> Graph:
    """The edgeless graph on n vertices."""
    n = n_or_set.size if isinstance(n_or_set, FinSet) else n_or_set
    return Graph(n, ())


def discrete_on_function(f: SetFunction) -> GraphMorphism:
    return GraphMorphism(discrete_graph(f.dom.size), discrete_graph(f.cod.size), f.mapping)


def complement(g: Graph) -> Graph:
    edges = [
        (u, v) for u, v in itertools.combinations(range(g.vertices), 2) if not g.has_edge(u, v)
    ]
    return Graph(g.vertices, edges)


def set_functions(dom: FinSet, cod: FinSet) -> Iterator[SetFunction]:
    """All total functions dom -> cod (cod.size ** dom.size of them)."""
    for mapping in itertools.product(range(cod.size), repeat=dom.size):
        yield SetFunction(dom, cod, mapping)


def graph_morphisms(dom: Graph, cod: Graph) -> Iterator[GraphMorphism]:
    """All edge-preserving vertex maps dom -> cod. Exponential; keep inputs tiny."""
    if dom.vertices == 0:
        yield GraphMorphism(dom, cod, ())
        return
    if cod.vertices == 0:
        return
    nbrs = cod.neighbor_sets()
    dom_edges = dom.edge_list()
    for mapping in itertools.product(range(cod.vertices), repeat=dom.vertices):
        ok = True
        for u, v in dom_edges:
            fu, fv = mapping[u], mapping[v]
            if fu != fv and fv not in nbrs[fu]:
                ok = False
                break
        if ok:
            yield GraphMorphism(dom, cod, mapping)


def connected_components(g: Graph) -> list:
    """Vertex sets of the connected components, each sorted, ordered by minimum."""
    uf = _UnionFind(range(g.vertices))
    for u, v in g.edges:
        uf.union(u, v)
    comps = {}
    for v in range(g.vertices):
        comps.setdefault(uf.find(v), []).append(v)
    return [sorted(comps[r]) for r in sorted(comps)]


def is_forest(g: Graph) -> bool:
    uf = _UnionFind(range(g.vertices))
    for u, v in g.edges:
        if uf.find(u) == uf.find(v):
            return False
        uf.union(u, v)
    return True


def find_isomorphism(g: Graph, h: Graph):
    """An edge-preserving bijection g -> h as a tuple, or None.

    Backtracking over vertex assignments with degree pruning; capped at
    ISO_VERTEX_CAP vertices on either side.
    """
    if g.vertices > ISO_VERTEX_CAP or h.vertices > ISO_VERTEX_CAP:
        raise TooLarge(
            f"isomorphism search is limited to {ISO_VERTEX_CAP} vertices; "
            "compare canonical invariants instead"
        )
    if g.vertices != h.vertices or len(g.edges) != len(h.edges):
        return None
    if g.degree_sequence() != h.degree_sequence():
        return None
    n = g.vertices
    gn = g.neighbor_sets()
    hn = h.neighbor_sets()
    gdeg = [len(s) for s in gn]
    hdeg = [len(s) for s in hn]
    assignment = [-1] * n
    used = [False] * n

    def extend(i: int) -> bool:
        if i == n:
            return True
        for cand in range(n):
            if used[cand] or gdeg[i] != hdeg[cand]:
                continue
            ok = True
            for j in range(i):
                if (j in gn[i]) != (assignment[j] in hn[cand]):
                    ok = False
                    break
            if ok:
                assignment[i] = cand
                used[cand] = True
                if extend(i + 1):
                    return True
                used[cand] = False
                assignment[i] = -1
        return False

    return tuple(assignment) if extend(0) else None


def is_isomorphic(g: Graph, h: Graph) -> bool:
    """Edge-preserving bijection existence, capped at ISO_VERTEX_CAP vertices."""
    return find_isomorphism(g, h) is not None
