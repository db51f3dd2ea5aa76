"""Batch front door: parse JSON inputs, dispatch, emit deterministic output.

Exit codes: 0 success, 2 validation failure (including malformed JSON, with
a position-annotated message), 3 instance over a brute-force cap. Output is
byte-for-byte deterministic for identical inputs, except for the wall-time
column of `bench`.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time

from .core import Graph, GraphMorphism, Span
from .decomposition import (
    Adhesion,
    GRAPH,
    StructuredDecomposition,
    arrow_from_json,
    arrow_to_json,
    decomposition_from_json,
    decomposition_to_json,
    evaluate_colimit,
    restrict_decomposition,
    from_arrow,
    to_arrow,
    validate,
)
from .errors import SdkitError, TooLarge, ValidationError
from .solver import (
    MAX_EDGES,
    Subobject,
    translate_subobject,
    objective_by_name,
    predicate_by_name,
    solve_on_decomposition,
)
from .width import (
    Layering,
    complemented_treewidth,
    decomposition_from_chordal,
    h_width,
    layered_treewidth_exact,
    layered_width,
    peo,
    tree_decomposition_reading,
    treewidth_exact,
    width,
)

BENCH_HEADER = ["instance", "vertices", "edges", "width", "predicate", "value", "pairCompositions", "ms"]


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        )


def _load_graph(path: str) -> Graph:
    return Graph.from_json(_load_json(path))


def _load_decomposition(path: str) -> StructuredDecomposition:
    return decomposition_from_json(_load_json(path))


def _load_layering(path: str) -> Layering:
    return Layering.from_json(_load_json(path))


def _load_morphism(path: str, cod: Graph) -> GraphMorphism:
    data = _load_json(path)
    if not isinstance(data, dict):
        raise ValidationError("morphism JSON must be {'dom': <graph>, 'map': [..]}")
    dom = Graph.from_json(data.get("dom"))
    mapping = data.get("map")
    if not isinstance(mapping, list) or not all(isinstance(x, int) for x in mapping):
        raise ValidationError("morphism 'map' must be an array of vertex ids")
    return GraphMorphism(dom, cod, tuple(mapping))


def _emit(payload: str, out_path) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(payload)
    else:
        sys.stdout.write(payload)


def _emit_json(data, out_path) -> None:
    _emit(json.dumps(data, sort_keys=True, indent=2) + "\n", out_path)


def _cmd_colim(args) -> int:
    d = _load_decomposition(args.decomposition)
    obj, cocone = evaluate_colimit(d)
    _emit_json(
        {
            "valueKind": d.value_kind,
            "object": obj.to_json(),
            "cocone": [list(leg.mapping) for leg in cocone],
        },
        args.output,
    )
    return 0


def _cmd_check(args) -> int:
    if not args.decomposition and not args.graph:
        raise ValidationError("check needs -d/--decomposition or -g/--graph")
    violations = []
    if args.graph:
        try:
            _load_graph(args.graph)
        except ValidationError as exc:
            violations.append(str(exc))
    if args.decomposition:
        try:
            d = decomposition_from_json(_load_json(args.decomposition))
            violations.extend(validate(d))
        except ValidationError as exc:
            violations.append(str(exc))
    _emit_json({"violations": violations}, args.output)
    return 0 if not violations else 2


def _cmd_to_arrow(args) -> int:
    d = _load_decomposition(args.decomposition)
    _emit_json(arrow_to_json(to_arrow(d)), args.output)
    return 0


def _cmd_from_arrow(args) -> int:
    arrow = arrow_from_json(_load_json(args.arrow))
    _emit_json(decomposition_to_json(from_arrow(arrow)), args.output)
    return 0


def _cmd_restrict(args) -> int:
    d = _load_decomposition(args.decomposition)
    glued, _ = evaluate_colimit(d)
    if args.morphism:
        delta = _load_morphism(args.morphism, glued)
    elif args.graph:
        # subgraph given in colimit coordinates; embed by vertex identity
        sub = _load_graph(args.graph)
        delta = GraphMorphism(sub, glued, tuple(range(sub.vertices)))
    else:
        raise ValidationError("restrict needs --morphism or -g/--graph")
    restricted, _ = restrict_decomposition(d, delta)
    _emit_json(decomposition_to_json(restricted), args.output)
    return 0


def _cmd_chordal(args) -> int:
    g = _load_graph(args.graph)
    order = peo(g)
    _emit_json(
        {"chordal": order is not None, "peo": list(order) if order is not None else None},
        args.output,
    )
    return 0


def _cmd_clique_tree(args) -> int:
    g = _load_graph(args.graph)
    _emit_json(decomposition_to_json(decomposition_from_chordal(g)), args.output)
    return 0


def _cmd_treewidth(args) -> int:
    g = _load_graph(args.graph)
    _emit_json({"treewidth": treewidth_exact(g)}, args.output)
    return 0


def _cmd_co_treewidth(args) -> int:
    g = _load_graph(args.graph)
    _emit_json({"coTreewidth": complemented_treewidth(g)}, args.output)
    return 0


def _cmd_layered_width(args) -> int:
    g = _load_graph(args.graph)
    if args.exact:
        _emit_json({"layeredTreewidth": layered_treewidth_exact(g)}, args.output)
        return 0
    if not args.layering or not args.decomposition:
        raise ValidationError("layered-width needs -l/--layering and -d/--decomposition (or --exact)")
    layering = _load_layering(args.layering)
    d = _load_decomposition(args.decomposition)
    _emit_json({"layeredWidth": layered_width(g, layering, d)}, args.output)
    return 0


def _cmd_h_width(args) -> int:
    d = _load_decomposition(args.decomposition)
    predicate = predicate_by_name(args.property)

    def bag_in_class(bag: Graph) -> bool:
        return predicate(Subobject(frozenset(range(bag.vertices)), bag.edges))

    _emit_json({"hWidth": h_width(d, bag_in_class)}, args.output)
    return 0


def _cmd_solve(args) -> int:
    d = _load_decomposition(args.decomposition)
    predicate = predicate_by_name(args.property)
    objective = objective_by_name(args.objective)
    translate = None
    if args.graph:
        g = _load_graph(args.graph)
        reading = tree_decomposition_reading(g, d)
        if reading is None:
            raise ValidationError("the decomposition is not a tree decomposition of the graph")
        translate = reading[1]
    result = solve_on_decomposition(
        d, predicate, objective, prune=args.prune, threads=args.threads
    )
    witness = result.witness
    if witness is not None and translate is not None:
        witness = translate_subobject(witness, translate)
    _emit_json(
        {
            "value": result.value,
            "witness": witness.to_json() if witness is not None else None,
            "stats": {
                "pairCompositions": result.stats.pair_compositions,
                "tableSizes": list(result.stats.table_sizes),
            },
        },
        args.output,
    )
    return 0


def _random_instance(rng: random.Random, index: int):
    """A small random tame tree-shaped graph-valued decomposition."""
    bag_count = rng.randint(1, 4)
    edges = [(rng.randrange(i), i) for i in range(1, bag_count)]
    shape = Graph(bag_count, edges)
    bags = []
    for _ in range(bag_count):
        n = rng.randint(1, 4)
        pool = [(u, v) for u in range(n) for v in range(u + 1, n)]
        chosen = [e for e in pool if rng.random() < 0.6]
        bags.append(Graph(n, chosen))
    adhesions = []
    for u, v in sorted(shape.edges):
        k = rng.randint(0, min(bags[u].vertices, bags[v].vertices))
        into_u = rng.sample(range(bags[u].vertices), k)
        into_v = rng.sample(range(bags[v].vertices), k)
        apex_edges = [
            (i, j)
            for i in range(k)
            for j in range(i + 1, k)
            if bags[u].has_edge(into_u[i], into_u[j]) and bags[v].has_edge(into_v[i], into_v[j])
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
    d = StructuredDecomposition(shape, GRAPH, tuple(bags), tuple(adhesions))
    return f"gen{index}", d


def _cmd_bench(args) -> int:
    instances = []
    predicates = args.property.split(",") if args.property else ["paths"]
    if args.config:
        config = _load_json(args.config)
        if not isinstance(config, dict):
            raise ValidationError("bench config must be a JSON object")
        predicates = config.get("predicates", predicates)
        if not isinstance(predicates, list):
            raise ValidationError("bench config 'predicates' must be an array")
        for entry in config.get("instances", []):
            if not isinstance(entry, dict):
                raise ValidationError("bench config instances must be objects")
            d = _load_decomposition(entry["decomposition"])
            instances.append((entry.get("id", entry["decomposition"]), d))
    if args.generate:
        rng = random.Random(args.seed)
        for i in range(args.generate):
            instances.append(_random_instance(rng, i))
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(BENCH_HEADER)
    for name, d in instances:
        glued, _ = evaluate_colimit(d)
        for pred_name in predicates:
            predicate = predicate_by_name(pred_name)
            started = time.perf_counter()
            result = solve_on_decomposition(
                d, predicate, MAX_EDGES, prune=args.prune, threads=args.threads
            )
            elapsed_ms = (time.perf_counter() - started) * 1000.0
            writer.writerow(
                [
                    name,
                    glued.vertices,
                    len(glued.edges),
                    width(d),
                    pred_name,
                    result.value,
                    result.stats.pair_compositions,
                    f"{elapsed_ms:.3f}",
                ]
            )
    _emit(buffer.getvalue(), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdkit",
        description="structured decompositions: gluing, width measures, compositional solving",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def add(name, func, **needs):
        p = sub.add_parser(name)
        if needs.get("graph"):
            p.add_argument("-g", "--graph", required=needs["graph"] == "required")
        if needs.get("decomposition"):
            p.add_argument("-d", "--decomposition", required=needs["decomposition"] == "required")
        if needs.get("layering"):
            p.add_argument("-l", "--layering")
        if needs.get("arrow"):
            p.add_argument("--arrow", required=True)
        if needs.get("morphism"):
            p.add_argument("--morphism")
        if needs.get("property"):
            p.add_argument("--property", default=needs["property"])
        if needs.get("objective"):
            p.add_argument("--objective", default="max-edges")
        if needs.get("solver_flags"):
            p.add_argument("--prune", action="store_true")
            p.add_argument("--threads", type=int, default=1)
        if needs.get("exact"):
            p.add_argument("--exact", action="store_true")
        if needs.get("bench_flags"):
            p.add_argument("--config")
            p.add_argument("--generate", type=int, default=0)
            p.add_argument("--seed", type=int, default=0)
        p.add_argument("-o", "--output")
        p.set_defaults(func=func)
        return p

    add("colim", _cmd_colim, decomposition="required")
    add("check", _cmd_check, graph="optional", decomposition="optional")
    add("to-arrow", _cmd_to_arrow, decomposition="required")
    add("from-arrow", _cmd_from_arrow, arrow=True)
    add("restrict", _cmd_restrict, decomposition="required", graph="optional", morphism=True)
    add("chordal", _cmd_chordal, graph="required")
    add("clique-tree", _cmd_clique_tree, graph="required")
    add("treewidth", _cmd_treewidth, graph="required")
    add("co-treewidth", _cmd_co_treewidth, graph="required")
    add(
        "layered-width",
        _cmd_layered_width,
        graph="required",
        layering=True,
        decomposition="optional",
        exact=True,
    )
    add("h-width", _cmd_h_width, decomposition="required", property="bipartite")
    add(
        "solve",
        _cmd_solve,
        graph="optional",
        decomposition="required",
        property="paths",
        objective=True,
        solver_flags=True,
    )
    bench = add("bench", _cmd_bench, bench_flags=True, solver_flags=True)
    bench.add_argument("--property", default=None)
    return parser


def run(argv) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TooLarge as exc:
        _emit_json({"error": str(exc)}, None)
        return 3
    except SdkitError as exc:
        _emit_json({"error": str(exc)}, None)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
