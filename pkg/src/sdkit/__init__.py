"""Structured decompositions over finite sets and finite simple graphs.

Colimit gluing, tree-width and friends, the completion/decomposition
correspondence, and a compositional solver for subgraph-closed optimization
problems, all validated against brute-force oracles at desk scale.
"""

from .core import (
    Cospan,
    Diagram,
    FinSet,
    Graph,
    GraphMorphism,
    SetFunction,
    Span,
    colimit,
    complement,
    complete_graph,
    complete_on_function,
    connected_components,
    discrete_graph,
    discrete_on_function,
    find_isomorphism,
    graph_morphisms,
    is_forest,
    is_isomorphic,
    pullback,
    pushout,
    set_functions,
)
from .decomposition import (
    Adhesion,
    ArrowPresentation,
    COMPLETE,
    DISCRETE,
    DecompositionMorphism,
    FINSET,
    GRAPH,
    StructuredDecomposition,
    ValueFunctor,
    canonical_form,
    check_morphism,
    decomposition_from_json,
    decomposition_from_vertex_bags,
    decomposition_to_json,
    evaluate_colimit,
    from_arrow,
    identity_functor,
    identity_morphism,
    is_tame,
    map_decomposition,
    restrict_decomposition,
    to_arrow,
    validate,
)
from .errors import (
    CodomainMismatch,
    EmptyDecomposition,
    IllFormedDiagram,
    NonFinSetValued,
    NonMonicSpan,
    NonTreeShape,
    NotALayering,
    NotATreeDecomposition,
    NotChordal,
    NotMono,
    NotTame,
    SdkitError,
    TooLarge,
    ValidationError,
)
from .solver import (
    BIPARTITE,
    MAX_EDGES,
    MAX_VERTICES,
    MIN_EDGES,
    Objective,
    PATHS,
    PLANAR,
    PropertyPredicate,
    SubPTable,
    Subobject,
    compose,
    compose_optimize,
    enumerate_subp_bruteforce,
    longest_path,
    max_bipartite_subgraph,
    max_planar_subgraph,
    objective_by_name,
    predicate_bipartite,
    predicate_by_name,
    predicate_paths,
    predicate_planar,
    solve_on_decomposition,
)
from .width import (
    Layering,
    chordal_from_decomposition,
    clique_number_chordal,
    complemented_treewidth,
    decomposition_from_chordal,
    h_width,
    is_chordal,
    is_layering,
    is_tree_decomposition,
    layer_join,
    layer_join_on_morphisms,
    layered_treewidth_exact,
    layered_width,
    maximal_cliques_chordal,
    peo,
    tree_decomposition_reading,
    treewidth_exact,
    width,
)

__version__ = "0.1.0"
