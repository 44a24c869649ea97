"""Control-configuration analysis for fuzzy cognitive maps."""

from .analysis import (
    ControllabilityScale,
    PerspectiveDiff,
    RankedConfiguration,
    ScenarioDiff,
    analyze,
    compare_perspectives,
    compare_scenarios,
    node_frequencies,
    rank_configurations,
    score_configuration,
)
from .controllability import (
    AnalysisCancelledError,
    AnalysisReport,
    Budget,
    ControlConfiguration,
    EmptyConfigError,
    EmptyGraphError,
    NodeClassification,
    SelfLoopsPresentError,
    brute_force_configurations,
    classify_nodes,
    enumerate_configurations,
    is_configuration,
    parse_report,
    reachability_warnings,
    report_to_json,
    structural_controllability_rank,
)
from .dynamics import (
    MappingKind,
    MappingSpec,
    StateVector,
    Trajectory,
    consistency_ranking,
    iterate_to_fixed_point,
    rank_factors,
)
from .matching import BipartiteGraph, Matching, hopcroft_karp, max_matching_brute, to_bipartite
from .model import (
    Controllability,
    Factor,
    FcmGraph,
    GraphSchemaError,
    Influence,
    Perspective,
    Sign,
    Strength,
    WeightMatrix,
    adjacency_matrix,
    detect_self_loops,
    export_dot,
    parse_graph,
    serialize_graph,
    weakly_connected_components,
    weight_of,
)

__version__ = "0.1.0"
