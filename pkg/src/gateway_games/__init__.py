"""Gateway placement games on static graphs.

Nodes choose whether to host a gateway at price alpha; gateways collapse
to a single hub, shortcutting every pair of hosts.  The package covers
exact cost evaluation for the sum and max objectives, improving-response
dynamics with convergence classification, equilibrium constructions and
counterexample gadgets, exact optimum search, price of anarchy/stability
reports, and set-cover reductions, plus a CLI over all of it.
"""

from .constructions import (
    GeneratedGame,
    IrCycleParams,
    ReductionArtifact,
    SetCoverInstance,
    construct_max_ne,
    gen_ir_cycle,
    gen_max_line,
    gen_max_poa_star,
    gen_non_wag,
    gen_sum_poa_star,
    min_cover_size,
    parse_set_cover,
    reduce_set_cover,
)
from .dynamics import (
    BestGain,
    BudgetExhausted,
    Classification,
    ConditionReport,
    ConvergedToNE,
    CycleDetected,
    DynamicsTrace,
    FixedSequence,
    LineConditionReport,
    OpensOnly,
    RandomSeeded,
    RoundRobin,
    Stalled,
    StateGraphReport,
    build_ir_state_graph,
    default_step_budget,
    reaches_ne_from,
    replay_trace,
    resolve_exhaustive_limit,
    run_dynamics,
    verify_cycle_conditions,
    verify_max_line_conditions,
)
from .errors import (
    ConstructionNotEquilibrium,
    DisconnectedGraph,
    ElementUncovered,
    GatewayGameError,
    GirthTooSmall,
    NodeIdOutOfRange,
    ParameterOutOfRange,
    SelfLoop,
    StateSpaceTooLarge,
)
from .game import (
    CostReport,
    GameConfig,
    Move,
    MoveKind,
    StrategyProfile,
    Variant,
    comm_distance,
    cost_report,
    evaluate_move,
    frac_str,
    improving_moves,
    is_nash_equilibrium,
    parse_fraction,
    private_cost,
    social_cost,
)
from .graphs import (
    UNBOUNDED,
    ComponentSet,
    DistanceOracle,
    Graph,
    GraphMetrics,
    all_pairs_distances,
    bfs_levels,
    build_graph,
    components_without,
    graph_to_edge_text,
    graph_to_json,
    metrics,
    multi_source_levels,
    parse_graph,
)
from .optimization import (
    BoundedCardinality,
    EquilibriumCatalog,
    FullEnumeration,
    OptimumResult,
    RegimeReport,
    brute_force_optimum,
    catalog_to_csv,
    enumerate_equilibria,
    greedy_gateways,
    poa_regime_report,
    twin_classes,
)

__version__ = "0.1.0"

__all__ = [
    "UNBOUNDED",
    "BestGain",
    "BoundedCardinality",
    "BudgetExhausted",
    "Classification",
    "ComponentSet",
    "ConditionReport",
    "ConstructionNotEquilibrium",
    "ConvergedToNE",
    "CostReport",
    "CycleDetected",
    "DisconnectedGraph",
    "DistanceOracle",
    "DynamicsTrace",
    "ElementUncovered",
    "EquilibriumCatalog",
    "FixedSequence",
    "FullEnumeration",
    "GameConfig",
    "GatewayGameError",
    "GeneratedGame",
    "GirthTooSmall",
    "Graph",
    "GraphMetrics",
    "IrCycleParams",
    "LineConditionReport",
    "Move",
    "MoveKind",
    "NodeIdOutOfRange",
    "OpensOnly",
    "OptimumResult",
    "ParameterOutOfRange",
    "RandomSeeded",
    "ReductionArtifact",
    "RegimeReport",
    "RoundRobin",
    "SelfLoop",
    "SetCoverInstance",
    "Stalled",
    "StateGraphReport",
    "StateSpaceTooLarge",
    "StrategyProfile",
    "Variant",
    "all_pairs_distances",
    "bfs_levels",
    "build_graph",
    "build_ir_state_graph",
    "brute_force_optimum",
    "catalog_to_csv",
    "comm_distance",
    "components_without",
    "construct_max_ne",
    "cost_report",
    "default_step_budget",
    "enumerate_equilibria",
    "evaluate_move",
    "frac_str",
    "gen_ir_cycle",
    "gen_max_line",
    "gen_max_poa_star",
    "gen_non_wag",
    "gen_sum_poa_star",
    "graph_to_edge_text",
    "graph_to_json",
    "greedy_gateways",
    "improving_moves",
    "is_nash_equilibrium",
    "metrics",
    "min_cover_size",
    "multi_source_levels",
    "parse_fraction",
    "parse_graph",
    "parse_set_cover",
    "poa_regime_report",
    "private_cost",
    "reaches_ne_from",
    "reduce_set_cover",
    "replay_trace",
    "resolve_exhaustive_limit",
    "run_dynamics",
    "social_cost",
    "twin_classes",
    "verify_cycle_conditions",
    "verify_max_line_conditions",
]
