"""Degree-conditioned decision pipelines for perfect matchings and packings
in uniform hypergraphs.

The package turns a host hypergraph plus a degree regime into a verdict
(YES / NO / PRECONDITION_UNMET) with a checkable certificate, by composing
reachability, closed vertex partitions, index-vector lattices, and coset
solubility.  Everything runs on exact integer and Fraction arithmetic.
"""

from .hgraph import (
    Hypergraph,
    KhgFormatError,
    load_khg,
    parse_khg,
    render_khg,
    save_khg,
)
from .pattern import (
    DEFAULT_CAP,
    CapExceededError,
    GraphChromaticStats,
    PackingSearch,
    PartiteStats,
    Pattern,
    PatternError,
    completed_partite,
    enumerate_copies,
    graph_stats,
    has_perfect_packing_small,
    partite_stats,
    pattern_from_name,
    spans_copy,
)
from .reach import (
    DENSITY,
    EXACT_ROBUST,
    CumulativeReachability,
    ReachabilityOracle,
    ThresholdSchedule,
    codegree_fastpath_graph,
    codegree_fastpath_hyper,
    count_reachable_sets,
)
from .partition import (
    GoodnessCertificate,
    Partition,
    PartitionPreconditionError,
    SparseNeighborhoodError,
    UnreachableClusterError,
    certify_goodness,
    find_closed_partition,
    parse_partition,
    render_partition,
)
from .lattice import (
    CosetGroup,
    IndexLattice,
    InfiniteGroupError,
    NotInAmbientLatticeError,
    Residue,
    RobustIndexSet,
    coset_group,
    index_vector,
    lattice_from,
    lmax_member,
    member,
    member_witness,
    residue,
    robust_index_set,
)
from .decide import (
    CSTAR_TABLE,
    NO,
    PRECONDITION_UNMET,
    YES,
    Decision,
    PipelineConfig,
    cstar,
    decide_pack_graph,
    decide_pack_partite,
    decide_pm,
    delta_star,
    oracle_decide,
    q_soluble,
    verify_solution,
)
from .gen import (
    GenBudgetError,
    NonLinearInputError,
    gen_complete,
    gen_complete_multipartite_graph,
    gen_complete_partite,
    gen_divisibility_barrier,
    gen_random_dense,
    gen_space_barrier,
    gen_union_of_cliques,
    is_linear,
    reduce_degree_padding,
    reduce_edge_blowup,
    reduce_lin_uplift,
)

__version__ = "0.1.0"

__all__ = [
    "Hypergraph",
    "KhgFormatError",
    "load_khg",
    "parse_khg",
    "render_khg",
    "save_khg",
    "DEFAULT_CAP",
    "CapExceededError",
    "GraphChromaticStats",
    "PackingSearch",
    "PartiteStats",
    "Pattern",
    "PatternError",
    "completed_partite",
    "enumerate_copies",
    "graph_stats",
    "has_perfect_packing_small",
    "partite_stats",
    "pattern_from_name",
    "spans_copy",
    "DENSITY",
    "EXACT_ROBUST",
    "CumulativeReachability",
    "ReachabilityOracle",
    "ThresholdSchedule",
    "codegree_fastpath_graph",
    "codegree_fastpath_hyper",
    "count_reachable_sets",
    "GoodnessCertificate",
    "Partition",
    "PartitionPreconditionError",
    "SparseNeighborhoodError",
    "UnreachableClusterError",
    "certify_goodness",
    "find_closed_partition",
    "parse_partition",
    "render_partition",
    "CosetGroup",
    "IndexLattice",
    "InfiniteGroupError",
    "NotInAmbientLatticeError",
    "Residue",
    "RobustIndexSet",
    "coset_group",
    "index_vector",
    "lattice_from",
    "lmax_member",
    "member",
    "member_witness",
    "residue",
    "robust_index_set",
    "CSTAR_TABLE",
    "NO",
    "PRECONDITION_UNMET",
    "YES",
    "Decision",
    "PipelineConfig",
    "cstar",
    "decide_pack_graph",
    "decide_pack_partite",
    "decide_pm",
    "delta_star",
    "oracle_decide",
    "q_soluble",
    "verify_solution",
    "GenBudgetError",
    "NonLinearInputError",
    "gen_complete",
    "gen_complete_multipartite_graph",
    "gen_complete_partite",
    "gen_divisibility_barrier",
    "gen_random_dense",
    "gen_space_barrier",
    "gen_union_of_cliques",
    "is_linear",
    "reduce_degree_padding",
    "reduce_edge_blowup",
    "reduce_lin_uplift",
]
