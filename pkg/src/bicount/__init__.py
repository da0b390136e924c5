"""Parallel (p,q)-biclique counting for bipartite graphs.

The pipeline: load or synthesize a graph, optionally reorder a layer for
bitmap locality, pick the anchor layer, build the 2-hop index and its
truncated-bitmap encoding, then count with the hybrid search engine,
directly or per partition under a memory budget.
"""

from .engine import (
    CountReport,
    EngineConfig,
    SearchStructures,
    count_bicliques,
    prepare_structures,
)
from .graph import (
    AnchorChoice,
    BipartiteGraph,
    PriorityOrder,
    TwoHopIndex,
    build_two_hop_index,
    directed_from_undirected,
    from_edges,
    load_edge_list,
    relabel,
    select_anchor_layer,
    transpose,
    vertex_priority,
    wedge_mass,
)
from .htb import (
    Htb,
    HtbSlice,
    dump_htb,
    htb_build,
    htb_decode,
    htb_intersect,
    htb_intersect_count,
    load_htb,
)
from .oracle import brute_force_count, closed_form_count, enumerate_bicliques
from .partition import (
    PartitionError,
    PartitionSet,
    budgeted_partition,
    closure_subgraph,
    count_partitioned,
    entry_weight,
    write_manifest,
)
from .reorder import (
    ReorderResult,
    border_reorder,
    degree_order,
    write_permutation,
)
from .cli import main, run_pipeline, synth_generate

__version__ = "0.1.0"

__all__ = [
    "AnchorChoice",
    "BipartiteGraph",
    "CountReport",
    "EngineConfig",
    "Htb",
    "HtbSlice",
    "PartitionError",
    "PartitionSet",
    "PriorityOrder",
    "ReorderResult",
    "SearchStructures",
    "TwoHopIndex",
    "border_reorder",
    "brute_force_count",
    "budgeted_partition",
    "build_two_hop_index",
    "closed_form_count",
    "closure_subgraph",
    "count_bicliques",
    "count_partitioned",
    "degree_order",
    "directed_from_undirected",
    "dump_htb",
    "entry_weight",
    "enumerate_bicliques",
    "from_edges",
    "htb_build",
    "htb_decode",
    "htb_intersect",
    "htb_intersect_count",
    "load_edge_list",
    "load_htb",
    "main",
    "prepare_structures",
    "relabel",
    "run_pipeline",
    "select_anchor_layer",
    "synth_generate",
    "transpose",
    "vertex_priority",
    "wedge_mass",
    "write_manifest",
    "write_permutation",
    "__version__",
]
