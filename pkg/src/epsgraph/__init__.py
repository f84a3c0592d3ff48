"""Neighbor graphs over vector datasets by sorted Hamming joins.

Vectors are hashed to bit strings with sign random projections; all string
pairs within a small Hamming distance are enumerated exactly by sorting
block-masked copies of the strings; independent replicates drive the
missing-edge ratio below a user-chosen budget; and an exact cosine filter
makes the output sound.  See the README for the full tour.
"""

from .bitpool import (BitStringPool, block_partition, hamming_distance,
                      kept_word_mask, masked_key_chunks, masked_key_table)
from .edges import EdgeList
from .errors import DataError, EpsGraphError, InfeasibleError
from .exact import (ErrorReport, brute_force_cosine, brute_force_hamming,
                    measure_errors)
from .hamming_join import (PairSet, SortScratch, enumerate_pairs,
                           grouped_radix_sort, mask_count)
from .lsh import (ProjectionSpec, VectorDataset, angle, as_dataset,
                  center_normalize, collision_prob, cosine_distance,
                  cosine_radius_from_euclidean, euclidean_radius, project)
from .io import (read_dataset, read_edges, read_pool, write_dataset,
                 write_edges, write_pool)
from .pipeline import (CandidateSet, GraphStats, NeighborGraph, build_graph,
                       build_graph_hamming, build_graph_lsh_only,
                       dedup_across_replicates, filter_exact)
from .tuning import (AutoTuneReport, MsmParams, OutputEstimate, auto_params,
                     auto_params_detailed, estimate_output_size,
                     min_replicates, missing_edge_bound)

__version__ = "0.1.0"

__all__ = [
    "AutoTuneReport",
    "BitStringPool",
    "CandidateSet",
    "DataError",
    "EdgeList",
    "EpsGraphError",
    "ErrorReport",
    "GraphStats",
    "InfeasibleError",
    "MsmParams",
    "NeighborGraph",
    "OutputEstimate",
    "PairSet",
    "ProjectionSpec",
    "SortScratch",
    "VectorDataset",
    "angle",
    "as_dataset",
    "auto_params",
    "auto_params_detailed",
    "block_partition",
    "brute_force_cosine",
    "brute_force_hamming",
    "build_graph",
    "build_graph_hamming",
    "build_graph_lsh_only",
    "center_normalize",
    "collision_prob",
    "cosine_distance",
    "cosine_radius_from_euclidean",
    "dedup_across_replicates",
    "enumerate_pairs",
    "estimate_output_size",
    "euclidean_radius",
    "filter_exact",
    "grouped_radix_sort",
    "hamming_distance",
    "kept_word_mask",
    "mask_count",
    "masked_key_chunks",
    "masked_key_table",
    "measure_errors",
    "min_replicates",
    "missing_edge_bound",
    "project",
    "read_dataset",
    "read_edges",
    "read_pool",
    "write_dataset",
    "write_edges",
    "write_pool",
]
