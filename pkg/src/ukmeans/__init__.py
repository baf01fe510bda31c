"""Clustering of uncertain spatial objects by expected distance.

Objects are discretized pdfs over bounding rectangles; clustering is
k-means on expected distances, accelerated by bounding-box bounds,
Voronoi-cell containment, and group pruning over a bulk-loaded R*-tree.
"""

from .model import (Mbr, DiscretePdf, UncertainObject, ClusterState, Params,
                    PackedObjects, cell_center, cell_centers, cell_pitch,
                    object_centroid, grid_shape, validate_dataset,
                    WORKSPACE_LO, WORKSPACE_HI)
from .distance import (EdCounters, expected_distance, min_dist, max_dist,
                       min_max_dist)
from .pruning import CandidateSet, mmbb_prune, vcp_prune, hybrid_prune
from .rtree import (RStarTree, LeafEntry, InternalEntry, bulk_load,
                    cluster_assign_with_tree, assign_with_aggregates,
                    centroid_of_subtree, check_structure, entry_bytes,
                    fanout_for_block, dump_lines)
from .engine import AssignStrategy, RunResult, init_reps, readjust, run
from .data import (GenSpec, DatasetFormatError, generate, uncertainize,
                   save_dataset, load_dataset, dataset_equal,
                   run_result_record, save_run_result, load_run_result,
                   read_points_csv, rescale_points)

__version__ = "0.1.0"

__all__ = [
    "Mbr", "DiscretePdf", "UncertainObject", "ClusterState", "Params",
    "PackedObjects", "cell_center", "cell_centers", "cell_pitch",
    "object_centroid", "grid_shape",
    "validate_dataset", "WORKSPACE_LO", "WORKSPACE_HI",
    "EdCounters", "expected_distance", "min_dist", "max_dist", "min_max_dist",
    "CandidateSet", "mmbb_prune", "vcp_prune", "hybrid_prune",
    "RStarTree", "LeafEntry", "InternalEntry", "bulk_load",
    "cluster_assign_with_tree", "assign_with_aggregates",
    "centroid_of_subtree", "check_structure", "entry_bytes",
    "fanout_for_block", "dump_lines",
    "AssignStrategy", "RunResult", "init_reps", "readjust", "run",
    "GenSpec", "DatasetFormatError", "generate", "uncertainize",
    "save_dataset", "load_dataset", "dataset_equal",
    "run_result_record", "save_run_result", "load_run_result",
    "read_points_csv", "rescale_points",
]
