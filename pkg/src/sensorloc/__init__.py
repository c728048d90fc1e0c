"""Connectivity-based sensor network localization toolkit.

Generates random geometric sensor networks with probabilistic detection,
localizes them with a centralized relative-map algorithm (shortest paths
plus classic metric MDS) and a distributed one (anchor flooding plus
lateration), and verifies the associated error and spectral bounds by
Monte-Carlo simulation.
"""

from .geometry import AnchorLayout, RANDOM_SUBSET, Seed, UNIT_SIMPLEX, make_anchors, place_uniform
from .harness import ExperimentConfig, SweepResult, run_sweep, run_verification, simulate_once
from .hopterrain import (
    FloodResult,
    LocalizationResult,
    NodeStatus,
    SingularGeometryError,
    build_lateration,
    distance_flood,
    dv_hop_flood,
    hop_terrain,
    solve_least_squares,
)
from .mds import (
    DegenerateEmbeddingWarning,
    EigenConvergenceError,
    SpectralDecomposition,
    double_center,
    mds_embed,
    mds_map,
    symmetric_eigen,
)
from .metrics import (
    BoundSet,
    GershgorinBounds,
    bound_radii,
    check_hop_bound,
    configuration_distance,
    gershgorin_eigen_bounds,
    min_singular_value_centered,
    optimal_transform_error,
    rmse,
    spectral_norm,
)
from .network import (
    CONNECTIVITY,
    RANGE,
    DetectionModel,
    MeasurementGraph,
    build_graph,
    detection_probability,
    is_connected,
    load_edge_list,
    save_edge_list,
)
from .paths import (
    AnchorDistanceTable,
    HopDistanceMatrix,
    UnreachablePairError,
    all_pairs_hops,
    all_pairs_weighted,
    anchor_hops,
    squared_distance_matrix,
)

__version__ = "0.1.0"
