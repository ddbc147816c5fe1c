"""Betti numbers of clique complexes: clique enumeration, boundary and Gram
operators, exact homology, block-encoding checks and a filtered stochastic
rank estimator."""

from .block_encoding import (
    BlockEncodingError,
    BlockEncodingMatrix,
    compose_lcu,
    compose_product,
    compose_tensor,
    dilate,
    encode_gram,
    identity_encoding,
    scale,
    verify_action,
)
from .chain import (
    BoundaryMatrix,
    ChainError,
    GramOperator,
    betti_numbers,
    boundary_matrix,
    combinatorial_laplacian,
    exact_betti,
    exact_kernel_dim,
    exact_rank,
    gram_operator,
    svd_rank,
)
from .cliques import (
    CliqueError,
    CliqueList,
    build_simplex_sets,
    enumerate_arboricity_style,
    enumerate_bruteforce,
    enumerate_degeneracy_style,
    proposition_bound,
)
from .graph import (
    EdgeListParseError,
    Graph,
    GraphError,
    GraphStats,
    arboricity_bounds,
    degeneracy_ordering,
    graph_stats,
    parse_edge_list,
    read_edge_list,
)
from .pipelines import (
    BettiCurve,
    DensityMatrix,
    DistanceGraphSpec,
    ImageGrid,
    PipelineError,
    PointCloud,
    cost_model,
    entanglement_distances,
    filtration_sweep,
    image_threshold_graph,
    mutual_information_matrix,
    reduced_density,
    rips_graph,
    threshold_graph,
)
from .rank import (
    BettiEstimate,
    EstimationError,
    KernelFractionEstimate,
    RankEstimatorConfig,
    estimate_betti,
    estimate_kernel_fraction,
    plan_probes,
)
from .simplex import SimplexSet, colex_rank, decode_simplex, encode_simplex

__version__ = "0.1.0"
