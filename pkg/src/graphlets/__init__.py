"""Graphlet decomposition of integer-weighted undirected networks."""

__version__ = "0.1.0"

from .cliques import (
    BinaryGraph,
    DecompositionError,
    ExpandableBasisError,
    NoUniqueEdgeError,
    ThresholdSweepReport,
    candidate_basis,
    exact_decompose,
    is_non_expandable,
    maximal_cliques,
    union_graph,
    unique_edge_witnesses,
)
from .core import (
    CliqueBasis,
    GraphletModel,
    RateMatrix,
    WeightedNetwork,
    network_power,
    rate_matrix,
    tau_norm,
    total_weight,
)
from .em import (
    ApproximateModel,
    CoverageError,
    EmConfig,
    EmResult,
    EmState,
    em_step,
    fit,
    log_likelihood,
    prune,
    truncate_to_accuracy,
    truncate_to_count,
)
from .evaluation import EvalReport, evaluate, k_error, l1_error, match_bases, mu_error, support_error, tau_error
from .pipeline import Decomposition, decompose
from .synth import RejectionCapError, SynthConfig, sample_model, sample_network
from .theory import (
    AccuracyCurve,
    accuracy_curve,
    binary_entropy,
    candidate_count_bound,
    expected_accuracy,
    expected_accuracy_mc,
    order_statistic_means,
    redundancy_bound,
)
