"""Community detection in general stochastic block models.

Generation, CH-divergence recovery thresholds, sphere-comparison partial
recovery, degree-profiling exact recovery, Poisson testing oracles, and
relabeling-invariant evaluation.
"""

from .divergence import (
    ch_divergence,
    d_t,
    divergence_matrix,
    exact_recovery_solvable,
    finest_partition,
    profile,
)
from .evaluate import agreement, exact_match, sweep
from .graph import load_graph, sample_graph, save_graph, split_edges
from .model import (
    OverlapModel,
    Regime,
    build_params,
    load_params,
    osbm_to_sbm,
    save_params,
)
from .poisson import empirical_exponent, map_error_bounds, overlap_sum
from .profiling import degree_profiling, group_classify, map_classify
from .spectral import eigen_summary, snr, theorem1_conditions
from .sphere import default_hyperparams, reliable_classification

__version__ = "0.1.0"
