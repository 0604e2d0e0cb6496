"""Longest cycles in sparse binomial random graphs.

The package samples G(n, c/n) graphs, computes the strong-core red/blue/black
coloring, solves the per-component blue-endpoint path-cover optimization
exactly, derives the resulting longest-cycle upper bound, and constructs
cycles meeting it through a contraction + rotation pipeline.  Local
approximations estimate the scaling limit of (longest cycle)/n, and closed
forms evaluate the limiting cycle-spectrum probabilities.  Small-instance
brute-force oracles back every nontrivial claim in the test suite.
"""

from .errors import (
    InternalInvariantError,
    InvalidColoringError,
    InvalidParameterError,
    LongCycleError,
    SizeCapError,
    UnsupportedParameterError,
    UnsupportedRegimeError,
)
from .estimator import (
    EstimateReport,
    LocalValue,
    estimate_f,
    estimate_rho,
    l_cnk,
    local_phi_k,
    mc_spectrum,
    spectrum_prob,
    weakly_pancyclic_prob,
)
from .graph import (
    Graph,
    Seed,
    components,
    degree_profile,
    induced_subgraph,
    read_edge_list,
    sample_gnp,
    write_edge_list,
)
from .hamilton import (
    ContractedInstance,
    CycleResult,
    HamiltonInstance,
    LongestCyclePipeline,
    MergeParams,
    MergeResult,
    build_gamma,
    cover_paths_via_matchings,
    cycle_of_deficiency,
    decompose,
    deficiency_sweep,
    longest_cycle,
    posa_merge,
    validate_cycle,
)
from .matching import (
    matching_number_brute,
    maximum_matching,
    maximum_matching_mates,
    odd_components,
    tutte_berge_witness,
)
from .oracle import (
    SpectrumReport,
    brute_longest_cycle,
    brute_longest_cycle_dfs,
    brute_longest_path,
    brute_phi,
    count_cycles,
    cycle_spectrum,
)
from .pathcover import (
    CoverFamily,
    PathCover,
    build_cover_family,
    extract_singles,
    greedy_cover,
    longest_cycle_upper_bound,
    optimal_path_cover,
    validate_cover,
)
from .strongcore import (
    BLACK,
    BLUE,
    RED,
    Coloring,
    RBStats,
    check_red_fraction,
    component_stats,
    rb_subgraph,
    strong_core_coloring,
    verify_strong_core,
)

__version__ = "0.1.0"
