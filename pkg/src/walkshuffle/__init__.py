"""Decentralized shuffling of locally-randomized reports via random walks.

The library has three layers:

* graph machinery (:mod:`walkshuffle.graphs`, :mod:`walkshuffle.spectral`,
  :mod:`walkshuffle.walks`) for loading networks, evolving position
  distributions, and simulating multi-round report exchange;
* privacy accounting (:mod:`walkshuffle.accountant`) evaluating the
  closed-form central (epsilon, delta) guarantees of the exchange;
* protocol machinery (:mod:`walkshuffle.ldp`, :mod:`walkshuffle.protocol`)
  with local randomizers and an executable model of the relay protocol.

``walkshuffle.cli`` ties everything together and emits CSV.
"""

__version__ = "0.1.0"

from .graphs import (
    Graph,
    GraphSummary,
    PositionDistribution,
    check_ergodic,
    complete_graph,
    cycle_graph,
    from_edges,
    graph_summary,
    largest_connected_component,
    load_dataset,
    load_edge_list,
    load_manifest,
    path_graph,
    star_graph,
    stationary_distribution,
)
from .spectral import (
    SpectralSummary,
    spectral_summary,
    sum_p_squared_bound,
    tv_upper_bound,
)
from .walks import (
    ReportAllocation,
    WalkTrace,
    allocation_l2_bound,
    delta_distribution,
    evolve_distribution,
    exact_symmetric_distribution,
    expected_dummy_count,
    random_regular_graph,
    rho_star,
    sample_single_reports,
    simulate_allocation,
    simulate_walks,
)
from .accountant import (
    AmplificationResult,
    LocalPrivacyParams,
    amplify_all_stationary,
    amplify_all_symmetric,
    amplify_single,
    compose_heterogeneous,
    delta0_threshold,
    empirical_epsilon_from_allocation,
    single_simplified_epsilon,
)
from .ldp import (
    RandomizerConfig,
    UnitVector,
    mean_estimation_experiment,
    privunit_params,
    privunit_randomize,
    randomized_response,
)
from .protocol import (
    AdversaryView,
    EnvelopeAccessError,
    ProtocolState,
    ProtocolTranscript,
    SealedEnvelope,
    adversary_view,
    run_protocol,
    validate_transcript,
)
