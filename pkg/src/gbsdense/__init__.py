"""Gaussian boson sampling emulator coupled to densest-k-subgraph search.

The package has five layers:

* :mod:`gbsdense.graphs` -- undirected graphs, random generation, greedy
  dense-subgraph baselines.
* :mod:`gbsdense.states` -- Gaussian covariance states: graph embedding,
  symplectic decompositions, spectral (Schmidt-mode) expansion, uniform loss.
* :mod:`gbsdense.sampling` -- hafnians, photon-number and threshold-click
  probabilities, exact subspace enumeration and chain-rule sampling.
* :mod:`gbsdense.search` -- search algorithms driven by the sampler:
  random search, annealing with sampled tweaks, unpostselected search.
* :mod:`gbsdense.experiments` -- config-driven experiment runner with
  deterministic seeding and CSV output, plus the command line front end in
  :mod:`gbsdense.cli`.
"""

from .errors import (
    CapacityError,
    DecompositionError,
    EmptyDistributionError,
    GraphFileError,
    InfeasiblePurityError,
    PurityError,
    ScalingError,
)
from .graphs import (
    Graph,
    SubgraphSelection,
    density,
    erdos_renyi,
    greedy_peel,
    grow_to_k,
    induced_subgraph,
    load_graph,
    plant_clique,
    save_graph,
    shrink_to_k,
)
from .states import (
    CovarianceState,
    SchmidtProfile,
    SqueezerBank,
    SymplecticFactors,
    apply_uniform_loss,
    bloch_messiah,
    embed_graph,
    expand_spectral,
    recover_kernel,
    schmidt_profile,
    symplectic_eigenvalues,
    takagi_real_symmetric,
    williamson_pure,
)
from .search import (
    NoiseConfig,
    RunRecord,
    gbs_tweak,
    prepare_search_state,
    random_search_gbs,
    random_search_uniform,
    raw_search,
    simulated_annealing,
)
from .experiments import (
    ExperimentConfig,
    GraphSpec,
    NoisePoint,
    ResultTable,
    run_experiment,
)
from .sampling import (
    ClickPattern,
    SubspaceDistribution,
    click_count_mass,
    enumerate_subspace,
    expected_clicks,
    hafnian,
    optimize_scaling,
    pnr_probability,
    sample_chain,
    sample_subspace,
    threshold_probability,
    vacuum_probability,
)

__all__ = [
    "Graph",
    "SubgraphSelection",
    "erdos_renyi",
    "density",
    "induced_subgraph",
    "plant_clique",
    "greedy_peel",
    "shrink_to_k",
    "grow_to_k",
    "save_graph",
    "load_graph",
    "CovarianceState",
    "SchmidtProfile",
    "SqueezerBank",
    "SymplecticFactors",
    "embed_graph",
    "recover_kernel",
    "symplectic_eigenvalues",
    "williamson_pure",
    "bloch_messiah",
    "takagi_real_symmetric",
    "schmidt_profile",
    "expand_spectral",
    "apply_uniform_loss",
    "ClickPattern",
    "SubspaceDistribution",
    "hafnian",
    "pnr_probability",
    "vacuum_probability",
    "threshold_probability",
    "expected_clicks",
    "click_count_mass",
    "optimize_scaling",
    "enumerate_subspace",
    "sample_subspace",
    "sample_chain",
    "NoiseConfig",
    "RunRecord",
    "prepare_search_state",
    "random_search_uniform",
    "random_search_gbs",
    "gbs_tweak",
    "simulated_annealing",
    "raw_search",
    "ExperimentConfig",
    "GraphSpec",
    "NoisePoint",
    "ResultTable",
    "run_experiment",
    "CapacityError",
    "DecompositionError",
    "EmptyDistributionError",
    "GraphFileError",
    "InfeasiblePurityError",
    "PurityError",
    "ScalingError",
]

__version__ = "0.1.0"
