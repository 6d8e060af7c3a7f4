"""graphonlab: exact computation on step graphons.

Homomorphism densities, rooted densities, spectra, cut norms, verified
inequality suites, witness constructions, and numerical search for
commonality counterexamples.
"""

from .errors import BudgetError, GraphonLabError, ValidationError
from .graphs import (
    FamilySpec,
    Graph,
    RootedGraph,
    chromatic_number,
    complete_bipartite,
    complete_bipartite_rooted,
    complete_graph,
    construct_family,
    cycle_graph,
    edge_subgraph,
    girth,
    graph_from_json,
    graph_to_json,
    hom_count_bruteforce,
    hom_density_graph,
    is_locally_dense,
    path_graph,
    path_rooted,
    pathed_bipartite,
    pathed_bipartite_rooted,
    petersen_graph,
    random_high_girth,
    rooted_sum,
)
from .graphon import (
    BlockFunction,
    StepGraphon,
    StepKernel,
    complement,
    density,
    deviation,
    graphon_from_json,
    graphon_to_json,
    hom_density,
    independence_ratio,
    refine,
    restrict,
    rooted_density,
    rooted_profile,
    subset_expansion,
    validate_coloring,
)
from .spectral import (
    SpectralData,
    cycle_density_spectral,
    decompose,
    estimate_report,
    path_density_spectral,
    project,
)
from .cutnorm import (
    CutWitness,
    c4_deviation_bound,
    counting_lemma_bound,
    cut_norm_bruteforce,
    cut_norm_exact,
    sandwich_check,
)
from .lemmas import (
    LEMMA_IDS,
    LemmaInstance,
    OmegaAlphaConstants,
    omega_alpha,
    omega_alpha_check,
    random_suite,
    verify,
)
from .witness import (
    WitnessChain,
    build_target,
    build_witness,
    build_witness_chain,
    classify_subset,
    group_predicates,
    validate_regime,
)
from .commonality import (
    SearchState,
    commonality_value,
    gradient,
    k_common_value,
    search_counterexample,
    theorem_regime_check,
)

__version__ = "0.1.0"
