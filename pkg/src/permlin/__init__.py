"""permlin: rank-bounded invariant and equivariant linear maps under
permutation actions — component census, closed-form squared-error fits, and
weight-shared encoder/decoder factorizations."""

from .perms import (
    Permutation,
    CycleDecomposition,
    Partition,
    parse_permutation,
    cycle_decomposition,
    induced_partition,
    permutation_matrix,
    finest_common_coarsening,
    replication_matrix,
)
from .linalg import svd, numeric_rank, circulant, realize, unrealize, weighted_inner, psd_sqrt
from .spectral import (
    BlockSpectrum,
    BaseChange,
    eigen_multiplicities,
    commutant_dimension,
    complex_base_change,
    real_base_change,
)
from .invariant import (
    InvariantSpace,
    invariant_space,
    psi_compress,
    psi_expand,
    invariant_dimension,
    invariant_degree,
    is_singular_point,
    fit_invariant,
    invariant_autoencoder,
    invariant_project,
)
from .equivariant import (
    RankVector,
    ComponentDescriptor,
    Parameterization,
    WeightSharingReport,
    commutant_basis,
    equivariant_project,
    check_circulant_blocks,
    is_equivariant,
    count_components,
    enumerate_components,
    describe_component,
    component_dimension,
    component_degree_complex,
    classify_component,
    parameterize_component,
    make_rank_vector,
    free_parameter_count,
)
from .optimize import (
    FitResult,
    eckart_young,
    sel_to_target,
    fit_rank_bounded,
    fit_realization_block,
    fit_equivariant,
    ed_degrees,
)
from .datasets import demo_shift_dataset, horizontal_shift_permutation

__version__ = "0.1.0"
