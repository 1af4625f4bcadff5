from .states import (
    PureState,
    DensityMatrix,
    WeightedEnsemble,
    tensor,
    tensor_all,
    partial_trace,
    basis_state,
    pure_state_from_angle,
    maximally_mixed,
    random_density_matrix,
)
from .entropy import (
    shannon_entropy,
    spectrum_entropy,
    von_neumann_entropy,
    quantum_relative_entropy,
    conditional_quantum_entropy,
    quantum_mutual_information,
    gram_spectrum,
    positive_spectrum,
    ensemble_spectrum,
)
