from .sampling import SampleRecord, sample_realizations, empirical_word_frequencies
from .reconstruction import (
    ReconstructionReport,
    PAULI,
    REST_OUTCOME,
    physical_projection,
    mub_probabilities,
    reconstruct_qubit,
    pauli_expectations,
    reconstruct_pair,
    alphabet_povm,
    project_simplex,
    known_alphabet_infer,
    source_from_density,
    source_from_words,
    reconstruct_source,
    min_predictive_measurement,
    iid_tomography,
    sampled_qubit_tomography,
    pair_state,
    conditional_gain,
)
