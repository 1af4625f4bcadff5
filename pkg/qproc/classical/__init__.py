from .hmc import (
    Alphabet,
    WordDistribution,
    HMC,
    Word,
    hmc_stationary,
    hmc_word_distribution,
    hmc_word_distributions,
    enumerate_words,
    distribution_from_arrays,
)
from .measures import (
    ClassicalMeasureTable,
    classical_measures,
    measures_from_block_entropies,
    hmc_measures,
    check_consistency,
    entropy_gains,
    predictability_gains,
    excess_entropies,
    transient_informations,
    detect_markov_order,
    TRANSIENT_CONVENTIONS,
)
