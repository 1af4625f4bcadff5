from .convergence import (
    QuantumMeasureTable,
    quantum_block_entropy_curve,
    quantum_measures,
    entropy_rate_exact,
    redundancy_comparison,
    iid_cost,
)
