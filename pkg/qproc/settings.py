# Numerical tolerances
VALIDATION_TOL = 1e-10
STOCHASTIC_TOL = 1e-10
POVM_SUM_TOL = 1e-9
EIGEN_FLOOR = 1e-12
SUPPORT_TOL = 1e-10
PRUNE_TOL = 1e-14
CONSISTENCY_TOL = 1e-9
ERGODIC_TOL = 1e-8
MARKOV_ORDER_TOL = 1e-9
UNIFILAR_TOL = 1e-9
BELIEF_MERGE_TOL = 1e-9
SYNC_ENTROPY_TOL = 1e-12
CONVERGENCE_TOL = 1e-4
DIVERGENCE_TOL = 1e-3
ALPHABET_POVM_MARGIN = 1e-12

# Resource caps
DENSE_DIM_CAP = 4096
WORD_CAP = 2 ** 20
GRAM_CAP = 8192
MACHINE_NODE_CAP = 4096
PROTOCOL_SEARCH_DEPTH = 12

# Estimators
TRANSIENT_CONVENTION = "boundary"
PVM_GRID = (180, 360)
NNLS_SUM_WEIGHT = 1e3
SAMPLE_CHUNK = 4096

# Environment
CAP_DIM_ENV = "QPROC_CAP_DIM"

OUTPUT_SCHEMA_VERSION = "1"
