from .hmcqs import (
    QuantumAlphabet,
    HMCQS,
    BlockState,
    UnifilarWitness,
    OTHER_OUTCOME,
    build_source,
    block_state,
    block_states,
    emitted_mixtures,
    is_quantum_unifilar,
)
from .presets import (
    presets,
    iid,
    periodic,
    qgm,
    three_symbol_qgm,
    unifilar_qubit,
    nonunifilar_qubit,
    unifilar_qutrit,
    KET_ZERO,
    KET_ONE,
    KET_PLUS,
    KET_MINUS,
)
from .loader import load_source, load_preset, parse_source_spec
