from .instruments import (
    POVM,
    born_distribution,
    projective,
    computational_basis,
    m_theta,
    sic_povm,
    pure_pvm,
    standard_instruments,
    instrument,
)
from .protocols import (
    DQMP,
    ProtocolKernel,
    MeasuredProcess,
    enumerate_outcome_words,
    measured_word_distributions,
    measured_word_dist,
    measure_process,
    measured_measures,
    recurrent_word_dist,
    direct_word_probability,
    synchronization_depth,
)
from .library import (
    preset_protocols,
    tracking_protocol,
    unifilar_witnesses,
    symbol_witnesses,
    three_symbol_qgm_sync,
    unifilar_qubit_adaptive,
    qutrit_sync,
    qutrit_adaptive,
    period_adaptive,
    ADAPTIVE,
)
from .loader import load_protocol, parse_protocol_spec
from .surface import sweep_surface
