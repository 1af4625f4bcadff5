from .beliefs import (
    BeliefState,
    UncertaintyCurve,
    belief_filter,
    next_outcome_distribution,
    state_uncertainty_curve,
    sync_info,
    theta_sweep,
)
from .machine import BeliefMachine, belief_machine, export_machine
