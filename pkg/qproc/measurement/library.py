"""
Preset measurement protocols and the synchronize-then-track compiler.
"""
import logging

import numpy as np

from typing import Callable, Dict, Mapping, Optional, Tuple

from ..errors import ValidationError
from ..qcore import PureState
from ..settings import BELIEF_MERGE_TOL, PROTOCOL_SEARCH_DEPTH, PRUNE_TOL, SYNC_ENTROPY_TOL
from ..source import HMCQS, OTHER_OUTCOME, is_quantum_unifilar
from .instruments import POVM, computational_basis, pure_pvm, standard_instruments
from .protocols import DQMP

logger = logging.getLogger(__name__)

# A witness measures in one source state and names the successor of each outcome.
Witness = Tuple[POVM, Mapping[str, str]]


def _protocol(name: str, start: str, table: Mapping[str, Tuple[str, Mapping[str, str]]]) -> DQMP:
    registry = standard_instruments()
    states = tuple(table)
    povms = {state: registry[povm] for state, (povm, _) in table.items()}
    delta = {(state, y): target for state, (_, moves) in table.items() for y, target in moves.items()}
    return DQMP(states, start, povms, delta, name=name)


def three_symbol_qgm_sync() -> DQMP:
    """M01 until a '0' reveals state A, then M01 in A and M± in B."""
    return _protocol("3symbol-qgm-sync", "T0", {
        "T0": ("M01", {"0": "A", "1": "T0"}),
        "A": ("M01", {"0": "A", "1": "B"}),
        "B": ("Mpm", {"+": "A"}),
    })


def unifilar_qubit_adaptive() -> DQMP:
    """Track the unifilar qubit source from a known start in A."""
    return _protocol("unifilar-qubit-adaptive", "A", {
        "A": ("M01", {"0": "B", "1": "A"}),
        "B": ("Mpm", {"+": "A", "-": "B"}),
    })


QUTRIT_RECURRENT = {
    "A": ("M012", {"0": "A", "1": "B"}),
    "B": ("Mpm2", {"+": "B", "-": "C"}),
    "C": ("M012", {"2": "A"}),
}


def qutrit_sync(search: str) -> DQMP:
    """
    Repeat `search` until a '2' reveals state A, then track the qutrit source.

    :param search: str, "M012" or "Mpm2"
    """
    name = {"M012": "qutrit-012-sync", "Mpm2": "qutrit-pm2-sync"}[search]
    labels = standard_instruments()[search].labels
    search_moves = {y: ("A" if y == "2" else "T") for y in labels}
    return _protocol(name, "T", {"T": (search, search_moves), **QUTRIT_RECURRENT})


def qutrit_adaptive() -> DQMP:
    """
    Three transient states that switch between M012 and M±2 to reach the
    recurrent tracker faster than either fixed search.

    It synchronizes on '2', '1+' and '1−'; on the unifilar qutrit 𝐒̂ is
    about 2.855 bits at L = 10.
    """
    return _protocol("qutrit-adaptive", "T0", {
        "T0": ("M012", {"2": "A", "1": "T1", "0": "T2"}),
        "T1": ("Mpm2", {"+": "B", "-": "C", "2": "A"}),
        "T2": ("M012", {"0": "T2", "1": "T1", "2": "A"}),
        **QUTRIT_RECURRENT,
    })


def unifilar_witnesses(src: HMCQS) -> Dict[str, Witness]:
    """
    Per-state PVMs whose outcomes are the successor states.

    :raises ValidationError: when the source is not quantum unifilar
    """
    witness = is_quantum_unifilar(src)
    if not witness:
        raise ValidationError(f"{src.describe()} is not quantum unifilar ({witness.counterexample})")
    witnesses = {}
    for state, projectors in witness.projectors.items():
        povm = POVM(tuple(projectors.items()), name=f"witness[{state}]")
        witnesses[state] = (povm, {s: s for s in projectors if s != OTHER_OUTCOME})
    return witnesses


def symbol_witnesses(src: HMCQS) -> Dict[str, Witness]:
    """
    Per-state PVMs labelled by the emitted symbol, for sources whose states
    each emit a single symbol (periodic sources).
    """
    stacked = src.underlying.stacked
    witnesses = {}
    for i, state in enumerate(src.states):
        emitted = np.flatnonzero(stacked[:, i, :].sum(axis=1) > 0)
        if emitted.size != 1:
            raise ValidationError(f"State {state!r} emits {emitted.size} symbols; symbol witnesses need exactly one")
        x = emitted[0]
        successor = src.states[int(np.flatnonzero(stacked[x, i] > 0)[0])]
        symbol = src.symbols[x]
        witnesses[state] = (pure_pvm(PureState(src.amplitudes[x]), symbol), {symbol: successor})
    return witnesses


def _synchronized(belief: np.ndarray) -> Optional[int]:
    top = int(np.argmax(belief))
    return top if belief[top] >= 1.0 - SYNC_ENTROPY_TOL else None


def tracking_protocol(
        src: HMCQS,
        search: POVM,
        witnesses: Optional[Mapping[str, Witness]] = None,
        depth: int = PROTOCOL_SEARCH_DEPTH,
        merge_tol: float = BELIEF_MERGE_TOL,
        init: Optional[np.ndarray] = None,
        name: Optional[str] = None) -> DQMP:
    """
    Compile a synchronize-then-track protocol.

    Transient states ``search0``, ``search1``... are the merged beliefs
    reached by repeating `search`; a belief concentrated on one source state
    hands off to that state's witness, after which the witnesses follow the
    source. Beliefs still unsynchronized at `depth` loop back to the nearest
    search state, so the compiled protocol is always total. Witness
    outcomes with no named successor cannot occur once synchronized; they
    loop on their own state so the tracking states stay closed.

    :param src: HMCQS
    :param search: POVM used while the observer is unsynchronized
    :param witnesses: mapping, source state to (POVM, outcome → successor);
        defaults to the quantum-unifilar witnesses
    :param depth: int, deepest belief explored
    :param merge_tol: float, L∞ distance under which beliefs merge
    :param init: array, optional, belief the search starts from (π by default)
    :return: DQMP whose tracking states are named after the source states
    """
    witnesses = unifilar_witnesses(src) if witnesses is None else dict(witnesses)
    if set(witnesses) != set(src.states):
        raise ValidationError(f"Witnesses must cover every source state {list(src.states)}")
    if search.dim != src.dim:
        raise ValidationError(f"Search POVM dimension {search.dim} does not match source dimension {src.dim}")
    start = src.stationary if init is None else np.asarray(init, dtype=float)
    branches = np.einsum("yx,xij->yij", search.likelihoods(src.amplitudes), src.underlying.stacked)

    beliefs = [start / start.sum()]
    delta = {}
    frontier = [0]
    for level in range(depth + 1):
        next_frontier = []
        for node in frontier:
            for label, matrix in zip(search.labels, branches):
                child = beliefs[node] @ matrix
                mass = child.sum()
                if mass <= PRUNE_TOL:
                    delta[(f"search{node}", label)] = f"search{node}"
                    continue
                child = child / mass
                synced = _synchronized(child)
                if synced is not None:
                    delta[(f"search{node}", label)] = src.states[synced]
                    continue
                distances = [np.max(np.abs(child - b)) for b in beliefs]
                nearest = int(np.argmin(distances))
                if distances[nearest] < merge_tol or level == depth:
                    if distances[nearest] >= merge_tol:
                        logger.info("Belief search under %s closed at depth %d by approximation", search.name, depth)
                    delta[(f"search{node}", label)] = f"search{nearest}"
                    continue
                beliefs.append(child)
                delta[(f"search{node}", label)] = f"search{len(beliefs) - 1}"
                next_frontier.append(len(beliefs) - 1)
        frontier = next_frontier
        if not frontier:
            break

    search_states = [f"search{k}" for k in range(len(beliefs))]
    povms = {state: search for state in search_states}
    for state, (povm, successors) in witnesses.items():
        povms[state] = povm
        for label in povm.labels:
            delta[(state, label)] = successors.get(label, state)
    logger.debug("Tracking protocol for %s: %d search states", src.describe(), len(search_states))
    return DQMP(tuple(search_states) + tuple(src.states), "search0", povms, delta,
                name=name or f"tracking[{search.name}]")


def period_adaptive(src: HMCQS) -> DQMP:
    """M01 search followed by symbol witnesses on a periodic source."""
    return tracking_protocol(src, standard_instruments()["M01"], symbol_witnesses(src), name="period-adaptive")


ADAPTIVE = {
    "qutrit": "qutrit-adaptive",
    "3symbol-qgm": "3symbol-qgm-sync",
    "unifilar-qubit": "unifilar-qubit-adaptive",
    "period": "period-adaptive",
}


def preset_protocols(src: Optional[HMCQS] = None) -> Dict[str, Callable[[], DQMP]]:
    """
    Registry of preset protocol factories.

    Source-dependent entries (``period-adaptive``, ``witness-tracking`` and
    the ``adaptive`` alias) are present only when a source is given.

    :param src: HMCQS, optional
    :return: dict, name to zero-argument factory
    """
    registry = {
        "3symbol-qgm-sync": three_symbol_qgm_sync,
        "unifilar-qubit-adaptive": unifilar_qubit_adaptive,
        "qutrit-012-sync": lambda: qutrit_sync("M012"),
        "qutrit-pm2-sync": lambda: qutrit_sync("Mpm2"),
        "qutrit-adaptive": qutrit_adaptive,
    }
    if src is None:
        return registry
    if src.name == "period":
        registry["period-adaptive"] = lambda: period_adaptive(src)
    registry["witness-tracking"] = lambda: tracking_protocol(src, computational_basis(src.dim), name="witness-tracking")
    if src.name in ADAPTIVE:
        registry["adaptive"] = registry[ADAPTIVE[src.name]]
    return registry
