"""
Example sources used throughout the analyses.

Each factory returns a validated `HMCQS`. Transition probabilities given as
simple fractions are written with `fractions.Fraction` so that the
regression values do not drift with float formatting.
"""
import logging

import numpy as np

from fractions import Fraction
from typing import Callable, Dict, Optional

from ..classical import HMC, Alphabet
from ..errors import ValidationError
from ..qcore import PureState, basis_state, pure_state_from_angle
from ..settings import VALIDATION_TOL
from .hmcqs import HMCQS, QuantumAlphabet, build_source

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)

SQRT_HALF = 1 / np.sqrt(2)

KET_ZERO = basis_state(2, 0)
KET_ONE = basis_state(2, 1)
KET_PLUS = PureState([SQRT_HALF, SQRT_HALF])
KET_MINUS = PureState([SQRT_HALF, -SQRT_HALF])

QUBIT_TEMPLATE_STATES = {"0": KET_ZERO, "1": KET_ONE, "+": KET_PLUS, "-": KET_MINUS}


def _check_range(name: str, value: float, low: float, high: float):
    if not low - 1e-12 <= value <= high + 1e-12:
        raise ValidationError(f"Parameter {name}={value} outside [{low}, {high}]")


def _chain(states, edges) -> HMC:
    """
    Build an HMC from edges (source, symbol, target, probability).
    """
    index = {state: i for i, state in enumerate(states)}
    symbols = []
    for _, symbol, _, _ in edges:
        if symbol not in symbols:
            symbols.append(symbol)
    transitions = {symbol: np.zeros((len(states), len(states))) for symbol in symbols}
    for origin, symbol, target, probability in edges:
        transitions[symbol][index[origin], index[target]] += float(probability)
    return HMC(tuple(states), Alphabet(tuple(symbols)), transitions)


def _merge_rays(edges, kets):
    """
    Relabel each symbol whose state is the same ray as an earlier symbol's.

    Degenerate parameters (φ = 0, or a template letter equal to |ψ(φ)⟩)
    make two letters emit one state. The first letter is kept and `_chain`
    sums the parallel edges.
    """
    representative = {}
    for _, symbol, _, _ in edges:
        if symbol in representative:
            continue
        representative[symbol] = next(
            (kept for kept in dict.fromkeys(representative.values())
             if abs(kets[kept].overlap(kets[symbol])) >= 1.0 - VALIDATION_TOL),
            symbol)
        if representative[symbol] != symbol:
            logger.debug("Symbol %r emits the same state as %r; merging", symbol, representative[symbol])
    return [(origin, representative[symbol], target, p) for origin, symbol, target, p in edges]


def _source(name, params, states, edges, kets) -> HMCQS:
    hmc = _chain(states, _merge_rays(edges, kets))
    alphabet = QuantumAlphabet(tuple((x, kets[x]) for x in hmc.alphabet))
    return build_source(hmc, alphabet, name=name, params=params)


def iid(state: Optional[str] = "mixed", p: float = 0.5, phi: float = np.pi) -> HMCQS:
    """
    Single-state source emitting |0⟩ with probability p and |ψ(φ)⟩ otherwise.

    ``state="mixed"`` is the maximally-mixed fair source (p = ½, φ = π) and
    ``state="pure"`` always emits |0⟩.
    """
    if state == "pure":
        return _source("iid", {"state": "pure"}, ["A"], [("A", "0", "A", 1)], {"0": KET_ZERO})
    if state == "mixed":
        return _source("iid", {"state": "mixed"}, ["A"],
                       [("A", "0", "A", HALF), ("A", "1", "A", HALF)],
                       {"0": KET_ZERO, "1": KET_ONE})
    if state not in (None, ""):
        raise ValidationError(f"Unknown i.i.d. state {state!r}; use 'mixed' or 'pure'")
    _check_range("p", p, 0.0, 1.0)
    _check_range("phi", phi, 0.0, np.pi)
    edges = [("A", "0", "A", p), ("A", "f", "A", 1 - p)]
    return _source("iid", {"p": p, "phi": phi}, ["A"], edges,
                   {"0": KET_ZERO, "f": pure_state_from_angle(phi)})


def periodic(word: str = "00f", phi: float = np.pi) -> HMCQS:
    """
    Period-p source cycling through a template word.

    Template letters are '0', '1', '+', '-' for the fixed qubit states and
    'f' for |ψ(φ)⟩. State k emits letter k of the word.
    """
    if not word:
        raise ValidationError("Periodic template word must be nonempty")
    _check_range("phi", phi, 0.0, np.pi)
    kets = dict(QUBIT_TEMPLATE_STATES, f=pure_state_from_angle(phi))
    unknown = set(word) - set(kets)
    if unknown:
        raise ValidationError(f"Unknown template letters {sorted(unknown)}; use 0, 1, +, - or f")
    states = [f"P{k}" for k in range(len(word))]
    edges = [(states[k], letter, states[(k + 1) % len(word)], 1) for k, letter in enumerate(word)]
    return _source("period", {"word": word, "phi": phi}, states, edges, kets)


def qgm(phi: float = np.pi / 2) -> HMCQS:
    """
    |0⟩-|ψ(φ)⟩ Quantum Golden Mean source.

    A emits |0⟩ and stays, or emits |ψ(φ)⟩ and moves to B, each with
    probability ½; B emits |0⟩ and returns to A. φ = π recovers the
    classical Golden Mean process, φ = π/2 the |0⟩-|+⟩ source.
    """
    _check_range("phi", phi, 0.0, np.pi)
    edges = [("A", "0", "A", HALF), ("A", "f", "B", HALF), ("B", "0", "A", 1)]
    return _source("qgm", {"phi": phi}, ["A", "B"], edges,
                   {"0": KET_ZERO, "f": pure_state_from_angle(phi)})


def three_symbol_qgm() -> HMCQS:
    """A emits |0⟩ (stay) or |1⟩ (to B) with probability ½; B emits |+⟩ back to A."""
    edges = [("A", "0", "A", HALF), ("A", "1", "B", HALF), ("B", "+", "A", 1)]
    return _source("3symbol-qgm", {}, ["A", "B"], edges, QUBIT_TEMPLATE_STATES)


def unifilar_qubit(p: float = float(THIRD)) -> HMCQS:
    """
    Unifilar qubit source.

    A emits |0⟩ towards B with probability 1−p, or |1⟩ staying in A with
    probability p; B emits |+⟩ towards A with probability 1−p, or |−⟩
    staying in B with probability p. Emissions from a state towards
    different successors are orthogonal.
    """
    _check_range("p", p, 0.0, 1.0)
    edges = [("A", "0", "B", 1 - p), ("A", "1", "A", p),
             ("B", "+", "A", 1 - p), ("B", "-", "B", p)]
    return _source("unifilar-qubit", {"p": p}, ["A", "B"], edges, QUBIT_TEMPLATE_STATES)


def nonunifilar_qubit(p: float = float(THIRD)) -> HMCQS:
    """
    Nonunifilar qubit source.

    A emits |0⟩ towards B (1−p) or |+⟩ staying in A (p); B emits |1⟩ towards
    A (1−p) or |−⟩ staying in B (p). The successor cannot be read off from
    the emitted qubit.
    """
    _check_range("p", p, 0.0, 1.0)
    edges = [("A", "0", "B", 1 - p), ("A", "+", "A", p),
             ("B", "1", "A", 1 - p), ("B", "-", "B", p)]
    return _source("nonunifilar-qubit", {"p": p}, ["A", "B"], edges, QUBIT_TEMPLATE_STATES)


def unifilar_qutrit() -> HMCQS:
    """
    Unifilar qutrit source.

    A emits |0⟩ (stay) or |1⟩ (to B); B emits |+⟩ (stay) or |−⟩ (to C); C
    emits |2⟩ back to A. Branches have probability ½.
    """
    kets = {
        "0": basis_state(3, 0),
        "1": basis_state(3, 1),
        "2": basis_state(3, 2),
        "+": PureState([SQRT_HALF, SQRT_HALF, 0]),
        "-": PureState([SQRT_HALF, -SQRT_HALF, 0]),
    }
    edges = [("A", "0", "A", HALF), ("A", "1", "B", HALF),
             ("B", "+", "B", HALF), ("B", "-", "C", HALF),
             ("C", "2", "A", 1)]
    return _source("qutrit", {}, ["A", "B", "C"], edges, kets)


def _period_with(default_word: str, default_phi: float) -> Callable[..., HMCQS]:
    def factory(word: str = default_word, phi: float = default_phi) -> HMCQS:
        return periodic(word=word, phi=phi)
    factory.__doc__ = periodic.__doc__
    return factory


def presets() -> Dict[str, Callable[..., HMCQS]]:
    """
    Registry of preset source factories keyed by name (aliases included).

    :return: dict, name to factory accepting the preset's parameters
    """
    return {
        "iid": iid,
        "period": periodic,
        "period3": _period_with("00f", np.pi),
        "period5": _period_with("0000f", 3 * np.pi / 4),
        "qgm": qgm,
        "3symbol-qgm": three_symbol_qgm,
        "unifilar-qubit": unifilar_qubit,
        "unifilar": unifilar_qubit,
        "nonunifilar-qubit": nonunifilar_qubit,
        "nonunifilar": nonunifilar_qubit,
        "qutrit": unifilar_qutrit,
        "unifilar-qutrit": unifilar_qutrit,
    }
