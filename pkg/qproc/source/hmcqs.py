import logging

import numpy as np
import scipy.linalg

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterator, Mapping, Optional, Tuple

from ..classical import HMC, WordDistribution, enumerate_words, distribution_from_arrays
from ..errors import ResourceCapError, ValidationError
from ..qcore import (
    DensityMatrix,
    PureState,
    WeightedEnsemble,
    gram_spectrum,
    positive_spectrum,
    spectrum_entropy,
)
from ..settings import GRAM_CAP, UNIFILAR_TOL, VALIDATION_TOL, WORD_CAP
from ..utils import dense_dim_cap

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class QuantumAlphabet:
    """
    Named pure states a source can emit, all of dimension `dim`.

    :param states: tuple, (name, PureState) pairs in a fixed order
    """
    states: Tuple[Tuple[str, PureState], ...]

    def __post_init__(self):
        states = tuple((str(name), state) for name, state in self.states)
        if not states:
            raise ValidationError("A quantum alphabet needs at least one state")
        names = [name for name, _ in states]
        if len(set(names)) != len(names):
            raise ValidationError(f"Quantum alphabet names must be distinct: {names}")
        dims = {state.dim for _, state in states}
        if len(dims) != 1:
            raise ValidationError(f"Quantum alphabet mixes dimensions {sorted(dims)}")
        object.__setattr__(self, "states", states)
        overlaps = np.abs(self.overlaps)
        np.fill_diagonal(overlaps, 0.0)
        if np.any(overlaps >= 1.0 - VALIDATION_TOL):
            i, j = np.unravel_index(np.argmax(overlaps), overlaps.shape)
            raise ValidationError(f"States {names[i]!r} and {names[j]!r} are the same ray")

    @classmethod
    def from_mapping(cls, states: Mapping[str, PureState]) -> "QuantumAlphabet":
        return cls(tuple(states.items()))

    @property
    def dim(self) -> int:
        return self.states[0][1].dim

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.states)

    def __len__(self) -> int:
        return len(self.states)

    def __getitem__(self, name: str) -> PureState:
        for key, state in self.states:
            if key == name:
                return state
        raise KeyError(name)

    @cached_property
    def amplitudes(self) -> np.ndarray:
        """Kets as rows, shape (|Q|, d)."""
        return np.array([state.amplitudes for _, state in self.states])

    @cached_property
    def overlaps(self) -> np.ndarray:
        """Matrix of inner products ⟨ψ_x|ψ_x'⟩."""
        return self.amplitudes.conj() @ self.amplitudes.T


@dataclass(frozen=True, eq=False)
class HMCQS:
    """
    Hidden Markov chain quantum source.

    The underlying HMC emits symbol x on each transition and the source
    emits the pure state |ψ_x⟩ in its place.

    :param underlying: HMC, the classical hidden-state chain
    :param alphabet: QuantumAlphabet, keyed by the HMC's symbol labels
    :param name: str, identifier used in reports and protocol lookup
    :param params: dict, construction parameters of presets
    """
    underlying: HMC
    alphabet: QuantumAlphabet
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        symbols = set(self.underlying.alphabet.symbols)
        if symbols != set(self.alphabet.names):
            raise ValidationError(
                f"Source symbols {sorted(symbols)} do not match quantum alphabet {sorted(self.alphabet.names)}")

    @property
    def states(self) -> Tuple[str, ...]:
        return self.underlying.states

    @property
    def symbols(self) -> Tuple[str, ...]:
        return self.underlying.alphabet.symbols

    @property
    def dim(self) -> int:
        return self.alphabet.dim

    @property
    def stationary(self) -> np.ndarray:
        return self.underlying.stationary

    @cached_property
    def amplitudes(self) -> np.ndarray:
        """Emitted kets in the HMC's symbol order, shape (|X|, d)."""
        return np.array([self.alphabet[x].amplitudes for x in self.symbols])

    @cached_property
    def overlaps(self) -> np.ndarray:
        return self.amplitudes.conj() @ self.amplitudes.T

    @cached_property
    def symbol_projectors(self) -> np.ndarray:
        """|ψ_x⟩⟨ψ_x| in symbol order, shape (|X|, d, d)."""
        return np.einsum("xi,xj->xij", self.amplitudes, self.amplitudes.conj())

    def describe(self) -> str:
        if not self.params:
            return self.name
        args = "&".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.name}?{args}"


def build_source(hmc: HMC, alphabet: QuantumAlphabet, name: str = "custom", params: Optional[dict] = None) -> HMCQS:
    """
    Attach a quantum alphabet to an HMC.

    :param hmc: HMC, validated (ergodic) chain
    :param alphabet: QuantumAlphabet, one state per HMC symbol
    :return: HMCQS
    :raises ValidationError: on symbol mismatch
    """
    return HMCQS(hmc, alphabet, name=name, params=dict(params or {}))


class BlockState:
    """
    Separable ensemble of the length-ℓ emitted words of a source.

    Only support words are stored. The dense density matrix is built on
    demand and only when d^ℓ does not exceed the dense cap.
    """

    def __init__(self, source: HMCQS, words: np.ndarray, probs: np.ndarray, dense_cap: Optional[int] = None):
        self.source = source
        self.words = words
        self.probs = probs
        self.length = words.shape[1]
        self.dense_cap = dense_dim_cap() if dense_cap is None else dense_cap

    @property
    def dims(self) -> Tuple[int, ...]:
        return (self.source.dim,) * self.length if self.length else (1,)

    @property
    def dimension(self) -> int:
        return int(self.source.dim ** self.length)

    def word_distribution(self) -> WordDistribution:
        return distribution_from_arrays(self.source.symbols, self.words, self.probs)

    def kets(self) -> np.ndarray:
        """Product kets |ψ_w⟩ as rows, shape (N, d^ℓ)."""
        kets = np.ones((self.words.shape[0], 1), dtype=complex)
        for t in range(self.length):
            factor = self.source.amplitudes[self.words[:, t]]
            kets = (kets[:, :, None] * factor[:, None, :]).reshape(kets.shape[0], -1)
        return kets

    @cached_property
    def ensemble(self) -> WeightedEnsemble:
        return WeightedEnsemble(tuple(
            (p, PureState(ket, self.dims)) for p, ket in zip(self.probs, self.kets())))

    @cached_property
    def dense(self) -> Optional[DensityMatrix]:
        if self.dimension > self.dense_cap:
            return None
        weighted = np.sqrt(self.probs)[:, None] * self.kets()
        return DensityMatrix(weighted.T @ weighted.conj(), self.dims, check=False)

    def gram(self) -> np.ndarray:
        """Weighted Gram matrix √(p_w p_w') Π_t ⟨ψ_{w_t}|ψ_{w'_t}⟩."""
        root = np.sqrt(self.probs)
        gram = np.outer(root, root).astype(complex)
        for t in range(self.length):
            column = self.words[:, t]
            gram *= self.source.overlaps[column[:, None], column[None, :]]
        return gram

    @cached_property
    def spectrum(self) -> np.ndarray:
        n, dimension = self.words.shape[0], self.dimension
        if min(n, dimension) > GRAM_CAP:
            raise ResourceCapError(
                f"Block of length {self.length} needs a {min(n, dimension)}-dimensional eigenproblem (cap {GRAM_CAP})")
        if n <= dimension:
            logger.debug("Length %d: Gram path with %d words", self.length, n)
            return positive_spectrum(scipy.linalg.eigvalsh(self.gram()))
        logger.debug("Length %d: dense path of dimension %d", self.length, dimension)
        return gram_spectrum(np.sqrt(self.probs)[:, None] * self.kets())

    def entropy(self) -> float:
        return spectrum_entropy(self.spectrum)


def block_states(src: HMCQS, max_length: int, cap: int = WORD_CAP,
                 dense_cap: Optional[int] = None) -> Iterator[BlockState]:
    """
    Stationary block states for ℓ = 0..max_length, sharing one enumeration.

    :param src: HMCQS
    :param max_length: int, largest block length
    :param cap: int, maximum number of stored support words
    :param dense_cap: int, optional, dense-dimension cap override
    :return: iterator of BlockState
    """
    if max_length < 0:
        raise ValidationError(f"Block length must be nonnegative, got {max_length}")
    dense_cap = dense_dim_cap() if dense_cap is None else dense_cap
    for _, words, alphas in enumerate_words(src.underlying.stacked, src.stationary, max_length, cap=cap):
        yield BlockState(src, words, alphas.sum(axis=1), dense_cap)


def block_state(src: HMCQS, length: int, cap: int = WORD_CAP, dense_cap: Optional[int] = None) -> BlockState:
    """
    ρ_{0:ℓ} = Σ_w Pr(w) |ψ_w⟩⟨ψ_w| over the support words of length ℓ.

    :param src: HMCQS
    :param length: int, ℓ ≥ 0
    :return: BlockState
    """
    *_, last = block_states(src, length, cap=cap, dense_cap=dense_cap)
    return last


def emitted_mixtures(src: HMCQS) -> Dict[str, DensityMatrix]:
    """
    Per-state emitted mixture ρ_i = Σ_{x,j} T^x_ij |ψ_x⟩⟨ψ_x|.

    :param src: HMCQS
    :return: dict, state name to DensityMatrix
    """
    weights = src.underlying.stacked.sum(axis=2)
    mixtures = np.einsum("xi,xab->iab", weights, src.symbol_projectors)
    return {state: DensityMatrix(mixtures[i], check=False) for i, state in enumerate(src.states)}


@dataclass
class UnifilarWitness:
    """
    Outcome of the quantum-unifilarity test.

    ``projectors[state][successor]`` is the projector onto the span of the
    states emitted from `state` towards `successor`; an ``"other"`` entry
    completes the PVM when the spans do not fill the space. When the test
    fails, ``counterexample`` names the offending state, successors and
    symbols.
    """
    unifilar: bool
    projectors: Dict[str, Dict[str, np.ndarray]] = field(default_factory=dict)
    counterexample: Optional[dict] = None

    def __bool__(self) -> bool:
        return self.unifilar


OTHER_OUTCOME = "other"


def is_quantum_unifilar(src: HMCQS, tol: float = UNIFILAR_TOL) -> UnifilarWitness:
    """
    Check whether, from every state, emissions towards different successors
    are mutually orthogonal, so a PVM identifies the successor.

    :param src: HMCQS
    :param tol: float, orthogonality tolerance
    :return: UnifilarWitness, truthy when unifilar
    """
    stacked = src.underlying.stacked
    projectors = {}
    for i, state in enumerate(src.states):
        reach = {}
        for j, successor in enumerate(src.states):
            emitted = np.flatnonzero(stacked[:, i, j] > 0)
            if emitted.size:
                reach[successor] = emitted
        successors = list(reach)
        for a, first in enumerate(successors):
            for second in successors[a + 1:]:
                block = np.abs(src.overlaps[np.ix_(reach[first], reach[second])])
                if np.any(block > tol):
                    x, y = np.unravel_index(np.argmax(block), block.shape)
                    return UnifilarWitness(False, counterexample={
                        "state": state,
                        "successors": [first, second],
                        "symbols": [src.symbols[reach[first][x]], src.symbols[reach[second][y]]],
                        "overlap": float(block[x, y]),
                    })
        per_state = {}
        for successor, emitted in reach.items():
            basis = scipy.linalg.orth(src.amplitudes[emitted].T)
            per_state[successor] = basis @ basis.conj().T
        rest = np.eye(src.dim) - sum(per_state.values())
        if np.linalg.norm(rest) > tol:
            per_state[OTHER_OUTCOME] = rest
        projectors[state] = per_state
    return UnifilarWitness(True, projectors=projectors)
