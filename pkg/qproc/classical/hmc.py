import logging

import numpy as np
import scipy.linalg

from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

from ..errors import NonErgodicSourceError, ResourceCapError, ValidationError
from ..settings import (
    CONSISTENCY_TOL,
    ERGODIC_TOL,
    PRUNE_TOL,
    STOCHASTIC_TOL,
    WORD_CAP,
)
from ..qcore import shannon_entropy
from ..utils import format_word

logger = logging.getLogger(__name__)

Word = Tuple[str, ...]


@dataclass(frozen=True, eq=False)
class Alphabet:
    """Ordered set of distinct symbol labels."""
    symbols: Tuple[str, ...]

    def __post_init__(self):
        symbols = tuple(str(s) for s in self.symbols)
        if not symbols:
            raise ValidationError("An alphabet needs at least one symbol")
        if len(set(symbols)) != len(symbols):
            raise ValidationError(f"Alphabet has duplicate symbols: {symbols}")
        object.__setattr__(self, "symbols", symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __contains__(self, symbol) -> bool:
        return symbol in self.symbols

    def index(self, symbol: str) -> int:
        return self.symbols.index(symbol)


@dataclass(frozen=True, eq=False)
class WordDistribution:
    """
    Probabilities of the length-ℓ words of a process.

    :param length: int, ℓ ≥ 0
    :param probs: mapping, word (tuple of labels) to probability; absent
        words have probability zero
    """
    length: int
    probs: Mapping[Word, float]

    def __post_init__(self):
        if self.length < 0:
            raise ValidationError(f"Word length must be nonnegative, got {self.length}")
        probs = {tuple(word): float(p) for word, p in self.probs.items()}
        if any(len(word) != self.length for word in probs):
            raise ValidationError(f"All words must have length {self.length}")
        if any(p < -CONSISTENCY_TOL for p in probs.values()):
            raise ValidationError("Word probabilities must be nonnegative")
        total = sum(probs.values())
        if abs(total - 1.0) > CONSISTENCY_TOL:
            raise ValidationError(f"Word probabilities for length {self.length} sum to {total:.12g}, not 1")
        object.__setattr__(self, "probs", probs)

    def __getitem__(self, word) -> float:
        return self.probs.get(tuple(word), 0.0)

    def __len__(self) -> int:
        return len(self.probs)

    def entropy(self) -> float:
        return shannon_entropy(list(self.probs.values()))

    def marginal(self) -> "WordDistribution":
        """Drop the last symbol of every word."""
        return self._collapse(lambda word: word[:-1])

    def suffix_marginal(self) -> "WordDistribution":
        """Drop the first symbol of every word."""
        return self._collapse(lambda word: word[1:])

    def _collapse(self, key) -> "WordDistribution":
        if self.length == 0:
            raise ValidationError("Cannot marginalize the empty word")
        collapsed = defaultdict(float)
        for word, p in self.probs.items():
            collapsed[key(word)] += p
        return WordDistribution(self.length - 1, dict(collapsed))

    def distance(self, other: "WordDistribution") -> float:
        """Largest absolute probability difference over both supports."""
        words = set(self.probs) | set(other.probs)
        return max((abs(self[w] - other[w]) for w in words), default=0.0)

    def to_dict(self) -> Dict[str, float]:
        return {format_word(word): p for word, p in sorted(self.probs.items())}


def _stationary_vector(total: np.ndarray) -> np.ndarray:
    values, vectors = scipy.linalg.eig(total.T)
    unit = np.flatnonzero(np.abs(values - 1.0) < ERGODIC_TOL)
    if unit.size != 1:
        raise NonErgodicSourceError(
            f"Chain is not ergodic: eigenvalue 1 has multiplicity {unit.size}")
    pi = np.real(vectors[:, unit[0]])
    pi = pi / pi.sum()
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


@dataclass(frozen=True, eq=False)
class HMC:
    """
    Edge-emitting hidden Markov chain.

    ``transitions[x][i, j]`` is the probability of emitting symbol x while
    moving from state i to state j.

    :param states: tuple, internal state names
    :param alphabet: Alphabet, emitted symbols
    :param transitions: mapping, symbol to states×states matrix
    """
    states: Tuple[str, ...]
    alphabet: Alphabet
    transitions: Mapping[str, np.ndarray]

    def __post_init__(self):
        states = tuple(str(s) for s in self.states)
        if not states or len(set(states)) != len(states):
            raise ValidationError(f"States must be nonempty and distinct: {states}")
        alphabet = self.alphabet if isinstance(self.alphabet, Alphabet) else Alphabet(tuple(self.alphabet))
        if set(self.transitions) != set(alphabet.symbols):
            raise ValidationError(
                f"Transition symbols {sorted(self.transitions)} do not match alphabet {list(alphabet.symbols)}")
        n = len(states)
        transitions = {}
        for symbol in alphabet:
            matrix = np.array(self.transitions[symbol], dtype=float)
            if matrix.shape != (n, n):
                raise ValidationError(f"Transition matrix for {symbol!r} must be {n}x{n}, got {matrix.shape}")
            if np.any(matrix < 0):
                raise ValidationError(f"Transition matrix for {symbol!r} has negative entries")
            matrix.setflags(write=False)
            transitions[symbol] = matrix
        rows = sum(transitions.values()).sum(axis=1)
        if np.any(np.abs(rows - 1.0) > STOCHASTIC_TOL):
            raise ValidationError(f"Summed transition matrix is not row-stochastic (row sums {rows})")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "transitions", transitions)
        _ = self.stationary

    @property
    def total(self) -> np.ndarray:
        return sum(self.transitions.values())

    @cached_property
    def stacked(self) -> np.ndarray:
        """Transition matrices in alphabet order, shape (|X|, n, n)."""
        return np.stack([self.transitions[x] for x in self.alphabet])

    @cached_property
    def stationary(self) -> np.ndarray:
        return _stationary_vector(self.total)

    def state_index(self, state: str) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise ValidationError(f"Unknown state {state!r}")


def hmc_stationary(m: HMC) -> np.ndarray:
    """
    Stationary distribution π = π Σ_x T^x.

    :param m: HMC
    :return: array, probability vector over ``m.states``
    :raises NonErgodicSourceError: when the distribution is not unique
    """
    return m.stationary


def enumerate_words(
        matrices: np.ndarray,
        init: np.ndarray,
        max_length: int,
        cap: int = WORD_CAP,
        prune: float = PRUNE_TOL) -> Iterator[Tuple[int, np.ndarray, np.ndarray]]:
    """
    Forward enumeration of the support words of a linear-emission model.

    At each length the forward vectors α_w = init · M^{x_0} ⋯ M^{x_{ℓ−1}} are
    kept for every word with α_w·𝟙 above the pruning threshold.

    :param matrices: array, shape (|X|, n, n), one matrix per symbol
    :param init: array, initial row vector over n states
    :param max_length: int, largest length enumerated
    :param cap: int, maximum number of stored words
    :param prune: float, words at or below this probability are dropped
    :return: iterator of (ℓ, words as int array (N, ℓ), forward vectors (N, n))
    """
    words = np.zeros((1, 0), dtype=int)
    alphas = np.asarray(init, dtype=float)[None, :]
    yield 0, words, alphas
    for length in range(1, max_length + 1):
        extended = np.einsum("wi,xij->wxj", alphas, matrices)
        probs = extended.sum(axis=2)
        keep_w, keep_x = np.nonzero(probs > prune)
        if keep_w.size > cap:
            raise ResourceCapError(
                f"Length {length} has {keep_w.size} support words, above the cap of {cap}")
        words = np.concatenate([words[keep_w], keep_x[:, None]], axis=1)
        alphas = extended[keep_w, keep_x]
        logger.debug("Length %d: %d support words", length, words.shape[0])
        yield length, words, alphas


def distribution_from_arrays(symbols: Tuple[str, ...], words: np.ndarray, probs: np.ndarray) -> WordDistribution:
    length = words.shape[1]
    table = {tuple(symbols[k] for k in row): float(p) for row, p in zip(words, probs)}
    return WordDistribution(length, table)


def hmc_word_distributions(
        m: HMC,
        max_length: int,
        init: Optional[np.ndarray] = None,
        cap: int = WORD_CAP) -> List[WordDistribution]:
    """
    Word distributions for every length 0..max_length.

    :param m: HMC
    :param max_length: int, largest word length
    :param init: array, optional, initial state distribution (π by default)
    :param cap: int, maximum number of stored words per length
    :return: list, WordDistribution indexed by length
    """
    if max_length < 0:
        raise ValidationError(f"Word length must be nonnegative, got {max_length}")
    init = m.stationary if init is None else np.asarray(init, dtype=float)
    return [
        distribution_from_arrays(m.alphabet.symbols, words, alphas.sum(axis=1))
        for _, words, alphas in enumerate_words(m.stacked, init, max_length, cap=cap)
    ]


def hmc_word_distribution(m: HMC, length: int, cap: int = WORD_CAP) -> WordDistribution:
    """
    Pr(w) = π T^{x_0} ⋯ T^{x_{ℓ−1}} 𝟙 over the support words of length ℓ.

    :param m: HMC
    :param length: int, ℓ ≥ 0
    :param cap: int, maximum number of stored words
    :return: WordDistribution
    """
    return hmc_word_distributions(m, length, cap=cap)[-1]
