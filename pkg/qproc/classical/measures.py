import logging

import numpy as np

from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..errors import ValidationError
from ..settings import CONSISTENCY_TOL, MARKOV_ORDER_TOL, TRANSIENT_CONVENTION, WORD_CAP
from .hmc import HMC, WordDistribution, hmc_word_distributions

logger = logging.getLogger(__name__)

TRANSIENT_CONVENTIONS = ("boundary", "standard")


def entropy_gains(block: np.ndarray, log_size: float) -> np.ndarray:
    """ΔH(ℓ) = H(ℓ) − H(ℓ−1), with the boundary value ΔH(0) = log₂ size."""
    gains = np.empty_like(block)
    gains[0] = log_size
    gains[1:] = np.diff(block)
    return gains


def predictability_gains(gains: np.ndarray) -> np.ndarray:
    """Δ²H(ℓ) = ΔH(ℓ) − ΔH(ℓ−1) for ℓ ≥ 1; entry 0 is 0."""
    second = np.zeros_like(gains)
    second[1:] = np.diff(gains)
    return second


def excess_entropies(block: np.ndarray, gains: np.ndarray) -> np.ndarray:
    """E(ℓ) = H(ℓ) − ℓ·hμ(ℓ)."""
    return block - np.arange(block.size) * gains


def transient_informations(gains: np.ndarray, convention: str = TRANSIENT_CONVENTION) -> np.ndarray:
    """
    T(ℓ) = Σ_{m=1}^{ℓ−1} m [hμ(m) − hμ(ℓ)].

    With the "boundary" convention the m = 1 term uses the boundary gain
    ΔH(0) = log₂ size in place of ΔH(1); "standard" uses ΔH(1).
    """
    if convention not in TRANSIENT_CONVENTIONS:
        raise ValidationError(f"Unknown transient convention {convention!r}; use one of {TRANSIENT_CONVENTIONS}")
    rates = gains.copy()
    if convention == "boundary" and rates.size > 1:
        rates[1] = gains[0]
    transient = np.zeros_like(gains)
    for length in range(2, gains.size):
        m = np.arange(1, length)
        transient[length] = float(np.sum(m * (rates[1:length] - gains[length])))
    return transient


def detect_markov_order(second: np.ndarray, tol: float = MARKOV_ORDER_TOL) -> Optional[int]:
    """
    Smallest ℓ whose block entropy sits on its linear asymptote through the
    largest length: |Δ²H(ℓ′)| < tol for every ℓ+2 ≤ ℓ′ ≤ L.

    :param second: array, Δ²H indexed by length 0..L
    :param tol: float, detection tolerance
    :return: int, or None when no order ≤ L−2 is detected
    """
    top = second.size - 1
    for order in range(0, top - 1):
        if np.all(np.abs(second[order + 2:]) < tol):
            return order
    return None


def check_consistency(dists: Sequence[WordDistribution], tol: float = CONSISTENCY_TOL):
    """
    Verify that the family is indexed by length and that dropping the last
    symbol of each distribution reproduces the previous one.
    """
    for length, dist in enumerate(dists):
        if dist.length != length:
            raise ValidationError(f"Distribution at position {length} has length {dist.length}")
        if length > 0:
            gap = dist.marginal().distance(dists[length - 1])
            if gap > tol:
                raise ValidationError(
                    f"Length-{length} distribution is inconsistent with length {length - 1} (gap {gap:.3g})")


@dataclass
class ClassicalMeasureTable:
    """
    Block-entropy convergence hierarchy of a classical process.

    Per-length arrays are indexed by ℓ = 0..L. Scalars are finite-L
    estimates taken at ℓ = L.
    """
    max_length: int
    alphabet_size: int
    block_entropy: np.ndarray
    entropy_gain: np.ndarray
    predictability_gain: np.ndarray
    entropy_rate: np.ndarray
    excess_entropy: np.ndarray
    transient_information: np.ndarray
    markov_order: Optional[int]
    tolerance: float = MARKOV_ORDER_TOL
    transient_convention: str = TRANSIENT_CONVENTION
    extra: dict = field(default_factory=dict)

    @property
    def rate(self) -> float:
        return float(self.entropy_rate[-1])

    @property
    def excess(self) -> float:
        return float(self.excess_entropy[-1])

    @property
    def transient(self) -> float:
        return float(self.transient_information[-1])

    @property
    def redundancy(self) -> float:
        return float(np.log2(self.alphabet_size) - self.rate)

    @property
    def total_predictability(self) -> float:
        return -self.redundancy

    @property
    def markov_order_label(self) -> str:
        """
        Detected Markov order as text, or the lower bound "> L−2".

        The order is the length from which the block entropy sits on its
        linear asymptote, not the period: a period-3 process whose length-2
        words are already unique reports 2.
        """
        if self.markov_order is None:
            return f"> {max(self.max_length - 2, 0)}"
        return str(self.markov_order)

    def to_dict(self) -> dict:
        return {
            "L": self.max_length,
            "alphabet_size": self.alphabet_size,
            "entropy_rate": self.rate,
            "excess_entropy": self.excess,
            "transient_information": self.transient,
            "redundancy": self.redundancy,
            "total_predictability": self.total_predictability,
            "markov_order": self.markov_order_label,
            "tolerance": self.tolerance,
            "transient_convention": self.transient_convention,
            "curves": {
                "H": self.block_entropy.tolist(),
                "dH": self.entropy_gain.tolist(),
                "d2H": self.predictability_gain.tolist(),
                "E": self.excess_entropy.tolist(),
                "T": self.transient_information.tolist(),
            },
            **self.extra,
        }


def measures_from_block_entropies(
        block: Sequence[float],
        alphabet_size: int,
        tol: float = MARKOV_ORDER_TOL,
        transient: str = TRANSIENT_CONVENTION) -> ClassicalMeasureTable:
    """
    Build the convergence hierarchy from a block-entropy curve H(0..L).

    :param block: sequence, block entropies with H(0) = 0
    :param alphabet_size: int, size of the symbol alphabet
    :param tol: float, Markov-order detection tolerance
    :param transient: str, transient-information convention
    :return: ClassicalMeasureTable
    """
    block = np.asarray(block, dtype=float)
    if block.size < 2:
        raise ValidationError("Need block entropies up to at least L = 1")
    gains = entropy_gains(block, float(np.log2(alphabet_size)))
    second = predictability_gains(gains)
    return ClassicalMeasureTable(
        max_length=block.size - 1,
        alphabet_size=alphabet_size,
        block_entropy=block,
        entropy_gain=gains,
        predictability_gain=second,
        entropy_rate=gains,
        excess_entropy=excess_entropies(block, gains),
        transient_information=transient_informations(gains, transient),
        markov_order=detect_markov_order(second, tol),
        tolerance=tol,
        transient_convention=transient,
    )


def classical_measures(
        dists: Sequence[WordDistribution],
        alphabet_size: int,
        tol: float = MARKOV_ORDER_TOL,
        transient: str = TRANSIENT_CONVENTION,
        check: bool = True) -> ClassicalMeasureTable:
    """
    Block-entropy hierarchy of a stationary process from its word
    distributions.

    :param dists: sequence, WordDistribution for ℓ = 0..L (the ℓ = 0 entry
        may be omitted)
    :param alphabet_size: int, |X|
    :param tol: float, Markov-order tolerance
    :param transient: str, transient-information convention
    :param check: bool, validate marginal consistency
    :return: ClassicalMeasureTable
    """
    dists = list(dists)
    if dists and dists[0].length == 1:
        dists.insert(0, WordDistribution(0, {(): 1.0}))
    if check:
        check_consistency(dists)
    return measures_from_block_entropies([d.entropy() for d in dists], alphabet_size, tol, transient)


def hmc_measures(m: HMC, max_length: int, tol: float = MARKOV_ORDER_TOL,
                 transient: str = TRANSIENT_CONVENTION, cap: int = WORD_CAP) -> ClassicalMeasureTable:
    """Hierarchy of the process generated by an HMC from its stationary distribution."""
    return classical_measures(hmc_word_distributions(m, max_length, cap=cap), len(m.alphabet), tol, transient)
