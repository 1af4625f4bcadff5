import logging

import numpy as np

from dataclasses import dataclass

from ..classical import ClassicalMeasureTable, hmc_measures, measures_from_block_entropies
from ..errors import ValidationError
from ..qcore import von_neumann_entropy
from ..settings import MARKOV_ORDER_TOL, TRANSIENT_CONVENTION, WORD_CAP
from ..source import HMCQS, block_states, emitted_mixtures, is_quantum_unifilar

logger = logging.getLogger(__name__)


@dataclass
class QuantumMeasureTable(ClassicalMeasureTable):
    """
    Von Neumann block-entropy hierarchy S(ℓ), ΔS, Δ²S, s(ℓ), Ê_q, T̂_q.

    Same layout as the classical table with the qudit dimension d in place
    of the alphabet size, so ΔS(0) = log₂ d and Ĝ_q = ŝ − log₂ d.
    """

    @property
    def dim(self) -> int:
        return self.alphabet_size

    def to_dict(self) -> dict:
        return {
            "L": self.max_length,
            "dim": self.dim,
            "entropy_rate": self.rate,
            "excess_entropy": self.excess,
            "transient_information": self.transient,
            "redundancy": self.redundancy,
            "total_predictability": self.total_predictability,
            "markov_order": self.markov_order_label,
            "tolerance": self.tolerance,
            "transient_convention": self.transient_convention,
            "curves": {
                "S": self.block_entropy.tolist(),
                "dS": self.entropy_gain.tolist(),
                "d2S": self.predictability_gain.tolist(),
                "E": self.excess_entropy.tolist(),
                "T": self.transient_information.tolist(),
            },
            **self.extra,
        }


def quantum_block_entropy_curve(src: HMCQS, max_length: int, cap: int = WORD_CAP) -> np.ndarray:
    """
    S(ℓ) for ℓ = 0..L, with S(0) = 0.

    :param src: HMCQS
    :param max_length: int, L
    :param cap: int, word cap for the shared enumeration
    :return: array of length L+1, bits
    """
    curve = np.array([block.entropy() for block in block_states(src, max_length, cap=cap)])
    logger.debug("Block entropy curve of %s up to L=%d: %s", src.describe(), max_length, curve)
    return curve


def quantum_measures(
        src: HMCQS,
        max_length: int,
        tol: float = MARKOV_ORDER_TOL,
        transient: str = TRANSIENT_CONVENTION,
        cap: int = WORD_CAP) -> QuantumMeasureTable:
    """
    Quantum entropy-convergence hierarchy of a source at finite L.

    :param src: HMCQS
    :param max_length: int, L ≥ 2
    :param tol: float, quantum Markov-order tolerance
    :param transient: str, "boundary" or "standard" transient convention
    :return: QuantumMeasureTable
    """
    if max_length < 2:
        raise ValidationError(f"Quantum measures need L >= 2, got {max_length}")
    curve = quantum_block_entropy_curve(src, max_length, cap=cap)
    base = measures_from_block_entropies(curve, src.dim, tol, transient)
    return QuantumMeasureTable(**vars(base))


def entropy_rate_exact(src: HMCQS) -> float:
    """
    Closed-form entropy rate of a quantum-unifilar source,
    s = Σ_i π_i S(ρ_i) with ρ_i the mixture emitted from state i.

    :param src: HMCQS
    :return: float, bits per time step
    :raises ValidationError: when the source is not quantum unifilar
    """
    witness = is_quantum_unifilar(src)
    if not witness:
        raise ValidationError(
            f"No closed form: {src.describe()} is not quantum unifilar ({witness.counterexample})")
    mixtures = emitted_mixtures(src)
    return float(sum(p * von_neumann_entropy(mixtures[state]) for p, state in zip(src.stationary, src.states)))


def redundancy_comparison(src: HMCQS, max_length: int, tol: float = 1e-7) -> dict:
    """
    Compare quantum redundancy with the underlying classical redundancy.

    With d ≥ |X| the quantum redundancy is at least the classical one; with
    d < |X| it is below the classical one plus the rate gap hμ − s.

    :param src: HMCQS
    :param max_length: int, L used for both estimates
    :return: dict with both redundancies, the rate gap, the regime and
        whether the applicable bound holds
    """
    quantum = quantum_measures(src, max_length)
    classical = hmc_measures(src.underlying, max_length)
    gap = classical.rate - quantum.rate
    if src.dim >= len(src.symbols):
        regime, holds = "d >= |X|", quantum.redundancy >= classical.redundancy - tol
    else:
        regime, holds = "d < |X|", quantum.redundancy < classical.redundancy + gap + tol
    return {
        "quantum_redundancy": quantum.redundancy,
        "classical_redundancy": classical.redundancy,
        "rate_gap": gap,
        "regime": regime,
        "bound_holds": bool(holds),
    }


def iid_cost(src: HMCQS, max_length: int) -> dict:
    """
    Overestimate of the entropy rate made by treating the source as i.i.d.:
    the additive gap S(1) − ŝ.

    :param src: HMCQS
    :param max_length: int, L for the rate estimate
    :return: dict with S(1), ŝ and the gap
    """
    table = quantum_measures(src, max_length)
    single = float(table.block_entropy[1])
    return {"single_site_entropy": single, "entropy_rate": table.rate, "gap": single - table.rate}
