import logging

import numpy as np
import scipy.linalg
import scipy.stats

from scipy.special import entr
from typing import Iterable, Tuple

from ..errors import ValidationError
from ..settings import EIGEN_FLOOR, SUPPORT_TOL
from .states import DensityMatrix, WeightedEnsemble, partial_trace

logger = logging.getLogger(__name__)

LN2 = np.log(2.0)


def shannon_entropy(probs) -> float:
    """
    Shannon entropy in bits, with 0·log 0 = 0.

    :param probs: array-like, probabilities (need not be normalized to
        machine precision)
    :return: float, entropy in bits
    """
    probs = np.asarray(probs, dtype=float)
    if probs.size == 0 or probs.sum() <= 0:
        return 0.0
    return float(scipy.stats.entropy(np.clip(probs, 0.0, None), base=2))


def spectrum_entropy(eigenvalues) -> float:
    """
    −Σ λ log₂ λ over a spectrum, clamping numerical noise below 1e-12 to 0.
    """
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    eigenvalues = np.where(eigenvalues < EIGEN_FLOOR, 0.0, eigenvalues)
    return float(entr(eigenvalues).sum() / LN2)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """
    Von Neumann entropy S(ρ) in bits.

    :param rho: DensityMatrix, a validated state
    :return: float, in [0, log₂ D]
    """
    if not isinstance(rho, DensityMatrix):
        raise ValidationError(f"Expected a DensityMatrix, got {type(rho).__name__}")
    return spectrum_entropy(rho.spectrum)


def _log2_on_support(eigenvalues: np.ndarray, eigenvectors: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    support = eigenvalues > SUPPORT_TOL
    vectors = eigenvectors[:, support]
    log_matrix = (vectors * np.log2(eigenvalues[support])) @ vectors.conj().T
    null_projector = np.eye(eigenvectors.shape[0]) - vectors @ vectors.conj().T
    return log_matrix, null_projector


def quantum_relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """
    Quantum relative entropy S(ρ‖σ) = tr(ρ log₂ ρ) − tr(ρ log₂ σ).

    :param rho: DensityMatrix
    :param sigma: DensityMatrix, same dimension as `rho`
    :return: float, bits; ``inf`` when the support of ρ is not contained in
        the support of σ
    """
    if rho.dim != sigma.dim:
        raise ValidationError(f"Dimension mismatch: {rho.dim} vs {sigma.dim}")
    sigma_values, sigma_vectors = scipy.linalg.eigh(sigma.entries)
    log_sigma, sigma_null = _log2_on_support(sigma_values, sigma_vectors)
    if np.real(np.trace(sigma_null @ rho.entries)) > SUPPORT_TOL:
        return float("inf")
    cross = float(np.real(np.trace(rho.entries @ log_sigma)))
    return max(-von_neumann_entropy(rho) - cross, 0.0)


def _check_partition(rho: DensityMatrix, partition: Tuple[Iterable[int], Iterable[int]]):
    first, second = (tuple(sorted(set(part))) for part in partition)
    if set(first) & set(second):
        raise ValidationError(f"Partition blocks {first} and {second} overlap")
    if sorted(first + second) != list(range(len(rho.dims))):
        raise ValidationError(f"Partition {first}|{second} does not cover {len(rho.dims)} subsystems")
    if not first or not second:
        raise ValidationError("Both partition blocks must be nonempty")
    return first, second


def conditional_quantum_entropy(rho: DensityMatrix, partition) -> float:
    """
    Conditional entropy S(A|B) = S(A,B) − S(B). May be negative.

    :param rho: DensityMatrix on the joint system
    :param partition: tuple, (A indices, B indices)
    """
    _, second = _check_partition(rho, partition)
    return von_neumann_entropy(rho) - von_neumann_entropy(partial_trace(rho, second))


def quantum_mutual_information(rho: DensityMatrix, partition) -> float:
    """
    Mutual information S(A) + S(B) − S(A,B).

    :param rho: DensityMatrix on the joint system
    :param partition: tuple, (A indices, B indices)
    """
    first, second = _check_partition(rho, partition)
    return (von_neumann_entropy(partial_trace(rho, first))
            + von_neumann_entropy(partial_trace(rho, second))
            - von_neumann_entropy(rho))


def gram_spectrum(weighted_kets: np.ndarray) -> np.ndarray:
    """
    Nonzero spectrum of Σ_w |v_w⟩⟨v_w| for the rows v_w of `weighted_kets`.

    Uses whichever of the Gram matrix (N×N) and the dense operator (D×D) is
    smaller; both share the nonzero spectrum.

    :param weighted_kets: array, shape (N, D), rows √p_w |ψ_w⟩
    :return: array, eigenvalues above the clamp floor, descending
    """
    n, d = weighted_kets.shape
    if n <= d:
        matrix = weighted_kets.conj() @ weighted_kets.T
    else:
        matrix = weighted_kets.T @ weighted_kets.conj()
    logger.debug("Diagonalizing %dx%d matrix (%d kets of dimension %d)", min(n, d), min(n, d), n, d)
    return positive_spectrum(scipy.linalg.eigvalsh(matrix))


def positive_spectrum(eigenvalues: np.ndarray) -> np.ndarray:
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    return np.sort(eigenvalues[eigenvalues > EIGEN_FLOOR])[::-1]


def ensemble_spectrum(ensemble: WeightedEnsemble) -> np.ndarray:
    """
    Nonzero eigenvalues of Σ p_w |ψ_w⟩⟨ψ_w|, via the weighted Gram matrix
    G_ww' = √(p_w p_w') ⟨ψ_w|ψ_w'⟩.

    :param ensemble: WeightedEnsemble
    :return: array, descending eigenvalues
    """
    if not isinstance(ensemble, WeightedEnsemble) or not ensemble.members:
        raise ValidationError("ensemble_spectrum needs a nonempty WeightedEnsemble")
    weighted = np.sqrt(ensemble.probabilities)[:, None] * ensemble.amplitude_matrix()
    return gram_spectrum(weighted)
