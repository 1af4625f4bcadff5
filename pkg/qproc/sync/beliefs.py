import logging

import numpy as np
import scipy.stats

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple, Union

from ..errors import ResourceCapError, UnrealizableObservationError, ValidationError
from ..measurement import DQMP, ProtocolKernel, m_theta
from ..qcore import shannon_entropy
from ..settings import (
    BELIEF_MERGE_TOL,
    CONVERGENCE_TOL,
    DIVERGENCE_TOL,
    PRUNE_TOL,
    SYNC_ENTROPY_TOL,
    WORD_CAP,
)
from ..source import HMCQS
from ..utils import format_word

logger = logging.getLogger(__name__)


@dataclass
class BeliefState:
    """
    Observer's distribution over the source state after an outcome word.

    ``dist`` is over the state reached after the last emission's transition.
    """
    dist: np.ndarray
    word: Tuple[str, ...]
    protocol: str
    probability: float
    protocol_state: Optional[str] = None

    @property
    def entropy(self) -> float:
        return shannon_entropy(self.dist)

    @property
    def synchronized(self) -> bool:
        return self.entropy < SYNC_ENTROPY_TOL

    def to_dict(self, states: Sequence[str]) -> dict:
        return {
            "word": format_word(self.word),
            "protocol": self.protocol,
            "protocol_state": self.protocol_state,
            "probability": self.probability,
            "belief": {s: float(p) for s, p in zip(states, self.dist)},
            "entropy": self.entropy,
        }


def _run_word(kernel: ProtocolKernel, joint: np.ndarray, word: Sequence[str]) -> np.ndarray:
    for t, label in enumerate(word):
        if label not in kernel.outcomes:
            raise UnrealizableObservationError(
                f"Outcome {label!r} at position {t} is not in the protocol alphabet {list(kernel.outcomes)}")
        joint = kernel.child(joint[None], kernel.outcomes.index(label))[0]
        if joint.sum() <= PRUNE_TOL:
            raise UnrealizableObservationError(
                f"Outcome word {format_word(tuple(word[:t + 1]))!r} has zero probability")
    return joint


def belief_filter(src: HMCQS, proto: DQMP, outcomes: Sequence[str], init: Optional[np.ndarray] = None,
                  start: Optional[str] = None) -> BeliefState:
    """
    η(y_{0:ℓ}) = Pr(σ | y_{0:ℓ}) under the joint source-protocol recursion.

    :param src: HMCQS
    :param proto: DQMP
    :param outcomes: sequence of outcome labels (a string works for
        single-character labels)
    :param init: array, optional, initial source distribution (π by default)
    :param start: str, optional, protocol start state override
    :return: BeliefState
    :raises UnrealizableObservationError: when the word has zero probability
    """
    kernel = ProtocolKernel(src, proto)
    word = tuple(outcomes)
    joint = _run_word(kernel, kernel.joint_init(init, start), word)
    probability = float(joint.sum())
    by_protocol = joint.sum(axis=0)
    protocol_state = proto.states[int(np.argmax(by_protocol))]
    return BeliefState(joint.sum(axis=1) / probability, word, proto.name, probability, protocol_state)


def next_outcome_distribution(src: HMCQS, proto: DQMP, outcomes: Sequence[str],
                              init: Optional[np.ndarray] = None, start: Optional[str] = None) -> Dict[str, float]:
    """
    Pr(y | y_{0:ℓ}) for every outcome of the protocol.

    :return: dict, outcome label to conditional probability
    """
    kernel = ProtocolKernel(src, proto)
    joint = _run_word(kernel, kernel.joint_init(init, start), tuple(outcomes))
    total = joint.sum()
    return {label: float(kernel.child(joint[None], y)[0].sum() / total) for y, label in enumerate(kernel.outcomes)}


@dataclass
class UncertaintyCurve:
    """
    Average state uncertainty 𝓗(ℓ) for ℓ = 0..L with its summaries.

    ``c_inf`` is the terminal value. The curve is ``converged`` when its last
    step moved less than the convergence tolerance; it is ``diverging`` when
    it converged to a plateau above the divergence tolerance, in which case
    the synchronization information is infinite. ``sync_info`` is the
    truncated sum only for a converged, vanishing curve; otherwise it is
    "diverging" or "unconverged" (raise L).
    """
    values: np.ndarray
    source: str
    protocol: str
    convergence_tol: float = CONVERGENCE_TOL
    divergence_tol: float = DIVERGENCE_TOL
    extra: dict = field(default_factory=dict)

    @property
    def max_length(self) -> int:
        return self.values.size - 1

    @property
    def c_inf(self) -> float:
        return float(self.values[-1])

    @property
    def converged(self) -> bool:
        return self.values.size > 1 and abs(self.values[-1] - self.values[-2]) < self.convergence_tol

    @property
    def diverging(self) -> bool:
        return self.converged and self.c_inf > self.divergence_tol

    @property
    def truncated_sum(self) -> float:
        return float(self.values.sum())

    @property
    def sync_info(self) -> Union[float, str]:
        if not self.converged:
            return "unconverged"
        return "diverging" if self.diverging else self.truncated_sum

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "protocol": self.protocol,
            "L": self.max_length,
            "c_inf": self.c_inf,
            "converged": self.converged,
            "sync_info": self.sync_info,
            "truncated_sum": self.truncated_sum,
            "curve": self.values.tolist(),
            **self.extra,
        }


def _merge(weights: np.ndarray, betas: np.ndarray, merge_tol: float) -> Tuple[np.ndarray, np.ndarray]:
    keys = np.round(betas.reshape(betas.shape[0], -1) / merge_tol).astype(np.int64)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    return np.bincount(inverse.ravel(), weights=weights), betas[first]


def state_uncertainty_curve(
        src: HMCQS,
        proto: DQMP,
        max_length: int,
        init: Optional[np.ndarray] = None,
        start: Optional[str] = None,
        merge_tol: float = BELIEF_MERGE_TOL,
        cap: int = WORD_CAP) -> UncertaintyCurve:
    """
    𝓗(ℓ) = Σ_y Pr(y_{0:ℓ}) H[η(y_{0:ℓ})] for ℓ = 0..L.

    Outcome words leading to the same normalized joint (belief, protocol
    state) are merged level by level, which leaves the average unchanged.

    :param src: HMCQS
    :param proto: DQMP
    :param max_length: int, L
    :param merge_tol: float, resolution at which joint beliefs are merged
    :param cap: int, largest number of distinct joint beliefs per level
    :return: UncertaintyCurve
    """
    if max_length < 1:
        raise ValidationError(f"Uncertainty curve needs L >= 1, got {max_length}")
    kernel = ProtocolKernel(src, proto)
    weights = np.ones(1)
    betas = kernel.joint_init(init, start)[None]
    values = []
    for length in range(max_length + 1):
        if length:
            children, parents, _ = kernel.extend(betas)
            mass = children.sum(axis=(1, 2))
            weights, betas = _merge(weights[parents] * mass, children / mass[:, None, None], merge_tol)
            if weights.size > cap:
                raise ResourceCapError(f"Length {length} has {weights.size} distinct beliefs, above the cap of {cap}")
        beliefs = betas.sum(axis=2)
        values.append(float(weights @ scipy.stats.entropy(beliefs, base=2, axis=1)))
        logger.debug("Length %d: %d beliefs, H=%.6f", length, weights.size, values[-1])
    return UncertaintyCurve(np.maximum(np.array(values), 0.0), src.describe(), proto.name)


def sync_info(src: HMCQS, proto: DQMP, max_length: int, **kwargs) -> Union[float, str]:
    """
    Synchronization information 𝐒 = Σ_ℓ 𝓗(ℓ), truncated at L.

    :return: float, bits, "diverging" when 𝓗 plateaus above zero, or
        "unconverged" when 𝓗 is still moving at L
    """
    return state_uncertainty_curve(src, proto, max_length, **kwargs).sync_info


def theta_sweep(src: HMCQS, thetas: Sequence[float], max_length: int, **kwargs) -> dict:
    """
    Asymptotic state uncertainty under the repeated Mθ PVM over a θ grid.

    :param src: HMCQS, qubit source
    :param thetas: sequence, measurement angles
    :param max_length: int, L for every curve
    :return: dict with the grid, Ĉ∞ per angle and the extreme points
    """
    if src.dim != 2:
        raise ValidationError(f"θ sweep needs a qubit source, got dimension {src.dim}")
    thetas = np.asarray(thetas, dtype=float)
    c_inf = np.array([
        state_uncertainty_curve(src, DQMP.repeated(m_theta(theta)), max_length, **kwargs).c_inf for theta in thetas
    ])
    low, high = int(np.argmin(c_inf)), int(np.argmax(c_inf))
    return {
        "theta": thetas.tolist(),
        "c_inf": c_inf.tolist(),
        "argmin": float(thetas[low]),
        "min": float(c_inf[low]),
        "argmax": float(thetas[high]),
        "max": float(c_inf[high]),
    }
