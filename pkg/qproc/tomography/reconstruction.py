import itertools
import logging
import warnings

import numpy as np
import scipy.linalg
import scipy.optimize
import scipy.special

from dataclasses import dataclass, field
from functools import reduce
from typing import Dict, Mapping, Optional, Tuple, Union

from ..classical import HMC, Alphabet, WordDistribution
from ..errors import ValidationError
from ..measurement import DQMP, POVM, projective, standard_instruments
from ..qcore import DensityMatrix, PureState, partial_trace, von_neumann_entropy
from ..qmeasures import iid_cost
from ..settings import ALPHABET_POVM_MARGIN, EIGEN_FLOOR, NNLS_SUM_WEIGHT, PVM_GRID
from ..source import HMCQS, QuantumAlphabet, block_state, build_source
from ..utils import format_word
from .sampling import sample_realizations

logger = logging.getLogger(__name__)

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
AXES = ("X", "Y", "Z")

REST_OUTCOME = "rest"


@dataclass
class ReconstructionReport:
    """
    Result of an estimator: the estimate, how much data it used, how well it
    fits and whether the data determine it uniquely.
    """
    estimate: Union[DensityMatrix, Dict[Tuple[str, ...], float], HMCQS]
    method: str
    residual: float = 0.0
    unique: bool = True
    samples: Optional[int] = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        if isinstance(self.estimate, DensityMatrix):
            estimate = {"real": self.estimate.entries.real.tolist(), "imag": self.estimate.entries.imag.tolist()}
        elif isinstance(self.estimate, HMCQS):
            estimate = {"source": self.estimate.describe(), "states": list(self.estimate.states)}
        else:
            estimate = {format_word(w): p for w, p in sorted(self.estimate.items())}
        return {
            "method": self.method,
            "estimate": estimate,
            "residual": self.residual,
            "unique": self.unique,
            "samples": self.samples,
            **self.extra,
        }


def _qubit(rho: DensityMatrix, count: int = 1):
    if rho.dim != 2 ** count:
        raise ValidationError(f"Expected a {count}-qubit state, got dimension {rho.dim}")


def physical_projection(matrix: np.ndarray, dims: Optional[Tuple[int, ...]] = None) -> DensityMatrix:
    """Clip negative eigenvalues of a Hermitian estimate and renormalize the trace."""
    matrix = (matrix + matrix.conj().T) / 2
    values, vectors = scipy.linalg.eigh(matrix)
    values = np.clip(values, 0.0, None)
    if values.sum() <= 0:
        raise ValidationError("Estimate has no positive part")
    values = values / values.sum()
    return DensityMatrix((vectors * values) @ vectors.conj().T, dims, check=False)


def mub_probabilities(rho: DensityMatrix) -> Tuple[float, float, float]:
    """Pr(+x), Pr(+y), Pr(+z) of a qubit state."""
    _qubit(rho)
    return tuple((1.0 + rho.expectation(PAULI[a])) / 2 for a in AXES)


def reconstruct_qubit(px: float, py: float, pz: float) -> DensityMatrix:
    """
    Invert the three mutually unbiased measurements.

    The Bloch vector r = 2p − 1 is scaled back to the unit ball when noise
    pushes it outside.

    :return: DensityMatrix
    """
    probs = np.array([px, py, pz], dtype=float)
    if np.any(probs < 0) or np.any(probs > 1):
        raise ValidationError(f"MUB probabilities must lie in [0, 1], got {probs.tolist()}")
    r = 2 * probs - 1
    norm = np.linalg.norm(r)
    if norm > 1:
        logger.debug("Bloch vector of length %.4f projected to the unit ball", norm)
        r = r / norm
    matrix = (PAULI["I"] + sum(c * PAULI[a] for c, a in zip(r, AXES))) / 2
    return DensityMatrix(matrix, check=False)


def pauli_expectations(rho2: DensityMatrix) -> Dict[str, float]:
    """
    ⟨σ_a ⊗ σ_b⟩ for a, b ∈ {X, Y, Z} and the single-site ⟨σ_a⟩ of the first
    qubit.

    :param rho2: DensityMatrix on two qubits
    :return: dict keyed "XX".."ZZ" and "X", "Y", "Z"
    """
    _qubit(rho2, 2)
    values = {a + b: rho2.expectation(np.kron(PAULI[a], PAULI[b])) for a, b in itertools.product(AXES, AXES)}
    values.update({a: rho2.expectation(np.kron(PAULI[a], PAULI["I"])) for a in AXES})
    return values


def reconstruct_pair(expectations: Mapping[str, float]) -> DensityMatrix:
    """
    ρ = ¼ Σ c_ab σ_a ⊗ σ_b from nine correlators and three single-site
    expectations shared by both sites, clipped to a physical state.

    :param expectations: mapping, as returned by `pauli_expectations`
    :return: DensityMatrix with dims (2, 2)
    """
    missing = [k for k in [a + b for a, b in itertools.product(AXES, AXES)] + list(AXES) if k not in expectations]
    if missing:
        raise ValidationError(f"Missing Pauli expectations {missing}")
    if any(abs(v) > 1 + 1e-12 for v in expectations.values()):
        raise ValidationError("Pauli expectations must lie in [-1, 1]")
    matrix = np.kron(PAULI["I"], PAULI["I"])
    for a in AXES:
        matrix = matrix + expectations[a] * (np.kron(PAULI[a], PAULI["I"]) + np.kron(PAULI["I"], PAULI[a]))
        for b in AXES:
            matrix = matrix + expectations[a + b] * np.kron(PAULI[a], PAULI[b])
    return physical_projection(matrix / 4, (2, 2))


def alphabet_povm(alphabet: QuantumAlphabet, margin: float = ALPHABET_POVM_MARGIN) -> POVM:
    """
    E_x = c|ψ_x⟩⟨ψ_x| for every alphabet state plus E_rest = 𝕀 − c Σ_x |ψ_x⟩⟨ψ_x|.

    c is the largest uniform weight keeping E_rest positive, less `margin`.

    :param alphabet: QuantumAlphabet
    :return: POVM with |Q| + 1 elements
    """
    if REST_OUTCOME in alphabet.names:
        raise ValidationError(f"Alphabet state name {REST_OUTCOME!r} is reserved")
    projectors = np.einsum("xi,xj->xij", alphabet.amplitudes, alphabet.amplitudes.conj())
    total = projectors.sum(axis=0)
    c = 1.0 / scipy.linalg.eigvalsh(total)[-1] - margin
    elements = [(name, c * p) for name, p in zip(alphabet.names, projectors)]
    elements.append((REST_OUTCOME, np.eye(alphabet.dim) - c * total))
    return POVM(tuple(elements), name="alphabet")


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    u = np.sort(v)[::-1]
    cumulative = np.cumsum(u) - 1.0
    index = np.arange(1, v.size + 1)
    rho = np.flatnonzero(u - cumulative / index > 0)[-1]
    return np.maximum(v - cumulative[rho] / (rho + 1), 0.0)


def known_alphabet_infer(
        freqs: Union[WordDistribution, Mapping[Tuple[str, ...], float]],
        alphabet: QuantumAlphabet,
        length: int,
        povm: POVM,
        samples: Optional[int] = None) -> ReconstructionReport:
    """
    Infer the word probabilities p_w of a known-alphabet block state from
    outcome frequencies of a repeated POVM.

    Solves Pr(y_{0:ℓ}) = Σ_w p_w Π_t ⟨ψ_{w_t}|E_{y_t}|ψ_{w_t}⟩ by nonnegative
    least squares with a weighted sum-to-one row, then projects onto the
    simplex.

    :param freqs: WordDistribution or mapping of outcome words to frequencies
    :param alphabet: QuantumAlphabet, the known emitted states
    :param length: int, ℓ ≥ 1
    :param povm: POVM applied to every site
    :return: ReconstructionReport whose estimate maps alphabet words to p_w
    """
    if length < 1:
        raise ValidationError(f"Word length must be at least 1, got {length}")
    if povm.dim != alphabet.dim:
        raise ValidationError(f"POVM dimension {povm.dim} does not match alphabet dimension {alphabet.dim}")
    single = povm.likelihoods(alphabet.amplitudes)
    design = reduce(np.kron, [single] * length)
    outcome_words = list(itertools.product(povm.labels, repeat=length))
    lookup = freqs.__getitem__ if isinstance(freqs, WordDistribution) else (lambda w: freqs.get(w, 0.0))
    target = np.array([lookup(w) for w in outcome_words], dtype=float)
    if np.any(target < 0):
        raise ValidationError("Outcome frequencies must be nonnegative")
    stacked = np.vstack([design, NNLS_SUM_WEIGHT * np.ones(design.shape[1])])
    p, _ = scipy.optimize.nnls(stacked, np.append(target, NNLS_SUM_WEIGHT))
    p = project_simplex(p)
    residual = float(np.linalg.norm(design @ p - target))
    rank = np.linalg.matrix_rank(np.vstack([design, np.ones(design.shape[1])]), tol=1e-9)
    unique = bool(rank == design.shape[1])
    if not unique:
        logger.debug("Design matrix rank %d below %d unknowns", rank, design.shape[1])
    words = list(itertools.product(alphabet.names, repeat=length))
    estimate = {w: float(x) for w, x in zip(words, p) if x > 0}
    return ReconstructionReport(estimate, "known-alphabet", residual, unique, samples,
                                {"povm": povm.name, "length": length})


def source_from_density(rho: DensityMatrix, name: str = "reconstructed") -> HMCQS:
    """
    Single-state source emitting the eigenstates of ρ₀ with probabilities
    equal to their eigenvalues.
    """
    values, vectors = scipy.linalg.eigh(rho.entries)
    order = [k for k in np.argsort(values)[::-1] if values[k] > EIGEN_FLOOR]
    symbols = tuple(f"e{k}" for k in range(len(order)))
    weights = values[order] / values[order].sum()
    hmc = HMC(("S",), Alphabet(symbols), {x: np.array([[w]]) for x, w in zip(symbols, weights)})
    kets = QuantumAlphabet(tuple((x, PureState(vectors[:, k])) for x, k in zip(symbols, order)))
    return build_source(hmc, kets, name=name)


def source_from_words(dist: WordDistribution, alphabet: QuantumAlphabet, name: str = "reconstructed") -> HMCQS:
    """
    Order-k Markov source from a known-alphabet word distribution at
    ℓ = k + 1.

    States are the length-k words of positive probability, and word u moves
    to u[1:]x with probability Pr(ux)/Pr(u) while emitting |ψ_x⟩.
    """
    if dist.length < 1:
        raise ValidationError("Source reconstruction needs words of length at least 1")
    order = dist.length - 1
    prefixes = dist.marginal()
    states = [u for u, p in sorted(prefixes.probs.items()) if p > 0]
    labels = {u: (format_word(u) if u else "S") for u in states}
    symbols = sorted({w[-1] for w, p in dist.probs.items() if p > 0})
    unknown = set(symbols) - set(alphabet.names)
    if unknown:
        raise ValidationError(f"Words use symbols {sorted(unknown)} outside the alphabet")
    index = {u: i for i, u in enumerate(states)}
    transitions = {x: np.zeros((len(states), len(states))) for x in symbols}
    for word, p in dist.probs.items():
        if p <= 0:
            continue
        prefix, x = word[:-1], word[-1]
        successor = (prefix + (x,))[1:] if order else ()
        if successor not in index:
            raise ValidationError(f"Inconsistent marginals: {format_word(word)!r} leads to an unseen state")
        transitions[x][index[prefix], index[successor]] += p / prefixes[prefix]
    hmc = HMC(tuple(labels[u] for u in states), Alphabet(tuple(symbols)), transitions)
    kets = QuantumAlphabet(tuple((x, alphabet[x]) for x in symbols))
    return build_source(hmc, kets, name=name, params={"order": order})


def reconstruct_source(rho: Optional[DensityMatrix] = None,
                       dist: Optional[WordDistribution] = None,
                       alphabet: Optional[QuantumAlphabet] = None) -> HMCQS:
    """
    Build a source model from either ρ₀ or a known-alphabet word
    distribution.

    :param rho: DensityMatrix, single-site state (eigendecomposition route)
    :param dist: WordDistribution over alphabet words of length k + 1
    :param alphabet: QuantumAlphabet, required with `dist`
    :return: HMCQS
    """
    if rho is not None:
        return source_from_density(rho)
    if dist is None or alphabet is None:
        raise ValidationError("Source reconstruction needs either rho or a word distribution with its alphabet")
    return source_from_words(dist, alphabet)


def _bloch_kets(thetas: np.ndarray, phis: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    t, f = np.meshgrid(thetas, phis, indexing="ij")
    t, f = t.ravel(), f.ravel()
    up = np.stack([np.cos(t / 2), np.exp(1j * f) * np.sin(t / 2)], axis=1)
    down = np.stack([-np.exp(-1j * f) * np.sin(t / 2), np.cos(t / 2)], axis=1)
    return up, down


def min_predictive_measurement(rho2: DensityMatrix, grid: Tuple[int, int] = PVM_GRID) -> Tuple[POVM, float]:
    """
    Single-qubit PVM on the first site minimizing the conditional entropy
    S(ρ₁ | M(ρ₀)) = Σ_y Pr(y) S(ρ₁^y) of the second site.

    The search runs over Bloch directions (θ, φ) on the upper half-sphere,
    since opposite directions give the same PVM.

    :param rho2: DensityMatrix on two qubits
    :param grid: (number of θ values in [0, π/2], number of φ values in [0, 2π))
    :return: (best PVM, minimal conditional entropy in bits)
    """
    _qubit(rho2, 2)
    thetas = np.linspace(0.0, np.pi / 2, grid[0])
    phis = np.linspace(0.0, 2 * np.pi, grid[1], endpoint=False)
    up, down = _bloch_kets(thetas, phis)
    tensor = rho2.entries.reshape(2, 2, 2, 2)
    total = np.zeros(up.shape[0])
    for kets in (up, down):
        projectors = np.einsum("gb,ga->gba", kets, kets.conj())
        conditioned = np.einsum("gba,acbd->gcd", projectors, tensor)
        eigenvalues = np.clip(np.linalg.eigvalsh(conditioned), 0.0, None)
        weight = eigenvalues.sum(axis=1)
        total += (scipy.special.entr(eigenvalues).sum(axis=1) - scipy.special.entr(weight)) / np.log(2.0)
    best = int(np.argmin(total))
    theta, phi = thetas[best // grid[1]], phis[best % grid[1]]
    pvm = projective({"+": up[best], "-": down[best]}, f"Mbloch?theta={theta:g}&phi={phi:g}")
    return pvm, float(max(total[best], 0.0))


def iid_tomography(src: HMCQS, max_length: int = 6) -> ReconstructionReport:
    """
    Single-site tomography of ρ₀ from exact Born probabilities, with the
    entropy-rate overestimate incurred by reading the source as i.i.d.

    :param src: HMCQS
    :param max_length: int, L for the entropy-rate estimate
    :return: ReconstructionReport with the gap S(1) − ŝ in ``extra``
    """
    rho0 = block_state(src, 1).dense
    estimate = reconstruct_qubit(*mub_probabilities(rho0)) if src.dim == 2 else rho0
    cost = iid_cost(src, max_length)
    if cost["gap"] > 1e-9:
        message = (f"i.i.d. assumption hides correlations: S(1) exceeds the entropy rate of "
                   f"{src.describe()} by {cost['gap']:.4f} bits")
        logger.warning(message)
        warnings.warn(message)
    return ReconstructionReport(estimate, "iid", 0.0, True, None, dict(cost))


def sampled_qubit_tomography(src: HMCQS, count: int, seed: int = 0) -> ReconstructionReport:
    """
    Estimate ρ₀ from finite samples split across the X, Y and Z settings.

    :param src: HMCQS, qubit source
    :param count: int, total number of single-site measurements
    :param seed: int
    :return: ReconstructionReport with the trace-norm error to the exact ρ₀
    """
    if src.dim != 2:
        raise ValidationError(f"Sampled qubit tomography needs a qubit source, got dimension {src.dim}")
    if count < 3:
        raise ValidationError(f"Need at least one sample per setting, got {count}")
    registry = standard_instruments()
    settings = (("Mpm", "+"), ("My", "+"), ("M01", "0"))
    shares = [count // 3 + (1 if k < count % 3 else 0) for k in range(3)]
    children = np.random.SeedSequence(seed).spawn(3)
    probs = []
    for (name, plus), share, child in zip(settings, shares, children):
        proto = DQMP.repeated(registry[name])
        record = sample_realizations(src, proto, 1, share, seed=int(child.generate_state(1)[0]))
        probs.append(float(np.mean(record.runs[:, 0] == record.outcomes.index(plus))))
    estimate = reconstruct_qubit(*probs)
    exact = block_state(src, 1).dense
    error = 0.5 * float(np.abs(scipy.linalg.eigvalsh(estimate.entries - exact.entries)).sum())
    return ReconstructionReport(estimate, "mub-sampled", 0.0, True, count,
                                {"probabilities": probs, "trace_distance": error})


def pair_state(src: HMCQS) -> DensityMatrix:
    """Exact ρ_{0:2} of a qubit source."""
    rho = block_state(src, 2).dense
    _qubit(rho, 2)
    return rho


def conditional_gain(rho2: DensityMatrix, grid: Tuple[int, int] = PVM_GRID) -> Dict[str, float]:
    """S(ρ₁) against the best conditional entropy after measuring the first site."""
    _, value = min_predictive_measurement(rho2, grid)
    single = von_neumann_entropy(partial_trace(rho2, [1]))
    return {"single_site_entropy": single, "conditional_entropy": value, "gain": single - value}
