import string

import numpy as np
import scipy.linalg

from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Iterable, Optional, Tuple, Union

from ..errors import ValidationError
from ..settings import VALIDATION_TOL, CONSISTENCY_TOL


@dataclass(frozen=True, eq=False)
class PureState:
    """
    Unit vector of complex amplitudes on a (possibly composite) qudit space.

    :param amplitudes: array-like, complex amplitudes
    :param dims: tuple, optional, subsystem dimensions whose product is the
        vector length. Defaults to a single subsystem.
    """
    amplitudes: np.ndarray
    dims: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex).ravel()
        if amplitudes.size == 0:
            raise ValidationError("A pure state needs at least one amplitude")
        dims = (amplitudes.size,) if self.dims is None else tuple(int(d) for d in self.dims)
        if int(np.prod(dims)) != amplitudes.size:
            raise ValidationError(f"Dimensions {dims} do not match {amplitudes.size} amplitudes")
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > VALIDATION_TOL:
            raise ValidationError(f"Pure state must have unit norm, got squared norm {norm:.12g}")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def overlap(self, other: "PureState") -> complex:
        """Inner product ⟨self|other⟩."""
        if other.dim != self.dim:
            raise ValidationError(f"Cannot take overlap of dimensions {self.dim} and {other.dim}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def projector(self) -> "DensityMatrix":
        """Rank-one density matrix |ψ⟩⟨ψ|."""
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims, check=False)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    Hermitian, positive semi-definite, unit-trace matrix.

    The matrix is symmetrized on construction. With ``check=True`` (the
    default) it is validated against the tolerances in `qproc.settings`;
    internal constructions that are correct by construction skip the
    eigenvalue check.

    :param entries: array-like, square complex matrix
    :param dims: tuple, optional, subsystem dimensions
    :param check: bool, validate Hermiticity, trace and positivity
    """
    entries: np.ndarray
    dims: Optional[Tuple[int, ...]] = None
    check: bool = True

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] == 0:
            raise ValidationError(f"Density matrix must be square and non-empty, got shape {entries.shape}")
        size = entries.shape[0]
        dims = (size,) if self.dims is None else tuple(int(d) for d in self.dims)
        if int(np.prod(dims)) != size:
            raise ValidationError(f"Dimensions {dims} do not match matrix size {size}")
        if self.check:
            drift = np.max(np.abs(entries - entries.conj().T))
            if drift > VALIDATION_TOL:
                raise ValidationError(f"Density matrix is not Hermitian (deviation {drift:.3g})")
        entries = (entries + entries.conj().T) / 2
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "dims", dims)
        if self.check:
            trace = float(np.trace(entries).real)
            if abs(trace - 1.0) > VALIDATION_TOL:
                raise ValidationError(f"Density matrix must have unit trace, got {trace:.12g}")
            if self.spectrum[0] < -VALIDATION_TOL:
                raise ValidationError(f"Density matrix has negative eigenvalue {self.spectrum[0]:.3g}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def spectrum(self) -> np.ndarray:
        """Eigenvalues in ascending order."""
        return scipy.linalg.eigvalsh(self.entries)

    def expectation(self, operator: np.ndarray) -> float:
        """Real part of tr(O ρ)."""
        return float(np.real(np.trace(operator @ self.entries)))


@dataclass(frozen=True, eq=False)
class WeightedEnsemble:
    """
    Pure-state decomposition Σ p_w |ψ_w⟩⟨ψ_w| of a density matrix.

    :param members: tuple, (probability, PureState) pairs
    """
    members: Tuple[Tuple[float, PureState], ...]

    def __post_init__(self):
        members = tuple((float(p), state) for p, state in self.members)
        if not members:
            raise ValidationError("An ensemble needs at least one member")
        if any(p <= 0 for p, _ in members):
            raise ValidationError("Ensemble probabilities must be positive")
        total = sum(p for p, _ in members)
        if abs(total - 1.0) > CONSISTENCY_TOL:
            raise ValidationError(f"Ensemble probabilities sum to {total:.12g}, not 1")
        dims = {state.dims for _, state in members}
        if len(dims) != 1:
            raise ValidationError(f"Ensemble members have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "members", members)

    @property
    def dims(self) -> Tuple[int, ...]:
        return self.members[0][1].dims

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for p, _ in self.members])

    def amplitude_matrix(self) -> np.ndarray:
        """Member kets stacked as rows, shape (N, D)."""
        return np.array([state.amplitudes for _, state in self.members])

    def density(self) -> DensityMatrix:
        weighted = np.sqrt(self.probabilities)[:, None] * self.amplitude_matrix()
        return DensityMatrix(weighted.T @ weighted.conj(), self.dims, check=False)


State = Union[PureState, DensityMatrix]


def tensor(a: State, b: State) -> State:
    """
    Kronecker product of two states of the same kind.

    :param a: PureState or DensityMatrix
    :param b: same kind as `a`
    :return: the product state, dims concatenated
    """
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(np.kron(a.amplitudes, b.amplitudes), a.dims + b.dims)
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.entries, b.entries), a.dims + b.dims, check=False)
    raise ValidationError(f"Cannot tensor {type(a).__name__} with {type(b).__name__}")


def tensor_all(states: Iterable[State]) -> State:
    return reduce(tensor, states)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """
    Reduced state over the kept subsystems.

    :param rho: DensityMatrix, the joint state
    :param keep: iterable of int, subsystem indices to keep
    :return: DensityMatrix on the kept subsystems, in their original order
    """
    n = len(rho.dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise ValidationError(f"Subsystem indices {keep} out of range for {n} subsystems")
    if len(keep) == n:
        return rho
    if 2 * n > len(string.ascii_letters):
        raise ValidationError(f"Too many subsystems ({n}) for a partial trace")
    rows = string.ascii_letters[:n]
    cols = [rows[i] if i not in keep else string.ascii_letters[n + i] for i in range(n)]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    tensor_form = rho.entries.reshape(rho.dims + rho.dims)
    reduced = np.einsum(f"{rows}{''.join(cols)}->{out}", tensor_form)
    kept_dims = tuple(rho.dims[i] for i in keep) or (1,)
    size = int(np.prod(kept_dims))
    return DensityMatrix(reduced.reshape(size, size), kept_dims, check=False)


def basis_state(dim: int, index: int) -> PureState:
    amplitudes = np.zeros(dim, dtype=complex)
    amplitudes[index] = 1.0
    return PureState(amplitudes)


def pure_state_from_angle(phi: float) -> PureState:
    """
    Real qubit state cos(φ/2)|0⟩ + sin(φ/2)|1⟩.

    φ = 0 gives |0⟩, φ = π/2 gives |+⟩ and φ = π gives |1⟩.
    """
    return PureState([np.cos(phi / 2), np.sin(phi / 2)])


def maximally_mixed(dims: Tuple[int, ...]) -> DensityMatrix:
    size = int(np.prod(dims))
    return DensityMatrix(np.eye(size) / size, dims, check=False)


def random_density_matrix(dims: Tuple[int, ...], rng: np.random.Generator, rank: Optional[int] = None) -> DensityMatrix:
    """
    Random density matrix from the Hilbert-Schmidt (Ginibre) ensemble.

    :param dims: tuple, subsystem dimensions
    :param rng: numpy Generator
    :param rank: int, optional, rank of the sample (full rank by default)
    """
    size = int(np.prod(dims))
    rank = size if rank is None else rank
    ginibre = rng.normal(size=(size, rank)) + 1j * rng.normal(size=(size, rank))
    rho = ginibre @ ginibre.conj().T
    return DensityMatrix(rho / np.trace(rho).real, dims)
