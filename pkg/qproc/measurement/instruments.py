import logging

import numpy as np

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Mapping, Tuple

from ..errors import ValidationError
from ..qcore import DensityMatrix, PureState, pure_state_from_angle
from ..settings import POVM_SUM_TOL, VALIDATION_TOL
from ..utils import float_param, parse_ref

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class POVM:
    """
    Measurement instrument: labelled positive operators summing to identity.

    :param elements: tuple, (outcome label, d×d matrix) pairs
    :param name: str, registry name or description
    """
    elements: Tuple[Tuple[str, np.ndarray], ...]
    name: str = "custom"

    def __post_init__(self):
        elements = []
        for label, matrix in self.elements:
            matrix = np.array(matrix, dtype=complex)
            if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
                raise ValidationError(f"POVM element {label!r} must be a square matrix")
            matrix = (matrix + matrix.conj().T) / 2
            matrix.setflags(write=False)
            elements.append((str(label), matrix))
        if not elements:
            raise ValidationError("A POVM needs at least one element")
        labels = [label for label, _ in elements]
        if len(set(labels)) != len(labels):
            raise ValidationError(f"POVM outcome labels must be distinct: {labels}")
        if len({m.shape for _, m in elements}) != 1:
            raise ValidationError("POVM elements must share one dimension")
        object.__setattr__(self, "elements", tuple(elements))
        for label, matrix in elements:
            lowest = np.linalg.eigvalsh(matrix)[0]
            if lowest < -VALIDATION_TOL:
                raise ValidationError(f"POVM element {label!r} is not positive (eigenvalue {lowest:.3g})")
        gap = np.max(np.abs(self.matrices.sum(axis=0) - np.eye(self.dim)))
        if gap > POVM_SUM_TOL:
            raise ValidationError(f"POVM {self.name!r} elements do not sum to identity (deviation {gap:.3g})")

    @property
    def dim(self) -> int:
        return self.elements[0][1].shape[0]

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(label for label, _ in self.elements)

    @cached_property
    def matrices(self) -> np.ndarray:
        return np.stack([matrix for _, matrix in self.elements])

    def __getitem__(self, label: str) -> np.ndarray:
        for key, matrix in self.elements:
            if key == label:
                return matrix
        raise KeyError(label)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def is_pvm(self) -> bool:
        """Elements are mutually orthogonal projectors."""
        m = self.matrices
        products = np.einsum("aij,bjk->abik", m, m)
        for a in range(len(m)):
            for b in range(len(m)):
                target = m[a] if a == b else np.zeros_like(m[a])
                if np.max(np.abs(products[a, b] - target)) > POVM_SUM_TOL:
                    return False
        return True

    @property
    def is_rank_one(self) -> bool:
        return all(np.linalg.matrix_rank(m, tol=1e-9) <= 1 for m in self.matrices)

    def likelihoods(self, kets: np.ndarray) -> np.ndarray:
        """⟨ψ_x|E_y|ψ_x⟩ for kets as rows; shape (|Y|, N)."""
        return np.real(np.einsum("xi,yij,xj->yx", kets.conj(), self.matrices, kets))

    def to_dict(self) -> dict:
        return {"name": self.name, "dim": self.dim, "labels": list(self.labels), "pvm": self.is_pvm}


def born_distribution(rho: DensityMatrix, m: POVM) -> Dict[str, float]:
    """
    Outcome probabilities tr(E_y ρ).

    :param rho: DensityMatrix
    :param m: POVM of the same dimension
    :return: dict, outcome label to probability
    """
    if rho.dim != m.dim:
        raise ValidationError(f"Dimension mismatch: state {rho.dim}, POVM {m.dim}")
    probs = {label: float(np.real(np.trace(matrix @ rho.entries))) for label, matrix in m.elements}
    total = sum(probs.values())
    if abs(total - 1.0) > VALIDATION_TOL * 10:
        raise ValidationError(f"Born probabilities sum to {total:.12g}")
    return probs


def projective(kets: Mapping[str, np.ndarray], name: str) -> POVM:
    """PVM from an orthonormal set of labelled kets."""
    elements = []
    for label, ket in kets.items():
        ket = np.asarray(ket, dtype=complex)
        elements.append((label, np.outer(ket, ket.conj())))
    return POVM(tuple(elements), name=name)


def computational_basis(dim: int, name: str = None) -> POVM:
    """PVM {|k⟩⟨k|} labelled '0'..'d−1'."""
    return projective({str(k): np.eye(dim)[k] for k in range(dim)}, name or f"M{''.join(str(k) for k in range(dim))}")


def m_theta(theta: float) -> POVM:
    """
    Real qubit PVM {|ψ(θ)⟩⟨ψ(θ)|, |ψ(θ+π)⟩⟨ψ(θ+π)|} labelled '0' and '1'.

    θ = 0 is M01 and θ = π/2 is M±.
    """
    return projective({
        "0": pure_state_from_angle(theta).amplitudes,
        "1": pure_state_from_angle(theta + np.pi).amplitudes,
    }, f"Mtheta?theta={theta:g}")


def sic_povm() -> POVM:
    """
    Qubit SIC-POVM: ½|φ_k⟩⟨φ_k| for |φ_0⟩ = |0⟩ and
    |φ_k⟩ = (|0⟩ + √2 e^{2πik/3}|1⟩)/√3, k = 1, 2, 3.
    """
    vectors = {"s0": np.array([1.0, 0.0])}
    for k in range(3):
        vectors[f"s{k + 1}"] = np.array([1.0, np.sqrt(2.0) * np.exp(2j * np.pi * k / 3)]) / np.sqrt(3.0)
    return POVM(tuple((label, np.outer(v, v.conj()) / 2) for label, v in vectors.items()), name="SIC")


def pure_pvm(state: PureState, label: str) -> POVM:
    """
    Two-outcome PVM {|ψ⟩⟨ψ|, 𝕀 − |ψ⟩⟨ψ|} labelled `label` and ``~label``.
    """
    projector = np.outer(state.amplitudes, state.amplitudes.conj())
    return POVM(((label, projector), (f"~{label}", np.eye(state.dim) - projector)), name=f"pvm[{label}]")


def standard_instruments() -> Dict[str, POVM]:
    """
    Registry of named instruments.

    :return: dict with M01, Mpm, My, M012, Mpm2 and SIC
    """
    s = 1 / np.sqrt(2)
    return {
        "M01": computational_basis(2, "M01"),
        "Mpm": projective({"+": [s, s], "-": [s, -s]}, "Mpm"),
        "My": projective({"+": [s, 1j * s], "-": [s, -1j * s]}, "My"),
        "M012": computational_basis(3, "M012"),
        "Mpm2": projective({"+": [s, s, 0], "-": [s, -s, 0], "2": [0, 0, 1]}, "Mpm2"),
        "SIC": sic_povm(),
    }


ALIASES = {"M±": "Mpm", "M±2": "Mpm2", "Mplusminus": "Mpm"}


def _matrix(value, origin: str) -> np.ndarray:
    def entry(x):
        if isinstance(x, (list, tuple)):
            return complex(float(x[0]), float(x[1]))
        return complex(x)
    try:
        return np.array([[entry(x) for x in row] for row in value])
    except (TypeError, ValueError, IndexError):
        raise ValidationError(f"{origin}: element matrices must be lists of rows of numbers or [re, im] pairs")


def instrument(ref, origin: str = "<instrument>") -> POVM:
    """
    Resolve an instrument reference.

    Accepts a POVM, a registry name (``M01``, ``Mpm``, ``My``, ``M012``, ``Mpm2``,
    ``SIC``), ``Mtheta?theta=<radians>``, or a mapping of outcome labels to
    inline element matrices.

    :return: POVM
    """
    if isinstance(ref, POVM):
        return ref
    if isinstance(ref, Mapping):
        return POVM(tuple((label, _matrix(value, origin)) for label, value in ref.items()), name="inline")
    _, name, params = parse_ref(str(ref))
    name = ALIASES.get(name, name)
    if name == "Mtheta":
        return m_theta(float_param(params, "theta", 0.0))
    registry = standard_instruments()
    if name not in registry:
        raise ValidationError(f"{origin}: unknown instrument {ref!r}; available: {', '.join(sorted(registry))}, Mtheta")
    return registry[name]
