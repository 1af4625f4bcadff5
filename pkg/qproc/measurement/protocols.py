import logging

import networkx as nx
import numpy as np

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from ..classical import ClassicalMeasureTable, WordDistribution, classical_measures, distribution_from_arrays
from ..errors import ResourceCapError, ValidationError
from ..settings import MARKOV_ORDER_TOL, PRUNE_TOL, TRANSIENT_CONVENTION, WORD_CAP
from ..source import HMCQS, BlockState
from .instruments import POVM

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DQMP:
    """
    Deterministic quantum measurement protocol.

    A finite automaton that measures with ``povms[s]`` while in state s and
    moves to ``delta[(s, y)]`` on outcome y. A single-state protocol is a
    repeated POVM.

    :param states: tuple, protocol state names
    :param start: str, initial protocol state
    :param povms: mapping, protocol state to POVM
    :param delta: mapping, (state, outcome) to next state
    :param name: str, identifier used in reports
    """
    states: Tuple[str, ...]
    start: str
    povms: Mapping[str, POVM]
    delta: Mapping[Tuple[str, str], str]
    name: str = "custom"

    def __post_init__(self):
        states = tuple(self.states)
        if not states or len(set(states)) != len(states):
            raise ValidationError(f"Protocol states must be nonempty and distinct: {states}")
        if self.start not in states:
            raise ValidationError(f"Start state {self.start!r} is not a protocol state")
        if set(self.povms) != set(states):
            raise ValidationError(f"Every protocol state needs exactly one POVM (got {sorted(self.povms)})")
        if len({m.dim for m in self.povms.values()}) != 1:
            raise ValidationError("All protocol POVMs must act on the same dimension")
        for (state, outcome), target in self.delta.items():
            if state not in states or target not in states:
                raise ValidationError(f"Transition {state!r} --{outcome}--> {target!r} uses unknown states")
            if outcome not in self.povms[state].labels:
                raise ValidationError(f"Outcome {outcome!r} is not produced by the POVM of state {state!r}")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "povms", dict(self.povms))
        object.__setattr__(self, "delta", dict(self.delta))

    @classmethod
    def repeated(cls, povm: POVM) -> "DQMP":
        """Single-state protocol applying `povm` at every step."""
        state = "M"
        return cls((state,), state, {state: povm}, {(state, y): state for y in povm.labels},
                   name=f"repeated:{povm.name}")

    @property
    def dim(self) -> int:
        return next(iter(self.povms.values())).dim

    @property
    def outcomes(self) -> Tuple[str, ...]:
        """Outcome alphabet 𝒴: the union of POVM labels in first-seen order."""
        seen = []
        for state in self.states:
            for label in self.povms[state].labels:
                if label not in seen:
                    seen.append(label)
        return tuple(seen)

    @property
    def is_repeated(self) -> bool:
        return len(self.states) == 1

    def graph(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        g.add_nodes_from(self.states)
        for (state, outcome), target in self.delta.items():
            g.add_edge(state, target, outcome=outcome)
        return g

    @cached_property
    def recurrent_states(self) -> frozenset:
        """States in the attracting components reachable from the start state."""
        g = self.graph()
        reachable = nx.descendants(g, self.start) | {self.start}
        components = nx.attracting_components(g.subgraph(reachable))
        return frozenset().union(*components)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "states": list(self.states),
            "start": self.start,
            "povm": {s: self.povms[s].name for s in self.states},
            "delta": {s: {y: t for (r, y), t in self.delta.items() if r == s} for s in self.states},
        }


@dataclass(frozen=True)
class Branch:
    state: int
    target: Optional[int]
    matrix: np.ndarray


class ProtocolKernel:
    """
    Compiled joint dynamics of a source observed through a protocol.

    For protocol state s and outcome y, ``M_{s,y} = Σ_x T^x ⟨ψ_x|E_{s,y}|ψ_x⟩``
    propagates the source forward vector. Joint vectors have shape
    (n source states, P protocol states).
    """

    def __init__(self, src: HMCQS, proto: DQMP):
        if src.dim != proto.dim:
            raise ValidationError(f"Source dimension {src.dim} does not match protocol dimension {proto.dim}")
        self.source = src
        self.protocol = proto
        self.outcomes = proto.outcomes
        self.n = len(src.states)
        self.p = len(proto.states)
        state_index = {s: k for k, s in enumerate(proto.states)}
        stacked = src.underlying.stacked
        self.branches: List[List[Branch]] = [[] for _ in self.outcomes]
        for s_index, state in enumerate(proto.states):
            povm = proto.povms[state]
            likelihoods = povm.likelihoods(src.amplitudes)
            for label, weights in zip(povm.labels, likelihoods):
                target = proto.delta.get((state, label))
                matrix = np.einsum("x,xij->ij", weights, stacked)
                self.branches[self.outcomes.index(label)].append(
                    Branch(s_index, None if target is None else state_index[target], matrix))

    def joint_init(self, init: Optional[np.ndarray] = None, start: Optional[str] = None) -> np.ndarray:
        """Joint initial vector: source distribution (π by default) at the start state."""
        init = self.source.stationary if init is None else np.asarray(init, dtype=float)
        if init.shape != (self.n,) or abs(init.sum() - 1.0) > 1e-9 or np.any(init < 0):
            raise ValidationError(f"Initial source distribution must be a probability vector over {self.n} states")
        start = self.protocol.start if start is None else start
        if start not in self.protocol.states:
            raise ValidationError(f"Unknown protocol start state {start!r}")
        joint = np.zeros((self.n, self.p))
        joint[:, self.protocol.states.index(start)] = init
        return joint

    def child(self, alphas: np.ndarray, outcome: int) -> np.ndarray:
        """
        Extend joint vectors (shape (N, n, P)) by one outcome.

        :raises ValidationError: when a realizable outcome has no transition
        """
        result = np.zeros_like(alphas)
        for branch in self.branches[outcome]:
            moved = alphas[:, :, branch.state] @ branch.matrix
            if branch.target is None:
                if np.any(moved.sum(axis=1) > PRUNE_TOL):
                    state = self.protocol.states[branch.state]
                    raise ValidationError(
                        f"Protocol {self.protocol.name!r} has no transition for realizable outcome "
                        f"{self.outcomes[outcome]!r} in state {state!r}")
                continue
            result[:, :, branch.target] += moved
        return result

    def extend(self, alphas: np.ndarray, prune: float = PRUNE_TOL) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        All realizable one-outcome extensions of a batch of joint vectors.

        :return: (children (K, n, P), parent indices (K,), outcome indices (K,)),
            ordered by parent then outcome
        """
        children = np.stack([self.child(alphas, y) for y in range(len(self.outcomes))], axis=1)
        probs = children.sum(axis=(2, 3))
        parents, outcomes = np.nonzero(probs > prune)
        return children[parents, outcomes], parents, outcomes

    def evolve(self, joint: np.ndarray) -> np.ndarray:
        """Marginal joint vector one step later, summed over outcomes."""
        return sum(self.child(joint[None], y)[0] for y in range(len(self.outcomes)))


def enumerate_outcome_words(
        kernel: ProtocolKernel,
        joint: np.ndarray,
        max_length: int,
        cap: int = WORD_CAP,
        prune: float = PRUNE_TOL) -> Iterator[Tuple[int, np.ndarray, np.ndarray]]:
    """
    Forward enumeration of realizable outcome words.

    :return: iterator of (ℓ, words (N, ℓ) outcome indices, joint vectors (N, n, P))
    """
    words = np.zeros((1, 0), dtype=int)
    alphas = joint[None]
    yield 0, words, alphas
    for length in range(1, max_length + 1):
        alphas, parents, outcomes = kernel.extend(alphas, prune)
        if parents.size > cap:
            raise ResourceCapError(f"Length {length} has {parents.size} outcome words, above the cap of {cap}")
        words = np.concatenate([words[parents], outcomes[:, None]], axis=1)
        yield length, words, alphas


def measured_word_distributions(
        src: HMCQS,
        proto: DQMP,
        max_length: int,
        init: Optional[np.ndarray] = None,
        start: Optional[str] = None,
        joint_init: Optional[np.ndarray] = None,
        cap: int = WORD_CAP) -> List[WordDistribution]:
    """
    Exact outcome-word distributions for ℓ = 0..max_length.

    :param src: HMCQS
    :param proto: DQMP
    :param max_length: int
    :param init: array, optional, initial source distribution (π by default)
    :param start: str, optional, protocol start state override
    :param joint_init: array, optional, (n, P) joint distribution over source
        and protocol states; overrides `init` and `start`
    :return: list of WordDistribution over the protocol's outcomes
    """
    kernel = ProtocolKernel(src, proto)
    joint = kernel.joint_init(init, start) if joint_init is None else _check_joint(kernel, joint_init)
    return [
        distribution_from_arrays(kernel.outcomes, words, alphas.sum(axis=(1, 2)))
        for _, words, alphas in enumerate_outcome_words(kernel, joint, max_length, cap)
    ]


def _check_joint(kernel: ProtocolKernel, joint) -> np.ndarray:
    joint = np.asarray(joint, dtype=float)
    if joint.shape != (kernel.n, kernel.p) or np.any(joint < 0) or abs(joint.sum() - 1.0) > 1e-9:
        raise ValidationError(f"Joint initial distribution must be a ({kernel.n}, {kernel.p}) probability array")
    return joint


def measured_word_dist(src: HMCQS, proto: DQMP, length: int, init: Optional[np.ndarray] = None,
                       start: Optional[str] = None, joint_init: Optional[np.ndarray] = None,
                       cap: int = WORD_CAP) -> WordDistribution:
    """
    Pr(y_{0:ℓ}) under the joint recursion
    α_{t+1}(σ_j, δ(s, y)) += α_t(σ_i, s) T^x_ij tr(E_{s,y} |ψ_x⟩⟨ψ_x|).
    """
    return measured_word_distributions(src, proto, length, init, start, joint_init, cap)[-1]


def synchronization_depth(kernel: ProtocolKernel, joint: np.ndarray, max_depth: int,
                          tol: float = 1e-12) -> Tuple[Optional[int], np.ndarray]:
    """
    Smallest depth at which all probability sits in recurrent protocol states.

    :return: (depth or None, joint vector at that depth)
    """
    recurrent = [k for k, s in enumerate(kernel.protocol.states) if s in kernel.protocol.recurrent_states]
    for depth in range(max_depth + 1):
        if joint[:, recurrent].sum() >= 1.0 - tol:
            return depth, joint
        joint = kernel.evolve(joint)
    return None, joint


@dataclass
class MeasuredProcess:
    """
    Outcome-word distributions of a source observed through a protocol.

    ``stationary`` is set when the protocol is a repeated POVM started from
    π, the only case where the family is ℓ-consistent. ``recurrent`` holds
    the distributions after the protocol has entered its recurrent class,
    when that happens with probability one by ``sync_depth``.
    """
    source: str
    protocol: str
    outcomes: Tuple[str, ...]
    distributions: List[WordDistribution]
    stationary: bool
    recurrent: Optional[List[WordDistribution]] = None
    sync_depth: Optional[int] = None
    extra: dict = field(default_factory=dict)

    @property
    def tag(self) -> str:
        return "stationary" if self.stationary else "transient-inclusive"

    def measures(self, tol: float = MARKOV_ORDER_TOL, transient: str = TRANSIENT_CONVENTION,
                 recurrent: bool = False) -> ClassicalMeasureTable:
        dists = self.recurrent if recurrent else self.distributions
        if dists is None:
            raise ValidationError("No recurrent-conditioned distribution: the protocol does not synchronize at finite depth")
        return classical_measures(dists, len(self.outcomes), tol, transient, check=self.stationary and not recurrent)


def measure_process(
        src: HMCQS,
        proto: DQMP,
        max_length: int,
        init: Optional[np.ndarray] = None,
        start: Optional[str] = None,
        joint_init: Optional[np.ndarray] = None,
        sync_search: Optional[int] = None,
        cap: int = WORD_CAP) -> MeasuredProcess:
    """
    Transient-inclusive and, when available, recurrent-conditioned outcome
    distributions of a measured process.

    :param sync_search: int, optional, largest depth searched for finite-time
        synchronization (defaults to 4·max_length)
    :return: MeasuredProcess
    """
    kernel = ProtocolKernel(src, proto)
    joint = kernel.joint_init(init, start) if joint_init is None else _check_joint(kernel, joint_init)
    dists = [distribution_from_arrays(kernel.outcomes, words, alphas.sum(axis=(1, 2)))
             for _, words, alphas in enumerate_outcome_words(kernel, joint, max_length, cap)]
    stationary = proto.is_repeated and init is None and joint_init is None
    depth, synced = synchronization_depth(kernel, joint, sync_search or 4 * max_length)
    recurrent = None
    if depth is not None:
        recurrent = [distribution_from_arrays(kernel.outcomes, words, alphas.sum(axis=(1, 2)))
                     for _, words, alphas in enumerate_outcome_words(kernel, synced / synced.sum(), max_length, cap)]
    logger.debug("Measured %s with %s: sync depth %s", src.describe(), proto.name, depth)
    return MeasuredProcess(src.describe(), proto.name, kernel.outcomes, dists, stationary, recurrent, depth)


def measured_measures(src: HMCQS, proto: DQMP, max_length: int, tol: float = MARKOV_ORDER_TOL,
                      transient: str = TRANSIENT_CONVENTION, **kwargs) -> ClassicalMeasureTable:
    """Block-entropy hierarchy of the measured process Y."""
    return measure_process(src, proto, max_length, **kwargs).measures(tol, transient)


def direct_word_probability(block: BlockState, proto: DQMP, word: Sequence[str]) -> float:
    """
    tr(E_{y_0} ⊗ ⋯ ⊗ E_{y_{ℓ−1}} ρ_{0:ℓ}) on the dense block state, with each
    element taken from the POVM of the protocol state reached so far.

    :param block: BlockState with a dense form
    :param proto: DQMP started at its start state
    :param word: sequence of outcome labels of length ℓ
    :return: float, probability
    """
    if block.dense is None:
        raise ResourceCapError(f"Block of length {block.length} is above the dense cap")
    if len(word) != block.length:
        raise ValidationError(f"Word length {len(word)} does not match block length {block.length}")
    operator = np.ones((1, 1), dtype=complex)
    state = proto.start
    for label in word:
        povm = proto.povms[state]
        if label not in povm.labels:
            return 0.0
        operator = np.kron(operator, povm[label])
        state = proto.delta.get((state, label), state)
    return float(np.real(np.trace(operator @ block.dense.entries)))


def recurrent_word_dist(src: HMCQS, proto: DQMP, length: int, init: Optional[np.ndarray] = None,
                        start: Optional[str] = None, joint_init: Optional[np.ndarray] = None,
                        cap: int = WORD_CAP) -> WordDistribution:
    """
    Outcome-word distribution once the protocol is inside its recurrent class.

    :raises ValidationError: when the recurrent class is not reached with
        probability one at finite depth
    """
    process = measure_process(src, proto, length, init, start, joint_init, cap=cap)
    if process.recurrent is None:
        raise ValidationError(
            f"Protocol {proto.name!r} does not enter its recurrent class at finite depth on {src.describe()}")
    return process.recurrent[-1]
