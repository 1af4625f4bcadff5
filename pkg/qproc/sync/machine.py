import logging
import warnings

import networkx as nx
import numpy as np

from dataclasses import dataclass
from networkx.readwrite import json_graph
from typing import Dict, List, Optional

from ..measurement import DQMP, ProtocolKernel
from ..qcore import shannon_entropy
from ..settings import BELIEF_MERGE_TOL, MACHINE_NODE_CAP, OUTPUT_SCHEMA_VERSION, PROTOCOL_SEARCH_DEPTH, PRUNE_TOL
from ..source import HMCQS

logger = logging.getLogger(__name__)


@dataclass
class BeliefMachine:
    """
    Merged belief states of an observer and the outcome-labelled transitions
    between them.

    Nodes are integers carrying ``belief``, ``protocol_state``, ``entropy``,
    ``depth`` and ``expanded``; edges carry ``outcome`` and ``probability``.
    ``closed`` is set when every branch merged into a known node before the
    depth limit; ``partial`` when the node cap stopped the construction.
    """
    graph: nx.MultiDiGraph
    states: tuple
    depth: int
    merge_tol: float
    closed: bool
    partial: bool

    def __len__(self) -> int:
        return self.graph.number_of_nodes()

    @property
    def recurrent_nodes(self) -> frozenset:
        if not self.closed:
            return frozenset()
        return frozenset().union(*nx.attracting_components(self.graph))

    @property
    def transient_nodes(self) -> frozenset:
        return frozenset(self.graph.nodes) - self.recurrent_nodes

    def belief(self, node: int) -> np.ndarray:
        return np.array(self.graph.nodes[node]["belief"])

    def successor(self, node: int, outcome: str) -> Optional[int]:
        for _, target, data in self.graph.out_edges(node, data=True):
            if data["outcome"] == outcome:
                return target
        return None

    def transition_probabilities(self, node: int) -> Dict[str, float]:
        return {data["outcome"]: data["probability"] for _, _, data in self.graph.out_edges(node, data=True)}


def belief_machine(
        src: HMCQS,
        proto: DQMP,
        depth: int = PROTOCOL_SEARCH_DEPTH,
        merge_tol: float = BELIEF_MERGE_TOL,
        node_cap: int = MACHINE_NODE_CAP,
        init: Optional[np.ndarray] = None,
        start: Optional[str] = None) -> BeliefMachine:
    """
    Breadth-first construction of the observer's belief machine.

    Joint beliefs (source-state distribution, protocol state) within
    `merge_tol` in L∞ distance are merged. The root is the initial belief.

    :param src: HMCQS
    :param proto: DQMP
    :param depth: int, deepest level expanded
    :param merge_tol: float, merge distance
    :param node_cap: int, largest number of nodes before stopping
    :return: BeliefMachine
    """
    kernel = ProtocolKernel(src, proto)
    graph = nx.MultiDiGraph()
    joints: List[np.ndarray] = []

    def add_node(joint: np.ndarray, level: int) -> int:
        node = len(joints)
        joints.append(joint)
        belief = joint.sum(axis=1)
        graph.add_node(node, belief=belief.tolist(), entropy=shannon_entropy(belief), depth=level,
                       protocol_state=proto.states[int(np.argmax(joint.sum(axis=0)))], expanded=False)
        return node

    frontier = [add_node(kernel.joint_init(init, start), 0)]
    closed, partial = False, False
    for level in range(depth):
        next_frontier = []
        for node in frontier:
            for y, label in enumerate(kernel.outcomes):
                child = kernel.child(joints[node][None], y)[0]
                probability = float(child.sum())
                if probability <= PRUNE_TOL:
                    continue
                child = child / probability
                distances = np.max(np.abs(np.stack(joints) - child), axis=(1, 2))
                target = int(np.argmin(distances))
                if distances[target] >= merge_tol:
                    if len(joints) >= node_cap:
                        partial = True
                        break
                    target = add_node(child, level + 1)
                    next_frontier.append(target)
                graph.add_edge(node, target, outcome=label, probability=probability)
            if partial:
                break
            graph.nodes[node]["expanded"] = True
        if partial:
            message = f"Belief machine for {src.describe()} under {proto.name} stopped at {node_cap} nodes"
            logger.warning(message)
            warnings.warn(message)
            break
        frontier = next_frontier
        if not frontier:
            closed = True
            break
    logger.debug("Belief machine: %d nodes, closed=%s", len(joints), closed)
    return BeliefMachine(graph, src.states, depth, merge_tol, closed, partial)


def export_machine(machine: BeliefMachine) -> dict:
    """
    Node-link JSON of a belief machine for graph renderers.

    :param machine: BeliefMachine
    :return: dict with the graph, the source state order and closure flags
    """
    recurrent = machine.recurrent_nodes
    data = json_graph.node_link_data(machine.graph, edges="edges")
    for node in data["nodes"]:
        node["recurrent"] = node["id"] in recurrent
    return {
        "schema_version": OUTPUT_SCHEMA_VERSION,
        "states": list(machine.states),
        "closed": machine.closed,
        "partial": machine.partial,
        "depth": machine.depth,
        "merge_tol": machine.merge_tol,
        "graph": data,
    }
