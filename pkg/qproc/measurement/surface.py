import logging

from typing import List, Sequence

from ..qmeasures import quantum_measures
from ..settings import WORD_CAP
from ..source import qgm
from .instruments import m_theta
from .protocols import DQMP, measured_measures

logger = logging.getLogger(__name__)


def sweep_surface(phis: Sequence[float], thetas: Sequence[float], max_length: int,
                  cap: int = WORD_CAP) -> List[dict]:
    """
    Measured and quantum measures of the |0⟩-|ψ(φ)⟩ QGM over a (φ, θ) grid,
    measuring with the repeated Mθ PVM.

    :param phis: sequence, source angles in [0, π]
    :param thetas: sequence, measurement angles
    :param max_length: int, L for every estimate
    :return: list of dicts with phi, theta, h_mu_Y, E_Y, s_hat and E_q
    """
    rows = []
    for phi in phis:
        src = qgm(phi)
        quantum = quantum_measures(src, max_length, cap=cap)
        for theta in thetas:
            measured = measured_measures(src, DQMP.repeated(m_theta(theta)), max_length, cap=cap)
            rows.append({
                "phi": float(phi),
                "theta": float(theta),
                "h_mu_Y": measured.rate,
                "E_Y": measured.excess,
                "s_hat": quantum.rate,
                "E_q": quantum.excess,
            })
        logger.debug("Surface row phi=%g done", phi)
    return rows
