import logging

import numpy as np

from typing import Optional
from dotenv import load_dotenv

from ..classical import hmc_measures
from ..errors import ValidationError
from ..measurement import (
    DQMP,
    load_protocol,
    measure_process,
    measured_word_dist,
    preset_protocols,
    standard_instruments,
    sweep_surface,
)
from ..qmeasures import entropy_rate_exact, quantum_measures
from ..settings import MARKOV_ORDER_TOL, PROTOCOL_SEARCH_DEPTH, TRANSIENT_CONVENTION
from ..source import block_state, is_quantum_unifilar, load_source, presets
from ..sync import belief_machine, export_machine, state_uncertainty_curve, theta_sweep
from ..tomography import (
    alphabet_povm,
    conditional_gain,
    empirical_word_frequencies,
    iid_tomography,
    known_alphabet_infer,
    mub_probabilities,
    pair_state,
    pauli_expectations,
    reconstruct_pair,
    reconstruct_qubit,
    sample_realizations,
    sampled_qubit_tomography,
)
from .config import RunConfig, render_csv, render_curve, render_json

logger = logging.getLogger(__name__)


def _grid(steps: int, high: float = np.pi) -> np.ndarray:
    if steps < 2:
        raise ValidationError(f"A sweep grid needs at least 2 points, got {steps}")
    return np.linspace(0.0, high, steps)


def _point_mass(src, state: Optional[str]) -> Optional[np.ndarray]:
    if state is None:
        return None
    init = np.zeros(len(src.states))
    init[src.underlying.state_index(state)] = 1.0
    return init


def _density(rho) -> dict:
    return {"real": rho.entries.real.tolist(), "imag": rho.entries.imag.tolist()}


class QProcCLI:
    """
    Command-line interface to qproc.

    Every command takes a source reference (``preset:<name>?k=v`` or a path
    to a JSON file) and prints JSON, or CSV with ``--format csv``.
    """

    def __init__(self):
        load_dotenv()

    def analyze(self, source: str, L: int = 12, tol: float = MARKOV_ORDER_TOL,
                transient: str = TRANSIENT_CONVENTION, format: str = "json") -> str:
        """
        Quantum and classical block-entropy hierarchies of a source.

        :param source: str, source reference
        :param L: int, largest block length
        :param tol: float, Markov-order tolerance
        :param transient: str, "boundary" or "standard"
        :param format: str, "json" or "csv" (the S(ℓ) curve)
        :return: str
        """
        config = RunConfig("analyze", source, L=L, tol=tol, fmt=format, options={"transient": transient})
        src = load_source(source)
        quantum = quantum_measures(src, L, tol=tol, transient=transient)
        if format == "csv":
            return render_curve(quantum.block_entropy)
        classical = hmc_measures(src.underlying, L, tol=tol, transient=transient)
        witness = is_quantum_unifilar(src)
        payload = {
            "source": src.describe(),
            "quantum": quantum.to_dict(),
            "classical": classical.to_dict(),
            "quantum_unifilar": bool(witness),
            "entropy_rate_exact": entropy_rate_exact(src) if witness else None,
            "G": quantum.rate - np.log2(src.dim),
            "R": np.log2(src.dim) - quantum.rate,
        }
        return render_json(config, payload)

    def measure(self, source: str, protocol: str = "repeated:M01", L: int = 12, tol: float = MARKOV_ORDER_TOL,
                init: Optional[str] = None, sweep: bool = False, phi_steps: int = 5, theta_steps: int = 9,
                format: str = "json") -> str:
        """
        Measures of the classical process obtained by measuring a source.

        With ``--sweep`` the source argument is ignored apart from validation
        and a (φ, θ) surface of the QGM under the repeated Mθ PVM is emitted.

        :param protocol: str, protocol reference
        :param init: str, optional, source state the run starts in
        :param sweep: bool, emit the (φ, θ) surface
        :param phi_steps: int, φ grid points over (0, π]; φ = 0 emits one state twice
        :param theta_steps: int, θ grid points over [0, π]
        :return: str
        """
        config = RunConfig("measure", source, protocol, L=L, tol=tol, fmt=format,
                           options={"sweep": sweep, "init": init})
        if sweep:
            phis = np.linspace(np.pi / phi_steps, np.pi, phi_steps)
            rows = sweep_surface(phis, _grid(theta_steps), L)
            if format == "csv":
                keys = ("phi", "theta", "h_mu_Y", "E_Y", "s_hat", "E_q")
                return render_csv(keys, ([row[k] for k in keys] for row in rows))
            return render_json(config, {"surface": rows})
        src = load_source(source)
        proto = load_protocol(protocol, src)
        process = measure_process(src, proto, L, init=_point_mass(src, init))
        table = process.measures(tol)
        if format == "csv":
            return render_curve(table.block_entropy)
        payload = {
            "source": src.describe(),
            "protocol": proto.to_dict(),
            "tag": process.tag,
            "measures": table.to_dict(),
            "sync_depth": process.sync_depth,
            "recurrent": process.measures(tol, recurrent=True).to_dict() if process.recurrent else None,
        }
        return render_json(config, payload)

    def sync(self, source: str, protocol: str = "repeated:M01", L: int = 14, init: Optional[str] = None,
             start: Optional[str] = None, machine: bool = False, depth: int = PROTOCOL_SEARCH_DEPTH,
             theta_steps: int = 0, format: str = "json") -> str:
        """
        Average state uncertainty, its asymptote and the synchronization
        information of an observer.

        :param protocol: str, protocol reference
        :param init: str, optional, source state the observer knows at start
        :param start: str, optional, protocol start state override
        :param machine: bool, include the belief machine graph
        :param depth: int, belief machine depth
        :param theta_steps: int, if set, sweep Ĉ∞ over that many Mθ angles in
            [0, π] instead
        :return: str
        """
        config = RunConfig("sync", source, protocol, L=L, fmt=format,
                           options={"init": init, "start": start, "machine": machine, "theta_steps": theta_steps})
        src = load_source(source)
        if theta_steps:
            sweep = theta_sweep(src, _grid(theta_steps), L)
            if format == "csv":
                return render_csv(("theta", "c_inf"), zip(sweep["theta"], sweep["c_inf"]))
            return render_json(config, {"source": src.describe(), "theta_sweep": sweep})
        proto = load_protocol(protocol, src)
        curve = state_uncertainty_curve(src, proto, L, init=_point_mass(src, init), start=start)
        if format == "csv":
            return render_curve(curve.values)
        payload = {"uncertainty": curve.to_dict()}
        if machine:
            payload["machine"] = export_machine(
                belief_machine(src, proto, depth=depth, init=_point_mass(src, init), start=start))
        return render_json(config, payload)

    def tomo(self, source: str, known_alphabet: bool = False, l: int = 2, exact: bool = False,
             iid: bool = False, samples: int = 0, seed: int = 0, predictive: bool = False,
             record: Optional[str] = None, L: int = 6, format: str = "json") -> str:
        """
        Tomography of a source from exact probabilities or simulated samples.

        :param known_alphabet: bool, infer word probabilities with the
            alphabet POVM
        :param l: int, word length for known-alphabet inference
        :param exact: bool, use exact outcome probabilities
        :param iid: bool, single-site tomography with the i.i.d. warning
        :param samples: int, number of simulated runs (or single-site shots)
        :param seed: int
        :param predictive: bool, search the minimal predictive PVM on ρ_{0:2}
        :param record: str, optional, path to save the sample record
        :param L: int, length for entropy-rate estimates
        :return: str
        """
        mode = "iid" if iid else "known-alphabet" if known_alphabet else "predictive" if predictive else \
            "sampled" if samples else "exact"
        config = RunConfig("tomo", source, L=L, seed=seed, fmt="json",
                           options={"mode": mode, "l": l, "samples": samples, "exact": exact})
        src = load_source(source)
        if mode == "iid":
            return render_json(config, {"report": iid_tomography(src, L).to_dict()})
        if mode == "known-alphabet":
            povm = alphabet_povm(src.alphabet)
            proto = DQMP.repeated(povm)
            if exact or not samples:
                freqs = measured_word_dist(src, proto, l)
                count = None
            else:
                sampled = sample_realizations(src, proto, l, samples, seed=seed)
                if record:
                    sampled.save(record)
                freqs = empirical_word_frequencies(sampled, l)
                count = samples
            return render_json(config, {"report": known_alphabet_infer(freqs, src.alphabet, l, povm, count).to_dict()})
        if mode == "predictive":
            rho2 = pair_state(src)
            return render_json(config, {"source": src.describe(), **conditional_gain(rho2)})
        if mode == "sampled":
            return render_json(config, {"report": sampled_qubit_tomography(src, samples, seed).to_dict()})
        rho0 = block_state(src, 1).dense
        payload = {"source": src.describe(), "rho0": _density(reconstruct_qubit(*mub_probabilities(rho0)))}
        if src.dim == 2:
            payload["rho01"] = _density(reconstruct_pair(pauli_expectations(pair_state(src))))
        return render_json(config, payload)

    def presets(self) -> str:
        """List source presets and protocol presets."""
        return render_json(RunConfig("presets", ""), {
            "sources": sorted(presets()),
            "protocols": sorted(preset_protocols()) + ["adaptive", "period-adaptive", "witness-tracking"],
        })

    def instruments(self) -> str:
        """List the registry instruments."""
        return render_json(RunConfig("instruments", ""), {
            "instruments": [m.to_dict() for m in standard_instruments().values()] + [{"name": "Mtheta?theta=<rad>"}],
        })
