"""
Regression values for the example sources: entropy-convergence tables,
synchronization curves and the bounds linking quantum and measured
measures.
"""
import numpy as np
import pytest

from context import classical, measurement, qcore, qmeasures, source, sync


@pytest.mark.parametrize("src, length, rate, excess, transient, tol", [
    (source.periodic("00f", np.pi), 12, 0.0, np.log2(3), 2.33, 0.01),
    (source.periodic("00f", np.pi / 2), 12, None, None, 4.22, 0.01),
    (source.qgm(np.pi), 12, 2 / 3, 0.2516, 1 / 3, 0.002),
    (source.qgm(np.pi / 2), 12, 0.4495, 0.1092, 0.5687, 0.002),
    (source.three_symbol_qgm(), 12, 0.6667, 0.4652, 0.8855, 0.002),
    (source.unifilar_qubit(1 / 3), 10, 0.9184, 0.0808, 0.1976, 0.002),
    (source.nonunifilar_qubit(1 / 3), 10, 0.7306, 0.3217, 0.4090, 0.002),
], ids=["period3-pi", "period3-half-pi", "qgm-pi", "qgm-half-pi", "3symbol", "unifilar-qubit", "nonunifilar-qubit"])
def test_quantum_measure_table(src, length, rate, excess, transient, tol):
    """
    Test quantum_measures() against the reference values of each source.

    |Ĝ_q| is log₂ d − ŝ in every row. The nonorthogonal period-3 source only
    approaches log₂ 3 slowly, so only its transient information is pinned.
    """
    table = qmeasures.quantum_measures(src, length)
    if rate is not None:
        assert table.rate == pytest.approx(rate, abs=0.002)
        assert table.excess == pytest.approx(excess, abs=0.002)
    assert table.transient == pytest.approx(transient, abs=tol)
    assert abs(table.total_predictability) == pytest.approx(1.0 - table.rate, abs=1e-12)


def test_unifilar_qutrit_table():
    """
    Test quantum_measures() for the unifilar qutrit source at L = 8.
    """
    table = qmeasures.quantum_measures(source.unifilar_qutrit(), 8)
    assert table.rate == pytest.approx(0.8002, abs=0.002)
    assert table.excess == pytest.approx(1.290, abs=0.005)
    assert table.transient == pytest.approx(2.156, abs=0.01)
    assert abs(table.total_predictability) == pytest.approx(np.log2(3) - table.rate)


def test_nonunifilar_predictability_follows_redundancy():
    """
    Test |Ĝ_q| = 1 − ŝ for the nonunifilar qubit, i.e. about 0.2694.
    """
    table = qmeasures.quantum_measures(source.nonunifilar_qubit(1 / 3), 10)
    assert abs(table.total_predictability) == pytest.approx(0.2694, abs=0.002)


def test_orthogonal_rows_are_exact():
    """
    Test the analytic rows: the orthogonal period-3 and Golden Mean sources.
    """
    period = qmeasures.quantum_measures(source.periodic("00f", np.pi), 12)
    assert period.rate == pytest.approx(0.0, abs=1e-9)
    assert period.excess == pytest.approx(np.log2(3), abs=1e-9)
    assert period.markov_order == 2
    golden = qmeasures.quantum_measures(source.qgm(np.pi), 12)
    assert golden.rate == pytest.approx(2 / 3, abs=1e-9)
    assert golden.transient == pytest.approx(1 / 3, abs=1e-9)
    assert golden.markov_order == 1


def test_qgm_asymptotic_uncertainty():
    """
    Test Ĉ∞ for the QGM under the two fixed bases at L = 14.

    Between runs of '0's, M01 leaves about 0.54 bits of state uncertainty
    and M± about 0.62 bits.
    """
    m01 = sync.state_uncertainty_curve(source.qgm(np.pi / 2),
                                       measurement.DQMP.repeated(measurement.instrument("M01")), 14)
    mpm = sync.state_uncertainty_curve(source.qgm(np.pi / 2),
                                       measurement.DQMP.repeated(measurement.instrument("Mpm")), 14)
    assert m01.c_inf == pytest.approx(0.54, abs=0.01)
    assert mpm.c_inf == pytest.approx(0.62, abs=0.01)


def test_qgm_theta_sweep():
    """
    Test theta_sweep() for the QGM.

    The maximum H(π) sits at θ = π/4, where |0⟩ and |+⟩ look alike. The
    minimum of about 0.485 bits sits near θ = 2.70, below both fixed bases;
    θ = 23π/36 ≈ 2.01 is clearly off the minimum.
    """
    src = source.qgm(np.pi / 2)
    coarse = sync.theta_sweep(src, np.linspace(0, np.pi, 9), 10)
    assert coarse["argmax"] == pytest.approx(np.pi / 4)
    assert coarse["max"] == pytest.approx(qcore.shannon_entropy(src.stationary), abs=1e-9)
    grid = sync.theta_sweep(src, np.linspace(0, np.pi, 37), 14)
    assert grid["argmin"] == pytest.approx(2.70, abs=0.05)
    assert grid["min"] == pytest.approx(0.485, abs=0.01)
    assert grid["c_inf"][23] > grid["min"] + 0.03
    fine = sync.theta_sweep(src, np.linspace(2.55, 2.85, 31), 14)
    assert fine["argmin"] == pytest.approx(2.70, abs=0.05)
    assert fine["min"] == pytest.approx(0.485, abs=0.01)


@pytest.mark.parametrize("word, transient, s_m01, s_mphi", [
    ("0000f", 6.32, 7.92, 9.30),
    ("000ff", 4.86, 6.84, 7.05),
    ("00f0f", 5.51, 7.39, 7.47),
])
def test_period_five_synchronization(word, transient, s_m01, s_mphi):
    """
    Test period-5 sources over {|0⟩, |ψ(3π/4)⟩} at L = 12.

    The curves start at log₂ 5, and the synchronization information of
    either basis is at least the quantum transient information.
    """
    src = source.periodic(word, 3 * np.pi / 4)
    table = qmeasures.quantum_measures(src, 12)
    assert table.transient == pytest.approx(transient, abs=0.05)
    m01 = sync.state_uncertainty_curve(src, measurement.DQMP.repeated(measurement.instrument("M01")), 12)
    mphi = sync.state_uncertainty_curve(src, measurement.DQMP.repeated(measurement.m_theta(3 * np.pi / 4)), 12)
    assert m01.values[0] == pytest.approx(np.log2(5))
    assert m01.truncated_sum == pytest.approx(s_m01, abs=0.05)
    assert mphi.truncated_sum == pytest.approx(s_mphi, abs=0.05)
    assert min(m01.truncated_sum, mphi.truncated_sum) >= table.transient


def test_qutrit_synchronization_information():
    """
    Test the qutrit protocols at L = 10.

    Waiting for a '2' in either fixed basis costs about 3.60 and 3.91 bits;
    the adaptive protocol, which also synchronizes on '1+' and '1−', costs
    about 2.855 bits (1.5219 + 0.9245 + 0.2852 + 0.0869 + 0.026 + ...).
    All exceed T̂_q.
    """
    src = source.unifilar_qutrit()
    protocols = measurement.preset_protocols()
    values = {name: sync.state_uncertainty_curve(src, protocols[name](), 10).truncated_sum
              for name in ("qutrit-012-sync", "qutrit-pm2-sync", "qutrit-adaptive")}
    waiting = sorted([values["qutrit-012-sync"], values["qutrit-pm2-sync"]])
    assert waiting == pytest.approx([3.60, 3.91], abs=0.05)
    assert values["qutrit-adaptive"] == pytest.approx(2.855, abs=0.01)
    transient = qmeasures.quantum_measures(src, 8).transient
    assert min(values.values()) > transient


@pytest.mark.parametrize("name", ["M01", "Mpm", "My"])
def test_measured_process_bounds(name):
    """
    Test the bounds between the QGM and its measured processes at L = 8:
    ŝ ≤ hμ^Y, Ê_q ≥ E^Y and E^X ≥ E^Y.
    """
    src = source.qgm(np.pi / 2)
    quantum = qmeasures.quantum_measures(src, 8)
    hidden = classical.hmc_measures(src.underlying, 8)
    measured = measurement.measured_measures(src, measurement.DQMP.repeated(measurement.instrument(name)), 8)
    assert quantum.rate <= measured.rate + 1e-7
    assert measured.excess <= quantum.excess + 1e-7
    assert measured.excess <= hidden.excess + 1e-7


def test_matching_projectors_are_lossless():
    """
    Test the equality case: the orthogonal QGM read with M01.
    """
    src = source.qgm(np.pi)
    quantum = qmeasures.quantum_measures(src, 8)
    measured = measurement.measured_measures(src, measurement.DQMP.repeated(measurement.instrument("M01")), 8)
    assert measured.rate == pytest.approx(quantum.rate, abs=1e-7)
    assert measured.excess == pytest.approx(quantum.excess, abs=1e-7)
    assert np.allclose(measured.block_entropy, quantum.block_entropy, atol=1e-7)
