import numpy as np
import pytest

from context import classical, qcore, qmeasures, source
from qproc.errors import ValidationError


PRESETS = [
    source.qgm(np.pi / 2),
    source.qgm(np.pi / 3),
    source.three_symbol_qgm(),
    source.unifilar_qubit(),
    source.nonunifilar_qubit(),
    source.periodic("00f", np.pi / 2),
]


def test_iid_block_entropy_is_linear():
    """
    Test quantum_block_entropy_curve() on an i.i.d. source.

    S(ℓ) = ℓ S(ρ).
    """
    src = source.iid(state=None, p=0.3, phi=np.pi / 3)
    curve = qmeasures.quantum_block_entropy_curve(src, 5)
    single = qcore.von_neumann_entropy(source.block_state(src, 1).dense)
    assert np.allclose(curve, np.arange(6) * single, atol=1e-9)


def test_iid_has_no_structure():
    """
    Test quantum_measures() on i.i.d. sources.

    Ê_q = 0 and order 0; T̂_q vanishes under the standard convention, and
    under the boundary convention only for the maximally mixed source.
    """
    biased = qmeasures.quantum_measures(source.iid(state=None, p=0.3, phi=np.pi / 3), 6, transient="standard")
    assert biased.excess == pytest.approx(0.0, abs=1e-9)
    assert biased.transient == pytest.approx(0.0, abs=1e-9)
    assert biased.markov_order == 0
    mixed = qmeasures.quantum_measures(source.iid(), 6)
    assert mixed.rate == pytest.approx(1.0)
    assert mixed.transient == pytest.approx(0.0, abs=1e-9)
    assert mixed.redundancy == pytest.approx(0.0, abs=1e-9)


def test_period_three_block_entropy_saturates():
    """
    Test quantum_block_entropy_curve() on the orthogonal period-3 source.

    S(ℓ) = log₂ 3 from ℓ = 2 on.
    """
    curve = qmeasures.quantum_block_entropy_curve(source.periodic("001"), 7)
    assert np.allclose(curve[2:], np.log2(3))
    table = qmeasures.quantum_measures(source.periodic("001"), 7)
    assert table.excess == pytest.approx(np.log2(3))
    assert table.rate == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("src", PRESETS, ids=lambda s: s.describe())
def test_block_entropy_shape(src):
    """
    Test that S(ℓ) is nondecreasing and concave, with ΔS(0) = log₂ d.
    """
    table = qmeasures.quantum_measures(src, 8)
    assert np.all(np.diff(table.block_entropy) >= -1e-9), 'S(ℓ) decreases'
    assert np.all(table.predictability_gain <= 1e-9), 'S(ℓ) is not concave'
    assert table.entropy_gain[0] == pytest.approx(np.log2(src.dim))


@pytest.mark.parametrize("src", PRESETS, ids=lambda s: s.describe())
def test_quantum_bounded_by_classical(src):
    """
    Test S(ℓ) ≤ H(ℓ) against the underlying process, and Ê_q ≤ E both for
    adjacent pairs and at the horizon.
    """
    quantum = qmeasures.quantum_measures(src, 8)
    hidden = classical.hmc_measures(src.underlying, 8)
    assert np.all(quantum.block_entropy <= hidden.block_entropy + 1e-9)
    for length in (2, 8):
        assert quantum.excess_entropy[length] <= hidden.excess_entropy[length] + 1e-8


def test_predictability_decomposition():
    """
    Test Ĝ_q = ŝ − log₂ d, so |Ĝ_q| + ŝ = log₂ d.
    """
    table = qmeasures.quantum_measures(source.unifilar_qutrit(), 8)
    assert table.total_predictability == pytest.approx(table.rate - np.log2(3))
    assert abs(table.total_predictability) + table.rate == pytest.approx(np.log2(3))


@pytest.mark.parametrize("src, length", [
    (source.qgm(np.pi), 2),
    (source.qgm(np.pi), 3),
    (source.periodic("001"), 3),
])
def test_excess_entropy_is_midpoint_mutual_information(src, length):
    """
    Test Ê_q(ℓ) against the mutual information between the two halves of
    ρ_{0:2ℓ}, on orthogonal sources of finite order.
    """
    table = qmeasures.quantum_measures(src, length)
    rho = source.block_state(src, 2 * length).dense
    halves = (list(range(length)), list(range(length, 2 * length)))
    assert table.excess_entropy[length] == pytest.approx(
        qcore.quantum_mutual_information(rho, halves), abs=1e-8)


@pytest.mark.parametrize("src, rate", [
    (source.three_symbol_qgm(), 2 / 3),
    (source.unifilar_qubit(0.5), 1.0),
    (source.periodic("0+1"), 0.0),
])
def test_entropy_rate_exact(src, rate):
    """
    Test entropy_rate_exact() on quantum-unifilar sources.
    """
    assert qmeasures.entropy_rate_exact(src) == pytest.approx(rate, abs=1e-12)


def test_entropy_rate_exact_matches_curve():
    """
    Test that the closed form agrees with the finite-L estimate.
    """
    src = source.three_symbol_qgm()
    table = qmeasures.quantum_measures(src, 10)
    assert table.rate == pytest.approx(qmeasures.entropy_rate_exact(src), abs=0.01)


def test_entropy_rate_exact_needs_unifilar_source():
    """
    Test that a nonunifilar source has no closed form.
    """
    with pytest.raises(ValidationError, match="No closed form"):
        qmeasures.entropy_rate_exact(source.nonunifilar_qubit())


@pytest.mark.parametrize("src, regime", [
    (source.qgm(np.pi / 2), "d >= |X|"),
    (source.three_symbol_qgm(), "d < |X|"),
])
def test_redundancy_comparison(src, regime):
    """
    Test redundancy_comparison() in both dimension regimes.
    """
    report = qmeasures.redundancy_comparison(src, 8)
    assert report["regime"] == regime
    assert report["bound_holds"]


def test_iid_cost():
    """
    Test iid_cost().

    Treating the QGM as i.i.d. overestimates its rate; an i.i.d. source
    costs nothing.
    """
    assert qmeasures.iid_cost(source.qgm(np.pi / 2), 10)["gap"] > 0.05
    assert qmeasures.iid_cost(source.iid(state=None, p=0.3, phi=1.0), 5)["gap"] == pytest.approx(0.0, abs=1e-9)


def test_short_horizon_is_rejected():
    """
    Test that quantum_measures() needs L ≥ 2.
    """
    with pytest.raises(ValidationError):
        qmeasures.quantum_measures(source.qgm(), 1)
