import numpy as np
import pytest

from context import classical
from qproc.errors import NonErgodicSourceError, ResourceCapError, ValidationError


def golden_mean():
    return classical.HMC(
        ("A", "B"),
        classical.Alphabet(("0", "1")),
        {"0": np.array([[0.5, 0.0], [1.0, 0.0]]), "1": np.array([[0.0, 0.5], [0.0, 0.0]])},
    )


def biased_coin(p_one=0.25):
    return classical.HMC(("A",), classical.Alphabet(("0", "1")), {"0": [[1 - p_one]], "1": [[p_one]]})


def period_three():
    shift = np.roll(np.eye(3), 1, axis=1)
    zero, one = shift.copy(), shift.copy()
    zero[2] = 0.0
    one[:2] = 0.0
    return classical.HMC(("P0", "P1", "P2"), classical.Alphabet(("0", "1")), {"0": zero, "1": one})


def test_alphabet_rejects_duplicates():
    """
    Test the Alphabet constructor.

    Empty alphabets and repeated labels are rejected.
    """
    with pytest.raises(ValidationError):
        classical.Alphabet(())
    with pytest.raises(ValidationError):
        classical.Alphabet(("0", "0"))


def test_golden_mean_stationary():
    """
    Test hmc_stationary().

    The Golden Mean chain spends two thirds of the time in A.
    """
    assert np.allclose(classical.hmc_stationary(golden_mean()), [2 / 3, 1 / 3])


def test_non_ergodic_chain_is_rejected():
    """
    Test the ergodicity check.

    Two disconnected self-loops have a two-dimensional fixed space.
    """
    with pytest.raises(NonErgodicSourceError):
        classical.HMC(("A", "B"), classical.Alphabet(("0",)), {"0": np.eye(2)})


def test_rows_must_be_stochastic():
    """
    Test the HMC constructor.

    Summed transition matrices whose rows do not add to one are rejected.
    """
    with pytest.raises(ValidationError):
        classical.HMC(("A",), classical.Alphabet(("0", "1")), {"0": [[0.5]], "1": [[0.4]]})


def test_golden_mean_pairs():
    """
    Test hmc_word_distribution().

    The Golden Mean never emits '11' and its other length-2 words are
    equally likely.
    """
    dist = classical.hmc_word_distribution(golden_mean(), 2)
    assert dist[("1", "1")] == 0.0
    for word in [("0", "0"), ("0", "1"), ("1", "0")]:
        assert dist[word] == pytest.approx(1 / 3)


def test_period_three_words_are_cyclic_shifts():
    """
    Test hmc_word_distribution() on a periodic chain.

    Every phase of '001' is equally likely.
    """
    dist = classical.hmc_word_distribution(period_three(), 3)
    assert len(dist) == 3
    for word in [("0", "0", "1"), ("0", "1", "0"), ("1", "0", "0")]:
        assert dist[word] == pytest.approx(1 / 3)


def test_word_cap_is_enforced():
    """
    Test the support-word cap.

    A fair coin has 2^ℓ support words; a cap below that raises.
    """
    fair = biased_coin(0.5)
    with pytest.raises(ResourceCapError):
        classical.hmc_word_distributions(fair, 6, cap=32)


def test_golden_mean_measures():
    """
    Test hmc_measures() on the Golden Mean.

    hμ = 2/3, E = H(1) − 2/3 ≈ 0.2516 and Markov order 1; with the
    boundary convention T = 1/3.
    """
    table = classical.hmc_measures(golden_mean(), 12)
    assert table.rate == pytest.approx(2 / 3, abs=1e-12)
    assert table.excess == pytest.approx(0.2516, abs=1e-4)
    assert table.transient == pytest.approx(1 / 3, abs=1e-12)
    assert table.markov_order == 1
    assert table.redundancy == pytest.approx(1 / 3)
    assert table.total_predictability == pytest.approx(-table.redundancy)


def test_transient_conventions_differ_by_boundary_term():
    """
    Test transient_informations().

    The standard form uses ΔH(1) for the m = 1 term, so on the Golden Mean
    it equals E rather than 1/3.
    """
    standard = classical.hmc_measures(golden_mean(), 10, transient="standard")
    assert standard.transient == pytest.approx(standard.excess, abs=1e-12)
    with pytest.raises(ValidationError):
        classical.hmc_measures(golden_mean(), 4, transient="other")


def test_biased_coin_is_memoryless():
    """
    Test hmc_measures() on an i.i.d. process.

    H(ℓ) = ℓ H(¼), E = 0 and the detected order is 0.
    """
    table = classical.hmc_measures(biased_coin(), 6, transient="standard")
    single = classical.hmc_word_distribution(biased_coin(), 1).entropy()
    assert np.allclose(table.block_entropy, np.arange(7) * single)
    assert table.excess == pytest.approx(0.0, abs=1e-12)
    assert table.transient == pytest.approx(0.0, abs=1e-12)
    assert table.markov_order == 0


def test_period_three_measures():
    """
    Test hmc_measures() on a period-3 process.

    hμ = 0, E = log₂ 3 and the order is 2 since length-2 words already fix
    the phase.
    """
    table = classical.hmc_measures(period_three(), 8)
    assert table.rate == pytest.approx(0.0, abs=1e-12)
    assert table.excess == pytest.approx(np.log2(3))
    assert table.markov_order == 2
    assert table.markov_order_label == "2"
    assert table.transient == pytest.approx(1.0 + 2 * (np.log2(3) - table.block_entropy[1]), abs=1e-12)


def test_undetected_order_is_a_lower_bound():
    """
    Test markov_order_label.

    A curve that keeps bending reports "> L−2".
    """
    table = classical.measures_from_block_entropies([0.0, 1.0, 1.8, 2.5, 3.1], 2)
    assert table.markov_order is None
    assert table.markov_order_label == "> 2"


def test_hierarchy_invariants():
    """
    Test the shape of the hierarchy.

    H is nondecreasing, ΔH nonincreasing and Δ²H nonpositive.
    """
    table = classical.hmc_measures(golden_mean(), 10)
    assert np.all(np.diff(table.block_entropy) >= -1e-12)
    assert np.all(np.diff(table.entropy_gain) <= 1e-12)
    assert np.all(table.predictability_gain <= 1e-9)


def test_longer_run_agrees_on_shared_lengths():
    """
    Test that extending L leaves earlier entries unchanged.
    """
    short = classical.hmc_measures(golden_mean(), 6)
    long = classical.hmc_measures(golden_mean(), 7)
    assert np.array_equal(short.block_entropy, long.block_entropy[:7])


def test_inconsistent_family_is_rejected():
    """
    Test check_consistency().

    A length-2 distribution whose marginal disagrees with length 1 raises.
    """
    dists = [
        classical.WordDistribution(1, {("0",): 0.5, ("1",): 0.5}),
        classical.WordDistribution(2, {("0", "0"): 0.9, ("1", "1"): 0.1}),
    ]
    with pytest.raises(ValidationError):
        classical.classical_measures(dists, 2)


def test_word_distribution_validation():
    """
    Test the WordDistribution constructor.

    Probabilities must sum to one and words must have the declared length.
    """
    with pytest.raises(ValidationError):
        classical.WordDistribution(1, {("0",): 0.3})
    with pytest.raises(ValidationError):
        classical.WordDistribution(2, {("0",): 1.0})
