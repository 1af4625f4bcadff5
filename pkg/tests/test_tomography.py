import numpy as np
import pytest

from context import measurement, qcore, source, tomography
from qproc.errors import ValidationError


QGM = source.qgm(np.pi / 2)
M01 = measurement.DQMP.repeated(measurement.instrument("M01"))


def test_sampling_is_deterministic():
    """
    Test sample_realizations().

    The same seed gives the same record whatever the chunk size.
    """
    a = tomography.sample_realizations(QGM, M01, 5, 1000, seed=3, chunk=128)
    b = tomography.sample_realizations(QGM, M01, 5, 1000, seed=3, chunk=128)
    c = tomography.sample_realizations(QGM, M01, 5, 1000, seed=4, chunk=128)
    assert np.array_equal(a.runs, b.runs)
    assert not np.array_equal(a.runs, c.runs)


def test_fair_coin_frequencies():
    """
    Test empirical_word_frequencies() on the fair i.i.d. source under M01.
    """
    record = tomography.sample_realizations(source.iid(), M01, 1, 100000, seed=11)
    freqs = tomography.empirical_word_frequencies(record, 1)
    assert freqs[("0",)] == pytest.approx(0.5, abs=0.01)


def test_periodic_runs_are_cyclic():
    """
    Test sampling from a known phase of an orthogonal periodic source.

    Every run reads the template word.
    """
    src = source.periodic("001")
    record = tomography.sample_realizations(src, M01, 6, 50, init=np.array([1.0, 0.0, 0.0]), keep_states=True)
    assert set(record.words()) == {("0", "0", "1", "0", "0", "1")}
    assert record.states.shape == (50, 7)


def test_sampled_frequencies_approach_exact():
    """
    Test that sampled word frequencies approach measured_word_dist().
    """
    record = tomography.sample_realizations(QGM, M01, 3, 50000, seed=5)
    exact = measurement.measured_word_dist(QGM, M01, 3)
    assert tomography.empirical_word_frequencies(record, 3).distance(exact) < 0.02


def test_record_round_trip(tmp_path):
    """
    Test SampleRecord.save() and SampleRecord.load().
    """
    record = tomography.sample_realizations(QGM, M01, 4, 20, seed=1)
    path = record.save(str(tmp_path / "records" / "qgm.txt"))
    loaded = tomography.SampleRecord.load(path)
    assert np.array_equal(loaded.runs, record.runs)
    assert loaded.header() == record.header()


def test_record_load_errors(tmp_path):
    """
    Test SampleRecord.load() on missing and corrupt files.
    """
    with pytest.raises(ValidationError):
        tomography.SampleRecord.load(str(tmp_path / "missing.txt"))
    path = tmp_path / "bad.txt"
    path.write_text('{"seed": 0, "protocol": "M01", "source": "x", "outcomes": ["0", "1"], "length": 2}\n0x\n')
    with pytest.raises(ValidationError, match="bad.txt:2"):
        tomography.SampleRecord.load(str(path))


@pytest.mark.parametrize("probs, expected", [
    ((0.5, 0.5, 0.5), np.eye(2) / 2),
    ((1.0, 0.5, 0.5), np.full((2, 2), 0.5)),
    ((0.5, 0.5, 1.0), np.diag([1.0, 0.0])),
])
def test_reconstruct_qubit(probs, expected):
    """
    Test reconstruct_qubit() on the Bloch-sphere axes.
    """
    assert np.allclose(tomography.reconstruct_qubit(*probs).entries, expected)


def test_reconstruct_qubit_projects_noisy_data():
    """
    Test that an unphysical Bloch vector is scaled to the unit ball.
    """
    rho = tomography.reconstruct_qubit(1.0, 1.0, 0.5)
    assert np.min(rho.spectrum) >= -1e-12
    with pytest.raises(ValidationError):
        tomography.reconstruct_qubit(1.2, 0.5, 0.5)


def test_qubit_round_trip():
    """
    Test that the MUB forward map and its inverse recover the QGM ρ₀.
    """
    rho0 = source.block_state(QGM, 1).dense
    assert np.allclose(tomography.reconstruct_qubit(*tomography.mub_probabilities(rho0)).entries, rho0.entries,
                       atol=1e-12)


def test_pair_round_trip():
    """
    Test reconstruct_pair() on the exact QGM ρ_{0:2} and on zero data.
    """
    rho2 = tomography.pair_state(QGM)
    rebuilt = tomography.reconstruct_pair(tomography.pauli_expectations(rho2))
    assert np.allclose(rebuilt.entries, rho2.entries, atol=1e-10)
    zero = {key: 0.0 for key in tomography.pauli_expectations(rho2)}
    assert np.allclose(tomography.reconstruct_pair(zero).entries, np.eye(4) / 4)
    with pytest.raises(ValidationError):
        tomography.reconstruct_pair({"XX": 0.0})


def test_pair_of_product_state_factorizes():
    """
    Test reconstruct_pair() on ρ ⊗ ρ.
    """
    rho = source.block_state(QGM, 1).dense
    product = qcore.tensor(rho, rho)
    rebuilt = tomography.reconstruct_pair(tomography.pauli_expectations(product))
    assert np.allclose(rebuilt.entries, product.entries, atol=1e-10)


def test_alphabet_povm_weight():
    """
    Test alphabet_povm().

    For {|0⟩, |+⟩} the weight is 1/(1 + 1/√2); for an orthonormal basis it
    is 1 and the rest element vanishes.
    """
    povm = tomography.alphabet_povm(QGM.alphabet)
    assert povm.labels == ("0", "f", tomography.REST_OUTCOME)
    assert np.trace(povm.matrices[0]) == pytest.approx(1 / (1 + 1 / np.sqrt(2)), abs=1e-9)
    assert np.allclose(povm.matrices.sum(axis=0), np.eye(2))
    assert np.min(np.linalg.eigvalsh(povm.matrices[-1])) >= -1e-10
    orthogonal = tomography.alphabet_povm(source.periodic("001").alphabet)
    assert np.allclose(orthogonal.matrices[-1], 0.0, atol=1e-9)


def test_known_alphabet_recovers_golden_mean_pairs():
    """
    Test known_alphabet_infer() on exact QGM probabilities.

    The alphabet POVM at ℓ = 2 recovers Pr(00) = 1/3 and Pr(ff) = 0.
    """
    povm = tomography.alphabet_povm(QGM.alphabet)
    freqs = measurement.measured_word_dist(QGM, measurement.DQMP.repeated(povm), 2)
    report = tomography.known_alphabet_infer(freqs, QGM.alphabet, 2, povm)
    assert report.unique
    assert report.estimate[("0", "0")] == pytest.approx(1 / 3, abs=1e-9)
    assert report.estimate.get(("f", "f"), 0.0) == pytest.approx(0.0, abs=1e-9)
    assert report.residual < 1e-9


def test_known_alphabet_with_four_states_is_ambiguous():
    """
    Test known_alphabet_infer() with |Q| = d² = 4.

    {|0⟩, |1⟩, |+⟩, |−⟩} cannot separate the mixtures giving I/2.
    """
    src = source.unifilar_qubit(0.5)
    povm = tomography.alphabet_povm(src.alphabet)
    freqs = measurement.measured_word_dist(src, measurement.DQMP.repeated(povm), 1)
    report = tomography.known_alphabet_infer(freqs, src.alphabet, 1, povm)
    assert not report.unique
    assert report.residual < 1e-9


def test_sic_povm_with_three_states_is_unique():
    """
    Test known_alphabet_infer() with the SIC-POVM and three alphabet states.
    """
    src = source.three_symbol_qgm()
    sic = measurement.instrument("SIC")
    freqs = measurement.measured_word_dist(src, measurement.DQMP.repeated(sic), 1)
    report = tomography.known_alphabet_infer(freqs, src.alphabet, 1, sic)
    assert report.unique
    for symbol in ("0", "1", "+"):
        assert report.estimate[(symbol,)] == pytest.approx(1 / 3, abs=1e-9)


def test_source_from_density():
    """
    Test source_from_density().

    ρ₀ = diag(¾, ¼) becomes one state emitting the eigenstates with
    probabilities ¾ and ¼.
    """
    rho = qcore.DensityMatrix(np.diag([0.75, 0.25]))
    src = tomography.reconstruct_source(rho=rho)
    assert src.states == ("S",)
    assert np.allclose(src.underlying.stacked[:, 0, 0], [0.75, 0.25])
    assert np.allclose(source.block_state(src, 1).dense.entries, rho.entries)


def test_source_from_words_recovers_qgm():
    """
    Test source_from_words() on the QGM pair distribution.

    The order-1 model has Pr(0|0) = Pr(f|0) = ½ and Pr(0|f) = 1, and its
    block entropies match the original.
    """
    dist = source.block_state(QGM, 2).word_distribution()
    rebuilt = tomography.reconstruct_source(dist=dist, alphabet=QGM.alphabet)
    assert rebuilt.states == ("0", "f")
    stacked = rebuilt.underlying.stacked
    zero, f = rebuilt.symbols.index("0"), rebuilt.symbols.index("f")
    assert stacked[zero, 0, 0] == pytest.approx(0.5)
    assert stacked[f, 0, 1] == pytest.approx(0.5)
    assert stacked[zero, 1, 0] == pytest.approx(1.0)
    for length in range(1, 5):
        assert source.block_state(rebuilt, length).entropy() == pytest.approx(
            source.block_state(QGM, length).entropy(), abs=1e-9)


def test_source_from_words_period_three():
    """
    Test an order-2 reconstruction of the period-3 process.
    """
    src = source.periodic("001")
    dist = source.block_state(src, 3).word_distribution()
    rebuilt = tomography.source_from_words(dist, src.alphabet)
    assert len(rebuilt.states) == 3
    assert source.block_state(rebuilt, 3).word_distribution().distance(dist) < 1e-12
    with pytest.raises(ValidationError):
        tomography.reconstruct_source(dist=dist)


def test_min_predictive_measurement():
    """
    Test min_predictive_measurement().

    For ½(|00⟩⟨00| + |11⟩⟨11|) the z-basis leaves the second site pure; for
    a product state no measurement helps.
    """
    correlated = qcore.DensityMatrix(np.diag([0.5, 0.0, 0.0, 0.5]), (2, 2))
    pvm, value = tomography.min_predictive_measurement(correlated, (10, 20))
    assert value == pytest.approx(0.0, abs=1e-9)
    assert pvm.is_pvm
    assert tomography.conditional_gain(correlated, (10, 20))["gain"] == pytest.approx(1.0, abs=1e-9)
    single = qcore.DensityMatrix(np.diag([0.8, 0.2]))
    product = qcore.tensor(qcore.maximally_mixed((2,)), single)
    _, value = tomography.min_predictive_measurement(product, (10, 20))
    assert value == pytest.approx(qcore.von_neumann_entropy(single), abs=1e-9)


def test_iid_tomography_warns():
    """
    Test iid_tomography().

    The nonunifilar qubit looks maximally mixed site by site, hiding its
    correlations.
    """
    with pytest.warns(UserWarning, match="i.i.d. assumption hides correlations"):
        report = tomography.iid_tomography(source.nonunifilar_qubit(0.3), 6)
    assert np.allclose(report.estimate.entries, np.eye(2) / 2)
    assert report.extra["gap"] > 0


def test_sampled_error_shrinks():
    """
    Test sampled_qubit_tomography() on a ladder of sample sizes.
    """
    errors = [tomography.sampled_qubit_tomography(QGM, count, seed=7).extra["trace_distance"]
              for count in (1000, 100000)]
    assert errors[1] < errors[0]
    assert errors[1] < 0.02
    with pytest.raises(ValidationError):
        tomography.sampled_qubit_tomography(source.unifilar_qutrit(), 100)
