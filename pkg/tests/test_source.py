import json

import numpy as np
import pytest

from context import qcore, qmeasures, source
from qproc.errors import ValidationError


def test_qgm_single_site_state():
    """
    Test block_state() on the |0⟩-|+⟩ Quantum Golden Mean.

    ρ₀ = ⅔|0⟩⟨0| + ⅓|+⟩⟨+|.
    """
    rho = source.block_state(source.qgm(np.pi / 2), 1).dense
    expected = 2 / 3 * np.diag([1.0, 0.0]) + 1 / 3 * np.full((2, 2), 0.5)
    assert np.allclose(rho.entries, expected), 'ρ₀ does not match'


def test_block_state_is_stationary():
    """
    Test the stationarity of block states.

    Tracing out either end of ρ_{0:3} gives ρ_{0:2}.
    """
    src = source.nonunifilar_qubit()
    three = source.block_state(src, 3).dense
    two = source.block_state(src, 2).dense
    assert np.allclose(qcore.partial_trace(three, [0, 1]).entries, two.entries, atol=1e-9)
    assert np.allclose(qcore.partial_trace(three, [1, 2]).entries, two.entries, atol=1e-9)


def test_iid_block_is_product():
    """
    Test block_state() on an i.i.d. source.

    ρ_{0:ℓ} = ρ_iid^{⊗ℓ}.
    """
    src = source.iid(state=None, p=0.3, phi=np.pi / 3)
    single = source.block_state(src, 1).dense
    triple = source.block_state(src, 3).dense
    assert np.allclose(triple.entries, qcore.tensor_all([single] * 3).entries)


def test_gram_and_dense_spectra_agree():
    """
    Test the two eigenvalue paths of BlockState.

    The Gram spectrum equals the nonzero spectrum of the dense matrix.
    """
    block = source.block_state(source.three_symbol_qgm(), 5)
    dense = block.dense.spectrum
    gram = block.spectrum
    assert np.allclose(np.sort(gram[gram > 1e-10]), np.sort(dense[dense > 1e-10]), atol=1e-9)
    assert block.entropy() == pytest.approx(qcore.von_neumann_entropy(block.dense), abs=1e-9)


def test_orthogonal_alphabet_matches_classical_entropy():
    """
    Test block entropies of an orthogonal alphabet.

    With φ = π the QGM emits |0⟩ and |1⟩, so S(ℓ) equals the Golden Mean H(ℓ).
    """
    src = source.qgm(np.pi)
    for length in range(1, 6):
        block = source.block_state(src, length)
        assert block.entropy() == pytest.approx(block.word_distribution().entropy(), abs=1e-9)


def test_period_three_orthogonal_block():
    """
    Test block_state() on the orthogonal period-3 source.

    ρ_{0:3} has three equal eigenvalues.
    """
    block = source.block_state(source.periodic("001"), 3)
    assert np.allclose(block.spectrum, [1 / 3] * 3)


@pytest.mark.parametrize("factory, unifilar", [
    (source.unifilar_qubit, True),
    (source.nonunifilar_qubit, False),
    (source.three_symbol_qgm, True),
    (source.unifilar_qutrit, True),
])
def test_quantum_unifilarity(factory, unifilar):
    """
    Test is_quantum_unifilar() on the example sources.
    """
    witness = source.is_quantum_unifilar(factory())
    assert bool(witness) is unifilar
    if not unifilar:
        assert witness.counterexample["state"] in ("A", "B")


def test_three_symbol_witness_in_a_is_m01():
    """
    Test the witness PVM of the 3-symbol QGM.

    From A, |0⟩ leads back to A and |1⟩ to B, so the witness is M01.
    """
    projectors = source.is_quantum_unifilar(source.three_symbol_qgm()).projectors["A"]
    assert np.allclose(projectors["A"], np.diag([1, 0]))
    assert np.allclose(projectors["B"], np.diag([0, 1]))


def test_unifilar_qubit_limits():
    """
    Test the unifilar qubit preset at its limiting parameters.

    p = ½ is the maximally-mixed i.i.d. process; p = 0 is the period-2 word |0+⟩.
    """
    mixed = source.block_state(source.unifilar_qubit(0.5), 2).dense
    assert np.allclose(mixed.entries, np.eye(4) / 4)
    periodic = source.block_state(source.unifilar_qubit(0.0), 2)
    assert periodic.word_distribution().probs == pytest.approx({("0", "+"): 0.5, ("+", "0"): 0.5})


def test_preset_range_checks():
    """
    Test the preset parameter ranges.
    """
    with pytest.raises(ValidationError):
        source.qgm(4.0)
    with pytest.raises(ValidationError):
        source.unifilar_qubit(1.5)
    with pytest.raises(ValidationError):
        source.periodic("0x1")


def test_emitted_mixtures_of_nonunifilar_source():
    """
    Test emitted_mixtures().

    With p = ½ each state emits an equal mixture of two states.
    """
    mixtures = source.emitted_mixtures(source.nonunifilar_qubit(0.5))
    plus = np.full((2, 2), 0.5)
    assert np.allclose(mixtures["A"].entries, 0.5 * np.diag([1, 0]) + 0.5 * plus)


def test_load_preset_uri():
    """
    Test load_source() with a preset URI and parameters.
    """
    src = source.load_source("preset:qgm?phi=1.5707963")
    assert src.name == "qgm"
    assert src.params["phi"] == pytest.approx(np.pi / 2, abs=1e-7)
    with pytest.raises(ValidationError):
        source.load_source("preset:nope")
    with pytest.raises(ValidationError):
        source.load_source("preset:qgm?p=0.3")


def test_load_source_json(tmp_path):
    """
    Test load_source() with a JSON file.

    The file describes the |0⟩-|+⟩ QGM and reproduces its ρ₀.
    """
    s = 1 / np.sqrt(2)
    doc = {
        "dim": 2,
        "states": ["A", "B"],
        "alphabet": {"0": [[1, 0], [0, 0]], "+": [[s, 0], [s, 0]]},
        "transitions": {"0": [[0.5, 0], [1, 0]], "+": [[0, 0.5], [0, 0]]},
    }
    path = tmp_path / "qgm.json"
    path.write_text(json.dumps(doc))
    src = source.load_source(str(path))
    expected = source.block_state(source.qgm(np.pi / 2), 1).dense.entries
    assert np.allclose(source.block_state(src, 1).dense.entries, expected)


def test_load_source_reports_position(tmp_path):
    """
    Test JSON parse errors.

    The message names the file with line and column.
    """
    path = tmp_path / "broken.json"
    path.write_text('{"dim": 2,\n "states": [}')
    with pytest.raises(ValidationError, match=r"broken\.json:2:"):
        source.load_source(str(path))


def test_symbol_mismatch():
    """
    Test build_source().

    Every HMC symbol needs a quantum alphabet entry.
    """
    hmc = source.qgm().underlying
    alphabet = source.QuantumAlphabet((("0", source.KET_ZERO),))
    with pytest.raises(ValidationError):
        source.build_source(hmc, alphabet)


def test_same_ray_is_rejected():
    """
    Test the QuantumAlphabet constructor.

    Two names for the same ray (up to phase) are rejected.
    """
    with pytest.raises(ValidationError):
        source.QuantumAlphabet((("a", source.KET_ZERO), ("b", qcore.PureState([-1.0, 0.0]))))


@pytest.mark.parametrize("src, symbols", [
    (source.qgm(0.0), ("0",)),
    (source.iid(None, 0.3, 0.0), ("0",)),
    (source.periodic("00f", 0.0), ("0",)),
], ids=["qgm", "iid", "period3"])
def test_zero_angle_merges_symbols(src, symbols):
    """
    Test presets at φ = 0, where |ψ(φ)⟩ = |0⟩.

    The two letters collapse onto one symbol and every block is pure.
    """
    assert src.underlying.alphabet.symbols == symbols
    table = qmeasures.quantum_measures(src, 4)
    assert np.allclose(table.block_entropy, 0.0, atol=1e-9)


def test_template_letter_matching_angle_is_merged():
    """
    Test periodic('01f', π): 'f' is |1⟩ and merges into '1'.

    The source is the orthogonal period-3 word 011, whose length-2 words
    are already distinct.
    """
    src = source.periodic("01f", np.pi)
    assert src.underlying.alphabet.symbols == ("0", "1")
    assert np.allclose(src.underlying.transitions["1"].sum(axis=1), [0.0, 1.0, 1.0])
    table = qmeasures.quantum_measures(src, 6)
    assert table.rate == pytest.approx(0.0, abs=1e-9)
    assert table.excess == pytest.approx(np.log2(3), abs=1e-9)


def test_distinct_angle_keeps_symbols():
    """
    Test that nondegenerate presets keep their letters.
    """
    assert source.qgm(np.pi).underlying.alphabet.symbols == ("0", "f")
    assert source.periodic("0+f", np.pi / 3).underlying.alphabet.symbols == ("0", "+", "f")
