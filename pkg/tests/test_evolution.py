import math

import numpy as np
import pytest

from shapejc import (
    evolution_matrix,
    exact_propagator,
    fidelity_vs_oracle,
    interior_indices,
    resonant_evolution,
    unitarity_defect,
)
from shapejc.errors import NotResonant

from conftest import make_setup


def test_frequencies_resonant_are_half_inversion_frequencies():
    s = make_setup("self_similar", 10, 0.3, 0.0)
    np.testing.assert_allclose(s.freqs.w1, s.nus.v1 / 2, rtol=1e-15)
    np.testing.assert_allclose(s.freqs.w2, s.nus.v2 / 2, rtol=1e-15)


def test_frequency_value_and_eigen_gap(ho8):
    assert ho8.freqs.w1[0] == pytest.approx(math.sqrt(0.13), abs=1e-15)
    i = [0, 9]
    gap = np.diff(np.linalg.eigvalsh(ho8.bundle.H_int[np.ix_(i, i)]))[0]
    assert gap / 2 == pytest.approx(ho8.freqs.w1[0], abs=1e-15)


def test_frequency_shift_identity():
    s = make_setup("explicit", 12, 0.4, 0.25)
    assert np.array_equal(s.freqs.w1[:-1], s.freqs.w2[1:])


def test_crossing_operators(ho8):
    C, D = ho8.freqs.C_op, ho8.freqs.D_op
    assert np.array_equal(D, -C.conj().T)
    np.testing.assert_allclose((C @ C.conj().T)[:7, :7], np.eye(7), atol=1e-15)
    # g_{m+1} -> unit-modulus multiple of e_m
    for m in range(7):
        assert abs(C[m, m + 1]) == pytest.approx(1.0, abs=1e-15)
        assert C[m, m + 1] == pytest.approx(-1j)


def test_identity_at_zero(ho8):
    assert np.array_equal(evolution_matrix(ho8.freqs, 0.0).U, np.eye(16))


def test_intertwining(ho8):
    f = ho8.freqs
    for t in (0.3, 1.7, 4.0):
        lhs = np.diag(np.sin(f.w1 * t)) @ f.C_op
        rhs = f.C_op @ np.diag(np.sin(f.w2 * t))
        np.testing.assert_allclose(lhs, rhs, atol=1e-15)


def test_block_form(ho8):
    t = 1.3
    ev = evolution_matrix(ho8.freqs, t)
    for m, blk in enumerate(ev.blocks):
        th = ho8.freqs.w1[m] * t
        expected = np.array([[math.cos(th), -1j * math.sin(th)], [-1j * math.sin(th), math.cos(th)]])
        np.testing.assert_allclose(blk, expected, atol=1e-15)


def test_full_transfer_at_resonance(ho8_resonant):
    f = ho8_resonant.freqs
    for m in range(7):
        blk = evolution_matrix(f, math.pi / ho8_resonant.nus.v1[m]).blocks[m]
        assert abs(blk[0, 0]) < 1e-15 and abs(blk[0, 1]) == pytest.approx(1.0)


def test_resonant_exactness_blockwise():
    s = make_setup("harmonic", 16, 0.2, 0.0)
    for t in np.linspace(0, 10 / s.freqs.w1[0], 7):
        ev = evolution_matrix(s.freqs, t)
        for m, blk in enumerate(ev.blocks):
            H = s.params.alpha * s.spectrum.energies[m + 1] * np.array([[0, 1], [1, 0]])
            np.testing.assert_allclose(blk, exact_propagator(H, t), atol=1e-12)


def test_unitarity_interior_and_edge():
    s = make_setup("harmonic", 16, 0.2, 0.3)
    for t in np.linspace(0, 20, 9):
        assert unitarity_defect(evolution_matrix(s.freqs, t)) <= 1e-12
    # including the edge level breaks unitarity at generic times
    U = evolution_matrix(s.freqs, 2.0).U
    assert unitarity_defect(U, interior=False) > 0.1


def test_unitarity_of_identity():
    assert unitarity_defect(np.eye(6)) == 0


def test_resonant_evolution(ho8_resonant):
    f = ho8_resonant.freqs
    assert np.array_equal(resonant_evolution(f, 0.0).U, np.eye(16))
    for t in (0.4, 3.3):
        np.testing.assert_allclose(resonant_evolution(f, t).U, evolution_matrix(f, t).U, atol=1e-15)


def test_resonant_block_at_half_turn():
    s = make_setup("harmonic", 4, 0.1, 0.0)
    t = math.pi / s.freqs.w1[0]
    np.testing.assert_allclose(resonant_evolution(s.freqs, t).blocks[0], -np.eye(2), atol=1e-15)


def test_resonant_evolution_rejects_detuning(ho8):
    with pytest.raises(NotResonant):
        resonant_evolution(ho8.freqs, 1.0)


def test_fidelity_diagnostic(ho8, ho8_resonant):
    assert fidelity_vs_oracle(ho8_resonant.freqs, 2.0) < 1e-14
    assert fidelity_vs_oracle(ho8.freqs, 2.0) > 1e-2


def test_non_finite_time(ho8):
    with pytest.raises(ValueError):
        evolution_matrix(ho8.freqs, float("nan"))
