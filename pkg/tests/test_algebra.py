import numpy as np
import pytest

from shapejc import (
    JCParams,
    ShapeInvariantModel,
    basis_state,
    block_indices,
    build_operators,
    build_spectrum,
    interior_indices,
    sigma_matrices,
    spectral_function,
)
from shapejc.errors import DimensionTooSmall, InvalidModel, NonPositiveRemainder, NotDiagonal

from conftest import make_models


def ops(model, N, alpha=0.2, delta=0.3):
    return build_operators(build_spectrum(model, N), JCParams(alpha, delta))


class TestSpectrum:
    def test_harmonic_levels(self):
        sp = build_spectrum(ShapeInvariantModel.harmonic(1.0), 5)
        np.testing.assert_array_equal(sp.energies, [0, 1, 2, 3, 4])
        assert sp.edge_energy == 5 and sp.edge_exact

    def test_harmonic_scales_with_hbar_omega(self):
        sp = build_spectrum(ShapeInvariantModel.harmonic(2.0, hbar=0.5), 4)
        np.testing.assert_allclose(sp.energies, [0, 1, 2, 3])

    def test_self_similar_partial_sums(self):
        sp = build_spectrum(ShapeInvariantModel.self_similar(1.0, 0.5), 4)
        np.testing.assert_allclose(sp.energies, [0, 1, 1.5, 1.75], rtol=0, atol=1e-15)
        assert sp.edge_energy == pytest.approx(1.875)

    def test_explicit_cumulative(self):
        sp = build_spectrum(ShapeInvariantModel.explicit([0.5, 2.0, 1.0]), 3)
        np.testing.assert_allclose(sp.energies, [0, 0.5, 2.5])
        assert sp.edge_energy == 3.5 and sp.edge_exact

    def test_explicit_edge_padding(self):
        sp = build_spectrum(ShapeInvariantModel.explicit([0.5, 2.0]), 3)
        assert not sp.edge_exact
        assert sp.edge_energy == 4.5

    def test_nonpositive_remainder(self):
        with pytest.raises(NonPositiveRemainder) as err:
            build_spectrum(ShapeInvariantModel.explicit([1, -0.2]), 3)
        assert err.value.k == 2

    def test_self_similar_negative_r1(self):
        with pytest.raises(NonPositiveRemainder) as err:
            build_spectrum(ShapeInvariantModel.self_similar(-1.0, 0.5), 3)
        assert err.value.k == 1

    def test_dimension_too_small(self):
        with pytest.raises(DimensionTooSmall):
            build_spectrum(ShapeInvariantModel.harmonic(1.0), 1)

    def test_explicit_list_too_short(self):
        with pytest.raises(InvalidModel):
            build_spectrum(ShapeInvariantModel.explicit([1.0]), 4)

    @pytest.mark.parametrize("kwargs", [
        dict(kind="harmonic", omega=0.0),
        dict(kind="self_similar", r1=1.0, q=0.0),
        dict(kind="explicit", remainders=()),
        dict(kind="morse"),
        dict(kind="harmonic", omega=1.0, hbar=0.0),
    ])
    def test_invalid_models(self, kwargs):
        with pytest.raises(InvalidModel):
            ShapeInvariantModel(**kwargs)

    @pytest.mark.parametrize("kind", ["harmonic", "self_similar", "explicit"])
    def test_strictly_increasing(self, kind):
        sp = build_spectrum(make_models(20)[kind], 20)
        assert sp.energies[0] == 0
        assert np.all(np.diff(sp.energies) > 0)

    def test_spectrum_is_read_only(self):
        sp = build_spectrum(ShapeInvariantModel.harmonic(1.0), 4)
        with pytest.raises(ValueError):
            sp.energies[0] = 1.0


class TestParams:
    def test_derived(self):
        p = JCParams(0.2, 0.3, 1.0)
        assert p.beta == pytest.approx(1.5)
        assert p.gamma == pytest.approx(4 * 0.04 * 1.5)
        assert not p.resonant

    def test_alpha_zero_rejected(self):
        with pytest.raises(InvalidModel):
            JCParams(0.0)

    def test_hbar_positive(self):
        with pytest.raises(InvalidModel):
            JCParams(0.1, 0.0, -1.0)


class TestOperators:
    def test_resonant_block(self):
        b = ops(ShapeInvariantModel.harmonic(1.0), 3, 0.1, 0.0)
        i = list(block_indices(0, 3))
        np.testing.assert_allclose(b.H_int[np.ix_(i, i)], 0.1 * np.array([[0, 1], [1, 0]]))

    @pytest.mark.parametrize("kind", ["harmonic", "self_similar", "explicit"])
    def test_hermitian(self, kind):
        b = ops(make_models(12)[kind], 12)
        for H in (b.H_total, b.H_int, b.H_o, b.S_i):
            assert np.array_equal(H, H.conj().T)

    def test_block_eigenvalues(self):
        b = ops(ShapeInvariantModel.harmonic(1.0), 6, 0.2, 0.3)
        i = list(block_indices(0, 6))
        ev = np.linalg.eigvalsh(b.H_total[np.ix_(i, i)])
        np.testing.assert_allclose(ev, [1 - np.sqrt(0.13), 1 + np.sqrt(0.13)], atol=1e-14)

    def test_ladder_entries(self):
        b = ops(make_models(6)["explicit"], 6)
        E = b.spectrum.energies
        for m in range(5):
            v = b.Bplus @ np.eye(6)[m]
            np.testing.assert_allclose(v, np.sqrt(E[m + 1]) * np.eye(6)[m + 1])
        assert np.array_equal(b.Bminus, b.Bplus.conj().T)
        np.testing.assert_allclose(b.Bplus @ b.Bminus, b.H1, atol=1e-14)
        np.testing.assert_allclose((b.Bminus @ b.Bplus)[:5, :5], b.H2[:5, :5], atol=1e-14)

    def test_normalized_raising(self):
        b = ops(ShapeInvariantModel.self_similar(1.0, 0.7), 6)
        v = np.eye(6)[0]
        for m in range(1, 6):
            v = b.Qdagger @ v
            np.testing.assert_array_equal(v, np.eye(6)[m])

    def test_interaction_maps_pairs(self):
        b = ops(ShapeInvariantModel.self_similar(1.0, 0.8), 7, alpha=0.3, delta=0.0)
        E = b.spectrum.energies
        for m in range(6):
            out = b.H_int @ basis_state(7, "g", m + 1)
            np.testing.assert_allclose(out, 0.3 * E[m + 1] * basis_state(7, "e", m), atol=1e-15)

    def test_root_ladder(self):
        b = ops(ShapeInvariantModel.harmonic(1.0), 6)
        E = b.spectrum.energies
        for m in range(5):
            out = b.sqrtTBminus @ np.eye(6)[m + 1]
            assert abs(out[m]) == pytest.approx(E[m + 1] ** 0.25)
        # polar root: root times its adjoint reproduces H2^(1/2) on the interior
        prod = b.sqrtTBminus @ b.sqrtBplusTdag
        np.testing.assert_allclose(prod[:5, :5], b.h2_power(0.5)[:5, :5], atol=1e-15)

    def test_root_intertwines(self):
        b = ops(make_models(9)["explicit"], 9)
        f = np.cos
        lhs = b.sqrtTBminus @ spectral_function(b.H1, f)
        rhs = spectral_function(b.H2, f) @ b.sqrtTBminus
        np.testing.assert_allclose(lhs, rhs, atol=1e-15)

    def test_pauli_structure(self):
        sp, sm, s3 = sigma_matrices(3)
        np.testing.assert_array_equal(sp @ sm - sm @ sp, s3)
        b = ops(ShapeInvariantModel.harmonic(1.0), 3)
        np.testing.assert_array_equal(b.sigma3, s3)

    def test_block_diagonal_structure(self):
        N = 6
        b = ops(ShapeInvariantModel.harmonic(1.0), N)
        mask = np.zeros((2 * N, 2 * N), bool)
        for m in range(N - 1):
            i = list(block_indices(m, N))
            mask[np.ix_(i, i)] = True
        mask[N, N] = mask[N - 1, N - 1] = True
        assert not np.any(b.H_total[~mask])

    def test_matrices_are_read_only(self):
        b = ops(ShapeInvariantModel.harmonic(1.0), 3)
        with pytest.raises(ValueError):
            b.H_total[0, 0] = 1.0


class TestSpectralFunction:
    def test_identity(self):
        b = ops(ShapeInvariantModel.harmonic(1.0), 5)
        np.testing.assert_array_equal(spectral_function(b.H1, lambda x: x), b.H1)

    def test_cos_zero(self):
        b = ops(ShapeInvariantModel.harmonic(1.0), 5)
        np.testing.assert_array_equal(spectral_function(b.H2, lambda x: np.cos(x * 0)), np.eye(5))

    def test_sqrt(self):
        b = ops(ShapeInvariantModel.harmonic(1.0), 3)
        np.testing.assert_allclose(np.diag(spectral_function(b.H2, np.sqrt)), [1, np.sqrt(2), np.sqrt(3)])

    def test_not_diagonal(self):
        with pytest.raises(NotDiagonal):
            spectral_function(np.array([[1.0, 1e-300], [0.0, 1.0]]), np.sqrt)


def test_interior_indices():
    np.testing.assert_array_equal(interior_indices(3), [0, 1, 4, 5])
    np.testing.assert_array_equal(interior_indices(3, ground=True), [0, 1, 3, 4, 5])


def test_basis_state_bounds():
    with pytest.raises(IndexError):
        basis_state(3, "g", 3)
