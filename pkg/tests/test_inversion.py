import math

import numpy as np
import pytest

from shapejc import (
    Backend,
    basis_state,
    dressed_state,
    forcing_matrix,
    heisenberg_sigma3,
    interior_indices,
    inversion_expectation,
    particular_solution,
    sigma3_of_t,
    solve_inversion,
)
from shapejc.errors import BackendDomainError, NonNormalizedState, ShapeMismatch
from shapejc.inversion import expanded_y1F11, expanded_z1F11, forcing_matrix_rewritten

from conftest import make_setup

BACKENDS = [Backend.quadrature(), Backend.series(), Backend.ho_closed_form()]


def test_nu_values():
    s = make_setup("harmonic", 6, 0.5, 0.0)
    np.testing.assert_allclose(s.nus.v1, np.arange(1, 7), atol=1e-15)
    np.testing.assert_allclose(s.nus.v2, np.arange(0, 6), atol=1e-15)
    assert s.nus.v2[0] == 0
    assert np.array_equal(s.nus.v1[:-1], s.nus.v2[1:])


def test_nu_is_twice_resonant_frequency():
    s = make_setup("explicit", 9, 0.35, 0.0)
    np.testing.assert_allclose(s.nus.v1, 2 * s.freqs.w1, rtol=1e-15)


def test_forcing_vanishes_at_resonance(ho8_resonant):
    assert ho8_resonant.params.gamma == 0
    assert np.all(forcing_matrix(ho8_resonant.freqs, 1.4) == 0)


def test_forcing_at_zero(ho8):
    np.testing.assert_allclose(forcing_matrix(ho8.freqs, 0.0),
                               ho8.params.gamma * ho8.bundle.S_i, atol=1e-15)


def test_forcing_is_hermitian(ho8):
    F = forcing_matrix(ho8.freqs, 2.2)
    np.testing.assert_allclose(F, F.conj().T, atol=1e-14)


def test_forcing_ground_row_vanishes(ho8):
    F = forcing_matrix(ho8.freqs, 1.7)
    assert np.max(np.abs(F[ho8.N])) == 0


@pytest.mark.xfail(strict=True, reason="rewritten forcing blocks disagree with the direct product "
                   "U^dagger S_i U, already at t = 0")
@pytest.mark.parametrize("t", [0.0, 0.9])
def test_forcing_rewritten_matches_direct(ho8, t):
    np.testing.assert_allclose(forcing_matrix_rewritten(ho8.freqs, t),
                               forcing_matrix(ho8.freqs, t), atol=1e-12)


def test_expanded_products(ho8):
    t = 1.3
    n1 = ho8.nus.v1
    F11 = forcing_matrix_rewritten(ho8.freqs, t)[:ho8.N, :ho8.N]
    np.testing.assert_allclose(expanded_y1F11(ho8.freqs, ho8.nus, t),
                               np.diag(np.cos(n1 * t)) @ F11, atol=1e-13)
    np.testing.assert_allclose(expanded_z1F11(ho8.freqs, ho8.nus, t),
                               np.diag(np.sin(n1 * t)) @ F11, atol=1e-13)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.kind)
def test_particular_zero_at_resonance_and_origin(ho8, ho8_resonant, backend):
    assert np.all(particular_solution(ho8_resonant.freqs, ho8_resonant.nus, 2.0, backend) == 0)
    assert np.all(particular_solution(ho8.freqs, ho8.nus, 0.0, backend) == 0)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.kind)
def test_particular_slope_at_origin(ho8, backend):
    h = 1e-6
    d = (particular_solution(ho8.freqs, ho8.nus, h, backend)
         - particular_solution(ho8.freqs, ho8.nus, -h, backend)) / (2 * h)
    assert np.max(np.abs(d)) < 1e-8


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.kind)
def test_particular_ground_row_is_zero(ho8, backend):
    P = particular_solution(ho8.freqs, ho8.nus, 1.1, backend)
    assert np.max(np.abs(P[ho8.N])) < 1e-14


def test_quadrature_solves_forced_oscillator(ho8):
    """sigma_P'' + nu^2 sigma_P = F, checked by second differences."""
    f, nus, t, h = ho8.freqs, ho8.nus, 1.5, 1e-3
    P = [particular_solution(f, nus, t + k * h, Backend.quadrature(tol=1e-13)) for k in (-1, 0, 1)]
    second = (P[0] - 2 * P[1] + P[2]) / h**2
    resid = second + (nus.stacked**2)[:, None] * P[1] - forcing_matrix(f, t)
    assert np.max(np.abs(resid)) < 1e-5


def test_quadrature_forcing_choice(ho8):
    a = particular_solution(ho8.freqs, ho8.nus, 0.9, Backend.quadrature(forcing="rewritten"))
    b = particular_solution(ho8.freqs, ho8.nus, 0.9, Backend.quadrature())
    assert a.shape == b.shape and np.all(np.isfinite(a))


@pytest.mark.xfail(strict=True, reason="the three particular-solution backends do not agree "
                   "off resonance; see README")
def test_backends_agree_off_resonance(ho8):
    vals = [particular_solution(ho8.freqs, ho8.nus, 0.9, b) for b in BACKENDS]
    for a in vals[1:]:
        np.testing.assert_allclose(a, vals[0], atol=1e-8)


def test_backend_domain():
    s = make_setup("self_similar", 6, 0.2, 0.3)
    with pytest.raises(BackendDomainError):
        particular_solution(s.freqs, s.nus, 1.0, Backend.ho_closed_form())


def test_backend_validation():
    with pytest.raises(ValueError):
        Backend("magic")
    with pytest.raises(ValueError):
        Backend.quadrature(forcing="other")


def test_series_reports_bound(ho8):
    res = particular_solution(ho8.freqs, ho8.nus, 0.9, Backend.series(), return_info=True)
    assert 0 <= res.bound < 1e-12


def test_sigma3_initial_value(ho8):
    np.testing.assert_array_equal(sigma3_of_t(ho8.freqs, ho8.nus, 0.0), ho8.bundle.sigma3)
    s0 = np.eye(16)
    np.testing.assert_array_equal(sigma3_of_t(ho8.freqs, ho8.nus, 0.0, s0), s0)
    with pytest.raises(ShapeMismatch):
        sigma3_of_t(ho8.freqs, ho8.nus, 1.0, np.eye(3))


@pytest.mark.parametrize("kind", ["harmonic", "self_similar", "explicit"])
def test_resonant_sigma3_matches_heisenberg(kind):
    s = make_setup(kind, 10, 0.3, 0.0)
    idx = np.ix_(interior_indices(10, ground=True), interior_indices(10, ground=True))
    for t in (0.5, 2.0, 7.5):
        S = sigma3_of_t(s.freqs, s.nus, t)
        np.testing.assert_allclose(S[idx], heisenberg_sigma3(s.bundle.H_int, t)[idx], atol=1e-12)
        np.testing.assert_allclose((S @ S)[idx], np.eye(len(idx[0][:, 0])), atol=1e-12)


def test_rabi_oscillation_from_ground_pair(ho8_resonant):
    times = np.linspace(0, 10, 21)
    sol = solve_inversion(ho8_resonant.freqs, times)
    W = inversion_expectation(sol, basis_state(8, "g", 1))
    np.testing.assert_allclose(W, -np.cos(0.4 * times), atol=1e-13)


def test_ground_singlet_stays_down(ho8):
    sol = solve_inversion(ho8.freqs, [0.0, 1.0, 3.0])
    np.testing.assert_allclose(inversion_expectation(sol, basis_state(8, "g", 0)), -1, atol=1e-14)


@pytest.mark.parametrize("delta", [0.0, 0.3])
def test_dressed_state_is_stationary(delta):
    s = make_setup("harmonic", 8, 0.2, delta)
    psi = dressed_state(2, s.spectrum, s.params, "+")
    sol = solve_inversion(s.freqs, np.linspace(0, 5, 6))
    W = inversion_expectation(sol, psi)
    np.testing.assert_allclose(W, W[0], atol=1e-10)
    assert W[0] == pytest.approx(np.vdot(psi, s.bundle.sigma3 @ psi).real, abs=1e-14)


def test_solution_parts(ho8):
    sol = solve_inversion(ho8.freqs, [0.0, 0.5], backend=Backend.series())
    np.testing.assert_allclose(sol.sigma3, sol.homogeneous_part + sol.particular_part)
    assert sol.truncation_bounds.shape == (2,)
    assert sol.backend.kind == "series"


def test_expectation_rejects_unnormalized(ho8):
    sol = solve_inversion(ho8.freqs, [0.0])
    with pytest.raises(NonNormalizedState):
        inversion_expectation(sol, 2 * basis_state(8, "e", 0))
    with pytest.raises(ShapeMismatch):
        inversion_expectation(sol, np.ones(3) / math.sqrt(3))
