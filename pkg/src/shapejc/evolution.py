"""Closed-form interaction-picture evolution matrix and its building blocks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import OperatorBundle, block_indices, interior_indices, spectral_function
from .errors import NotResonant
from .oracle import exact_propagator


@dataclass(frozen=True)
class FrequencyOperators:
    """Diagonal frequency operators omega_1, omega_2 and the crossing operators C, D."""

    bundle: OperatorBundle
    omega1: np.ndarray
    omega2: np.ndarray
    C_op: np.ndarray
    D_op: np.ndarray

    @property
    def params(self):
        return self.bundle.params

    @property
    def w1(self) -> np.ndarray:
        return np.diag(self.omega1).real

    @property
    def w2(self) -> np.ndarray:
        return np.diag(self.omega2).real


@dataclass(frozen=True)
class EvolutionMatrix:
    t: float
    U: np.ndarray
    blocks: list


def build_frequencies(bundle: OperatorBundle) -> FrequencyOperators:
    p = bundle.params
    hd = p.hbar * p.delta

    def freq(E):
        return np.sqrt((p.alpha * E) ** 2 + hd**2) / p.hbar

    omega1 = spectral_function(bundle.H2, freq)
    omega2 = spectral_function(bundle.H1, freq)
    C = 1j * bundle.h2_power(-0.25) @ bundle.sqrtTBminus
    D = -C.conj().T
    for a in (omega1, omega2, C, D):
        a.setflags(write=False)
    return FrequencyOperators(bundle, omega1, omega2, C, D)


def _assemble(c1, s1, c2, s2, C) -> np.ndarray:
    return np.block([
        [np.diag(c1), np.diag(s1) @ C],
        [-np.diag(s2) @ C.conj().T, np.diag(c2)],
    ])


def _blocks(U: np.ndarray, N: int) -> list:
    out = []
    for m in range(N - 1):
        i = list(block_indices(m, N))
        out.append(U[np.ix_(i, i)].copy())
    return out


def evolution_matrix(freqs: FrequencyOperators, t: float) -> EvolutionMatrix:
    """[[cos(w1 t), sin(w1 t) C], [-sin(w2 t) C^dagger, cos(w2 t)]]."""
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    a1, a2 = freqs.w1 * t, freqs.w2 * t
    U = _assemble(np.cos(a1), np.sin(a1), np.cos(a2), np.sin(a2), freqs.C_op)
    return EvolutionMatrix(float(t), U, _blocks(U, freqs.bundle.N))


def resonant_evolution(freqs: FrequencyOperators, t: float) -> EvolutionMatrix:
    """Resonant form with half the inversion frequencies nu_1, nu_2."""
    p = freqs.params
    if p.delta != 0:
        raise NotResonant(f"resonant evolution needs delta = 0 (got {p.delta})")
    b = freqs.bundle
    half1 = p.alpha * b.spectrum.shifted / p.hbar * t
    half2 = p.alpha * b.spectrum.energies / p.hbar * t
    U = _assemble(np.cos(half1), np.sin(half1), np.cos(half2), np.sin(half2), freqs.C_op)
    if p.alpha > 0:
        # omega_j = |alpha| E / hbar coincides with nu_j / 2 only for alpha > 0
        ref = evolution_matrix(freqs, t).U
        assert np.max(np.abs(U - ref)) <= 1e-13 * max(1.0, abs(t) * np.max(freqs.w1)), \
            "resonant and general evolution matrices disagree"
    return EvolutionMatrix(float(t), U, _blocks(U, b.N))


def unitarity_defect(U, interior: bool | np.ndarray = True, ground: bool = False) -> float:
    """max(||U^dagger U - I||, ||U U^dagger - I||) in operator norm.

    By default restricted to the coupled-pair subspace; pass ``interior=False``
    for the full truncated space.
    """
    M = U.U if isinstance(U, EvolutionMatrix) else np.asarray(U)
    if isinstance(interior, np.ndarray):
        idx = interior
    elif interior:
        idx = interior_indices(M.shape[0] // 2, ground=ground)
    else:
        idx = np.arange(M.shape[0])
    M = M[np.ix_(idx, idx)]
    eye = np.eye(len(idx))
    return float(max(
        np.linalg.norm(M.conj().T @ M - eye, 2),
        np.linalg.norm(M @ M.conj().T - eye, 2),
    ))


def fidelity_vs_oracle(freqs: FrequencyOperators, t: float, ground: bool = False) -> float:
    """Max-abs deviation of the closed form from exp(-i H_int t / hbar) on the interior."""
    b = freqs.bundle
    U = evolution_matrix(freqs, t).U
    Ue = exact_propagator(b.H_int, t, b.params.hbar)
    idx = interior_indices(b.N, ground=ground)
    sub = np.ix_(idx, idx)
    return float(np.max(np.abs(U[sub] - Ue[sub])))
