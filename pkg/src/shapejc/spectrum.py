"""Dressed eigenvalues, mixing coefficients and eigenstates, block by block."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import JCParams, LadderSpectrum, block_indices, g_index
from .errors import BlockOutOfRange, DegenerateLadder, InvalidFrequency


@dataclass(frozen=True)
class DressedPair:
    m: int
    E_plus: float
    E_minus: float
    lambda_plus: float
    lambda_minus: float
    C_m_plus: float
    C_m_minus: float
    C_m1_plus: float
    C_m1_minus: float
    psi_plus: np.ndarray
    psi_minus: np.ndarray


@dataclass(frozen=True)
class HOLimitData:
    omega: float
    omega0: float
    delta_m: float
    gamma_m_plus: float
    gamma_m_minus: float

    @property
    def C_m_plus(self) -> float:
        return 1.0 / math.sqrt(1.0 + self.gamma_m_plus**2)

    @property
    def C_m_minus(self) -> float:
        return 1.0 / math.sqrt(1.0 + self.gamma_m_minus**2)


def _check_block(m: int, spectrum: LadderSpectrum) -> float:
    N = spectrum.dim
    if not 0 <= m <= N - 2:
        raise BlockOutOfRange(m, N)
    return float(spectrum.energies[m + 1])


def interaction_eigenvalues(m: int, spectrum: LadderSpectrum, params: JCParams) -> tuple[float, float]:
    """lambda_m^(+/-) = +/- alpha sqrt(E_{m+1}^2 + beta^2)."""
    E = _check_block(m, spectrum)
    lam = abs(params.alpha) * math.hypot(E, params.beta)
    return lam, -lam


def dressed_eigenvalues(m: int, spectrum: LadderSpectrum, params: JCParams) -> tuple[float, float]:
    E = _check_block(m, spectrum)
    root = math.hypot(params.alpha * E, params.hbar * params.delta)
    return E + root, E - root


def _mixing_ratios(b: float, c: float) -> tuple[float, float]:
    """Ratios C_{m+1}/C_m for the +/- eigenvectors of [[b, c], [c, -b]].

    With b = hbar*Delta and c = alpha*E_{m+1} these are
    (sqrt(E^2 + beta^2) -/+ beta) / E, written without cancellation.
    """
    r = math.hypot(b, c)
    if b >= 0:
        return c / (r + b), (r + b) / c
    return (r - b) / c, c / (r - b)


def dressed_coefficients(m: int, spectrum: LadderSpectrum, params: JCParams) -> tuple[float, float, float, float]:
    """(C_m^+, C_m^-, C_{m+1}^+, C_{m+1}^-) from the closed-form ratio and normalization."""
    E = _check_block(m, spectrum)
    if E == 0:
        raise DegenerateLadder(f"E_{m + 1} = 0")
    if params.delta == 0:
        c = 1.0 / math.sqrt(2.0)
        return c, c, c, c
    # magnitudes only; the sign of alpha is carried by dressed_state
    rho_p, rho_m = _mixing_ratios(params.hbar * params.delta, abs(params.alpha) * E)
    cp = 1.0 / math.sqrt(1.0 + rho_p**2)
    cm = 1.0 / math.sqrt(1.0 + rho_m**2)
    return cp, cm, rho_p * cp, rho_m * cm


def dressed_state(m: int, spectrum: LadderSpectrum, params: JCParams, branch: str = "+") -> np.ndarray:
    """Amplitude C_m^(+/-) on e_m and +/- C_{m+1}^(+/-) = +/- C_m^(-/+) on g_{m+1}.

    For negative alpha the g_{m+1} amplitude changes sign, so that the
    + branch stays the upper eigenvalue.
    """
    if branch not in ("+", "-"):
        raise ValueError(f"branch must be '+' or '-' (got {branch!r})")
    cp, cm, c1p, c1m = dressed_coefficients(m, spectrum, params)
    N = spectrum.dim
    ie, ig = block_indices(m, N)
    sgn = 1.0 if params.alpha > 0 else -1.0
    psi = np.zeros(2 * N, complex)
    if branch == "+":
        psi[ie], psi[ig] = cp, sgn * c1p
    else:
        psi[ie], psi[ig] = cm, -sgn * c1m
    return psi


def dressed_pair(m: int, spectrum: LadderSpectrum, params: JCParams) -> DressedPair:
    Ep, Em = dressed_eigenvalues(m, spectrum, params)
    lp, lm = interaction_eigenvalues(m, spectrum, params)
    cp, cm, c1p, c1m = dressed_coefficients(m, spectrum, params)
    return DressedPair(
        m, Ep, Em, lp, lm, cp, cm, c1p, c1m,
        dressed_state(m, spectrum, params, "+"),
        dressed_state(m, spectrum, params, "-"),
    )


def ground_singlet(H_total: np.ndarray) -> tuple[float, np.ndarray]:
    """Energy and state of the uncoupled level g_0, read off H_total."""
    N = H_total.shape[0] // 2
    i = g_index(0, N)
    v = np.zeros(2 * N, complex)
    v[i] = 1.0
    return float(H_total[i, i].real), v


def ho_limit_eigensystem(m: int, omega: float, omega0: float, params: JCParams) -> tuple[float, float, HOLimitData]:
    """Harmonic-oscillator energies and gamma ratios for detuning omega - omega0.

    Only ``alpha`` and ``hbar`` are taken from ``params``.
    """
    if not omega > 0:
        raise InvalidFrequency(f"omega must be positive (got {omega})")
    if m < 0:
        raise BlockOutOfRange(m, m + 2)
    alpha, hbar = params.alpha, params.hbar
    n1 = m + 1
    detuning = omega - omega0
    root = hbar * math.hypot(alpha * omega * n1, detuning)
    E_plus = n1 * hbar * omega + root
    E_minus = n1 * hbar * omega - root

    delta_m = detuning / (alpha * omega * n1)
    s = math.hypot(1.0, delta_m)
    # gamma_+/- = sqrt(1 + d^2) -/+ d; the cancelling branch uses 1/(s + |d|)
    if delta_m >= 0:
        g_plus, g_minus = 1.0 / (s + delta_m), s + delta_m
    else:
        g_plus, g_minus = s - delta_m, 1.0 / (s - delta_m)
    return E_plus, E_minus, HOLimitData(omega, omega0, delta_m, g_plus, g_minus)
