"""Population inversion sigma_3(t): homogeneous part plus a particular part
from one of three backends.

Block layout: index 1 is the excited sector, index 2 the ground sector, so
``sigma_12`` is the upper-right N x N block.  Row j of block (j, k) oscillates
at nu_j.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ..algebra import spectral_function
from ..errors import BackendDomainError, NonNormalizedState, ShapeMismatch
from ..evolution import FrequencyOperators, evolution_matrix
from ..oracle import DEFAULT_NODE_BUDGET, integrate_matrix_function
from .kernels import DEFAULT_ORDER, SeriesValue, aux_G, kernel_C, kernel_S

SERIES = "series"
QUADRATURE = "quadrature"
HO_CLOSED_FORM = "ho_closed_form"
BACKENDS = (SERIES, QUADRATURE, HO_CLOSED_FORM)


@dataclass(frozen=True)
class NuOperators:
    """Diagonal inversion frequencies: hbar nu_1 = 2 alpha H2, hbar nu_2 = 2 alpha H1."""

    nu1: np.ndarray
    nu2: np.ndarray

    @property
    def v1(self) -> np.ndarray:
        return np.diag(self.nu1).real

    @property
    def v2(self) -> np.ndarray:
        return np.diag(self.nu2).real

    @property
    def stacked(self) -> np.ndarray:
        """Row frequencies of a 2N x 2N matrix."""
        return np.concatenate([self.v1, self.v2])


def build_nu(bundle) -> NuOperators:
    p = bundle.params
    nu1 = spectral_function(bundle.H2, lambda E: 2 * p.alpha * E / p.hbar)
    nu2 = spectral_function(bundle.H1, lambda E: 2 * p.alpha * E / p.hbar)
    nu1.setflags(write=False)
    nu2.setflags(write=False)
    return NuOperators(nu1, nu2)


@dataclass(frozen=True)
class Backend:
    """Particular-solution backend and its accuracy controls.

    ``series``: truncation order ``order`` of the double power series.
    ``quadrature``: Gauss-Legendre tolerance ``tol`` and ``node_budget``;
    ``forcing`` selects the integrand (``"direct"`` products U^dagger S_i U or
    the rewritten ``"rewritten"`` forms).
    ``ho_closed_form``: harmonic models only.
    """

    kind: str
    order: int = DEFAULT_ORDER
    tol: float = 1e-10
    node_budget: int = DEFAULT_NODE_BUDGET
    forcing: str = "direct"

    def __post_init__(self):
        if self.kind not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS} (got {self.kind!r})")
        if self.forcing not in ("direct", "rewritten"):
            raise ValueError(f"forcing must be 'direct' or 'rewritten' (got {self.forcing!r})")

    @classmethod
    def series(cls, order: int = DEFAULT_ORDER) -> "Backend":
        return cls(SERIES, order=order)

    @classmethod
    def quadrature(cls, tol: float = 1e-10, node_budget: int = DEFAULT_NODE_BUDGET,
                   forcing: str = "direct") -> "Backend":
        return cls(QUADRATURE, tol=tol, node_budget=node_budget, forcing=forcing)

    @classmethod
    def ho_closed_form(cls) -> "Backend":
        return cls(HO_CLOSED_FORM)


@dataclass(frozen=True)
class ParticularResult:
    value: np.ndarray
    bound: float = 0.0
    nodes: int = 0


# -- forcing matrix -----------------------------------------------------------

def forcing_matrix(freqs: FrequencyOperators, t: float) -> np.ndarray:
    """gamma U^dagger(t) S_i U(t) by direct matrix products."""
    b = freqs.bundle
    U = evolution_matrix(freqs, t).U
    return b.params.gamma * (U.conj().T @ b.S_i @ U)


def _trig(freqs: FrequencyOperators, t: float):
    a1, a2 = freqs.w1 * t, freqs.w2 * t
    return (np.diag(np.cos(a1)), np.diag(np.sin(a1)),
            np.diag(np.cos(a2)), np.diag(np.sin(a2)))


def _roots(bundle):
    s = bundle.sqrtTBminus
    return s, s.conj().T, bundle.h2_power(0.25), bundle.h1_power(0.25)


def forcing_matrix_rewritten(freqs: FrequencyOperators, t: float) -> np.ndarray:
    """Forcing blocks rewritten with square roots of T B_- and quarter powers of H1, H2."""
    b = freqs.bundle
    g = b.params.gamma
    c1, s1, c2, s2 = _trig(freqs, t)
    s, sd, h2q, h1q = _roots(b)
    F11 = 1j * g * (s @ c2 @ s1 @ h2q - h2q @ s1 @ c2 @ sd)
    F12 = g * (s @ c2 @ c1 @ s + h2q @ s1 @ s2 @ h1q)
    F21 = g * (sd @ c1 @ c2 @ sd + h1q @ s2 @ s1 @ h2q)
    F22 = 1j * g * (sd @ c1 @ s2 @ h1q - h1q @ s2 @ c1 @ s)
    return np.block([[F11, F12], [F21, F22]])


def expanded_y1F11(freqs: FrequencyOperators, nus: NuOperators, t: float) -> np.ndarray:
    """cos(nu_1 t) F_11(t) written as sums of products of single-frequency factors."""
    b = freqs.bundle
    g = b.params.gamma
    s, sd, h2q, _ = _roots(b)
    w1, w2, n1, n2 = freqs.w1, freqs.w2, nus.v1, nus.v2
    D = np.diag
    left = D(np.cos((n2 - w2) * t)) @ D(np.sin(w1 * t)) + D(np.cos((n2 + w2) * t)) @ D(np.sin(w1 * t))
    right = D(np.sin((n1 - w1) * t)) @ D(np.cos(w2 * t)) - D(np.sin((n1 + w1) * t)) @ D(np.cos(w2 * t))
    return 0.5j * g * (s @ left @ h2q + h2q @ right @ sd)


def expanded_z1F11(freqs: FrequencyOperators, nus: NuOperators, t: float) -> np.ndarray:
    """sin(nu_1 t) F_11(t) written as sums of products of single-frequency factors."""
    b = freqs.bundle
    g = b.params.gamma
    s, sd, h2q, _ = _roots(b)
    w1, w2, n1, n2 = freqs.w1, freqs.w2, nus.v1, nus.v2
    D = np.diag
    left = D(np.sin((n2 - w2) * t)) @ D(np.sin(w1 * t)) + D(np.sin((n2 + w2) * t)) @ D(np.sin(w1 * t))
    right = D(np.cos((n1 - w1) * t)) @ D(np.cos(w2 * t)) - D(np.cos((n1 + w1) * t)) @ D(np.cos(w2 * t))
    return 0.5j * g * (s @ left @ h2q - h2q @ right @ sd)


# -- particular solution backends ---------------------------------------------

def _pinv(v: np.ndarray) -> np.ndarray:
    out = np.zeros_like(v, dtype=float)
    nz = v != 0
    out[nz] = 1.0 / v[nz]
    return out


def _quadrature(freqs, nus, t, backend: Backend) -> ParticularResult:
    nu = nus.stacked
    zero = nu == 0
    forcing = forcing_matrix if backend.forcing == "direct" else forcing_matrix_rewritten

    def integrand(x):
        F = forcing(freqs, x)
        return np.stack([np.cos(nu * x)[:, None] * F,
                         np.sin(nu * x)[:, None] * F,
                         (t - x) * F])

    I, nodes = integrate_matrix_function(integrand, t, backend.tol, backend.node_budget,
                                         return_nodes=True)
    inv = _pinv(nu)
    out = (inv * np.sin(nu * t))[:, None] * I[0] - (inv * np.cos(nu * t))[:, None] * I[1]
    out[zero] = I[2][zero]
    return ParticularResult(out, 0.0, nodes)


def _series(freqs, nus, t, backend: Backend) -> ParticularResult:
    b = freqs.bundle
    g = b.params.gamma
    K = backend.order
    s, sd, _, h1q = _roots(b)
    h2t = b.h2_power(0.75)
    r_h2tb = b.h2_power(0.5) @ s          # root of H2 T B_-
    r_bth2 = r_h2tb.conj().T              # root of B_+ T^dagger H2
    n1, n2, w1, w2 = nus.v1, nus.v2, freqs.w1, freqs.w2
    D = np.diag
    y1, z1 = D(np.cos(n1 * t)), D(np.sin(n1 * t))
    y2, z2 = D(np.cos(n2 * t)), D(np.sin(n2 * t))
    inv1, inv2 = D(_pinv(n1)), D(_pinv(n2))
    bound = [0.0]

    def G(kind, sign, p, q, r) -> np.ndarray:
        val: SeriesValue = aux_G(p, q, r, t, kind, sign, K)
        bound.append(val.bound)
        return val.value

    def Ga(kind, sign):  # arguments (nu_2, omega_2, omega_1)
        return G(kind, sign, n2, w2, w1)

    def Gb(kind, sign):  # arguments (nu_1, omega_1, omega_2)
        return G(kind, sign, n1, w1, w2)

    h = g / 2
    s11 = (1j * h * inv1 @ s @ (z2 @ Ga("CS", "+") - y2 @ Ga("SS", "+")) @ h2t
           + 1j * h * inv1 @ h2t @ (z1 @ Gb("SC", "-") - y1 @ Gb("CC", "-")) @ sd)
    s12 = (h * inv1 @ s @ (z2 @ Ga("CC", "+") - y2 @ Ga("SC", "+")) @ r_h2tb
           + h * inv1 @ h2t @ (z1 @ Gb("SS", "-") + y1 @ Gb("CS", "-")) @ h1q)
    s21 = (h * inv2 @ r_bth2 @ (z1 @ Gb("CC", "+") - y1 @ Gb("SC", "+")) @ sd
           + h * inv2 @ h1q @ (z2 @ Ga("SS", "-") - y2 @ Ga("CS", "-")) @ h2t)
    s22 = (1j * h * inv2 @ r_bth2 @ (z1 @ Gb("CS", "+") - y1 @ Gb("SS", "+")) @ h1q
           + 1j * h * inv2 @ h1q @ (z2 @ Ga("SC", "-") + y2 @ Ga("CC", "-")) @ r_h2tb)

    # crude but safe: every G enters with a prefactor of norm at most
    # |gamma|/2 * ||nu^-1|| * ||left|| * ||right||
    scale = abs(h) * max(np.max(np.abs(_pinv(n1))), np.max(np.abs(_pinv(n2)))) * max(
        np.linalg.norm(h2t, 2), np.linalg.norm(r_h2tb, 2), 1.0) ** 2
    return ParticularResult(np.block([[s11, s12], [s21, s22]]), scale * sum(bound))


def _ho_closed_form(freqs, nus, t) -> ParticularResult:
    b = freqs.bundle
    g = b.params.gamma
    s, sd, _, h1q = _roots(b)
    h2t = b.h2_power(0.75)
    r_aada = b.h2_power(0.5) @ s          # sqrt(a a^dagger a)
    r_adaad = r_aada.conj().T             # sqrt(a^dagger a a^dagger)
    n1, n2, w1, w2 = nus.v1, nus.v2, freqs.w1, freqs.w2
    D = np.diag
    inv1, inv2 = D(_pinv(n1)), D(_pinv(n2))

    def Ks(r, sign):
        return D(kernel_S(t, w2, w1, r) + sign * kernel_S(t, w2, -w1, r))

    def Kc(r, sign):
        return D(kernel_C(t, w2, w1, r) + sign * kernel_C(t, w2, -w1, r))

    h = g / 2
    s11 = 1j * h * inv1 @ s @ Ks(n2, -1) @ h2t - 1j * h * inv1 @ h2t @ Ks(n1, -1) @ sd
    s12 = h * inv1 @ s @ Kc(n2, -1) @ r_aada - h * inv1 @ h2t @ Kc(n1, -1) @ h1q
    s21 = h * inv2 @ r_adaad @ Kc(n1, +1) @ sd - h * inv2 @ h1q @ Kc(n2, -1) @ h2t
    s22 = 1j * h * inv2 @ r_adaad @ Ks(n1, +1) @ h1q - 1j * h * inv2 @ h1q @ Ks(n2, +1) @ r_aada
    return ParticularResult(np.block([[s11, s12], [s21, s22]]))


def particular_solution(freqs: FrequencyOperators, nus: NuOperators, t: float,
                        backend: Backend | None = None, return_info: bool = False):
    """Particular part of sigma_3(t) with zero value and slope at t = 0.

    Rows with nu_j = 0 (the level g_0) take the pseudo-inverse; their forcing
    row vanishes identically, so every backend returns zero there.
    """
    backend = backend or Backend.quadrature()
    b = freqs.bundle
    if backend.kind == HO_CLOSED_FORM and not b.spectrum.model.is_harmonic:
        raise BackendDomainError(
            f"closed-form backend needs a harmonic model (got {b.spectrum.model.kind})")
    n = 2 * b.N
    if b.params.gamma == 0 or t == 0:
        res = ParticularResult(np.zeros((n, n), complex))
    elif backend.kind == QUADRATURE:
        res = _quadrature(freqs, nus, t, backend)
    elif backend.kind == SERIES:
        res = _series(freqs, nus, t, backend)
    else:
        res = _ho_closed_form(freqs, nus, t)
    return res if return_info else res.value


# -- assembly -----------------------------------------------------------------

def homogeneous_solution(freqs: FrequencyOperators, nus: NuOperators, t: float,
                         initial_sigma3: np.ndarray | None = None) -> np.ndarray:
    """cos(nu t) sigma_3(0) + (2 i alpha / hbar) sin(nu t) nu^-1 [S_i sigma_3(0)], row-wise."""
    b = freqs.bundle
    p = b.params
    s0 = b.sigma3 if initial_sigma3 is None else np.asarray(initial_sigma3, dtype=complex)
    nu = nus.stacked
    sin_over_nu = t * np.sinc(nu * t / np.pi)   # limit t where nu = 0
    return (np.cos(nu * t)[:, None] * s0
            + (2j * p.alpha / p.hbar) * sin_over_nu[:, None] * (b.S_i @ s0))


def _check_initial(initial_sigma3, n):
    if initial_sigma3 is None:
        return None
    s0 = np.asarray(initial_sigma3, dtype=complex)
    if s0.shape != (n, n):
        raise ShapeMismatch(f"initial sigma_3 must be {n} x {n} (got {s0.shape})")
    return s0


def sigma3_of_t(freqs: FrequencyOperators, nus: NuOperators, t: float,
                initial_sigma3: np.ndarray | None = None,
                backend: Backend | None = None) -> np.ndarray:
    b = freqs.bundle
    s0 = _check_initial(initial_sigma3, 2 * b.N)
    if t == 0:
        return (b.sigma3 if s0 is None else s0).copy()
    return homogeneous_solution(freqs, nus, t, s0) + particular_solution(freqs, nus, t, backend)


@dataclass(frozen=True)
class InversionSolution:
    times: np.ndarray
    sigma3: np.ndarray
    homogeneous_part: np.ndarray
    particular_part: np.ndarray
    backend: Backend
    initial_sigma3: np.ndarray
    truncation_bounds: np.ndarray = field(repr=False)
    nodes: np.ndarray = field(repr=False)


def solve_inversion(freqs: FrequencyOperators, times, backend: Backend | None = None,
                    initial_sigma3: np.ndarray | None = None,
                    nus: NuOperators | None = None) -> InversionSolution:
    b = freqs.bundle
    backend = backend or Backend.quadrature()
    nus = nus or build_nu(b)
    n = 2 * b.N
    s0 = _check_initial(initial_sigma3, n)
    s0 = b.sigma3.copy() if s0 is None else s0
    times = np.asarray(times, dtype=float)
    hom = np.empty((len(times), n, n), complex)
    par = np.empty_like(hom)
    bounds = np.zeros(len(times))
    nodes = np.zeros(len(times), dtype=int)
    for k, t in enumerate(times):
        hom[k] = s0 if t == 0 else homogeneous_solution(freqs, nus, t, s0)
        res = particular_solution(freqs, nus, t, backend, return_info=True)
        par[k], bounds[k], nodes[k] = res.value, res.bound, res.nodes
    return InversionSolution(times, hom + par, hom, par, backend, s0, bounds, nodes)


def inversion_expectation(solution: InversionSolution, state) -> np.ndarray:
    """W(t_k) = <state| sigma_3(t_k) |state>."""
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (solution.sigma3.shape[1],):
        raise ShapeMismatch(f"state must have length {solution.sigma3.shape[1]}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-10:
        raise NonNormalizedState(f"state norm is {norm!r}, expected 1")
    W = np.einsum("i,kij,j->k", psi.conj(), solution.sigma3, psi)
    residue = float(np.max(np.abs(W.imag))) if W.size else 0.0
    if residue > 1e-12:
        warnings.warn(f"inversion expectation has imaginary residue {residue:.3g}",
                      RuntimeWarning, stacklevel=2)
    return W.real.copy()
