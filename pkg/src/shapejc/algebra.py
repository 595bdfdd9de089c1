"""Shape-invariant ladder spectra and the truncated operator matrices built on them.

Basis convention for every 2N x 2N matrix in the package: indices ``0..N-1``
are the excited sector ``e_m = T|m>`` and indices ``N..2N-1`` are the ground
sector ``g_m = |m>``.  The reparametrization operator T is never formed; it is
absorbed into the labelling of the excited sector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DimensionTooSmall,
    InvalidModel,
    NonPositiveRemainder,
    NotDiagonal,
)

HARMONIC = "harmonic"
SELF_SIMILAR = "self_similar"
EXPLICIT = "explicit"


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ShapeInvariantModel:
    """Generator of the remainder sequence R(a_1), R(a_2), ...

    Use the ``harmonic``, ``self_similar`` and ``explicit`` constructors rather
    than building instances by hand.
    """

    kind: str
    omega: float | None = None
    r1: float | None = None
    q: float | None = None
    remainders: tuple[float, ...] | None = None
    hbar: float = 1.0

    def __post_init__(self):
        if self.hbar <= 0:
            raise InvalidModel(f"hbar must be positive (got {self.hbar})")
        if self.kind == HARMONIC:
            if self.omega is None or not self.omega > 0:
                raise InvalidModel(f"harmonic model needs omega > 0 (got {self.omega})")
        elif self.kind == SELF_SIMILAR:
            if self.r1 is None or self.q is None:
                raise InvalidModel("self_similar model needs r1 and q")
            if not self.q > 0:
                raise InvalidModel(f"self_similar model needs q > 0 (got {self.q})")
        elif self.kind == EXPLICIT:
            if not self.remainders:
                raise InvalidModel("explicit model needs a non-empty remainder list")
        else:
            raise InvalidModel(f"unknown model kind {self.kind!r}")

    @classmethod
    def harmonic(cls, omega: float, hbar: float = 1.0) -> "ShapeInvariantModel":
        return cls(HARMONIC, omega=float(omega), hbar=float(hbar))

    @classmethod
    def self_similar(cls, r1: float, q: float, hbar: float = 1.0) -> "ShapeInvariantModel":
        return cls(SELF_SIMILAR, r1=float(r1), q=float(q), hbar=float(hbar))

    @classmethod
    def explicit(cls, remainders: Sequence[float], hbar: float = 1.0) -> "ShapeInvariantModel":
        return cls(EXPLICIT, remainders=tuple(float(r) for r in remainders), hbar=float(hbar))

    @property
    def is_harmonic(self) -> bool:
        return self.kind == HARMONIC

    def remainder_sequence(self, count: int) -> np.ndarray | None:
        """R_1..R_count, or None when an explicit list is too short."""
        k = np.arange(1, count + 1)
        if self.kind == HARMONIC:
            return np.full(count, self.hbar * self.omega)
        if self.kind == SELF_SIMILAR:
            return self.r1 * self.q ** (k - 1.0)
        if len(self.remainders) < count:
            return None
        return np.asarray(self.remainders[:count], dtype=float)


@dataclass(frozen=True)
class LadderSpectrum:
    """Cumulative energies E_0..E_{N-1} of H1.

    ``edge_energy`` is E_N, used only for the top excited level e_{N-1}, which
    has no partner in the truncated basis.  When the model does not define
    R_N (short explicit list) the last remainder is repeated.
    """

    energies: np.ndarray
    edge_energy: float
    model: ShapeInvariantModel
    edge_exact: bool = True

    @property
    def dim(self) -> int:
        return len(self.energies)

    @property
    def shifted(self) -> np.ndarray:
        """E_1..E_N, the diagonal of H2."""
        return np.append(self.energies[1:], self.edge_energy)


def build_spectrum(model: ShapeInvariantModel, N: int) -> LadderSpectrum:
    if N < 2:
        raise DimensionTooSmall(N)
    R = model.remainder_sequence(N - 1)
    if R is None:
        raise InvalidModel(
            f"explicit model defines {len(model.remainders)} remainders, "
            f"basis size {N} needs {N - 1}"
        )
    for k, r in enumerate(R, start=1):
        if not r > 0:
            raise NonPositiveRemainder(k, float(r))
    energies = np.concatenate([[0.0], np.cumsum(R)])
    extra = model.remainder_sequence(N)
    edge_exact = extra is not None and extra[-1] > 0
    edge = energies[-1] + (extra[-1] if edge_exact else R[-1])
    return LadderSpectrum(_frozen(energies), float(edge), model, bool(edge_exact))


@dataclass(frozen=True)
class JCParams:
    """Coupling, detuning and action quantum; beta and gamma are derived."""

    alpha: float
    delta: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.alpha == 0:
            raise InvalidModel("alpha must be nonzero")
        if not self.hbar > 0:
            raise InvalidModel("hbar must be positive")

    @property
    def beta(self) -> float:
        return self.hbar * self.delta / self.alpha

    @property
    def gamma(self) -> float:
        return 4.0 * self.alpha**2 * self.beta / self.hbar**2

    @property
    def resonant(self) -> bool:
        return self.delta == 0


@dataclass(frozen=True)
class OperatorBundle:
    """All truncated matrix realizations for one spectrum and parameter set.

    N x N: ``Bplus``, ``Bminus`` (also T B_- under the e-relabelling), ``H1``,
    ``H2``, ``Qdagger``, ``sqrtTBminus``.  2N x 2N: ``S_i``, ``H_int``,
    ``H_o``, ``H_total``, ``sigma3``.
    """

    spectrum: LadderSpectrum
    params: JCParams
    Bplus: np.ndarray
    Bminus: np.ndarray
    H1: np.ndarray
    H2: np.ndarray
    Qdagger: np.ndarray
    sqrtTBminus: np.ndarray
    S_i: np.ndarray
    H_int: np.ndarray
    H_o: np.ndarray
    H_total: np.ndarray
    sigma3: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return self.spectrum.dim

    @property
    def sqrtBplusTdag(self) -> np.ndarray:
        return self.sqrtTBminus.conj().T

    def h1_power(self, p: float) -> np.ndarray:
        return np.diag(_safe_power(self.spectrum.energies, p)).astype(complex)

    def h2_power(self, p: float) -> np.ndarray:
        return np.diag(_safe_power(self.spectrum.shifted, p)).astype(complex)


def _safe_power(values: np.ndarray, p: float) -> np.ndarray:
    out = np.zeros_like(values, dtype=float)
    nz = values != 0
    out[nz] = values[nz] ** p
    return out


def sigma_matrices(N: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(sigma_+, sigma_-, sigma_3) acting on the sector index."""
    eye = np.eye(N)
    zero = np.zeros((N, N))
    sp = np.block([[zero, eye], [zero, zero]]).astype(complex)
    s3 = np.block([[eye, zero], [zero, -eye]]).astype(complex)
    return sp, sp.T.copy(), s3


def build_operators(spectrum: LadderSpectrum, params: JCParams) -> OperatorBundle:
    N = spectrum.dim
    E = spectrum.energies
    m = np.arange(N - 1)

    Bplus = np.zeros((N, N), complex)
    Bplus[m + 1, m] = np.sqrt(E[1:])
    Bminus = Bplus.conj().T.copy()

    Qdagger = np.zeros((N, N), complex)
    Qdagger[m + 1, m] = 1.0

    # Polar root of T B_-: one ladder step, modulus E_{m+1}^{1/4}.  The
    # negative phase is the one for which the closed-form evolution matrix
    # solves i hbar dU/dt = H_int U.
    sqrtTBm = np.zeros((N, N), complex)
    sqrtTBm[m, m + 1] = -E[1:] ** 0.25

    H1 = np.diag(E).astype(complex)
    H2 = np.diag(spectrum.shifted).astype(complex)

    # T B_- sqrt(H1): g_{m+1} -> E_{m+1} e_m
    A = Bminus @ np.diag(np.sqrt(E))
    zero = np.zeros((N, N), complex)
    S_i = np.block([[zero, A], [A.conj().T, zero]])
    _, _, s3 = sigma_matrices(N)

    H_o = np.block([[H2, zero], [zero, H1]])
    H_int = params.alpha * S_i + params.hbar * params.delta * s3
    H_total = H_o + H_int

    mats = [Bplus, Bminus, H1, H2, Qdagger, sqrtTBm, S_i, H_int, H_o, H_total, s3]
    return OperatorBundle(spectrum, params, *(_frozen(a) for a in mats))


def spectral_function(diagonal_op: np.ndarray, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply ``f`` to the diagonal of an exactly diagonal matrix."""
    op = np.asarray(diagonal_op)
    d = np.diag(op)
    if np.any(op - np.diag(d) != 0):
        raise NotDiagonal("operator has nonzero off-diagonal entries")
    if np.iscomplexobj(d) and not np.any(d.imag):
        d = d.real
    return np.diag(np.asarray(f(d), dtype=complex))


# -- basis bookkeeping -------------------------------------------------------

def e_index(m: int, N: int) -> int:
    return m


def g_index(m: int, N: int) -> int:
    return N + m


def basis_state(N: int, sector: str, m: int) -> np.ndarray:
    """Unit vector e_m (sector 'e') or g_m (sector 'g')."""
    if not 0 <= m < N:
        raise IndexError(f"level {m} outside 0..{N - 1}")
    v = np.zeros(2 * N, complex)
    v[e_index(m, N) if sector == "e" else g_index(m, N)] = 1.0
    return v


def block_indices(m: int, N: int) -> tuple[int, int]:
    """Positions of (e_m, g_{m+1}), the two states mixed by H_int."""
    return e_index(m, N), g_index(m + 1, N)


def interior_indices(N: int, ground: bool = False) -> np.ndarray:
    """Indices of the coupled-pair subspace span{e_m, g_{m+1} : m <= N-2}.

    The truncation edge e_{N-1} is always excluded.  The uncoupled level g_0
    is included only on request.
    """
    idx = list(range(N - 1))
    if ground:
        idx.append(N)
    idx.extend(range(N + 1, 2 * N))
    return np.asarray(idx)
