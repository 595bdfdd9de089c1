"""Operator-valued integral kernels.

``series_FXY`` evaluates the double power series of

    F_XY(t; X, W) = integral_0^t X(X xi) Y(W xi) dxi,   X, Y in {cos, sin},

with the powers of X kept to the left of the powers of W.  The alternating
series cancels heavily once ||X|| t is more than a few units, so the sum is
carried out in mpmath at a working precision sized to the largest term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from ..errors import ConvergenceBudgetExceeded

KINDS = {"CC": (0, 0), "CS": (0, 1), "SC": (1, 0), "SS": (1, 1)}
NORM_GUARD = 40.0
DEFAULT_ORDER = 60
# orders whose whole remaining tail is below this (relative to |t|) are skipped;
# they cannot change a double-precision result
_NEGLIGIBLE = 1e-30


@dataclass(frozen=True)
class SeriesValue:
    value: np.ndarray
    bound: float
    order: int
    flagged: bool = False

    def __add__(self, other: "SeriesValue") -> "SeriesValue":
        return SeriesValue(self.value + other.value, self.bound + other.bound,
                           max(self.order, other.order), self.flagged or other.flagged)

    def __sub__(self, other: "SeriesValue") -> "SeriesValue":
        return SeriesValue(self.value - other.value, self.bound + other.bound,
                           max(self.order, other.order), self.flagged or other.flagged)


def _is_diagonal(A: np.ndarray) -> bool:
    return not np.any(A - np.diag(np.diag(A)))


def _order_bounds(x: float, w: float, p: int, q: int, kmax: int) -> np.ndarray:
    """Upper bounds on the norm of each total-order group, divided by |t|."""
    m = np.arange(kmax + 1)
    lg = np.array([math.lgamma(2 * j + p + 1) for j in m])
    lw = np.array([math.lgamma(2 * j + q + 1) for j in m])
    with np.errstate(divide="ignore"):
        ax = np.exp((2 * m + p) * np.log(x) - lg) if x > 0 else (m == 0) * float(p == 0)
        aw = np.exp((2 * m + q) * np.log(w) - lw) if w > 0 else (m == 0) * float(q == 0)
    groups = np.convolve(ax, aw)[: kmax + 1]
    return groups / (2 * m + p + q + 1)


def _truncation(x: float, w: float, p: int, q: int, K: int, t: float) -> tuple[float, int]:
    """(bound on the omitted tail beyond order K, last order worth summing)."""
    extra = K + 2 + int(2 * (x + w))
    g = _order_bounds(x, w, p, q, extra) * abs(t)
    tail = np.cumsum(g[::-1])[::-1]  # tail[k] = sum_{j >= k} g[j]
    bound = float(tail[K + 1])
    peak = int(np.argmax(g))
    stop = K
    for k in range(peak, K + 1):
        if tail[k + 1] <= _NEGLIGIBLE * max(abs(t), 1e-300):
            stop = k
            break
    return bound, stop


def _dps(x: float, w: float) -> int:
    return 20 + int(math.ceil((x + w) / math.log(10)))


def _scalar_series(x: complex, w: complex, t: float, p: int, q: int, stop: int):
    xt = mpmath.mpmathify(x) * t
    wt = mpmath.mpmathify(w) * t
    a = [xt**p / math.factorial(p)]
    b = [wt**q / math.factorial(q)]
    x2, w2 = xt * xt, wt * wt
    for j in range(stop):
        a.append(-a[-1] * x2 / ((2 * j + p + 1) * (2 * j + p + 2)))
        b.append(-b[-1] * w2 / ((2 * j + q + 1) * (2 * j + q + 2)))
    total = mpmath.mpf(0)
    for k in range(stop + 1):
        group = mpmath.fsum(a[j] * b[k - j] for j in range(k + 1))
        total += group / (2 * k + p + q + 1)
    return complex(total * t)


def _matrix_series(X: np.ndarray, W: np.ndarray, t: float, p: int, q: int, stop: int) -> np.ndarray:
    Xt = mpmath.matrix((X * t).tolist())
    Wt = mpmath.matrix((W * t).tolist())
    n = X.shape[0]
    eye = mpmath.eye(n)
    a = [(Xt if p else eye) / math.factorial(p)]
    b = [(Wt if q else eye) / math.factorial(q)]
    x2, w2 = Xt * Xt, Wt * Wt
    for j in range(stop):
        a.append(-(a[-1] * x2) / ((2 * j + p + 1) * (2 * j + p + 2)))
        b.append(-(b[-1] * w2) / ((2 * j + q + 1) * (2 * j + q + 2)))
    total = mpmath.zeros(n, n)
    for mi in range(stop + 1):
        inner = mpmath.zeros(n, n)
        for ni in range(stop - mi + 1):
            inner += b[ni] / (2 * (mi + ni) + p + q + 1)
        total += a[mi] * inner
    out = np.array(total.tolist(), dtype=complex)
    return out * t


def series_FXY(X, W, t: float, kind: str, K: int = DEFAULT_ORDER, tol: float | None = None) -> SeriesValue:
    """Partial double sum of F_XY through total order K (m + n <= K).

    ``X`` and ``W`` are square matrices (or 1-d arrays, read as diagonals).
    The returned bound majorizes the norm of every omitted term.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {sorted(KINDS)} (got {kind!r})")
    if K < 0:
        raise ValueError("K must be non-negative")
    p, q = KINDS[kind]
    X = np.asarray(X, dtype=complex)
    W = np.asarray(W, dtype=complex)
    if X.ndim == 1:
        X = np.diag(X)
    if W.ndim == 1:
        W = np.diag(W)
    if X.shape != W.shape or X.shape[0] != X.shape[1]:
        raise ValueError("X and W must be square matrices of equal size")

    diagonal = _is_diagonal(X) and _is_diagonal(W)
    if diagonal:
        xs, ws = np.diag(X), np.diag(W)
        nx = float(np.max(np.abs(xs))) if xs.size else 0.0
        nw = float(np.max(np.abs(ws))) if ws.size else 0.0
    else:
        nx, nw = float(np.linalg.norm(X, 2)), float(np.linalg.norm(W, 2))
    x, w = nx * abs(t), nw * abs(t)
    if x > NORM_GUARD or w > NORM_GUARD:
        raise ConvergenceBudgetExceeded(
            f"||X|| t = {x:.3g}, ||W|| t = {w:.3g}; series guard is {NORM_GUARD}"
        )
    bound, stop = _truncation(x, w, p, q, K, t)
    if t == 0:
        return SeriesValue(np.zeros_like(X), 0.0, K)

    with mpmath.workdps(_dps(x, w)):
        if diagonal:
            vals = [_scalar_series(xi, wi, t, p, q, stop) for xi, wi in zip(xs, ws)]
            value = np.diag(np.asarray(vals, dtype=complex))
        else:
            value = _matrix_series(X, W, t, p, q, stop)
    return SeriesValue(value, bound, K, tol is not None and bound > tol)


def aux_G(X, q, r, t: float, kind: str, sign: str, K: int = DEFAULT_ORDER, tol: float | None = None) -> SeriesValue:
    """G^(+/-)_XY(t; X, q, r) = F_XY(t; X - q, r) +/- F_XY(t; X + q, r)."""
    if sign not in ("+", "-"):
        raise ValueError(f"sign must be '+' or '-' (got {sign!r})")
    X, q, r = (np.diag(a) if np.ndim(a) == 1 else np.asarray(a) for a in (X, q, r))
    lo = series_FXY(X - q, r, t, kind, K, tol)
    hi = series_FXY(X + q, r, t, kind, K, tol)
    return lo + hi if sign == "+" else lo - hi


# -- closed-form kernels for commuting (harmonic) operators ------------------

def _sinc(x):
    return np.sinc(np.asarray(x) / np.pi)


def kernel_S(t: float, p, q, r) -> np.ndarray:
    """K_S(t; p, q, r) = (r sin((p+q)t) - (p+q) sin(r t)) / (r^2 - (p+q)^2), elementwise.

    Evaluated as integral_0^t sin(r(t - xi)) sin((p+q) xi) dxi in a
    product-to-sum form that stays finite where r^2 = (p+q)^2.
    """
    k = np.asarray(p) + np.asarray(q)
    r = np.asarray(r, dtype=float)

    def phi(a):
        return t * np.cos((r - a / 2) * t) * _sinc(a * t / 2)

    return 0.5 * (phi(r + k) - phi(r - k))


def kernel_C(t: float, p, q, r) -> np.ndarray:
    """K_C(t; p, q, r) = r (cos((p+q)t) - cos(r t)) / (r^2 - (p+q)^2), elementwise."""
    k = np.asarray(p) + np.asarray(q)
    r = np.asarray(r, dtype=float)

    def psi(a):
        return t * np.sin((r - a / 2) * t) * _sinc(a * t / 2)

    return 0.5 * (psi(r + k) + psi(r - k))


def kernel_S_rational(t: float, p, q, r) -> np.ndarray:
    k = np.asarray(p) + np.asarray(q)
    return (r * np.sin(k * t) - k * np.sin(r * t)) / (r**2 - k**2)


def kernel_C_rational(t: float, p, q, r) -> np.ndarray:
    k = np.asarray(p) + np.asarray(q)
    return (r * np.cos(k * t) - r * np.cos(r * t)) / (r**2 - k**2)
