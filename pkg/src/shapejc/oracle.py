"""Reference computations used to check the closed-form results.

Nothing here uses the ladder algebra: propagators come from a dense Hermitian
eigendecomposition and integrals from composite Gauss-Legendre quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import NoConvergence, NotHermitian, ShapeMismatch

GAUSS_ORDER = 16
DEFAULT_NODE_BUDGET = 2**16


def _check_hermitian(H: np.ndarray) -> None:
    scale = max(np.linalg.norm(H, 2), 1.0)
    if np.linalg.norm(H - H.conj().T, 2) > 1e-12 * scale:
        raise NotHermitian("Hamiltonian is not Hermitian")


def exact_propagator(H: np.ndarray, t: float, hbar: float = 1.0) -> np.ndarray:
    """exp(-i H t / hbar) by eigendecomposition."""
    H = np.asarray(H)
    _check_hermitian(H)
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * w * t / hbar)) @ V.conj().T


def heisenberg_sigma3(H_int: np.ndarray, t: float, hbar: float = 1.0) -> np.ndarray:
    """U(t)^dagger diag(I, -I) U(t) for U generated by ``H_int``."""
    U = exact_propagator(H_int, t, hbar)
    N = H_int.shape[0] // 2
    s3 = np.diag(np.concatenate([np.ones(N), -np.ones(N)])).astype(complex)
    out = U.conj().T @ s3 @ U
    return 0.5 * (out + out.conj().T)


def _gauss_panels(f, a: float, b: float, panels: int, x: np.ndarray, w: np.ndarray):
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    total = None
    for c, h in zip(mid, half):
        for xi, wi in zip(x, w):
            term = (wi * h) * f(c + h * xi)
            total = term if total is None else total + term
    return total


def integrate_matrix_function(
    f: Callable[[float], np.ndarray],
    t_end: float,
    tol: float = 1e-10,
    node_budget: int = DEFAULT_NODE_BUDGET,
    order: int = GAUSS_ORDER,
    return_nodes: bool = False,
):
    """Integral of ``f`` over [0, t_end] by composite Gauss-Legendre.

    The panel count doubles until two successive estimates differ by less
    than ``tol`` (max-abs).  ``t_end`` may be negative.
    """
    x, w = leggauss(order)
    if t_end == 0:
        zero = np.zeros_like(np.asarray(f(0.0), dtype=complex))
        return (zero, 0) if return_nodes else zero
    panels = 1
    prev = _gauss_panels(f, 0.0, t_end, panels, x, w)
    while True:
        panels *= 2
        nodes = panels * order
        if nodes > node_budget:
            raise NoConvergence(
                f"quadrature did not reach tol={tol:g} within {node_budget} nodes"
            )
        cur = _gauss_panels(f, 0.0, t_end, panels, x, w)
        if np.max(np.abs(np.asarray(cur) - np.asarray(prev))) < tol:
            return (cur, nodes) if return_nodes else cur
        prev = cur


@dataclass(frozen=True)
class ComparisonReport:
    label: str
    max_abs_deviation: float
    max_rel_deviation: float
    location: tuple[int, int, float] | None
    tolerance: float
    passed: bool


def compare(
    A: np.ndarray | Sequence[np.ndarray],
    B: np.ndarray | Sequence[np.ndarray],
    tolerance: float,
    interior_only: bool | np.ndarray = False,
    times: Sequence[float] | None = None,
    label: str = "",
    ground: bool = True,
) -> ComparisonReport:
    """Entrywise max-abs comparison of two matrix time series.

    ``A`` and ``B`` are single matrices or stacks of shape (T, n, n).  With
    ``interior_only`` the truncation-edge level e_{N-1} is masked out (and
    g_0 too when ``ground`` is False); an explicit index array may be passed
    instead.
    """
    from .algebra import interior_indices

    a = np.asarray(A)
    b = np.asarray(B)
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    if a.ndim == 2:
        a, b = a[None], b[None]
    if a.ndim != 3:
        raise ShapeMismatch(f"expected matrices or a stack of matrices, got ndim={a.ndim}")
    if times is None:
        times = np.arange(a.shape[0], dtype=float)
    elif len(times) != a.shape[0]:
        raise ShapeMismatch("time grid does not match the number of matrices")

    n = a.shape[1]
    if isinstance(interior_only, np.ndarray):
        idx = interior_only
    elif interior_only:
        idx = interior_indices(n // 2, ground=ground)
    else:
        idx = np.arange(n)
    sub = np.ix_(np.arange(a.shape[0]), idx, idx)
    diff = np.abs(a[sub] - b[sub])
    scale = np.maximum(np.abs(b[sub]), np.finfo(float).tiny)
    k = int(np.argmax(diff))
    ti, r, c = np.unravel_index(k, diff.shape)
    max_abs = float(diff.flat[k])
    nonzero = np.abs(b[sub]) > 0
    max_rel = float(np.max(np.where(nonzero, diff / scale, 0.0))) if diff.size else 0.0
    loc = (int(idx[r]), int(idx[c]), float(times[ti])) if diff.size else None
    return ComparisonReport(label, max_abs, max_rel, loc, tolerance, max_abs <= tolerance)
