"""Banded Cholesky, signed (generalized) Cholesky and the shifted QR bridge."""

from __future__ import annotations

import numpy as np

from .cmv import BandedMatrix, _as_array
from .errors import NotPositiveDefinite, NotQuasiDefinite

PIVOT_RTOL = 1e-12


def _bandwidth(M) -> int:
    if isinstance(M, BandedMatrix):
        return M.lower
    a = _as_array(M)
    nz = np.nonzero(np.abs(np.tril(a)) > 0)
    return int(np.max(nz[0] - nz[1])) if len(nz[0]) else 0


def banded_cholesky(M, pivot_rtol: float = PIVOT_RTOL) -> BandedMatrix:
    """Lower-triangular A with positive diagonal and M = A A^+.

    Work is confined to the band, so the cost is O(N w^2). Raises
    NotPositiveDefinite at the first pivot below ``pivot_rtol`` times the
    largest diagonal entry.
    """
    a = _as_array(M)
    n = a.shape[0]
    w = _bandwidth(M)
    scale = max(float(np.max(np.abs(np.diag(a).real))), 1e-300) if n else 1.0
    L = np.zeros((n, n), dtype=complex)
    for j in range(n):
        lo = max(0, j - w)
        row = L[j, lo:j]
        pivot = a[j, j].real - float(np.sum(np.abs(row) ** 2))
        if pivot <= pivot_rtol * scale:
            raise NotPositiveDefinite(j, pivot)
        d = np.sqrt(pivot)
        L[j, j] = d
        hi = min(n, j + w + 1)
        for i in range(j + 1, hi):
            lo_i = max(0, i - w)
            s = np.dot(L[i, lo_i:j], np.conj(L[j, lo_i:j]))
            L[i, j] = (a[i, j] - s) / d
    interior = M.interior if isinstance(M, BandedMatrix) else n
    return BandedMatrix(L, w, 0, min(interior, n - w))


def generalized_cholesky(M, pivot_rtol: float = PIVOT_RTOL) -> tuple[BandedMatrix, np.ndarray]:
    """M = A E A^+ with A lower triangular (positive diagonal) and E = diag(+-1)."""
    a = _as_array(M)
    n = a.shape[0]
    w = _bandwidth(M)
    scale = max(float(np.max(np.abs(a))), 1e-300) if n else 1.0
    L = np.zeros((n, n), dtype=complex)
    e = np.zeros(n, dtype=int)
    for j in range(n):
        lo = max(0, j - w)
        pivot = a[j, j].real - float(np.sum(e[lo:j] * np.abs(L[j, lo:j]) ** 2))
        if abs(pivot) <= pivot_rtol * scale:
            raise NotQuasiDefinite(j, pivot)
        e[j] = 1 if pivot > 0 else -1
        d = np.sqrt(abs(pivot))
        L[j, j] = d
        for i in range(j + 1, min(n, j + w + 1)):
            lo_i = max(0, i - w)
            s = np.dot(L[i, lo_i:j] * e[lo_i:j], np.conj(L[j, lo_i:j]))
            L[i, j] = (a[i, j] - s) / (e[j] * d)
    interior = M.interior if isinstance(M, BandedMatrix) else n
    return BandedMatrix(L, w, 0, min(interior, n - w)), e


def first_breakdown(M) -> int | None:
    """Index of the first non-positive leading pivot, or None (LAPACK potrf)."""
    from scipy.linalg import lapack

    a = np.array(_as_array(M), dtype=complex, order="F")
    _, info = lapack.zpotrf(a, lower=1)
    return None if info == 0 else int(info) - 1


def _rotation(x: complex, y: complex):
    r = np.hypot(abs(x), abs(y))
    if r == 0:
        return None
    return np.array([[np.conj(x), np.conj(y)], [-y, x]]) / r


def qr_shifted(C, zeta: complex) -> tuple[BandedMatrix, BandedMatrix]:
    """C - zeta I = Q R by plane rotations, with R upper triangular, positive diagonal.

    Rotations only touch the two subdiagonals. The leading (N-2) x (N-2) block
    of R does not depend on the truncation.
    """
    c = _as_array(C)
    n = c.shape[0]
    X = c - complex(zeta) * np.eye(n)
    Qh = np.eye(n, dtype=complex)
    for j in range(n - 1):
        for i in (j + 2, j + 1):
            if i >= n:
                continue
            p = i - 1
            G = _rotation(X[p, j], X[i, j])
            if G is None:
                continue
            X[[p, i], :] = G @ X[[p, i], :]
            Qh[[p, i], :] = G @ Qh[[p, i], :]
            X[i, j] = 0.0
    phases = np.diag(X).copy()
    mags = np.abs(phases)
    phases = np.where(mags > 0, phases / np.where(mags > 0, mags, 1.0), 1.0)
    R = np.conj(phases)[:, None] * X
    Q = Qh.conj().T * phases[None, :]
    interior = n - 2
    return BandedMatrix(Q, 2, n - 1, interior), BandedMatrix(np.triu(R), 0, n - 1, interior)
