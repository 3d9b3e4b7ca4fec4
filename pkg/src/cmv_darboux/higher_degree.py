"""Darboux transformations for Hermitian Laurent polynomials of any degree d.

The forward direction is a banded Cholesky of the (4d+1)-diagonal l(C). The
reversed direction works on blocks of size 2d: given the leading block R_0 of
A, every later block follows from l(D) = A^+ A.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .cmv import BandedMatrix, ZigzagBasis, build_cmv, eval_on_cmv, orthonormal_basis, schur_from_zigzag
from .core import HermitianLaurentPolynomial, SchurSequence, complex_pair, default_tolerance
from .errors import BlockBreakdown
from .factorization import banded_cholesky


@dataclass(frozen=True)
class ForwardDResult:
    factor: BandedMatrix
    target: SchurSequence


def forward_d(a: SchurSequence, ell: HermitianLaurentPolynomial, N: int) -> ForwardDResult:
    """Target parameters b_1..b_N and the leading (N+1) x (N+1) Cholesky factor of l(C)."""
    d = ell.degree
    size = N + 2 * d + 3
    C = build_cmv(a, size)
    M = eval_on_cmv(ell, C)
    A = banded_cholesky(M)
    k = N + 1
    mat = A.data[:k, :k]
    chi = orthonormal_basis(a, k)
    omega = solve_triangular(mat, chi.coeffs, lower=True)
    target = schur_from_zigzag(ZigzagBasis(chi.lowest, omega))
    return ForwardDResult(BandedMatrix(mat, 2 * d, 0, k), target)


@dataclass(frozen=True)
class BlockFactor:
    """Block lower-bidiagonal factor: diagonal blocks R_n, subdiagonal blocks S_n."""

    block: int
    R: tuple = field(repr=False)
    S: tuple = field(repr=False)

    @property
    def size(self) -> int:
        return self.block * len(self.R)

    def matrix(self, n: int | None = None) -> np.ndarray:
        n = self.size if n is None else n
        if n > self.size:
            raise ValueError(f"factor only determines {self.size} rows, {n} requested")
        z = self.block
        A = np.zeros((self.size, self.size), dtype=complex)
        for k, R in enumerate(self.R):
            A[k * z:(k + 1) * z, k * z:(k + 1) * z] = R
        for k, S in enumerate(self.S[:len(self.R) - 1]):
            A[(k + 1) * z:(k + 2) * z, k * z:(k + 1) * z] = S
        return A[:n, :n]

    def to_json(self) -> dict:
        def enc(m):
            return [[complex_pair(x) for x in row] for row in m]

        return {"block": self.block, "R": [enc(m) for m in self.R], "S": [enc(m) for m in self.S]}


def _positive_root(P: np.ndarray) -> tuple[np.ndarray, float]:
    w, V = np.linalg.eigh(P)
    return (V * np.sqrt(np.clip(w, 0.0, None))) @ V.conj().T, float(w.min())


def _qr_positive(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    Q, U = np.linalg.qr(X)
    d = np.diag(U)
    ph = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1.0), 1.0)
    return Q * ph[None, :], np.conj(ph)[:, None] * U


def inverse_d(b: SchurSequence, ell: HermitianLaurentPolynomial, R0, N: int, tol: float | None = None) -> BlockFactor:
    """Blocks R_0..R_N and S_0..S_{N-1} of the reversed factor seeded by R0.

    Each step takes |S_n| as the positive root of L_n - R_n^+ R_n, then a QR
    of |S_n| M_n^-1 fixes the unitary part of S_n and the next diagonal block.
    """
    tol = default_tolerance() if tol is None else tol
    d = ell.degree
    z = 2 * d
    R0 = np.asarray(R0, dtype=complex)
    if R0.shape != (z, z):
        raise ValueError(f"R0 must be {z} x {z}")
    if np.any(np.abs(np.triu(R0, 1)) > 0) or np.any(np.diag(R0).real <= 0):
        raise ValueError("R0 must be lower triangular with positive diagonal")
    size = (N + 1) * z + z + 2
    LD = eval_on_cmv(ell, build_cmv(b, size)).data
    scale = max(1.0, float(np.max(np.abs(LD))))
    R = [R0]
    S = []
    for n in range(N):
        rows = slice(n * z, (n + 1) * z)
        below = slice((n + 1) * z, (n + 2) * z)
        L_n = LD[rows, rows]
        M_n = LD[below, rows]
        P = L_n - R[n].conj().T @ R[n]
        P = 0.5 * (P + P.conj().T)
        root, low = _positive_root(P)
        if low <= tol * scale:
            raise BlockBreakdown(n, low)
        Q, U = _qr_positive(np.linalg.solve(M_n.T, root.T).T)
        S.append(Q.conj().T @ root)
        R.append(np.linalg.inv(U.conj().T))
    return BlockFactor(z, tuple(R), tuple(S))
