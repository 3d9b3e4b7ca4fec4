"""CMV matrices, orthonormal Laurent polynomials, zig-zag bases and moments."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .core import (
    HermitianLaurentPolynomial,
    LaurentCoefficients,
    SchurSequence,
    TRUNCATED,
    as_complex,
    complex_pair,
    default_tolerance,
)
from .errors import DegenerateBasis, InvalidFactor


@dataclass
class BandedMatrix:
    """Leading N x N truncation of an infinite band matrix.

    Only the leading ``interior`` x ``interior`` block is guaranteed to agree
    with the infinite matrix; entries beyond it are truncation artefacts.
    """

    data: np.ndarray = field(repr=False)
    lower: int
    upper: int
    interior: int | None = None

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.ndim != 2 or self.data.shape[0] != self.data.shape[1]:
            raise ValueError("banded matrices are square")
        if self.interior is None:
            self.interior = self.n
        self.interior = max(0, min(int(self.interior), self.n))

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def __getitem__(self, idx):
        return self.data[idx]

    def dense(self) -> np.ndarray:
        return self.data.copy()

    def inner(self) -> np.ndarray:
        k = self.interior
        return self.data[:k, :k]

    def diagonal(self, offset: int) -> np.ndarray:
        return np.diagonal(self.data, offset).copy()

    def to_json(self) -> dict:
        diags = {}
        for off in range(-self.lower, self.upper + 1):
            diags[str(off)] = [complex_pair(z) for z in self.diagonal(off)]
        return {"n": self.n, "lower": self.lower, "upper": self.upper, "interior": self.interior, "diagonals": diags}

    @classmethod
    def from_json(cls, obj: dict) -> "BandedMatrix":
        n = int(obj["n"])
        data = np.zeros((n, n), dtype=complex)
        for key, entries in obj["diagonals"].items():
            off = int(key)
            vals = np.array([as_complex(e) for e in entries], dtype=complex)
            idx = np.arange(len(vals))
            if off >= 0:
                data[idx, idx + off] = vals
            else:
                data[idx - off, idx] = vals
        return cls(data, int(obj["lower"]), int(obj["upper"]), obj.get("interior"))


def _as_array(m) -> np.ndarray:
    return m.data if isinstance(m, BandedMatrix) else np.asarray(m, dtype=complex)


def zigzag_product(a: np.ndarray, rho_up: np.ndarray, rho_down: np.ndarray, n: int) -> np.ndarray:
    """Leading n x n block of M L built from 2x2 blocks [[-a_k, rho_up_k], [rho_down_k, conj a_k]].

    ``a[k]`` holds a_k for k = 0..n+1 (a_0 = 1 is stored, not assumed); L carries
    the odd-indexed blocks, M the leading 1 and the even-indexed blocks.
    """
    size = n + 2
    L = np.zeros((size, size), dtype=complex)
    M = np.zeros((size, size), dtype=complex)
    M[0, 0] = 1.0
    for k in range(1, size):
        lo = k - 1
        target = L if k % 2 == 1 else M
        block = [[-a[k], rho_up[k]], [rho_down[k], np.conj(a[k])]]
        for i in range(2):
            for j in range(2):
                if lo + i < size and lo + j < size:
                    target[lo + i, lo + j] = block[i][j]
    return (M @ L)[:n, :n]


def build_cmv(a: SchurSequence, n: int) -> BandedMatrix:
    """Leading n x n block of the CMV matrix of the Schur parameters ``a``."""
    if n < 2:
        raise ValueError("order must be at least 2")
    vals = a.check_admissible(n + 1)
    full = np.concatenate([[1.0 + 0j], vals])
    r = np.sqrt(1.0 - np.abs(full) ** 2)
    return BandedMatrix(zigzag_product(full, r, r, n), 2, 2, n)


def shift_matrix(n: int) -> BandedMatrix:
    return build_cmv(SchurSequence(), n)


def schur_from_cmv(C, count: int | None = None) -> np.ndarray:
    """Read a_1..a_count back from the entries of a (quasi-)CMV truncation."""
    c = _as_array(C)
    n = c.shape[0]
    count = n - 1 if count is None else count
    out = np.zeros(count, dtype=complex)
    out[0] = -c[0, 0]
    # a_{k+1} sits next to rho_k: at (k, k-1) for odd k, at (k-1, k) for even k.
    rho_k = c[0, 1].real
    for k in range(1, count):
        entry = c[k, k - 1] if k % 2 == 1 else c[k - 1, k]
        out[k] = -entry / rho_k
        rho_k = np.sqrt(abs(1.0 - abs(out[k]) ** 2))
    return out


def eval_on_cmv(ell: HermitianLaurentPolynomial, C, adjoint=None) -> BandedMatrix:
    """l(C) = beta + sum_j alpha_j C^j + conj(alpha_j) (C^-1)^j.

    ``adjoint`` stands in for C^-1 when C is not unitary (quasi-CMV); by default
    C^-1 = C^+.
    """
    if not isinstance(ell, HermitianLaurentPolynomial) or ell.degree < 1:
        raise ValueError("l must be a Hermitian Laurent polynomial of degree >= 1")
    c = _as_array(C)
    n = c.shape[0]
    cinv = c.conj().T if adjoint is None else _as_array(adjoint)
    out = ell.beta * np.eye(n, dtype=complex)
    up = np.eye(n, dtype=complex)
    down = np.eye(n, dtype=complex)
    for j, alpha in enumerate(ell.alpha, start=1):
        up = up @ c
        down = down @ cinv
        out = out + alpha * up + np.conj(alpha) * down
    w = 2 * ell.degree
    out = np.triu(np.tril(out, w), -w)
    base = C.interior if isinstance(C, BandedMatrix) else n
    return BandedMatrix(out, w, w, min(base, n) - w - 2)


@dataclass(frozen=True)
class ZigzagBasis:
    """chi_0..chi_K on the common exponent window starting at ``lowest``."""

    lowest: int
    coeffs: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.coeffs.shape[0]

    def element(self, n: int) -> LaurentCoefficients:
        return LaurentCoefficients(self.lowest, self.coeffs[n]).trimmed()

    def coefficient(self, n: int, power: int) -> complex:
        k = power - self.lowest
        if 0 <= k < self.coeffs.shape[1]:
            return complex(self.coeffs[n, k])
        return 0j

    def transformed(self, matrix: np.ndarray) -> "ZigzagBasis":
        return ZigzagBasis(self.lowest, matrix @ self.coeffs)


def _window(count: int) -> tuple[int, int]:
    k = count - 1
    return -(k // 2), k + 1


def orthonormal_basis(a: SchurSequence, count: int) -> ZigzagBasis:
    """chi_0..chi_{count-1} from the Szego recurrence with kappa_0 = 1/sqrt(u1)."""
    if count < 1:
        raise ValueError("count must be positive")
    vals = a.check_admissible(count - 1) if count > 1 else np.zeros(0, dtype=complex)
    lowest, width = _window(count)
    coeffs = np.zeros((count, width), dtype=complex)
    phi = np.array([1.0 / np.sqrt(a.u1)], dtype=complex)
    coeffs[0, -lowest] = phi[0]
    for k in range(1, count):
        ak = vals[k - 1]
        star = np.conj(phi[::-1])
        nxt = np.zeros(k + 1, dtype=complex)
        nxt[1:] += phi
        nxt[:k] += ak * star
        phi = nxt / np.sqrt(1.0 - abs(ak) ** 2)
        m = k // 2
        poly = np.conj(phi[::-1]) if k % 2 == 0 else phi
        start = -m - lowest
        coeffs[k, start:start + k + 1] = poly
    return ZigzagBasis(lowest, coeffs)


def orthonormal_laurent(a: SchurSequence, n: int) -> LaurentCoefficients:
    """chi_n for the Schur parameters a."""
    return orthonormal_basis(a, n + 1).element(n)


def schur_from_zigzag(omega: ZigzagBasis, tol: float | None = None) -> SchurSequence:
    """Schur parameters read from the extremal coefficients of an orthonormal zig-zag basis."""
    tol = default_tolerance() if tol is None else tol
    w0 = omega.coefficient(0, 0)
    if abs(w0.imag) > tol * max(1.0, abs(w0)) or w0.real <= 0:
        raise DegenerateBasis("chi_0 must be a positive constant")
    out = []
    for n in range(1, omega.size):
        m = n // 2
        if n % 2 == 1:
            lead = omega.coefficient(n, m + 1)
            const = omega.coefficient(n, -m)
        else:
            lead = np.conj(omega.coefficient(n, -m))
            const = np.conj(omega.coefficient(n, m))
        if abs(lead) <= tol:
            raise DegenerateBasis(f"vanishing extremal coefficient at index {n}")
        out.append(const / lead)
    return SchurSequence(tuple(out), TRUNCATED, 1.0 / w0.real ** 2)


def factor_matrix(A, n: int) -> np.ndarray:
    if hasattr(A, "matrix"):
        return A.matrix(n)
    return _as_array(A)[:n, :n]


def zigzag_from_factor(A, b: SchurSequence, count: int) -> ZigzagBasis:
    """chi = A omega with omega the orthonormal basis of b (count elements)."""
    if hasattr(A, "t") and np.any(np.asarray(A.t)[: max(count - 2, 0)] == 0):
        raise InvalidFactor("Darboux factors have nonzero outer diagonal")
    mat = factor_matrix(A, count)
    if mat.shape[0] < count:
        raise InvalidFactor("factor has too few rows")
    if np.any(np.diag(mat).real <= 0):
        raise InvalidFactor("factor diagonal must be positive")
    omega = orthonormal_basis(b, count)
    return omega.transformed(mat)


@dataclass(frozen=True)
class FunctionalMoments:
    K: int
    values: np.ndarray = field(repr=False)

    def moment(self, j: int) -> complex:
        if abs(j) > self.K:
            raise IndexError("moment outside the computed range")
        return complex(self.values[j + self.K])

    def hermitian_defect(self) -> float:
        v = self.values
        return float(np.max(np.abs(v - np.conj(v[::-1])))) if len(v) else 0.0

    def to_json(self) -> dict:
        return {"K": self.K, "values": [complex_pair(z) for z in self.values]}


def zigzag_order(K: int) -> list[int]:
    """Exponents ordered 0, 1, -1, 2, -2, ..., K, -K."""
    out = [0]
    for k in range(1, K + 1):
        out += [k, -k]
    return out


def moments_from_zigzag(chi: ZigzagBasis, K: int | None = None, tol: float | None = None) -> FunctionalMoments:
    """Moments u[z^j], |j| <= K, of the functional making chi orthonormal."""
    tol = default_tolerance() if tol is None else tol
    K = (chi.size - 1) // 2 if K is None else K
    if chi.size < 2 * K + 1:
        raise ValueError("basis too short for the requested range")
    c0 = chi.coefficient(0, 0)
    if abs(c0) <= tol:
        raise DegenerateBasis("chi_0 vanishes")
    order = zigzag_order(K)
    G = np.array([[chi.coefficient(n, p) for p in order] for n in range(2 * K + 1)])
    piv = np.abs(np.diag(G))
    if np.any(piv <= tol):
        raise DegenerateBasis(f"zero pivot at index {int(np.argmax(piv <= tol))}")
    rhs = np.zeros(2 * K + 1, dtype=complex)
    rhs[0] = 1.0 / c0
    sol = solve_triangular(G, rhs, lower=True)
    values = np.zeros(2 * K + 1, dtype=complex)
    for p, s in zip(order, sol):
        values[p + K] = s
    return FunctionalMoments(K, values)


def leading_unitarity_defect(C) -> float:
    """max |(C C^+ - I)| over the leading 2 x 2 block; zero exactly for CMV matrices."""
    c = _as_array(C)
    rows = c[:2, :]
    block = rows @ rows.conj().T - np.eye(2)
    return float(np.max(np.abs(block)))


def unitarity_defect(C, interior: int | None = None) -> float:
    c = _as_array(C)
    k = c.shape[0] - 2 if interior is None else interior
    prod = c @ c.conj().T
    return float(np.max(np.abs(prod[:k, :k] - np.eye(k))))
