"""Szego rotation and projection of real CMV matrices, Jacobi Darboux, symmetrization and DVZ."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cmv import _as_array, build_cmv, schur_from_cmv
from .core import HermitianLaurentPolynomial, SchurSequence, TRUNCATED, ZERO_TAIL, default_tolerance
from .darboux_forward import forward
from .errors import NonSymmetricMeasure
from .factorization import banded_cholesky


def _real_parameters(values, tol: float) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    bad = np.nonzero(np.abs(values.imag) > tol)[0]
    if len(bad):
        raise NonSymmetricMeasure(f"a_{int(bad[0]) + 1} is not real")
    return values.real


@dataclass(frozen=True)
class JacobiMatrix:
    diagonal: np.ndarray = field(repr=False)
    offdiagonal: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = np.asarray(self.diagonal, dtype=float)
        o = np.asarray(self.offdiagonal, dtype=float)
        if len(o) != max(len(d) - 1, 0):
            raise ValueError("off-diagonal must be one shorter than the diagonal")
        object.__setattr__(self, "diagonal", d)
        object.__setattr__(self, "offdiagonal", o)

    @property
    def n(self) -> int:
        return len(self.diagonal)

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "JacobiMatrix":
        m = np.real_if_close(np.asarray(m), tol=1e6)
        return cls(np.real(np.diag(m)), np.real(np.diag(m, -1)))

    def matrix(self) -> np.ndarray:
        return np.diag(self.diagonal) + np.diag(self.offdiagonal, 1) + np.diag(self.offdiagonal, -1)

    def truncated(self, n: int) -> "JacobiMatrix":
        return JacobiMatrix(self.diagonal[:n], self.offdiagonal[:max(n - 1, 0)])

    def to_json(self) -> dict:
        return {"diagonal": [float(x) for x in self.diagonal], "offdiagonal": [float(x) for x in self.offdiagonal]}


@dataclass(frozen=True)
class SzegoRotation:
    """Block-diagonal involution: 1, then 2x2 blocks on (2k-1, 2k) built from a_{2k}."""

    even_parameters: np.ndarray = field(repr=False)
    n: int

    @staticmethod
    def block(a: float) -> np.ndarray:
        p, m = np.sqrt(1.0 + a), np.sqrt(1.0 - a)
        return np.array([[-p, m], [m, p]]) / np.sqrt(2.0)

    def matrix(self) -> np.ndarray:
        size = self.n
        # build one index past the end so a block cut by the truncation stays whole, then trim
        full = np.zeros((size + 1, size + 1))
        full[0, 0] = 1.0
        for k, a in enumerate(self.even_parameters, start=1):
            lo = 2 * k - 1
            if lo >= size:
                break
            full[lo:lo + 2, lo:lo + 2] = self.block(a)
        return full[:size, :size]


def szego_rotation(a: SchurSequence, N: int, tol: float | None = None) -> SzegoRotation:
    tol = default_tolerance() if tol is None else tol
    count = N // 2
    evens = np.array([a.value(2 * k) for k in range(1, count + 1)], dtype=complex)
    evens = _real_parameters(evens, tol)
    if np.any(np.abs(evens) >= 1.0):
        raise ValueError("Schur parameters must lie in (-1, 1)")
    return SzegoRotation(evens, N)


@dataclass(frozen=True)
class SzegoProjection:
    even: JacobiMatrix
    odd: JacobiMatrix
    leakage: float
    full: np.ndarray = field(repr=False)

    def __iter__(self):
        return iter((self.even, self.odd))


def interleave(even: np.ndarray, odd: np.ndarray) -> np.ndarray:
    """Direct sum acting on even and odd indices respectively."""
    n = even.shape[0] + odd.shape[0]
    out = np.zeros((n, n), dtype=np.result_type(even, odd))
    out[0::2, 0::2] = even
    out[1::2, 1::2] = odd
    return out


def matrix_szego_projection(C, N: int | None = None, tol: float | None = None) -> SzegoProjection:
    """S (C + C^+) S split into its even and odd Jacobi blocks.

    Exact on the whole truncation when its order is odd.
    """
    tol = default_tolerance() if tol is None else tol
    full = _as_array(C)
    n = full.shape[0] if N is None else N
    # an even order cuts the last rotation block, which still needs a_n
    need = n if n % 2 == 0 else n - 1
    if full.shape[0] - 1 < need:
        raise ValueError(f"order {n} needs a truncation of size at least {need + 1}")
    a = _real_parameters(schur_from_cmv(full, need), tol)
    c = full[:n, :n]
    if np.max(np.abs(c.imag)) > tol:
        raise NonSymmetricMeasure("CMV matrix has complex entries")
    S = szego_rotation(SchurSequence(tuple(a), TRUNCATED), n).matrix()
    J = S @ (c + c.conj().T).real @ S
    leakage = max(float(np.max(np.abs(J[0::2, 1::2]))), float(np.max(np.abs(J[1::2, 0::2]))))
    return SzegoProjection(JacobiMatrix.from_matrix(J[0::2, 0::2]), JacobiMatrix.from_matrix(J[1::2, 1::2]), leakage, J)


@dataclass(frozen=True)
class JacobiDarbouxResult:
    factor: np.ndarray = field(repr=False)
    transformed: JacobiMatrix


def jacobi_darboux_forward(J: JacobiMatrix, slope: float, shift: float) -> JacobiDarbouxResult:
    """Cholesky p(J) = A A^+ with p(x) = slope x + shift, and K from p(K) = A^+ A.

    K has one row fewer than J since its last row depends on the truncation.
    """
    if slope == 0:
        raise ValueError("polynomial must have degree one")
    P = slope * J.matrix() + shift * np.eye(J.n)
    A = banded_cholesky(P).data.real
    K = (A.T @ A - shift * np.eye(J.n)) / slope
    return JacobiDarbouxResult(A, JacobiMatrix.from_matrix(K[:J.n - 1, :J.n - 1]))


def _real_degree_one(ell: HermitianLaurentPolynomial, tol: float) -> tuple[float, float]:
    if ell.degree != 1 or abs(ell.alpha[0].imag) > tol:
        raise NonSymmetricMeasure("the Laurent polynomial must be degree one with real coefficients")
    return ell.alpha[0].real, ell.beta


@dataclass(frozen=True)
class TheoremReport:
    factor_relation: float
    even_factorization: float
    odd_factorization: float
    block_factorization: float
    first_subdiagonal: float
    block_factor: np.ndarray = field(repr=False)

    def max(self) -> float:
        return max(self.factor_relation, self.even_factorization, self.odd_factorization,
                   self.block_factorization, self.first_subdiagonal)

    def to_json(self) -> dict:
        return {
            "factor_relation": self.factor_relation,
            "even_factorization": self.even_factorization,
            "odd_factorization": self.odd_factorization,
            "block_factorization": self.block_factorization,
            "first_subdiagonal": self.first_subdiagonal,
        }


def verify_theorem_AAA(a_C: SchurSequence, a_D: SchurSequence, ell: HermitianLaurentPolynomial, N: int,
                       tol: float | None = None) -> TheoremReport:
    """Compare the CMV factor with the Jacobi factors of the even and odd Szego projections.

    Residuals: S A T against A_e (+) A_o; p(J_e) - A_e A_e^+; p(J_o) - A_o A_o^+;
    p(J) - AA^+ for the block matrices; and the first subdiagonal of A_e (+) A_o.
    """
    tol = default_tolerance() if tol is None else tol
    slope, shift = _real_degree_one(ell, tol)
    n = N if N % 2 == 1 else N + 1
    A = forward(a_C, ell, n).factor.matrix(n).real
    S = szego_rotation(a_C, n).matrix()
    T = szego_rotation(a_D, n).matrix()
    proj = matrix_szego_projection(build_cmv(a_C, n), tol=tol)
    Je, Jo = proj.even, proj.odd
    Ae = jacobi_darboux_forward(Je, slope, shift).factor
    Ao = jacobi_darboux_forward(Jo, slope, shift).factor
    bold = interleave(Ae, Ao)
    rel = float(np.max(np.abs(S @ A @ T - bold)))
    even = float(np.max(np.abs(slope * Je.matrix() + shift * np.eye(Je.n) - Ae @ Ae.T)))
    odd = float(np.max(np.abs(slope * Jo.matrix() + shift * np.eye(Jo.n) - Ao @ Ao.T)))
    block = float(np.max(np.abs(slope * proj.full + shift * np.eye(n) - bold @ bold.T)))
    sub = float(np.max(np.abs(np.diag(bold, -1))))
    return TheoremReport(rel, even, odd, block, sub, bold)


def symmetrize_schur(a: SchurSequence, count: int | None = None) -> SchurSequence:
    """(0, a_1, 0, a_2, ...); tails other than zero are materialized to ``count`` source values."""
    if a.tail.kind == "zero":
        vals, tail = a.prefix, ZERO_TAIL
    elif a.tail.kind == "truncated":
        vals, tail = a.prefix, TRUNCATED
    else:
        if count is None:
            raise ValueError("a constant tail needs an explicit count")
        vals, tail = tuple(a.values(count)), TRUNCATED
    out = []
    for v in vals:
        out += [0j, v]
    return SchurSequence(tuple(out), tail, a.u1)


def dvz(a: SchurSequence, N: int, tol: float | None = None) -> JacobiMatrix:
    """Jacobi matrix L + M: diagonal a_{n-1} - a_n (a_0 = 1), off-diagonal rho_n."""
    tol = default_tolerance() if tol is None else tol
    vals = _real_parameters(a.check_admissible(N), tol)
    full = np.concatenate([[1.0], vals])
    return JacobiMatrix(full[:-1] - full[1:], np.sqrt(1.0 - vals[:-1] ** 2))


DVZ_LAURENT = HermitianLaurentPolynomial(2.0, (1.0,))


def dvz_via_darboux(a: SchurSequence, N: int, tol: float | None = None) -> JacobiMatrix:
    """Even Szego projection of the (z + 1/z + 2)-Darboux transform of the symmetrized sequence."""
    size = 2 * N + 1
    hat = symmetrize_schur(a, count=size)
    target = forward(hat, DVZ_LAURENT, size).target
    proj = matrix_szego_projection(build_cmv(target, size - 2), tol=tol)
    return proj.even.truncated(N)
