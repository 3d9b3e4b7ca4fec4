"""Quasi-definite extension: quasi-CMV matrices, sign sequences and the signed recurrences."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cmv import BandedMatrix, _as_array, eval_on_cmv, zigzag_product
from .core import (
    HermitianLaurentPolynomial,
    SchurSequence,
    Tail,
    TRUNCATED,
    ZERO_TAIL,
    as_complex,
    complex_pair,
    default_tolerance,
)
from .darboux_forward import DarbouxFactor, _degree_one, breakdown_threshold
from .darboux_inverse import CLASSIFY_RTOL, CMV, HERMITIAN_SPURIOUS, QUASI_CMV, SPURIOUS, Classification
from .errors import QuasiDefinitenessFailure, UnimodularParameter


@dataclass(frozen=True)
class SignSequence:
    """Diagonal of a sign matrix; every entry is exactly +1 or -1."""

    entries: tuple

    def __post_init__(self):
        vals = tuple(int(e) for e in self.entries)
        if any(e not in (1, -1) for e in vals):
            raise ValueError("sign entries must be +1 or -1")
        object.__setattr__(self, "entries", vals)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, k):
        return self.entries[k]

    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)

    def matrix(self, n: int | None = None) -> np.ndarray:
        n = len(self) if n is None else n
        return np.diag(self.array()[:n])

    def to_json(self) -> list:
        return list(self.entries)


@dataclass(frozen=True)
class QuasiSchurSequence(SchurSequence):
    """Schur parameters anywhere off the unit circle, plus the sign e0 of u[1].

    ``u1`` stays the positive magnitude |u[1]|.
    """

    e0: int = 1

    def __post_init__(self):
        super().__post_init__()
        if self.e0 not in (1, -1):
            raise ValueError("e0 must be +1 or -1")

    @classmethod
    def from_schur(cls, a: SchurSequence, e0: int = 1) -> "QuasiSchurSequence":
        return cls(a.prefix, a.tail, a.u1, e0)

    def materialize(self, count: int) -> "QuasiSchurSequence":
        return QuasiSchurSequence(tuple(self.values(count)), TRUNCATED, self.u1, self.e0)

    def with_u1(self, u1: float) -> "QuasiSchurSequence":
        return QuasiSchurSequence(self.prefix, self.tail, u1, self.e0)

    def check_off_circle(self, count: int, tol: float | None = None) -> np.ndarray:
        tol = default_tolerance() if tol is None else tol
        a = self.values(count)
        bad = np.nonzero(np.abs(np.abs(a) - 1.0) <= tol)[0]
        if len(bad):
            raise UnimodularParameter(f"|a_{int(bad[0]) + 1}| is on the unit circle")
        return a

    def signs(self, count: int) -> SignSequence:
        """e_0..e_{count-1} with e_n = e0 prod_{k<=n} sg(1 - |a_k|^2)."""
        a = self.check_off_circle(max(count - 1, 0))
        steps = np.sign(1.0 - np.abs(a) ** 2).astype(int)
        return SignSequence(tuple(self.e0 * np.concatenate([[1], np.cumprod(steps)])))

    def to_json(self) -> dict:
        out = super().to_json()
        out["e0"] = self.e0
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "QuasiSchurSequence":
        tail_obj = obj.get("tail", {"kind": "zero"})
        tail = Tail(tail_obj["kind"], as_complex(tail_obj.get("value", 0.0)))
        prefix = tuple(as_complex(a) for a in obj.get("prefix", []))
        return cls(prefix, tail, float(obj.get("u1", 1.0)), int(obj.get("e0", 1)))


def as_quasi(a: SchurSequence) -> QuasiSchurSequence:
    return a if isinstance(a, QuasiSchurSequence) else QuasiSchurSequence.from_schur(a)


def _parameters(a: QuasiSchurSequence, count: int):
    """a_0..a_count, rho_0..rho_count and hat-rho (rho_0 entries are placeholders)."""
    vals = a.check_off_circle(count)
    av = np.concatenate([[1.0 + 0j], vals])
    gap = 1.0 - np.abs(av) ** 2
    rh = np.sqrt(np.abs(gap))
    hat = np.where(gap < 0, -rh, rh)
    return av, rh, hat


def build_quasi_cmv(a: SchurSequence, N: int) -> BandedMatrix:
    """Leading N x N block of the quasi-CMV matrix; hat-rho sits below the diagonal of each block."""
    if N < 2:
        raise ValueError("order must be at least 2")
    av, rh, hat = _parameters(as_quasi(a), N + 1)
    return BandedMatrix(zigzag_product(av, rh, hat, N), 2, 2, N)


def quasi_adjoint(C, signs: SignSequence) -> np.ndarray:
    """E C^+ E, the inverse of a quasi-unitary C."""
    c = _as_array(C)
    e = signs.array()[:c.shape[0]]
    return e[:, None] * c.conj().T * e[None, :]


def eval_on_quasi_cmv(ell: HermitianLaurentPolynomial, C, signs: SignSequence) -> BandedMatrix:
    return eval_on_cmv(ell, C, adjoint=quasi_adjoint(C, signs))


def quasi_unitarity_defect(C, signs: SignSequence, interior: int | None = None) -> float:
    c = _as_array(C)
    n = c.shape[0]
    k = n - 2 if interior is None else interior
    E = signs.matrix(n)
    return float(np.max(np.abs((c @ E @ c.conj().T - E)[:k, :k])))


@dataclass(frozen=True)
class QuasiForwardResult:
    factor: DarbouxFactor
    signs: SignSequence
    target: QuasiSchurSequence
    residuals: np.ndarray = field(repr=False)


def quasi_forward(a: SchurSequence, ell: HermitianLaurentPolynomial, N: int, tol: float | None = None) -> QuasiForwardResult:
    """Generalized Cholesky l(C) E = A F A^+ by recurrence; returns A, F and the target b_1..b_N."""
    if N < 1:
        raise ValueError("N must be positive")
    tol = default_tolerance() if tol is None else tol
    alpha, beta = _degree_one(ell)
    a = as_quasi(a)
    av, rh, _ = _parameters(a, N + 1)
    e = a.signs(N + 2).array()
    floor = breakdown_threshold(alpha, beta, tol)
    r = np.zeros(N)
    s = np.zeros(N, dtype=complex)
    t = np.zeros(N, dtype=complex)
    f = np.zeros(N)
    eps = np.zeros(N)
    for n in range(N):
        s_prev = s[n - 1] if n >= 1 else 0j
        t_prev = t[n - 1] if n >= 1 else 0j
        f_prev = f[n - 1] if n >= 1 else 0.0
        t_prev2 = t[n - 2] if n >= 2 else 0j
        f_prev2 = f[n - 2] if n >= 2 else 0.0
        value = (e[n] * (beta - 2.0 * (alpha * np.conj(av[n]) * av[n + 1]).real)
                 - f_prev2 * abs(t_prev2) ** 2 - f_prev * abs(s_prev) ** 2)
        eps[n] = value
        if abs(value) <= floor:
            raise QuasiDefinitenessFailure(n, value)
        f[n] = 1.0 if value > 0 else -1.0
        r[n] = np.sqrt(abs(value))
        fr = f[n] * r[n]
        s[n] = (e[n + 1] * rh[n + 1] * (np.conj(alpha) * av[n] - alpha * av[n + 2])
                - f_prev * s_prev * np.conj(t_prev)) / fr
        t[n] = alpha * e[n + 2] * rh[n + 1] * rh[n + 2] / fr
    b = av[1:N + 1] - s * rh[1:N + 1] / r
    target = QuasiSchurSequence(tuple(b), TRUNCATED, a.u1 * r[0] ** 2, int(f[0]))
    return QuasiForwardResult(DarbouxFactor(r, s, t), SignSequence(tuple(f)), target, eps)


@dataclass(frozen=True)
class QuasiInverseParameters:
    """Signed squares e0 r0^2 and e1 r1^2, and s0."""

    e0r0sq: float
    s0: complex
    e1r1sq: float

    def __post_init__(self):
        if self.e0r0sq == 0 or self.e1r1sq == 0:
            raise ValueError("signed squares must be nonzero")
        object.__setattr__(self, "e0r0sq", float(self.e0r0sq))
        object.__setattr__(self, "e1r1sq", float(self.e1r1sq))
        object.__setattr__(self, "s0", complex(self.s0))

    @property
    def r0(self) -> float:
        return float(np.sqrt(abs(self.e0r0sq)))

    @property
    def r1(self) -> float:
        return float(np.sqrt(abs(self.e1r1sq)))

    @property
    def e0(self) -> int:
        return 1 if self.e0r0sq > 0 else -1

    @property
    def e1(self) -> int:
        return 1 if self.e1r1sq > 0 else -1

    def to_json(self) -> dict:
        return {"e0r0sq": self.e0r0sq, "s0": complex_pair(self.s0), "e1r1sq": self.e1r1sq}


@dataclass(frozen=True)
class QuasiInverseResult:
    factor: DarbouxFactor
    signs: SignSequence


def quasi_inverse(b: SchurSequence, ell: HermitianLaurentPolynomial, params: QuasiInverseParameters, N: int,
                  tol: float | None = None) -> QuasiInverseResult:
    """Generalized reversed factorization F l(D) = A^+ E A seeded by (e0 r0^2, s0, e1 r1^2).

    F comes from the sign sequence of b. Step n yields e_{n+2}, t_n, s_{n+1}, r_{n+2}.
    """
    if N < 1:
        raise ValueError("N must be positive")
    tol = default_tolerance() if tol is None else tol
    alpha, beta = _degree_one(ell)
    b = as_quasi(b)
    bv, sig, _ = _parameters(b, N + 1)
    f = b.signs(N).array()
    phase = alpha / abs(alpha)
    floor = breakdown_threshold(alpha, beta, tol)
    r = np.zeros(N + 2)
    s = np.zeros(N + 1, dtype=complex)
    t = np.zeros(N, dtype=complex)
    e = np.zeros(N + 2)
    r[0], s[0], r[1] = params.r0, params.s0, params.r1
    e[0], e[1] = params.e0, params.e1
    for n in range(N):
        eps = f[n] * (beta - 2.0 * (alpha * np.conj(bv[n]) * bv[n + 1]).real) - e[n] * r[n] ** 2 - e[n + 1] * abs(s[n]) ** 2
        if abs(eps) <= floor:
            raise QuasiDefinitenessFailure(n, eps)
        e[n + 2] = 1.0 if eps > 0 else -1.0
        tau = np.sqrt(abs(eps))
        r[n + 2] = abs(alpha) * sig[n + 1] * sig[n + 2] / tau
        t[n] = phase * e[n + 2] * f[n] * tau
        s[n + 1] = np.conj(phase) * (sig[n + 1] * (np.conj(alpha) * bv[n] - alpha * bv[n + 2])
                                     - e[n + 1] * f[n] * s[n] * r[n + 1]) / tau
    return QuasiInverseResult(DarbouxFactor(r, s, t), SignSequence(tuple(e)))


def quasi_parameters_with_vanishing_s1(b: SchurSequence, ell: HermitianLaurentPolynomial,
                                       e1r1sq: float, e2r2sq: float) -> QuasiInverseParameters:
    """Translate (e1 r1^2, e2 r2^2, s1 = 0) into (e0 r0^2, s0, e1 r1^2)."""
    alpha, beta = _degree_one(ell)
    b = as_quasi(b)
    bv, sig, _ = _parameters(b, 2)
    f0 = b.e0
    e1 = 1 if e1r1sq > 0 else -1
    r1 = np.sqrt(abs(e1r1sq))
    s0 = e1 * f0 * sig[1] * (np.conj(alpha) - alpha * bv[2]) / r1
    eps0 = abs(alpha) ** 2 * sig[1] ** 2 * sig[2] ** 2 / e2r2sq
    e0r0sq = f0 * (beta - 2.0 * (alpha * bv[1]).real) - e1 * abs(s0) ** 2 - eps0
    return QuasiInverseParameters(e0r0sq, s0, e1r1sq)


def quasi_classify(b: SchurSequence, ell: HermitianLaurentPolynomial, params: QuasiInverseParameters,
                   rtol: float = CLASSIFY_RTOL, steps: int = 2) -> Classification:
    """cmv, quasi_cmv, hermitian_spurious or spurious.

    A quasi-CMV solution counts as cmv when its first parameter lies inside the
    disk and the inspected prefix of b is positive definite.
    """
    alpha, beta = _degree_one(ell)
    b = as_quasi(b)
    quasi_inverse(b, ell, params, steps)
    f0 = b.e0
    b1 = b.value(1)
    sigma1 = np.sqrt(abs(1.0 - abs(b1) ** 2))
    a = b1 + params.s0 * sigma1 / params.r1
    scale = max(1.0, abs(beta) + 2.0 * abs(alpha))
    herm = abs(params.e0 * f0 * params.r0 ** 2 - (beta - 2.0 * (alpha * a).real)) / scale
    margins = {"hermiticity": float(herm)}
    if herm > rtol:
        return Classification(SPURIOUS, None, margins)
    gap = 1.0 - abs(a) ** 2
    if abs(abs(a) - 1.0) <= rtol:
        margins["modulus"] = float(abs(a))
        return Classification(HERMITIAN_SPURIOUS, a, margins)
    rho_a = np.sqrt(abs(gap))
    cmv = abs(params.r1 - params.r0 * sigma1 / rho_a) / max(1.0, params.r1)
    margins["cmv"] = float(cmv)
    sign_ok = params.e1 == params.e0 * (1 if gap > 0 else -1)
    margins["sign"] = 0.0 if sign_ok else 1.0
    if cmv > rtol or not sign_ok:
        return Classification(HERMITIAN_SPURIOUS, a, margins)
    inspected = b.values(steps + 1)
    if gap > 0 and np.all(np.abs(inspected) < 1.0):
        return Classification(CMV, a, margins)
    return Classification(QUASI_CMV, a, margins)
