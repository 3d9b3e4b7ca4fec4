"""Darboux transformations with parameters: reversed Cholesky l(D) = A^+ A and classification."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .cmv import build_cmv
from .core import HermitianLaurentPolynomial, SchurSequence, TRUNCATED, complex_pair, default_tolerance
from .darboux_forward import DarbouxFactor, _degree_one, breakdown_threshold
from .errors import InfeasibleTarget, InvalidSchurParameter, ReversedFactorizationBreakdown

CLASSIFY_RTOL = 1e-8

CMV = "cmv"
HERMITIAN_SPURIOUS = "hermitian_spurious"
SPURIOUS = "spurious"
QUASI_CMV = "quasi_cmv"


@dataclass(frozen=True)
class InverseParameters:
    """The three free entries r0, s0, r1 of the reversed factor."""

    r0: float
    s0: complex
    r1: float

    def __post_init__(self):
        if not (self.r0 > 0 and self.r1 > 0):
            raise ValueError("r0 and r1 must be positive")
        object.__setattr__(self, "r0", float(self.r0))
        object.__setattr__(self, "r1", float(self.r1))
        object.__setattr__(self, "s0", complex(self.s0))

    def to_json(self) -> dict:
        return {"r0": self.r0, "s0": complex_pair(self.s0), "r1": self.r1}


@dataclass(frozen=True)
class Classification:
    kind: str
    a1: complex | None
    margins: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.a1 is not None:
            out["a1"] = complex_pair(self.a1)
        out["margins"] = {k: float(v) for k, v in self.margins.items()}
        return out


def _target_values(b: SchurSequence, count: int) -> tuple[np.ndarray, np.ndarray]:
    """b_0..b_count (b_0 = 1) and sigma_0..sigma_count (sigma_0 unused)."""
    vals = b.check_admissible(count)
    bv = np.concatenate([[1.0 + 0j], vals])
    sig = np.sqrt(1.0 - np.abs(bv) ** 2)
    return bv, sig


def inverse(b: SchurSequence, ell: HermitianLaurentPolynomial, params: InverseParameters, N: int,
            tol: float | None = None) -> DarbouxFactor:
    """Reversed factor A with l(D) = A^+ A after N steps of the recurrence seeded by (r0, s0, r1).

    Step n produces t_n, s_{n+1} and r_{n+2}; it needs b_{n+2}.
    """
    if N < 1:
        raise ValueError("N must be positive")
    tol = default_tolerance() if tol is None else tol
    alpha, beta = _degree_one(ell)
    bv, sig = _target_values(b, N + 1)
    phase = alpha / abs(alpha)
    floor = breakdown_threshold(alpha, beta, tol)
    r = np.zeros(N + 2)
    s = np.zeros(N + 1, dtype=complex)
    t = np.zeros(N, dtype=complex)
    r[0], s[0], r[1] = params.r0, params.s0, params.r1
    for n in range(N):
        radicand = beta - 2.0 * (alpha * np.conj(bv[n]) * bv[n + 1]).real - r[n] ** 2 - abs(s[n]) ** 2
        if radicand <= floor:
            raise ReversedFactorizationBreakdown(n, radicand)
        tau = np.sqrt(radicand)
        r[n + 2] = abs(alpha) * sig[n + 1] * sig[n + 2] / tau
        s[n + 1] = np.conj(phase) * (sig[n + 1] * (np.conj(alpha) * bv[n] - alpha * bv[n + 2]) - s[n] * r[n + 1]) / tau
        t[n] = phase * tau
    return DarbouxFactor(r, s, t)


def first_source_parameter(b: SchurSequence, params: InverseParameters) -> complex:
    """a = b_1 + s_0 sigma_1 / r_1."""
    b1 = b.value(1)
    return b1 + params.s0 * np.sqrt(1.0 - abs(b1) ** 2) / params.r1


def classify(b: SchurSequence, ell: HermitianLaurentPolynomial, params: InverseParameters,
             rtol: float = CLASSIFY_RTOL, steps: int = 2) -> Classification:
    """Decide whether (r0, s0, r1) gives a CMV solution, a Hermitian spurious one, or neither."""
    alpha, beta = _degree_one(ell)
    inverse(b, ell, params, steps)
    a = first_source_parameter(b, params)
    scale = max(1.0, abs(beta) + 2.0 * abs(alpha))
    herm = abs(params.r0 ** 2 - (beta - 2.0 * (alpha * a).real)) / scale
    margins = {"hermiticity": herm}
    if herm > rtol:
        return Classification(SPURIOUS, None, margins)
    if abs(a) >= 1.0 - rtol:
        margins["modulus"] = abs(a)
        return Classification(HERMITIAN_SPURIOUS, a, margins)
    sigma1 = np.sqrt(1.0 - abs(b.value(1)) ** 2)
    rho_a = np.sqrt(1.0 - abs(a) ** 2)
    cmv = abs(params.r1 - params.r0 * sigma1 / rho_a) / max(1.0, params.r1)
    margins["cmv"] = cmv
    if cmv > rtol:
        return Classification(HERMITIAN_SPURIOUS, a, margins)
    return Classification(CMV, a, margins)


def cmv_parameters_for(b: SchurSequence, ell: HermitianLaurentPolynomial, a1: complex) -> InverseParameters:
    """The unique (r0, s0, r1) whose solution is CMV with first Schur parameter a1."""
    alpha, beta = _degree_one(ell)
    a1 = complex(a1)
    if abs(a1) >= 1.0:
        raise InvalidSchurParameter(f"|a1| = {abs(a1)!r} is not < 1")
    radicand = beta - 2.0 * (alpha * a1).real
    if radicand <= 0:
        raise InfeasibleTarget(f"beta - 2 Re(alpha a1) = {radicand!r} is not positive")
    r0 = np.sqrt(radicand)
    b1 = b.value(1)
    sigma1 = np.sqrt(1.0 - abs(b1) ** 2)
    r1 = r0 * sigma1 / np.sqrt(1.0 - abs(a1) ** 2)
    return InverseParameters(r0, (a1 - b1) * r1 / sigma1, r1)


def parameters_with_vanishing_s1(b: SchurSequence, ell: HermitianLaurentPolynomial, r1: float, r2: float) -> InverseParameters:
    """Translate a choice (r1, r2, s1 = 0) into the canonical (r0, s0, r1)."""
    alpha, beta = _degree_one(ell)
    bv, sig = _target_values(b, 2)
    s0 = sig[1] * (np.conj(alpha) - alpha * bv[2]) / r1
    tau0 = abs(alpha) * sig[1] * sig[2] / r2
    r0sq = beta - 2.0 * (alpha * bv[1]).real - abs(s0) ** 2 - tau0 ** 2
    if r0sq <= 0:
        raise InfeasibleTarget(f"r0^2 = {r0sq!r} is not positive")
    return InverseParameters(np.sqrt(r0sq), s0, r1)


@dataclass(frozen=True)
class RecoveredSource:
    schur: SchurSequence
    consistency_residual: float


def recover_source_schur(b: SchurSequence, A: DarbouxFactor, ell: HermitianLaurentPolynomial | None = None) -> RecoveredSource:
    """a_n = b_n + s_{n-1} sigma_n / r_n, plus the residual of the companion relation when l is known."""
    count = min(len(A.r), len(A.s) + 1) - 1
    bv, sig = _target_values(b, count)
    n = np.arange(1, count + 1)
    a = bv[n] + A.s[n - 1] * sig[n] / A.r[n]
    residual = 0.0
    if ell is not None:
        alpha, _ = _degree_one(ell)
        av = np.concatenate([[1.0 + 0j], a])
        # alpha a_{n+2} = conj(alpha) b_n - s_n r_{n+1} / sigma_{n+1}
        m = np.arange(0, count - 1)
        lhs = alpha * av[m + 2]
        rhs = np.conj(alpha) * bv[m] - A.s[m] * A.r[m + 1] / sig[m + 1]
        residual = float(np.max(np.abs(lhs - rhs))) if len(m) else 0.0
    u1 = b.u1 / A.r[0] ** 2
    return RecoveredSource(SchurSequence(tuple(a), TRUNCATED, u1), residual)


def build_solution_matrix(A: DarbouxFactor, b: SchurSequence, N: int) -> np.ndarray:
    """Leading block of C = A D A^-1; only the first N - 2 rows are exact."""
    mat = A.matrix(N)
    D = build_cmv(b, N).data
    AD = mat @ D
    # C = (A D) A^-1  <=>  C A = A D, solved as A^T C^T = (A D)^T
    return solve_triangular(mat.T, AD.T, lower=False).T
