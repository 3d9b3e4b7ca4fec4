"""Degree-one forward Darboux transformation C -> D = A^-1 C A with l(C) = A A^+."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cmv import _as_array
from .core import HermitianLaurentPolynomial, SchurSequence, TRUNCATED, complex_pair, default_tolerance, rho
from .errors import NotPositiveDefinite


@dataclass(frozen=True)
class DarbouxFactor:
    """Lower-triangular three-band factor with diagonal r, subdiagonal s and outer diagonal t.

    In the explicit matrix the entries below column n are s_n, t_n for even n
    and their conjugates for odd n.
    """

    r: np.ndarray = field(repr=False)
    s: np.ndarray = field(repr=False)
    t: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "r", np.asarray(self.r, dtype=float))
        object.__setattr__(self, "s", np.asarray(self.s, dtype=complex))
        object.__setattr__(self, "t", np.asarray(self.t, dtype=complex))

    @property
    def size(self) -> int:
        """Largest order whose leading block is fully determined."""
        return int(min(len(self.r), len(self.s) + 1, len(self.t) + 2))

    def matrix(self, n: int | None = None) -> np.ndarray:
        n = self.size if n is None else n
        if n > self.size:
            raise ValueError(f"factor only determines {self.size} rows, {n} requested")
        A = np.zeros((n, n), dtype=complex)
        for k in range(n):
            A[k, k] = self.r[k]
            conj = (lambda z: z) if k % 2 == 0 else np.conj
            if k + 1 < n:
                A[k + 1, k] = conj(self.s[k])
            if k + 2 < n:
                A[k + 2, k] = conj(self.t[k])
        return A

    def truncated(self, n: int) -> "DarbouxFactor":
        return DarbouxFactor(self.r[:n], self.s[:n], self.t[:n])

    def to_json(self) -> dict:
        return {
            "r": [float(x) for x in self.r],
            "s": [complex_pair(z) for z in self.s],
            "t": [complex_pair(z) for z in self.t],
        }


@dataclass(frozen=True)
class ForwardResult:
    factor: DarbouxFactor
    target: SchurSequence
    radicands: np.ndarray = field(repr=False)

    @property
    def sigma(self) -> np.ndarray:
        return np.sqrt(1.0 - np.abs(np.asarray(self.target.prefix)) ** 2)


def _degree_one(ell: HermitianLaurentPolynomial) -> tuple[complex, float]:
    if not isinstance(ell, HermitianLaurentPolynomial) or ell.degree != 1:
        raise ValueError("a degree-one Hermitian Laurent polynomial is required")
    return ell.alpha[0], ell.beta


def breakdown_threshold(alpha: complex, beta: float, tol: float) -> float:
    return tol * max(1.0, abs(beta) + 2.0 * abs(alpha))


def forward(a: SchurSequence, ell: HermitianLaurentPolynomial, N: int, tol: float | None = None) -> ForwardResult:
    """Run the Cholesky recurrence of l(C) for N steps, giving b_1..b_N and the factor rows 0..N-1.

    Needs a_1..a_{N+1}. Raises NotPositiveDefinite at the first step whose
    pivot radicand is not positive.
    """
    if N < 1:
        raise ValueError("N must be positive")
    tol = default_tolerance() if tol is None else tol
    alpha, beta = _degree_one(ell)
    vals = a.check_admissible(N + 1)
    av = np.concatenate([[1.0 + 0j], vals])
    rh = np.sqrt(1.0 - np.abs(av) ** 2)
    floor = breakdown_threshold(alpha, beta, tol)
    r = np.zeros(N)
    s = np.zeros(N, dtype=complex)
    t = np.zeros(N, dtype=complex)
    rad = np.zeros(N)
    for n in range(N):
        s_prev = s[n - 1] if n >= 1 else 0j
        t_prev = t[n - 1] if n >= 1 else 0j
        t_prev2 = t[n - 2] if n >= 2 else 0j
        radicand = beta - 2.0 * (alpha * np.conj(av[n]) * av[n + 1]).real - abs(s_prev) ** 2 - abs(t_prev2) ** 2
        rad[n] = radicand
        if radicand <= floor:
            raise NotPositiveDefinite(n, radicand)
        r[n] = np.sqrt(radicand)
        s[n] = (rh[n + 1] * (np.conj(alpha) * av[n] - alpha * av[n + 2]) - s_prev * np.conj(t_prev)) / r[n]
        t[n] = alpha * rh[n + 1] * rh[n + 2] / r[n]
    b = av[1:N + 1] - s[:N] * rh[1:N + 1] / r[:N]
    target = SchurSequence(tuple(b), TRUNCATED, a.u1 * r[0] ** 2)
    return ForwardResult(DarbouxFactor(r, s, t), target, rad)


def nonlinear_ab_recurrence(a: SchurSequence, ell: HermitianLaurentPolynomial, N: int) -> SchurSequence:
    """b_1..b_N straight from a, without forming the factor.

    b_n - a_n = c_n (alpha a_{n+1} - conj(alpha) b_{n-1}) where
    c_n = prod_{k<=n} rho_k^2 / ((beta - 2 Re(alpha a_1)) prod_{k<n} sigma_k^2).
    """
    alpha, beta = _degree_one(ell)
    vals = a.check_admissible(N + 1)
    av = np.concatenate([[1.0 + 0j], vals])
    base = beta - 2.0 * (alpha * av[1]).real
    if base <= 0:
        raise NotPositiveDefinite(0, base)
    b = np.zeros(N + 1, dtype=complex)
    b[0] = 1.0
    rho_prod = 1.0
    sigma_prod = 1.0
    for n in range(1, N + 1):
        rho_prod *= 1.0 - abs(av[n]) ** 2
        coef = rho_prod / (base * sigma_prod)
        b[n] = av[n] + coef * (alpha * av[n + 1] - np.conj(alpha) * b[n - 1])
        sigma_prod *= rho(b[n]) ** 2
    return SchurSequence(tuple(b[1:]), TRUNCATED, a.u1 * base)


def verify_intertwining(C, D, A, interior: int | None = None) -> float:
    """max |C A - A D| over the leading interior block."""
    c = _as_array(C)
    d = _as_array(D)
    n = min(c.shape[0], d.shape[0])
    mat = A.matrix(n) if hasattr(A, "matrix") else _as_array(A)[:n, :n]
    k = n - 3 if interior is None else interior
    diff = c[:n, :n] @ mat - mat @ d[:n, :n]
    return float(np.max(np.abs(diff[:k, :k])))
