"""Scalars, Laurent polynomials and Schur sequences shared by every module."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InsufficientParameters, InvalidSchurParameter, UnimodularParameter, ZeroArgument

DEFAULT_TOL = 1e-10
TOL_ENV = "CMV_DARBOUX_TOL"


def default_tolerance() -> float:
    """Gate tolerance, overridable through the CMV_DARBOUX_TOL environment variable."""
    raw = os.environ.get(TOL_ENV)
    if raw:
        return float(raw)
    return DEFAULT_TOL


def as_complex(x) -> complex:
    """Accept a number or a [re, im] pair."""
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ValueError(f"complex pair must have two entries, got {x!r}")
        return complex(float(x[0]), float(x[1]))
    return complex(x)


def complex_pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def sign(x: float) -> int:
    if x == 0:
        raise ValueError("sign of zero is undefined")
    return 1 if x > 0 else -1


@dataclass(frozen=True)
class LaurentCoefficients:
    """Finite Laurent series sum_k coeffs[k] z^(lowest + k)."""

    lowest: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex).copy())

    @classmethod
    def monomial(cls, power: int, c: complex = 1.0) -> "LaurentCoefficients":
        return cls(power, np.array([c], dtype=complex))

    @classmethod
    def zero(cls) -> "LaurentCoefficients":
        return cls(0, np.zeros(0, dtype=complex))

    @property
    def highest(self) -> int:
        return self.lowest + len(self.coeffs) - 1

    def coefficient(self, power: int) -> complex:
        k = power - self.lowest
        if 0 <= k < len(self.coeffs):
            return complex(self.coeffs[k])
        return 0j

    def __call__(self, z) -> complex:
        return laurent_eval(self, z)

    def __add__(self, other: "LaurentCoefficients") -> "LaurentCoefficients":
        if len(other.coeffs) == 0:
            return self
        if len(self.coeffs) == 0:
            return other
        lo = min(self.lowest, other.lowest)
        hi = max(self.highest, other.highest)
        out = np.zeros(hi - lo + 1, dtype=complex)
        out[self.lowest - lo:self.lowest - lo + len(self.coeffs)] += self.coeffs
        out[other.lowest - lo:other.lowest - lo + len(other.coeffs)] += other.coeffs
        return LaurentCoefficients(lo, out)

    def __mul__(self, other):
        if isinstance(other, LaurentCoefficients):
            return LaurentCoefficients(self.lowest + other.lowest, np.convolve(self.coeffs, other.coeffs))
        return LaurentCoefficients(self.lowest, self.coeffs * complex(other))

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentCoefficients":
        """Multiply by z^k."""
        return LaurentCoefficients(self.lowest + k, self.coeffs)

    def substar(self) -> "LaurentCoefficients":
        """f_*(z) = conj(f(1/conj z))."""
        return LaurentCoefficients(-self.highest, np.conj(self.coeffs[::-1]))

    def trimmed(self, tol: float = 0.0) -> "LaurentCoefficients":
        nz = np.nonzero(np.abs(self.coeffs) > tol)[0]
        if len(nz) == 0:
            return LaurentCoefficients.zero()
        return LaurentCoefficients(self.lowest + int(nz[0]), self.coeffs[nz[0]:nz[-1] + 1])

    def on_window(self, lowest: int, size: int) -> np.ndarray:
        """Coefficient vector for exponents lowest .. lowest+size-1."""
        out = np.zeros(size, dtype=complex)
        for k, c in enumerate(self.coeffs):
            j = self.lowest + k - lowest
            if 0 <= j < size:
                out[j] = c
            elif c != 0:
                raise ValueError("coefficient outside the requested window")
        return out


@dataclass(frozen=True)
class HermitianLaurentPolynomial:
    """l(z) = beta + sum_j (alpha_j z^j + conj(alpha_j) z^-j), j = 1..d."""

    beta: float
    alpha: tuple

    def __post_init__(self):
        alpha = tuple(complex(a) for a in self.alpha)
        if len(alpha) == 0:
            raise ValueError("a Hermitian Laurent polynomial needs degree >= 1")
        if alpha[-1] == 0:
            raise ValueError("leading coefficient must be nonzero")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", float(self.beta))

    @classmethod
    def degree_one(cls, alpha: complex, beta: float) -> "HermitianLaurentPolynomial":
        return cls(beta, (alpha,))

    @property
    def degree(self) -> int:
        return len(self.alpha)

    def coefficient(self, j: int) -> complex:
        if j == 0:
            return complex(self.beta)
        if 0 < j <= self.degree:
            return self.alpha[j - 1]
        if -self.degree <= j < 0:
            return self.alpha[-j - 1].conjugate()
        return 0j

    def to_laurent(self) -> LaurentCoefficients:
        d = self.degree
        return LaurentCoefficients(-d, np.array([self.coefficient(j) for j in range(-d, d + 1)]))

    def scaled(self, c: float) -> "HermitianLaurentPolynomial":
        return HermitianLaurentPolynomial(c * self.beta, tuple(c * a for a in self.alpha))

    def __mul__(self, other: "HermitianLaurentPolynomial") -> "HermitianLaurentPolynomial":
        return from_laurent(self.to_laurent() * other.to_laurent())

    def to_json(self) -> dict:
        return {"beta": self.beta, "alpha": [complex_pair(a) for a in self.alpha]}

    @classmethod
    def from_json(cls, obj: dict) -> "HermitianLaurentPolynomial":
        return cls(float(obj["beta"]), tuple(as_complex(a) for a in obj["alpha"]))


def from_laurent(f: LaurentCoefficients, tol: float = 1e-12) -> HermitianLaurentPolynomial:
    """Read a Hermitian Laurent polynomial off its coefficients, checking the symmetry."""
    d = max(-f.lowest, f.highest, 0)
    for j in range(0, d + 1):
        if abs(f.coefficient(-j) - f.coefficient(j).conjugate()) > tol * (1 + abs(f.coefficient(j))):
            raise ValueError("coefficients are not Hermitian")
    beta = f.coefficient(0)
    return HermitianLaurentPolynomial(beta.real, tuple(f.coefficient(j) for j in range(1, d + 1)))


def laurent_eval(f, z) -> complex:
    """Evaluate a Laurent polynomial (either representation) at z != 0."""
    z = complex(z)
    if z == 0:
        raise ZeroArgument("Laurent polynomials are not defined at z = 0")
    if isinstance(f, HermitianLaurentPolynomial):
        f = f.to_laurent()
    if len(f.coeffs) == 0:
        return 0j
    # Horner in z on the shifted polynomial, then restore the lowest power.
    acc = 0j
    for c in f.coeffs[::-1]:
        acc = acc * z + c
    return acc * z ** f.lowest


def laurent_from_conjugate_zeros(zeros: Iterable, scale: float = 1.0) -> HermitianLaurentPolynomial:
    """scale * prod (z - zeta)(1/z - conj(zeta)); each factor vanishes at zeta and 1/conj(zeta)."""
    zeros = [complex(zeta) for zeta in zeros]
    if not zeros:
        raise ValueError("at least one zero is required")
    if scale == 0:
        raise ValueError("scale must be nonzero")
    prod = LaurentCoefficients.monomial(0, float(scale))
    for zeta in zeros:
        if zeta == 0:
            raise ZeroArgument("zeros must be nonzero")
        # (z - zeta)(z^-1 - conj zeta) = -zeta z^-1 + (1 + |zeta|^2) - conj(zeta) z
        factor = LaurentCoefficients(-1, np.array([-zeta, 1 + abs(zeta) ** 2, -zeta.conjugate()]))
        prod = prod * factor
    return from_laurent(prod)


def rho(a, tol: float | None = None) -> float:
    """sqrt|1 - |a|^2|."""
    tol = default_tolerance() if tol is None else tol
    m = abs(complex(a))
    if abs(1.0 - m) <= tol:
        raise UnimodularParameter(f"|a| = {m!r} is on the unit circle")
    return math.sqrt(abs(1.0 - m * m))


_TAIL_KINDS = ("zero", "constant", "truncated")


@dataclass(frozen=True)
class Tail:
    kind: str = "zero"
    value: complex = 0j

    def __post_init__(self):
        if self.kind not in _TAIL_KINDS:
            raise ValueError(f"unknown tail kind {self.kind!r}")
        object.__setattr__(self, "value", complex(self.value))

    def to_json(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "value": complex_pair(self.value)}
        return {"kind": self.kind}


ZERO_TAIL = Tail("zero")
TRUNCATED = Tail("truncated")


@dataclass(frozen=True)
class SchurSequence:
    """Schur parameters a_1, a_2, ... (a_0 = 1 is implicit) and the mass u[1]."""

    prefix: tuple = ()
    tail: Tail = ZERO_TAIL
    u1: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(complex(a) for a in self.prefix))
        if not self.u1 > 0:
            raise ValueError("u1 must be positive")
        object.__setattr__(self, "u1", float(self.u1))

    @classmethod
    def from_values(cls, values: Sequence, u1: float = 1.0, tail: Tail = TRUNCATED) -> "SchurSequence":
        return cls(tuple(values), tail, u1)

    @classmethod
    def constant(cls, c: complex, u1: float = 1.0, prefix: Sequence = ()) -> "SchurSequence":
        return cls(tuple(prefix), Tail("constant", c), u1)

    @property
    def available(self) -> float:
        """How many parameters a_1.. are known (inf unless truncated)."""
        return len(self.prefix) if self.tail.kind == "truncated" else math.inf

    def value(self, n: int) -> complex:
        if n == 0:
            return 1.0 + 0j
        if n < 0:
            raise IndexError("Schur parameters start at index 0")
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        if self.tail.kind == "zero":
            return 0j
        if self.tail.kind == "constant":
            return self.tail.value
        raise InsufficientParameters(f"a_{n} requested but only {len(self.prefix)} parameters are known")

    def values(self, count: int, start: int = 1) -> np.ndarray:
        return np.array([self.value(n) for n in range(start, start + count)], dtype=complex)

    def materialize(self, count: int) -> "SchurSequence":
        return SchurSequence(tuple(self.values(count)), TRUNCATED, self.u1)

    def with_u1(self, u1: float) -> "SchurSequence":
        return SchurSequence(self.prefix, self.tail, u1)

    def check_admissible(self, count: int) -> np.ndarray:
        """a_1..a_count, raising unless all lie in the open unit disk."""
        a = self.values(count)
        bad = np.nonzero(np.abs(a) >= 1.0)[0]
        if len(bad):
            n = int(bad[0]) + 1
            raise InvalidSchurParameter(f"|a_{n}| = {abs(a[bad[0]])!r} is not < 1")
        return a

    def to_json(self) -> dict:
        return {"prefix": [complex_pair(a) for a in self.prefix], "tail": self.tail.to_json(), "u1": self.u1}

    @classmethod
    def from_json(cls, obj: dict) -> "SchurSequence":
        tail_obj = obj.get("tail", {"kind": "zero"})
        tail = Tail(tail_obj["kind"], as_complex(tail_obj.get("value", 0.0)))
        return cls(tuple(as_complex(a) for a in obj.get("prefix", [])), tail, float(obj.get("u1", 1.0)))


def rhos(a: np.ndarray) -> np.ndarray:
    """Vectorised sqrt|1 - |a|^2| without the unimodularity gate."""
    return np.sqrt(np.abs(1.0 - np.abs(a) ** 2))
