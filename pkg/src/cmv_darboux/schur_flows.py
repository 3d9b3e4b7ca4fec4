"""Schur flows with parameter lambda: RK4 reference, Darboux-step discretization, Lax residual."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cmv import build_cmv
from .core import HermitianLaurentPolynomial, SchurSequence, TRUNCATED, default_tolerance
from .darboux_forward import forward, nonlinear_ab_recurrence
from .errors import BlowUp


@dataclass(frozen=True)
class FlowState:
    a: np.ndarray = field(repr=False)
    t: float
    lam: complex

    def __post_init__(self):
        object.__setattr__(self, "a", np.asarray(self.a, dtype=complex))
        lam = complex(self.lam)
        if abs(abs(lam) - 1.0) > 1e-12:
            raise ValueError("lambda must be unimodular")
        object.__setattr__(self, "lam", lam)

    def schur(self) -> SchurSequence:
        return SchurSequence(tuple(self.a), TRUNCATED)


def _rhs(a: np.ndarray, lam: complex) -> np.ndarray:
    ext = np.concatenate([[1.0 + 0j], a, [0j]])
    return (1.0 - np.abs(a) ** 2) * (lam * ext[2:] - np.conj(lam) * ext[:-2])


def flow_rhs(state: FlowState) -> np.ndarray:
    """da_n/dt = rho_n^2 (lambda a_{n+1} - conj(lambda) a_{n-1}), a_0 = 1, zero past the end."""
    return _rhs(state.a, state.lam)


def rk4_step(a: np.ndarray, lam: complex, h: float) -> np.ndarray:
    k1 = _rhs(a, lam)
    k2 = _rhs(a + 0.5 * h * k1, lam)
    k3 = _rhs(a + 0.5 * h * k2, lam)
    k4 = _rhs(a + h * k3, lam)
    return a + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate_reference(a0, lam: complex, T: float, h: float, tol: float | None = None) -> FlowState:
    """Classical RK4 from t = 0 to T (negative T runs backwards).

    The prefix length is kept fixed with zeros past the end, which leaks into
    the last entries; pad a0 if those matter.
    """
    if h <= 0:
        raise ValueError("step must be positive")
    tol = default_tolerance() if tol is None else tol
    a = np.asarray(a0.values(int(a0.available)) if isinstance(a0, SchurSequence) else a0, dtype=complex).copy()
    steps = int(np.ceil(abs(T) / h - 1e-9))
    if steps == 0:
        return FlowState(a, 0.0, lam)
    dt = T / steps
    for k in range(steps):
        a = rk4_step(a, lam, dt)
        big = np.nonzero(np.abs(a) >= 1.0 - tol)[0]
        if len(big) or not np.all(np.isfinite(a)):
            raise BlowUp(k, float(np.max(np.abs(a))))
    return FlowState(a, float(T), lam)


def step_laurent(alpha: complex) -> HermitianLaurentPolynomial:
    """l(z) = 1 + alpha z + conj(alpha) / z."""
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    return HermitianLaurentPolynomial(1.0, (complex(alpha),))


def darboux_step(a: SchurSequence, alpha: complex, N: int | None = None) -> SchurSequence:
    """One forward Darboux step with l = 1 + alpha z + conj(alpha)/z.

    Returns N parameters; a truncated input loses one parameter per step.
    """
    if N is None:
        if a.tail.kind != "truncated":
            raise ValueError("N is required for sequences with an infinite tail")
        N = len(a.prefix) - 1
    return forward(a, step_laurent(alpha), N).target


def discrete_step_direct(a: SchurSequence, alpha: complex, N: int) -> SchurSequence:
    """The same step through the explicit a -> b difference equations."""
    return nonlinear_ab_recurrence(a, step_laurent(alpha), N)


def integrate_darboux(a0: SchurSequence, lam: complex, T: float, delta: float, L: int) -> FlowState:
    """Iterate Darboux steps with alpha = delta * lambda until time T; returns a_1..a_L.

    The initial prefix is padded by one parameter per step so the reported
    prefix matches the infinite recurrence exactly.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    steps = int(round(T / delta))
    if abs(steps * delta - T) > 1e-9 * max(1.0, abs(T)):
        raise ValueError("T must be a multiple of delta")
    cur = a0.materialize(L + steps + 1)
    alpha = delta * complex(lam)
    for _ in range(steps):
        cur = darboux_step(cur, alpha)
    return FlowState(np.asarray(cur.prefix[:L]), steps * delta, lam)


def _pi(X: np.ndarray) -> np.ndarray:
    """Strictly upper part minus strictly lower part."""
    return np.triu(X, 1) - np.tril(X, -1)


def lax_residual(a, lam: complex, h: float, N: int, substeps: int = 20, interior: int | None = None) -> float:
    """max |(C(t+h) - C(t-h))/2h - [pi(Re(lambda C)), C]| over the interior block.

    C(t +- h) come from the reference integrator started at a, which needs
    N + 1 parameters.
    """
    vals = np.asarray(a.values(N + 1) if isinstance(a, SchurSequence) else a, dtype=complex)[:N + 1]
    pad = np.concatenate([vals, np.zeros(8, dtype=complex)])
    plus = integrate_reference(pad, lam, h, h / substeps).a[:N + 1]
    minus = integrate_reference(pad, lam, -h, h / substeps).a[:N + 1]

    def cmv(v):
        return build_cmv(SchurSequence(tuple(v), TRUNCATED), N).data

    C = cmv(vals)
    deriv = (cmv(plus) - cmv(minus)) / (2.0 * h)
    X = lam * C
    B = _pi(0.5 * (X + X.conj().T))
    lax = B @ C - C @ B
    k = N - 6 if interior is None else interior
    return float(np.max(np.abs((deriv - lax)[:k, :k])))


def trajectory(a0: SchurSequence, lam: complex, T: float, dt: float, L: int, scheme: str = "darboux",
               every: int = 1, tol: float | None = None):
    """Yield FlowState snapshots (a_1..a_L) every ``every`` steps, including t = 0 and t = T.

    The Darboux scheme uses delta = dt and pads the prefix like integrate_darboux;
    the RK4 scheme keeps a fixed prefix of L parameters padded with zeros.
    """
    if dt <= 0:
        raise ValueError("step must be positive")
    if every < 1:
        raise ValueError("every must be at least 1")
    steps = int(round(T / dt))
    if abs(steps * dt - T) > 1e-9 * max(1.0, abs(T)):
        raise ValueError("T must be a multiple of dt")
    if steps < 0:
        raise ValueError("T must be non-negative")
    tol = default_tolerance() if tol is None else tol
    lam = complex(lam)
    if scheme == "darboux":
        cur = a0.materialize(L + steps + 1)
        alpha = dt * lam
        advance = lambda c: darboux_step(c, alpha)
        snapshot = lambda c: np.asarray(c.prefix[:L])
    elif scheme == "rk4":
        cur = np.asarray(a0.values(L), dtype=complex)

        def advance(c):
            nxt = rk4_step(c, lam, dt)
            if np.any(np.abs(nxt) >= 1.0 - tol) or not np.all(np.isfinite(nxt)):
                raise BlowUp(k, float(np.max(np.abs(nxt))))
            return nxt

        snapshot = lambda c: c.copy()
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    yield FlowState(snapshot(cur), 0.0, lam)
    for k in range(steps):
        cur = advance(cur)
        if (k + 1) % every == 0 or k + 1 == steps:
            yield FlowState(snapshot(cur), (k + 1) * dt, lam)
