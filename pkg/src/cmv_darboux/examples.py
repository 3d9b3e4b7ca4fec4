"""Replay of the worked examples: constant parameters, the Bernstein-Szego shift, and the quasi-definite branches.

Each check returns a ``Check`` with the largest residual it saw, so the CLI
can print one PASS/FAIL line per item.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cmv import build_cmv, eval_on_cmv, leading_unitarity_defect, moments_from_zigzag, zigzag_from_factor
from .core import HermitianLaurentPolynomial, SchurSequence, ZERO_TAIL
from .darboux_forward import forward
from .darboux_inverse import (
    CMV,
    HERMITIAN_SPURIOUS,
    QUASI_CMV,
    SPURIOUS,
    InverseParameters,
    build_solution_matrix,
    classify,
    inverse,
    parameters_with_vanishing_s1,
    recover_source_schur,
)
from .quasi_cmv import quasi_classify, quasi_inverse, quasi_parameters_with_vanishing_s1
from .szego_bridge import verify_theorem_AAA


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


CONSTANT_B = 0.5
CONSTANT_LAURENT = HermitianLaurentPolynomial(2.0, (-1.0,))
SHIFT_A = 0.6
SHIFT_LAURENT = HermitianLaurentPolynomial(1.0 + SHIFT_A ** 2, (SHIFT_A,))
QUASI_LAURENT = HermitianLaurentPolynomial(3.0, (1.0,))


def _constant_target(u1: float = 1.0) -> SchurSequence:
    return SchurSequence.constant(CONSTANT_B, u1)


def reversed_residual(A, b: SchurSequence, ell: HermitianLaurentPolynomial, n: int) -> float:
    """max |l(D) - A^+ A| over the rows the truncation leaves exact."""
    mat = A.matrix(n)
    LD = eval_on_cmv(ell, build_cmv(b, n + 3)).data[:n, :n]
    k = n - 2
    return float(np.max(np.abs((LD - mat.conj().T @ mat)[:k, :k])))


def constant_cmv_branch(steps: int = 10) -> Check:
    b = _constant_target()
    ell = CONSTANT_LAURENT
    r = 1.0 + CONSTANT_B
    params = parameters_with_vanishing_s1(b, ell, r, r)
    cls = classify(b, ell, params)
    expected_a1 = (3 * CONSTANT_B - 1) / (1 + CONSTANT_B)
    A = inverse(b, ell, params, steps)
    rec = recover_source_schur(b, A, ell)
    src = np.asarray(rec.schur.prefix)
    want = np.full(len(src), CONSTANT_B, dtype=complex)
    want[0] = expected_a1
    n = len(src) - 1
    fwd = forward(rec.schur, ell, n)
    back_b = float(np.max(np.abs(np.asarray(fwd.target.prefix) - CONSTANT_B)))
    k = n - 1
    back_A = float(np.max(np.abs(fwd.factor.matrix(k) - A.matrix(k))))
    errs = {
        "a1": abs(cls.a1 - expected_a1) if cls.a1 is not None else np.inf,
        "source": float(np.max(np.abs(src - want))),
    }
    ok = cls.kind == CMV and errs["a1"] <= 1e-10 and errs["source"] <= 1e-10 and back_b <= 1e-9 and back_A <= 1e-9
    detail = (f"kind={cls.kind} a1 err={errs['a1']:.1e} source err={errs['source']:.1e} "
              f"round trip b={back_b:.1e} A={back_A:.1e}")
    return Check("constant parameters, CMV branch", ok, detail)


def spurious_parameters() -> InverseParameters:
    b = CONSTANT_B
    return InverseParameters(2.0 * np.sqrt(b), -np.sqrt(1.0 - b * b), 1.0 - b)


def constant_spurious_branch(steps: int = 12) -> Check:
    # u[1] = 1 for the source needs u[1] = r0^2 = 4b for the target
    b = _constant_target(4.0 * CONSTANT_B)
    ell = CONSTANT_LAURENT
    params = spurious_parameters()
    cls = classify(b, ell, params)
    A = inverse(b, ell, params, steps)
    chi = zigzag_from_factor(A.matrix(steps), b, 5)
    m = moments_from_zigzag(chi, K=2)
    want = {0: 1.0, 1: 1.0, -1: 1.0 - 4.0 * CONSTANT_B}
    err = max(abs(m.moment(j) - v) for j, v in want.items())
    defect = leading_unitarity_defect(build_solution_matrix(A, b, steps))
    ok = cls.kind == SPURIOUS and err <= 1e-9 and defect > 0.1
    return Check("constant parameters, spurious branch", ok,
                 f"kind={cls.kind} moment err={err:.1e} leading defect={defect:.3f}")


def reversed_non_uniqueness(steps: int = 10) -> Check:
    b = _constant_target()
    ell = CONSTANT_LAURENT
    r = 1.0 + CONSTANT_B
    first = inverse(b, ell, parameters_with_vanishing_s1(b, ell, r, r), steps)
    second = inverse(b, ell, spurious_parameters(), steps)
    res = max(reversed_residual(first, b, ell, steps), reversed_residual(second, b, ell, steps))
    gap = float(np.max(np.abs(first.matrix(steps) - second.matrix(steps))))
    ok = res <= 1e-10 and gap > 0.4
    return Check("reversed factorization is not unique", ok, f"residual={res:.1e} factor gap={gap:.3f}")


def bernstein_szego_shift(N: int = 20) -> Check:
    a = SchurSequence((SHIFT_A,), ZERO_TAIL)
    fwd = forward(a, SHIFT_LAURENT, N)
    rho = np.sqrt(1 - SHIFT_A ** 2)
    A = fwd.factor
    b_err = float(np.max(np.abs(fwd.target.prefix)))
    f_err = max(
        abs(A.r[0] - rho),
        abs(A.s[0] - SHIFT_A),
        float(np.max(np.abs(A.t - SHIFT_A))),
        float(np.max(np.abs(A.r[1:] - 1.0))),
    )
    report = verify_theorem_AAA(a, fwd.target.materialize(N), SHIFT_LAURENT, N - 3)
    ok = b_err <= 1e-12 and f_err <= 1e-12 and report.max() <= 1e-10
    return Check("Bernstein-Szego shift and Jacobi factors", ok,
                 f"b err={b_err:.1e} factor err={f_err:.1e} Jacobi residual={report.max():.1e}")


def quasi_fixed_points() -> Check:
    b = SchurSequence((), ZERO_TAIL)
    ell = QUASI_LAURENT
    root5 = np.sqrt(5.0)
    want = {CMV: (3 - root5) / 2, QUASI_CMV: (3 + root5) / 2}
    errs = []
    kinds = []
    for x0 in ((3 + root5) / 2, (3 - root5) / 2):
        params = quasi_parameters_with_vanishing_s1(b, ell, x0, x0)
        cls = quasi_classify(b, ell, params)
        kinds.append(cls.kind)
        errs.append(abs(cls.a1 - want.get(cls.kind, np.nan)) if cls.a1 is not None else np.inf)
        errs.append(abs(abs(params.e0r0sq) - root5))
    err = float(np.nanmax(errs)) if not np.any(np.isnan(errs)) else np.inf
    ok = kinds == [CMV, QUASI_CMV] and err <= 1e-10
    return Check("quasi-definite fixed points", ok, f"kinds={','.join(kinds)} err={err:.1e}")


def quasi_periodic_branch(r: float = 1.3, e: int = 1, alpha: complex = 1.0, steps: int = 8) -> Check:
    """beta = 0: diagonals r0, r, r, 1/r, 1/r, ... and signs e(-1, 1, 1, -1, -1, ...)."""
    b = SchurSequence((), ZERO_TAIL)
    ell = HermitianLaurentPolynomial(0.0, (alpha,))
    params = quasi_parameters_with_vanishing_s1(b, ell, e * r * r, e * r * r)
    res = quasi_inverse(b, ell, params, steps)
    A = res.factor
    period = np.array([1, 1, -1, -1])
    diag = np.where(np.resize(period, len(A.r) - 1) > 0, r, 1.0 / r)
    t_pattern = np.where(np.resize(np.roll(period, -1), len(A.t)) > 0, e * alpha / r, -e * alpha * r)
    signs = e * np.resize(np.array([-1, 1, 1, -1]), len(res.signs))
    err = max(
        abs(A.r[0] - np.sqrt(2.0) / r),
        float(np.max(np.abs(A.r[1:] - diag))),
        float(np.max(np.abs(A.t - t_pattern))),
        abs(A.s[0] - np.conj(e * alpha / r)),
        float(np.max(np.abs(A.s[1:]))),
    )
    sign_ok = list(res.signs.entries) == [int(x) for x in signs]
    kind = quasi_classify(b, ell, params).kind
    ok = err <= 1e-10 and sign_ok and kind == HERMITIAN_SPURIOUS
    return Check("quasi-definite periodic branch", ok, f"pattern err={err:.1e} signs={'ok' if sign_ok else 'bad'} kind={kind}")


def run_all() -> list[Check]:
    checks = []
    for fn in (constant_cmv_branch, constant_spurious_branch, reversed_non_uniqueness, bernstein_szego_shift,
               quasi_fixed_points, quasi_periodic_branch):
        try:
            checks.append(fn())
        except Exception as exc:  # a replay must report, not crash
            checks.append(Check(fn.__name__.replace("_", " "), False, f"{type(exc).__name__}: {exc}"))
    return checks
