import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cmv_darboux import (
    HermitianLaurentPolynomial,
    InverseParameters,
    SchurSequence,
    ZERO_TAIL,
    build_cmv,
    forward,
    generalized_cholesky,
    inverse,
)
from cmv_darboux.darboux_inverse import CMV, HERMITIAN_SPURIOUS, QUASI_CMV, SPURIOUS
from cmv_darboux.errors import QuasiDefinitenessFailure, UnimodularParameter
from cmv_darboux.examples import quasi_periodic_branch
from cmv_darboux.quasi_cmv import (
    QuasiInverseParameters,
    QuasiSchurSequence,
    SignSequence,
    build_quasi_cmv,
    eval_on_quasi_cmv,
    quasi_adjoint,
    quasi_classify,
    quasi_forward,
    quasi_inverse,
    quasi_parameters_with_vanishing_s1,
    quasi_unitarity_defect,
)
from conftest import maxabs, positive_laurent, random_schur, schur_values

GOLDEN = (3 + np.sqrt(5)) / 2
ZERO = SchurSequence((), ZERO_TAIL)
QD_ELL = HermitianLaurentPolynomial(3.0, (1.0,))


def mixed(rng, count):
    mods = rng.choice([0.4, 0.7, 1.4, 2.5], count)
    return QuasiSchurSequence(tuple(mods * np.exp(2j * np.pi * rng.uniform(size=count))))


def test_golden_entries():
    C = build_quasi_cmv(SchurSequence((GOLDEN,), ZERO_TAIL), 6).data
    rho = np.sqrt(GOLDEN ** 2 - 1)
    assert C[0, 0] == pytest.approx(-GOLDEN)
    assert C[0, 1] == pytest.approx(rho)
    assert C[0, 1] == pytest.approx(2.4195, abs=1e-4)
    assert C[2, 0] == pytest.approx(-rho)
    assert C[2, 1] == pytest.approx(GOLDEN)


def test_signs_and_json():
    a = QuasiSchurSequence((0.5, 2.0, 3.0, 0.1), e0=-1)
    assert a.signs(5).entries == (-1, -1, 1, -1, -1)
    assert QuasiSchurSequence.from_json(a.to_json()) == a
    with pytest.raises(UnimodularParameter):
        QuasiSchurSequence((1.0,)).signs(2)
    with pytest.raises(ValueError):
        SignSequence((1, 0))
    with pytest.raises(ValueError):
        QuasiSchurSequence((), e0=2)


def test_reduces_to_positive_definite(rng):
    a = random_schur(rng, 24)
    assert maxabs(build_quasi_cmv(a, 12).data - build_cmv(a, 12).data) == 0
    ell = HermitianLaurentPolynomial(2.4, (0.3 + 0.8j,))
    q = quasi_forward(a, ell, 20)
    p = forward(a, ell, 20)
    assert set(q.signs.entries) == {1}
    assert maxabs(np.array(q.target.prefix) - p.target.prefix) < 1e-12
    assert maxabs(q.factor.matrix(20) - p.factor.matrix(20)) < 1e-12
    params = InverseParameters(p.factor.r[0], p.factor.s[0], p.factor.r[1])
    qi = quasi_inverse(p.target, ell, QuasiInverseParameters(params.r0 ** 2, params.s0, params.r1 ** 2), 6)
    assert set(qi.signs.entries) == {1}
    assert maxabs(qi.factor.matrix(6) - inverse(p.target, ell, params, 6).matrix(6)) < 1e-12


def test_quasi_unitarity(rng):
    for _ in range(10):
        a = mixed(rng, 20)
        C = build_quasi_cmv(a, 16)
        E = a.signs(16)
        assert quasi_unitarity_defect(C, E, 14) < 1e-12
        inv = quasi_adjoint(C, E)
        assert maxabs((C.data @ inv - np.eye(16))[:13, :13]) < 1e-12


def test_sign_matrix_is_rigid(rng):
    a = mixed(rng, 14)
    C = build_quasi_cmv(a, 12)
    E = a.signs(12).entries
    found = [bits for bits in itertools.product((1, -1), repeat=12)
             if quasi_unitarity_defect(C, SignSequence(bits), 10) < 1e-9]
    assert sorted(found) == sorted([E, tuple(-e for e in E)])


def quasi_forward_residual(a, ell, res, n):
    C = build_quasi_cmv(a, n + 4)
    L = eval_on_quasi_cmv(ell, C, a.signs(n + 4)).data[:n, :n]
    E = a.signs(n).matrix()
    A = res.factor.matrix(n)
    F = res.signs.matrix(n)
    return maxabs((L @ E - A @ F @ A.conj().T)[: n - 2, : n - 2])


def test_forward_matches_generalized_cholesky(rng):
    seen = set()
    for _ in range(10):
        a = mixed(rng, 16)
        ell = HermitianLaurentPolynomial(2.6, (0.4 + 0.7j,))
        n = 8
        try:
            res = quasi_forward(a, ell, n)
        except QuasiDefinitenessFailure:
            continue
        seen.update(res.signs.entries)
        assert quasi_forward_residual(a, ell, res, n) < 1e-10
        C = build_quasi_cmv(a, n + 4)
        M = (eval_on_quasi_cmv(ell, C, a.signs(n + 4)).data @ a.signs(n + 4).matrix())[: n - 2, : n - 2]
        G, e = generalized_cholesky(M)
        assert maxabs(G.data - res.factor.matrix(n - 2)) < 1e-10
        assert list(e) == list(res.signs.entries[: n - 2])
    assert seen == {1, -1}


def test_inverse_reversed_factorization(rng):
    a = mixed(rng, 16)
    ell = HermitianLaurentPolynomial(2.6, (0.4 + 0.7j,))
    fwd = quasi_forward(a, ell, 12)
    A = fwd.factor
    F = fwd.signs
    params = QuasiInverseParameters(F[0] * A.r[0] ** 2, A.s[0], F[1] * A.r[1] ** 2)
    b = fwd.target
    back = quasi_inverse(b, ell, params, 6)
    n = 6
    assert maxabs(back.factor.matrix(n) - A.matrix(n)) < 1e-9
    D = build_quasi_cmv(b, n + 4)
    Fb = b.signs(n + 4)
    LD = eval_on_quasi_cmv(ell, D, Fb).data[:n, :n]
    Am = back.factor.matrix(n)
    E = back.signs.matrix(n)
    assert maxabs((Fb.matrix(n) @ LD - Am.conj().T @ E @ Am)[: n - 2, : n - 2]) < 1e-10


def test_golden_fixed_points():
    root5 = np.sqrt(5)
    p = quasi_parameters_with_vanishing_s1(ZERO, QD_ELL, GOLDEN, GOLDEN)
    assert p.e0r0sq == pytest.approx(root5)
    cls = quasi_classify(ZERO, QD_ELL, p)
    assert cls.kind == CMV and cls.a1 == pytest.approx(1 / GOLDEN)
    p = quasi_parameters_with_vanishing_s1(ZERO, QD_ELL, 1 / GOLDEN, 1 / GOLDEN)
    assert p.e0r0sq == pytest.approx(-root5)
    cls = quasi_classify(ZERO, QD_ELL, p)
    assert cls.kind == QUASI_CMV and cls.a1 == pytest.approx(GOLDEN)


def test_spurious_after_perturbation():
    p = quasi_parameters_with_vanishing_s1(ZERO, QD_ELL, GOLDEN, GOLDEN)
    bent = QuasiInverseParameters(p.e0r0sq + 0.1, p.s0, p.e1r1sq)
    assert quasi_classify(ZERO, QD_ELL, bent).kind == SPURIOUS
    bent = QuasiInverseParameters(p.e0r0sq, p.s0, -p.e1r1sq)
    assert quasi_classify(ZERO, QD_ELL, bent).kind != CMV


@pytest.mark.parametrize("r,e,alpha", [(1.3, 1, 1.0), (0.8, -1, 0.6 + 0.8j), (2.0, 1, -1j)])
def test_zero_beta_periodic_branch(r, e, alpha):
    check = quasi_periodic_branch(r, e, alpha, steps=10)
    assert check.passed, check.detail


def test_zero_beta_classifies_hermitian_spurious():
    ell = HermitianLaurentPolynomial(0.0, (1.0,))
    p = quasi_parameters_with_vanishing_s1(ZERO, ell, 1.69, 1.69)
    cls = quasi_classify(ZERO, ell, p)
    assert cls.kind == HERMITIAN_SPURIOUS


def test_quasi_errors():
    with pytest.raises(ValueError):
        QuasiInverseParameters(0.0, 0, 1.0)
    with pytest.raises(ValueError):
        quasi_forward(ZERO, QD_ELL, 0)
    with pytest.raises(ValueError):
        build_quasi_cmv(ZERO, 1)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.sampled_from([0.3, 0.6, 1.5, 2.2]), st.floats(0, 2 * np.pi)), min_size=12, max_size=12),
       positive_laurent())
def test_forward_generalized_factorization(pairs, ell):
    a = QuasiSchurSequence(tuple(m * np.exp(1j * th) for m, th in pairs))
    try:
        res = quasi_forward(a, ell, 8)
    except QuasiDefinitenessFailure:
        return
    assert quasi_forward_residual(a, ell, res, 8) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(schur_values(14, radius=0.8), positive_laurent())
def test_unit_disk_classifies_like_positive_definite(vals, ell):
    a = SchurSequence.from_values(vals)
    p = forward(a, ell, 10)
    params = QuasiInverseParameters(p.factor.r[0] ** 2, p.factor.s[0], p.factor.r[1] ** 2)
    cls = quasi_classify(p.target, ell, params)
    assert cls.kind == CMV
    assert abs(cls.a1 - vals[0]) <= 1e-9
