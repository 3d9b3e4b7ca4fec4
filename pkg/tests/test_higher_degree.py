import numpy as np
import pytest
from hypothesis import given, settings

from cmv_darboux import (
    HermitianLaurentPolynomial,
    SchurSequence,
    build_cmv,
    forward,
    forward_d,
    inverse,
    inverse_d,
    laurent_from_conjugate_zeros,
    parameters_with_vanishing_s1,
)
from cmv_darboux.errors import BlockBreakdown, NotPositiveDefinite
from cmv_darboux.examples import spurious_parameters
from conftest import dense_laurent, maxabs, potrf_breakdown, random_schur, schur_values

B = 0.5
TARGET = SchurSequence.constant(B)
ELL = HermitianLaurentPolynomial(2.0, (-1.0,))


def block_residual(F, b, ell, n):
    mat = F.matrix(n)
    LD = dense_laurent(ell, build_cmv(b, n + 4 * ell.degree + 2).data)[:n, :n]
    k = n - 2 * ell.degree
    return maxabs((LD - mat.conj().T @ mat)[:k, :k])


def test_degree_one_reduces_to_forward(rng):
    a = random_schur(rng, 30)
    ell = HermitianLaurentPolynomial(2.2, (0.4 - 0.5j,))
    one = forward(a, ell, 22)
    many = forward_d(a, ell, 20)
    assert maxabs(np.array(many.target.prefix) - one.target.prefix[:20]) < 1e-12
    assert maxabs(many.factor.data - one.factor.matrix(21)) < 1e-12


@pytest.mark.parametrize("zeros", [(0.5, -0.4j), (1.7 + 0.2j, -2.0), (0.3 + 0.3j, 1.0)])
def test_degree_two_is_two_degree_one_steps(rng, zeros):
    a = random_schur(rng, 40)
    first = laurent_from_conjugate_zeros([zeros[0]])
    second = laurent_from_conjugate_zeros([zeros[1]])
    both = laurent_from_conjugate_zeros(list(zeros))
    step = forward(a, first, 30).target
    composed = forward(step, second, 26).target
    direct = forward_d(a, both, 24).target
    assert maxabs(np.array(direct.prefix) - composed.prefix[:24]) < 1e-9


def test_forward_d_residual(rng):
    a = random_schur(rng, 40)
    ell = HermitianLaurentPolynomial(4.0, (0.5j, -0.7, 0.3))
    res = forward_d(a, ell, 24)
    A = res.factor.data
    L = dense_laurent(ell, build_cmv(a, 38).data)[:25, :25]
    assert maxabs(L - A @ A.conj().T) < 1e-11
    assert maxabs(np.triu(A, 1)) == 0
    assert maxabs(np.tril(A, -7)) == 0


def test_forward_d_breakdown_matches_dense():
    ell = HermitianLaurentPolynomial(0.4, (0.1, 0.5))
    a = SchurSequence.from_values([0.3, -0.2j, 0.5, 0.1, 0.0, 0.2] * 6)
    n = 20
    size = n + 2 * ell.degree + 3
    oracle = potrf_breakdown(dense_laurent(ell, build_cmv(a, size + 4).data)[:size, :size])
    assert oracle is not None
    with pytest.raises(NotPositiveDefinite) as exc:
        forward_d(a, ell, n)
    assert exc.value.index == oracle


def test_inverse_d_degree_one_matches_inverse():
    r = 1 + B
    for params in (parameters_with_vanishing_s1(TARGET, ELL, r, r), spurious_parameters()):
        flat = inverse(TARGET, ELL, params, 10)
        blocks = inverse_d(TARGET, ELL, flat.matrix(2), 4)
        assert maxabs(blocks.matrix(10) - flat.matrix(10)) < 1e-11


def test_inverse_d_degree_two_round_trip(rng):
    a = random_schur(rng, 40, radius=0.7)
    ell = laurent_from_conjugate_zeros([1.8, -0.5j])
    fwd = forward_d(a, ell, 30)
    A = fwd.factor.data
    back = inverse_d(fwd.target, ell, A[:4, :4], 2)
    assert maxabs(back.matrix(12) - A[:12, :12]) < 1e-8
    assert block_residual(back, fwd.target, ell, 12) < 1e-10


def test_later_block_is_determined(rng):
    a = random_schur(rng, 40, radius=0.7)
    ell = laurent_from_conjugate_zeros([1.8, -0.5j])
    fwd = forward_d(a, ell, 30)
    back = inverse_d(fwd.target, ell, fwd.factor.data[:4, :4], 2)
    R = list(back.R)
    R[1] = R[1] + 0.01 * np.tril(np.ones((4, 4)))
    bent = type(back)(back.block, tuple(R), back.S)
    assert block_residual(bent, fwd.target, ell, 12) > 1e-3


def test_inverse_d_errors():
    with pytest.raises(ValueError):
        inverse_d(TARGET, ELL, np.eye(3), 2)
    with pytest.raises(ValueError):
        inverse_d(TARGET, ELL, np.array([[1.0, 0.5], [0.0, 1.0]]), 2)
    with pytest.raises(BlockBreakdown) as exc:
        inverse_d(TARGET, ELL, np.diag([2.0, 2.0]), 3)
    assert exc.value.index == 0


def test_block_factor_json():
    F = inverse_d(TARGET, ELL, inverse(TARGET, ELL, spurious_parameters(), 4).matrix(2), 1)
    doc = F.to_json()
    assert doc["block"] == 2 and len(doc["R"]) == 2 and len(doc["S"]) == 1
    with pytest.raises(ValueError):
        F.matrix(5)


@settings(max_examples=25, deadline=None)
@given(schur_values(40, radius=0.8))
def test_inverse_d_reversed_factorization(vals):
    a = SchurSequence.from_values(vals)
    ell = laurent_from_conjugate_zeros([1.5 + 0.5j, -0.3])
    fwd = forward_d(a, ell, 30)
    back = inverse_d(fwd.target, ell, fwd.factor.data[:4, :4], 2)
    assert block_residual(back, fwd.target, ell, 12) <= 1e-9
