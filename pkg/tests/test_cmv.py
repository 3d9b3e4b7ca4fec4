import numpy as np
import pytest
from hypothesis import given, settings

from cmv_darboux import (
    BandedMatrix,
    HermitianLaurentPolynomial,
    SchurSequence,
    ZERO_TAIL,
    build_cmv,
    eval_on_cmv,
    leading_unitarity_defect,
    moments_from_zigzag,
    orthonormal_basis,
    orthonormal_laurent,
    schur_from_zigzag,
    shift_matrix,
    unitarity_defect,
    zigzag_from_factor,
)
from cmv_darboux.cmv import ZigzagBasis, schur_from_cmv
from cmv_darboux.darboux_forward import DarbouxFactor, forward
from cmv_darboux.errors import InvalidFactor, InvalidSchurParameter
from conftest import dense_laurent, maxabs, multiplication_matrix, random_schur, schur_values

SZ = SchurSequence((0.6,), ZERO_TAIL)


def zigzag_mask(n):
    mask = np.zeros((n, n), dtype=bool)
    for i in range(n):
        k = i // 2
        cols = range(max(0, 2 * k - 2), 2 * k + 2) if i % 2 == 0 else range(2 * k, 2 * k + 4)
        for j in cols:
            if j < n:
                mask[i, j] = True
    return mask


def plus_positions(n):
    out = [(0, 1)]
    for i in range(1, n):
        j = i + 2 if i % 2 == 1 else i - 2
        if 0 <= j < n:
            out.append((i, j))
    return out


def test_shift_matrix_maps_zigzag_basis():
    S = shift_matrix(10).data
    expected = np.zeros((10, 10))
    for i, j in plus_positions(10):
        expected[i, j] = 1.0
    assert maxabs(S - expected) == 0.0


def test_sz_and_constant_entries():
    C = build_cmv(SZ, 6).data
    assert C[0, 0] == pytest.approx(-0.6)
    assert C[0, 1] == pytest.approx(0.8)
    b = 0.5
    a = SchurSequence.constant(b, prefix=(1 / 3,))
    C = build_cmv(a, 6).data
    rho1 = np.sqrt(1 - 1 / 9)
    sig = np.sqrt(1 - b * b)
    assert C[0, 0] == pytest.approx(-1 / 3)
    assert C[0, 1] == pytest.approx(rho1)
    assert C[1, 0] == pytest.approx(-rho1 * b)
    assert C[1, 1] == pytest.approx(-b / 3)
    assert C[1, 3] == pytest.approx(sig * sig)


def test_build_cmv_matches_multiplication_matrix(rng):
    a = random_schur(rng, 20)
    n = 12
    assert maxabs(build_cmv(a, n).data[: n - 2, : n - 2] - multiplication_matrix(a, n)[: n - 2, : n - 2]) < 1e-12


def test_build_cmv_rejects_bad_parameters():
    with pytest.raises(InvalidSchurParameter):
        build_cmv(SchurSequence((0.2, 1.1)), 5)
    with pytest.raises(ValueError):
        build_cmv(SZ, 1)


def test_schur_from_cmv_inverts(rng):
    a = random_schur(rng, 15)
    assert maxabs(schur_from_cmv(build_cmv(a, 12), 12) - a.values(12)) < 1e-12


def test_eval_on_shift():
    ell = HermitianLaurentPolynomial(2.0, (-1.0,))
    M = eval_on_cmv(ell, shift_matrix(10))
    assert M.lower == M.upper == 2
    d = M.data
    assert np.allclose(np.diag(d)[: M.interior], 2.0)
    for i, j in ((0, 1), (1, 0), (0, 2), (2, 0)):
        assert d[i, j] == pytest.approx(-1.0)


def test_eval_on_cmv_matches_dense_powers(rng):
    a = random_schur(rng, 30)
    ell = HermitianLaurentPolynomial(3.0, (0.4 - 0.2j, 0.3j))
    C = build_cmv(a, 24)
    M = eval_on_cmv(ell, C)
    k = M.interior
    assert k == 24 - 4 - 2
    assert maxabs(M.data[:k, :k] - dense_laurent(ell, C.data)[:k, :k]) < 1e-13


def test_eval_requires_laurent():
    with pytest.raises(ValueError):
        eval_on_cmv(2.0, shift_matrix(4))


def test_lebesgue_basis():
    chi = orthonormal_basis(SchurSequence(), 7)
    for n in range(7):
        f = chi.element(n)
        power = -(n // 2) if n % 2 == 0 else n // 2 + 1
        assert f.lowest == power and len(f.coeffs) == 1 and f.coeffs[0] == pytest.approx(1.0)


def test_bernstein_szego_basis():
    a = SchurSequence((0.6,), ZERO_TAIL, u1=1 / 0.64)
    chi0 = orthonormal_laurent(a, 0)
    chi1 = orthonormal_laurent(a, 1)
    chi2 = orthonormal_laurent(a, 2)
    assert chi0.coefficient(0) == pytest.approx(0.8)
    assert (chi1.coefficient(0), chi1.coefficient(1)) == (pytest.approx(0.6), pytest.approx(1.0))
    assert (chi2.coefficient(-1), chi2.coefficient(0)) == (pytest.approx(1.0), pytest.approx(0.6))


def test_star_identity(rng):
    for _ in range(10):
        a = random_schur(rng, 4)
        chi = orthonormal_basis(a, 3)
        a2 = a.value(2)
        lhs = chi.element(2) * np.sqrt(1 - abs(a2) ** 2)
        rhs = chi.element(1).substar() + chi.element(1) * np.conj(a2)
        for p in range(-2, 3):
            assert abs(lhs.coefficient(p) - rhs.coefficient(p)) < 1e-12


def test_schur_from_zigzag_examples():
    assert maxabs(schur_from_zigzag(orthonormal_basis(SchurSequence(), 6)).prefix) == 0
    got = schur_from_zigzag(orthonormal_basis(SZ, 6)).prefix
    assert maxabs(np.array(got) - [0.6, 0, 0, 0, 0]) < 1e-14
    a = SchurSequence.constant(0.5, prefix=(1 / 3,))
    ell = HermitianLaurentPolynomial(2.0, (-1.0,))
    res = forward(a, ell, 12)
    k = 8
    chi = orthonormal_basis(a, k)
    from scipy.linalg import solve_triangular

    omega = solve_triangular(res.factor.matrix(k), chi.coeffs, lower=True)
    b = schur_from_zigzag(ZigzagBasis(chi.lowest, omega))
    assert maxabs(np.array(b.prefix) - 0.5) < 1e-12


def test_zigzag_from_factor():
    with pytest.raises(InvalidFactor):
        zigzag_from_factor(DarbouxFactor(np.ones(5), np.zeros(5), np.zeros(5)), SchurSequence(), 4)
    res = forward(SZ, HermitianLaurentPolynomial(1.36, (0.6,)), 10)
    chi1 = zigzag_from_factor(res.factor, SchurSequence(), 4).element(1)
    assert (chi1.coefficient(0), chi1.coefficient(1)) == (pytest.approx(0.6), pytest.approx(1.0))


def test_lebesgue_moments():
    m = moments_from_zigzag(orthonormal_basis(SchurSequence(), 9))
    assert m.K == 4
    expected = np.zeros(9)
    expected[4] = 1
    assert maxabs(m.values - expected) < 1e-15


def test_bernstein_szego_moments_against_quadrature():
    a = 0.6
    chi = orthonormal_basis(SchurSequence((a,), ZERO_TAIL, u1=1 / (1 - a * a)), 7)
    m = moments_from_zigzag(chi)
    theta = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
    z = np.exp(1j * theta)
    w = 1 / np.abs(z + a) ** 2
    for j in range(-3, 4):
        assert m.moment(j) == pytest.approx(np.mean(z ** j * w), abs=1e-12)
    assert (m.moment(1) / m.moment(0)).real == pytest.approx(-0.6)


def test_leading_defect_zero_for_cmv(rng):
    assert leading_unitarity_defect(shift_matrix(6)) == 0
    assert leading_unitarity_defect(build_cmv(random_schur(rng, 10), 8)) < 1e-12


def test_banded_json_round_trip(rng):
    C = build_cmv(random_schur(rng, 10), 7)
    back = BandedMatrix.from_json(C.to_json())
    assert maxabs(back.data - C.data) == 0
    assert back.interior == C.interior


@settings(max_examples=40, deadline=None)
@given(schur_values(14))
def test_cmv_shape_and_unitarity(vals):
    a = SchurSequence.from_values(vals)
    n = 12
    C = build_cmv(a, n).data
    assert unitarity_defect(C, n - 3) <= 1e-12
    assert not np.any(np.abs(C[~zigzag_mask(n)]) > 0)
    for i, j in plus_positions(n):
        assert C[i, j].real > 0 and abs(C[i, j].imag) < 1e-15


@settings(max_examples=40, deadline=None)
@given(schur_values(16))
def test_eval_hermitian_with_nonzero_corners(vals):
    a = SchurSequence.from_values(vals)
    ell = HermitianLaurentPolynomial(2.5, (0.7 - 0.3j,))
    M = eval_on_cmv(ell, build_cmv(a, 14))
    k = M.interior
    d = M.data[:k, :k]
    assert maxabs(d - d.conj().T) <= 1e-13
    assert abs(d[0, 1]) > 0 and abs(d[1, 0]) > 0
    assert np.all(np.abs(np.diag(d, -2)) > 0)


@settings(max_examples=40, deadline=None)
@given(schur_values(10, radius=0.8))
def test_cmv_moments_hermitian(vals):
    a = SchurSequence.from_values(vals)
    m = moments_from_zigzag(orthonormal_basis(a, 9))
    assert m.hermitian_defect() <= 1e-10
    assert abs(-m.moment(1) / m.moment(0) - a.value(1)) <= 1e-10
