"""Shared strategies and independent dense oracles."""

import numpy as np
import pytest
from hypothesis import strategies as st
from scipy.linalg import lapack

from cmv_darboux import HermitianLaurentPolynomial, SchurSequence, orthonormal_basis


def random_schur(rng, count, radius=0.9, real=False, u1=1.0):
    mod = rng.uniform(0.0, radius, count)
    if real:
        vals = mod * rng.choice([-1.0, 1.0], count)
    else:
        vals = mod * np.exp(2j * np.pi * rng.uniform(size=count))
    return SchurSequence.from_values(vals, u1=u1)


def random_positive_laurent(rng, real=False):
    """Degree-one l with beta > 2|alpha|, hence positive on the circle."""
    mag = rng.uniform(0.1, 1.5)
    alpha = mag * (rng.choice([-1.0, 1.0]) if real else np.exp(2j * np.pi * rng.uniform()))
    beta = 2 * mag * rng.uniform(1.05, 3.0)
    return HermitianLaurentPolynomial(beta, (alpha,))


def multiplication_matrix(a, n):
    """Matrix of z in the orthonormal basis from the Szego recurrence: z chi_i = sum_j C_ij chi_j."""
    chi = orthonormal_basis(a, n + 4)
    X = chi.coeffs
    Z = np.zeros_like(X)
    Z[:, 1:] = X[:, :-1]
    # the window has a spare top exponent, so shifting loses nothing for the rows used
    sol = np.linalg.lstsq(X.T, Z.T, rcond=None)[0].T
    return sol[:n, :n]


def dense_laurent(ell, C):
    """l(C) by plain matrix powers with C^-1 = C^+."""
    n = C.shape[0]
    out = ell.beta * np.eye(n, dtype=complex)
    up = np.eye(n, dtype=complex)
    down = np.eye(n, dtype=complex)
    for alpha in ell.alpha:
        up = up @ C
        down = down @ C.conj().T
        out = out + alpha * up + np.conj(alpha) * down
    return out


def potrf_breakdown(M):
    _, info = lapack.zpotrf(np.array(M, dtype=complex, order="F"), lower=1)
    return None if info == 0 else int(info) - 1


def maxabs(x):
    x = np.asarray(x)
    return float(np.max(np.abs(x))) if x.size else 0.0


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def schur_values(max_size=12, radius=0.9):
    """Hypothesis strategy: admissible complex Schur prefixes."""
    comp = st.tuples(st.floats(0.0, radius), st.floats(0.0, 2 * np.pi)).map(lambda p: p[0] * np.exp(1j * p[1]))
    return st.lists(comp, min_size=max_size, max_size=max_size)


def positive_laurent():
    """Hypothesis strategy: degree-one l, positive on the circle."""
    return st.tuples(st.floats(0.1, 1.5), st.floats(0.0, 2 * np.pi), st.floats(1.05, 3.0)).map(
        lambda p: HermitianLaurentPolynomial(2 * p[0] * p[2], (p[0] * np.exp(1j * p[1]),)))
