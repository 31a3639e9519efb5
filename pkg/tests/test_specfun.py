import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special
from sympy import Rational
from sympy.physics.quantum.cg import CG

from jstomo.quadrature import make_euler_quadrature
from jstomo.specfun import (HalfInt, assoc_laguerre, clebsch_gordan, displacement_element, displacement_matrix,
                            hermite, jacobi, label_str, small_d_matrix, spin_projections, twice, wigner_D,
                            wigner_D_matrix, wigner_small_d)

from helpers import displacement_by_expm, rotation_by_expm

SPINS = [0, 0.5, 1, 1.5]


def laguerre_series(n, k, x):
    """sum_i (-1)^i C(n+k, n-i) x^i / i! in 50-digit arithmetic."""
    mpmath.mp.dps = 50
    x = mpmath.mpf(x)
    return float(sum((-1) ** i * mpmath.binomial(n + k, n - i) * x ** i / mpmath.factorial(i)
                     for i in range(n + 1)))


# half-integer labels ---------------------------------------------------------

def test_twice_accepts_half_integers():
    assert twice(0.5) == 1
    assert twice("3/2") == 3
    assert twice(2) == 4
    assert twice(HalfInt(5)) == 5
    assert label_str(3) == "3/2" and label_str(2) == "1"


@pytest.mark.parametrize("bad", [0.3, "1/3", 1.25])
def test_twice_rejects_other_fractions(bad):
    with pytest.raises(ValueError):
        twice(bad)


def test_projections_descend():
    assert list(spin_projections(1.5)) == [1.5, 0.5, -0.5, -1.5]


# Laguerre ------------------------------------------------------------------

def test_laguerre_at_zero_is_binomial():
    assert assoc_laguerre(5, 3, 0.0) == 56.0


def test_laguerre_degree_zero():
    assert assoc_laguerre(0, 0, 7.3) == 1.0


def test_laguerre_matches_alternating_series():
    assert assoc_laguerre(2, 1, 1.0) == pytest.approx(laguerre_series(2, 1, 1.0), abs=1e-15)


@pytest.mark.parametrize("n,k", [(n, k) for n in range(9) for k in range(-n, 7)])
def test_laguerre_against_series_grid(n, k):
    for x in (0.0, 0.37, 1.9, 6.5):
        want = laguerre_series(n, k, x)
        assert assoc_laguerre(n, k, x) == pytest.approx(want, rel=1e-11, abs=1e-11)


def test_laguerre_against_scipy_vectorised():
    x = np.linspace(0, 12, 37)
    for n in range(12):
        for k in range(6):
            np.testing.assert_allclose(assoc_laguerre(n, k, x), special.eval_genlaguerre(n, k, x),
                                       rtol=1e-10, atol=1e-10)


def test_laguerre_rejects_bad_degree():
    with pytest.raises(ValueError):
        assoc_laguerre(-1, 0, 1.0)
    with pytest.raises(ValueError):
        assoc_laguerre(2, -3, 1.0)


# Hermite -------------------------------------------------------------------

def test_hermite_small_degrees():
    assert hermite(0, 2.7) == 1.0
    assert hermite(1, 0.5) == 1.0


def test_hermite_six_matches_coefficients():
    # H_6 = 64x^6 - 480x^4 + 720x^2 - 120
    x = 1.3
    assert hermite(6, x) == pytest.approx(64 * x ** 6 - 480 * x ** 4 + 720 * x ** 2 - 120, rel=1e-13)


def test_hermite_against_scipy():
    x = np.linspace(-4, 4, 33)
    for r in range(15):
        np.testing.assert_allclose(hermite(r, x), special.eval_hermite(r, x), rtol=1e-11, atol=1e-9)


def test_hermite_rejects_negative_degree():
    with pytest.raises(ValueError):
        hermite(-1, 0.0)


# Jacobi --------------------------------------------------------------------

def test_jacobi_low_degrees():
    assert jacobi(0, 2, 3, 0.4) == 1.0
    assert jacobi(1, 0, 0, 0.37) == pytest.approx(0.37, abs=1e-16)


def test_jacobi_against_hypergeometric_sum():
    # P_n^(a,b)(x) = C(n+a, n) 2F1(-n, n+a+b+1; a+1; (1-x)/2)
    n, a, b, x = 3, 1, 2, 0.2
    want = float(mpmath.binomial(n + a, n) * mpmath.hyp2f1(-n, n + a + b + 1, a + 1, (1 - x) / 2))
    assert jacobi(n, a, b, x) == pytest.approx(want, rel=1e-13)


def test_jacobi_against_scipy():
    x = np.linspace(-1, 1, 21)
    for n in range(8):
        for a in range(4):
            for b in range(4):
                np.testing.assert_allclose(jacobi(n, a, b, x), special.eval_jacobi(n, a, b, x),
                                           rtol=1e-11, atol=1e-12)


def test_jacobi_rejects_negative_degree():
    with pytest.raises(ValueError):
        jacobi(-2, 0, 0, 0.1)


# rotation matrices ---------------------------------------------------------

@pytest.mark.parametrize("j", SPINS)
def test_small_d_identity_at_zero(j):
    np.testing.assert_allclose(small_d_matrix(j, 0.0), np.eye(int(2 * j) + 1), atol=1e-15)


def test_small_d_spin_half():
    for beta in np.linspace(0, np.pi, 7):
        assert wigner_small_d(0.5, 0.5, 0.5, beta) == pytest.approx(math.cos(beta / 2), abs=1e-15)


def test_small_d_spin_one_centre():
    for beta in np.linspace(0, np.pi, 7):
        assert wigner_small_d(1, 0, 0, beta) == pytest.approx(math.cos(beta), abs=1e-15)


@pytest.mark.parametrize("j", SPINS + [2, 2.5])
def test_D_matrix_matches_exponentials(j):
    rng = np.random.default_rng(int(4 * j))
    for _ in range(5):
        a, b, c = rng.uniform(0, 2 * np.pi), rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi)
        np.testing.assert_allclose(wigner_D_matrix(j, a, b, c), rotation_by_expm(j, a, b, c), atol=1e-12)


def test_D_element_agrees_with_matrix():
    D = wigner_D_matrix(1.5, 0.3, 1.1, -0.7)
    assert wigner_D(1.5, 0.5, -1.5, 0.3, 1.1, -0.7) == pytest.approx(D[1, 3], abs=1e-15)


@pytest.mark.parametrize("j", SPINS)
def test_D_identity_and_unitary_rows(j):
    dim = int(2 * j) + 1
    np.testing.assert_allclose(wigner_D_matrix(j, 0, 0, 0), np.eye(dim), atol=1e-15)
    D = wigner_D_matrix(j, 1.2, 0.8, 2.9)
    np.testing.assert_allclose((np.abs(D) ** 2).sum(axis=1), np.ones(dim), atol=1e-14)


def test_labels_out_of_range():
    with pytest.raises(ValueError):
        wigner_small_d(1, 2, 0, 0.3)
    with pytest.raises(ValueError):
        wigner_D(1, 0.5, 0, 0, 0, 0)


def haar_overlaps(j1, j2, q):
    """(8 pi^2)^-1 int D^{j1}_{mm'} conj(D^{j2}_{kk'}) dW for all labels, on the rule q."""
    D1 = wigner_D_matrix(j1, q.alpha, q.beta, q.gamma)
    D2 = wigner_D_matrix(j2, q.alpha, q.beta, q.gamma)
    return np.einsum("g,gab,gcd->abcd", q.weights, D1, np.conj(D2))


# integer and half-integer representations are only orthogonal over SU(2)
# (alpha or gamma running to 4 pi); on SO(3) angles the pairs must share a class
SAME_CLASS = [(a, b) for a in SPINS for b in SPINS if float(a - b).is_integer()]


@pytest.mark.parametrize("j1,j2", SAME_CLASS)
def test_D_haar_orthogonality(j1, j2):
    q = make_euler_quadrature(1.5)
    got = haar_overlaps(j1, j2, q)
    d1, d2 = int(2 * j1) + 1, int(2 * j2) + 1
    want = np.zeros((d1, d1, d2, d2))
    if j1 == j2:
        for a in range(d1):
            for b in range(d1):
                want[a, b, a, b] = 8 * np.pi ** 2 / d1
    np.testing.assert_allclose(got, want, atol=1e-10)


# Clebsch-Gordan ------------------------------------------------------------

def test_cg_singlet_triplet_value():
    assert clebsch_gordan(0.5, 0.5, 0.5, -0.5, 1, 0) == pytest.approx(1 / math.sqrt(2), abs=1e-15)


def test_cg_selection_rule():
    assert clebsch_gordan(1, 1, 0.5, 0.5, 1.5, 0.5) == 0.0
    assert clebsch_gordan(1, 0, 1, 0, 3, 0) == 0.0


def _labels(j):
    return [(int(2 * j) - 2 * k) / 2 for k in range(int(2 * j) + 1)]


HALF = [0, 0.5, 1, 1.5, 2]


def _sym(v):
    return Rational(int(round(2 * v)), 2)


@pytest.mark.parametrize("j1", [0.5, 1, 1.5])
@pytest.mark.parametrize("j2", [0.5, 1, 1.5])
def test_cg_against_sympy(j1, j2):
    J = abs(j1 - j2)
    while J <= j1 + j2:
        for m1 in _labels(j1):
            for m2 in _labels(j2):
                M = m1 + m2
                if abs(M) > J:
                    continue
                want = float(CG(_sym(j1), _sym(m1), _sym(j2), _sym(m2), _sym(J), _sym(M)).doit())
                assert clebsch_gordan(j1, m1, j2, m2, J, M) == pytest.approx(want, abs=1e-13)
        J += 1


@pytest.mark.parametrize("j1", HALF)
@pytest.mark.parametrize("j2", HALF)
def test_cg_orthonormality(j1, j2):
    Js = [abs(j1 - j2) + i for i in range(int(round(j1 + j2 - abs(j1 - j2))) + 1)]
    cols = [(J, M) for J in Js for M in _labels(J)]
    U = np.array([[clebsch_gordan(j1, m1, j2, m2, J, M) for (J, M) in cols]
                  for m1 in _labels(j1) for m2 in _labels(j2)])
    np.testing.assert_allclose(U.T @ U, np.eye(len(cols)), atol=1e-10)
    np.testing.assert_allclose(U @ U.T, np.eye(len(cols)), atol=1e-10)


# displacement matrix elements ----------------------------------------------

def test_displacement_vacuum_element():
    b = 0.7 - 0.4j
    assert displacement_element(0, 0, b) == pytest.approx(math.exp(-abs(b) ** 2 / 2), abs=1e-15)


def test_displacement_first_column():
    b = -0.3 + 1.1j
    assert displacement_element(1, 0, b) == pytest.approx(b * math.exp(-abs(b) ** 2 / 2), abs=1e-15)


@pytest.mark.parametrize("beta", [0.0, 0.4 + 0.3j, -1.2 + 0.5j, 2.1j, 2.5 - 1.0j])
def test_displacement_matrix_against_expm(beta):
    np.testing.assert_allclose(displacement_matrix(12, 12, beta), displacement_by_expm(beta, 12), atol=1e-12)


@pytest.mark.parametrize("beta", [0.5, 1.3 - 0.2j, 2.0j, 3.0])
def test_displacement_vacuum_column_tail(beta):
    x = abs(beta) ** 2
    N = int(math.ceil(x + 10 * math.sqrt(x + 1)))
    col = displacement_matrix(N + 1, 1, beta)[:, 0]
    assert abs(1 - np.vdot(col, col).real) < 1e-10


@pytest.mark.parametrize("beta", [0.5, 1.3 - 0.2j, 2.0j, 3.0])
@pytest.mark.parametrize("n", [1, 3, 6, 11])
def test_displacement_column_tail(beta, n):
    # |<m|D|n>|^2 has mean n + |beta|^2 and variance (2n+1)|beta|^2, so the
    # width of the cut has to grow with n as well
    x = abs(beta) ** 2
    N = int(math.ceil(x + n + 10 * math.sqrt((2 * n + 1) * x + 1)))
    col = displacement_matrix(N + 1, n + 1, beta)[:, n]
    assert abs(1 - np.vdot(col, col).real) < 1e-10


def test_displacement_tail_with_fixed_width_is_a_property_of_D():
    # at n = 6, |beta| = 2 a cut at |beta|^2 + 10 sqrt(|beta|^2 + 1) + n leaves ~1e-9;
    # the dense matrix exponential loses the same mass
    beta, n = 2.0j, 6
    N = int(math.ceil(4 + 10 * math.sqrt(5) + n))
    ours = displacement_matrix(N + 1, n + 1, beta)[:, n]
    ref = displacement_by_expm(beta, N + 1, pad=80)[:, n]
    np.testing.assert_allclose(ours, ref, atol=1e-14)
    assert 1e-10 < 1 - np.vdot(ours, ours).real < 1e-8


def test_displacement_rejects_negative_index():
    with pytest.raises(ValueError):
        displacement_element(-1, 0, 0.1)


@given(re=st.floats(-2, 2), im=st.floats(-2, 2), a=st.integers(0, 8), b=st.integers(0, 8))
def test_displacement_adjoint_rule(re, im, a, b):
    beta = complex(re, im)
    lhs = displacement_matrix(9, 9, beta)[a, b]
    rhs = np.conj(displacement_matrix(9, 9, -beta)[b, a])
    assert abs(lhs - rhs) < 1e-13


@given(beta=st.floats(0, np.pi), tj=st.integers(0, 5))
def test_small_d_is_orthogonal(beta, tj):
    d = small_d_matrix(tj / 2, beta)
    np.testing.assert_allclose(d @ d.T, np.eye(tj + 1), atol=1e-12)


def test_displacement_subnormal_amplitude():
    # beta/|beta| overflows for subnormal beta; the result must be the identity limit
    for beta in (2.225073858507203e-309j, 5e-324, -3e-310 + 3e-310j):
        D = displacement_matrix(6, 6, beta)
        assert np.isfinite(D).all()
        np.testing.assert_allclose(D, np.eye(6), atol=1e-15)
