import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from jstomo.errors import CutoffError, DegenerateFrameError, DomainError, QuadratureError
from jstomo.hilbert import DensityMatrix, coherent_state, fidelity, fock_state, make_paper_state, random_spin_state
from jstomo.quadrature import EulerQuadrature, euler_quadrature, line_grid, make_euler_quadrature, optical_angles, plane_quadrature
from jstomo.specfun import assoc_laguerre, wigner_D_matrix
from jstomo.tomography import (WIGNER_QUANTIZER_CONST, husimi_q, ito_basis, optical_tomogram, photon_quantizer_matrix,
                               photon_tomogram, reconstruct_from_photon, reconstruct_from_symplectic,
                               reconstruct_from_wigner, spin_dequantizer_matrix, spin_quantizer_matrix,
                               spin_tomogram, reconstruct_spin, symplectic_dequantizer_overlap,
                               symplectic_tomogram, wigner_function)

SPINS = [0.5, 1, 1.5]


def superposition01(cutoff):
    v = np.zeros(cutoff + 1)
    v[:2] = 1 / math.sqrt(2)
    return DensityMatrix.pure("fock1", cutoff, v)


# Euler quadrature ------------------------------------------------------------

def test_euler_rule_size_for_half():
    q = make_euler_quadrature(0.5)
    assert (q.n_beta, q.n_alpha, q.n_gamma, q.size) == (3, 5, 5, 75)


@pytest.mark.parametrize("j", SPINS)
def test_euler_weights_total(j):
    assert make_euler_quadrature(j).weights.sum() == pytest.approx(8 * math.pi ** 2, abs=1e-12)


def test_euler_rule_integrates_d_one():
    q = make_euler_quadrature(0.5)
    D = wigner_D_matrix(1, q.alpha, q.beta, q.gamma)[:, 1, 1]
    assert q.weights @ (D * np.conj(D)).real == pytest.approx(8 * math.pi ** 2 / 3, abs=1e-13)


# spin dequantizer and quantizer ---------------------------------------------

def test_dequantizer_at_identity_rotation():
    for k, m in enumerate([1, 0, -1]):
        U = spin_dequantizer_matrix(1, m, np.zeros(3))
        want = np.zeros((3, 3))
        want[k, k] = 1
        np.testing.assert_allclose(U, want, atol=1e-15)


@pytest.mark.parametrize("j", SPINS)
def test_dequantizers_resolve_identity(j, rng):
    om = np.column_stack([rng.uniform(0, 2 * np.pi, 20), rng.uniform(0, np.pi, 20), rng.uniform(0, 2 * np.pi, 20)])
    tj = int(2 * j)
    total = sum(spin_dequantizer_matrix(j, (tj - 2 * k) / 2, om) for k in range(tj + 1))
    np.testing.assert_allclose(total, np.broadcast_to(np.eye(tj + 1), total.shape), atol=1e-14)


def test_dequantizer_half_diagonal():
    for beta in np.linspace(0, np.pi, 5):
        U = spin_dequantizer_matrix(0.5, 0.5, np.array([0.0, beta, 0.0]))
        assert U[0, 0].real == pytest.approx(math.cos(beta / 2) ** 2, abs=1e-15)


@pytest.mark.parametrize("j", SPINS)
def test_ito_basis_orthonormal(j):
    T = ito_basis(j)
    keys = list(T)
    G = np.array([[np.trace(T[a].conj().T @ T[b]) for b in keys] for a in keys])
    np.testing.assert_allclose(G, np.eye(len(keys)), atol=1e-13)
    assert np.trace(T[(0, 0)]) == pytest.approx(math.sqrt(2 * j + 1), abs=1e-14)


@pytest.mark.parametrize("j", SPINS)
def test_quantizer_trace(j, rng):
    # only T_00 has a trace, so Tr D(m, W) = (1/8pi^2) sqrt(2j+1) <j m; j -m|0 0> (-1)^(j-m) sqrt(2j+1)
    om = np.array([rng.uniform(0, 2 * np.pi), rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi)])
    tj = int(2 * j)
    for k in range(tj + 1):
        Q = spin_quantizer_matrix(j, (tj - 2 * k) / 2, om)
        assert np.trace(Q) == pytest.approx(1 / (8 * np.pi ** 2), abs=1e-15)


@pytest.mark.parametrize("j", SPINS)
def test_quantizer_dequantizer_duality(j):
    # sum_m int Tr[U(m,W) X] D(m,W) dW = X for any operator X
    q = make_euler_quadrature(j)
    tj = int(2 * j)
    X = np.arange((tj + 1) ** 2).reshape(tj + 1, tj + 1) + 1j * np.eye(tj + 1)
    out = np.zeros_like(X, dtype=complex)
    for k in range(tj + 1):
        m = (tj - 2 * k) / 2
        U = spin_dequantizer_matrix(j, m, q.nodes)
        Q = spin_quantizer_matrix(j, m, q.nodes)
        out += np.einsum("g,g,gab->ab", q.weights, np.einsum("gab,ba->g", U, X), Q)
    np.testing.assert_allclose(out, X, atol=1e-12)


# spin tomogram ----------------------------------------------------------------

def test_spin_up_tomogram():
    rho = DensityMatrix.spin(0.5, [[1, 0], [0, 0]])
    at_zero = spin_tomogram(rho, EulerQuadrature(np.zeros((1, 3)), np.ones(1), 1, 1, 1))
    np.testing.assert_allclose(at_zero.values, [[1, 0]], atol=1e-15)
    q = euler_quadrature(9, 1, 1)
    t = spin_tomogram(rho, q)
    np.testing.assert_allclose(t.values[:, 0], np.cos(q.beta / 2) ** 2, atol=1e-15)
    np.testing.assert_allclose(t.values[:, 1], np.sin(q.beta / 2) ** 2, atol=1e-15)


@pytest.mark.parametrize("j", SPINS)
def test_maximally_mixed_tomogram_is_flat(j):
    d = int(2 * j) + 1
    t = spin_tomogram(DensityMatrix.spin(j, np.eye(d) / d))
    np.testing.assert_allclose(t.values, 1 / d, atol=1e-15)


@pytest.mark.parametrize("name", ["j_half", "j_one", "j_three_half"])
def test_spin_tomogram_normalisation(name):
    t = spin_tomogram(make_paper_state(name).density())
    assert t.normalization_error() < 1e-10
    assert t.integral() == pytest.approx(t.tj + 1, abs=1e-8)
    assert t.values.min() >= 0 and t.values.max() <= 1


@pytest.mark.parametrize("name", ["j_half", "j_one", "j_three_half"])
def test_reconstruct_reference_states(name):
    rho = make_paper_state(name).density()
    assert fidelity(rho, reconstruct_spin(spin_tomogram(rho))) >= 1 - 1e-10


@pytest.mark.parametrize("j", SPINS)
def test_reconstruct_mixed_and_top_states(j):
    d = int(2 * j) + 1
    mixed = DensityMatrix.spin(j, np.eye(d) / d)
    np.testing.assert_allclose(reconstruct_spin(spin_tomogram(mixed)).data, mixed.data, atol=1e-12)
    top = DensityMatrix.pure("spin", d - 1, np.eye(d)[0])
    np.testing.assert_allclose(reconstruct_spin(spin_tomogram(top)).data, top.data, atol=1e-12)


def test_reconstruct_fifty_half_states():
    for seed in range(50):
        rho = random_spin_state(0.5, seed).density()
        np.testing.assert_allclose(reconstruct_spin(spin_tomogram(rho)).data, rho.data, atol=1e-12)


def test_reconstruct_rejects_coarse_rule():
    rho = random_spin_state(1.5, 0).density()
    with pytest.raises(QuadratureError):
        reconstruct_spin(spin_tomogram(rho, euler_quadrature(2, 3)))


# symplectic ------------------------------------------------------------------

def test_ground_state_overlap():
    x = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(symplectic_dequantizer_overlap(0, x, 1.0, 0.0), np.pi ** -0.25 * np.exp(-x * x / 2),
                               atol=1e-15)


def test_degenerate_frame():
    with pytest.raises(DegenerateFrameError):
        symplectic_dequantizer_overlap(0, 0.3, 0.0, 0.0)
    with pytest.raises(DegenerateFrameError):
        symplectic_tomogram(fock_state(0, 3), [0.0], [0.0, 0.0])


@pytest.mark.parametrize("mu,nu", [(1.0, 0.0), (0.6, 0.8), (1.0, 1.0), (-2.0, 0.5)])
def test_vacuum_tomogram_closed_form(mu, nu):
    x = np.linspace(-5, 5, 41)
    s2 = mu * mu + nu * nu
    t = symplectic_tomogram(fock_state(0, 4), x, [mu, nu])
    np.testing.assert_allclose(t.values[0], np.exp(-x * x / s2) / np.sqrt(np.pi * s2), atol=1e-15)


def test_one_photon_tomogram():
    x = np.linspace(-5, 5, 41)
    t = symplectic_tomogram(fock_state(1, 4), x, [1.0, 0.0])
    np.testing.assert_allclose(t.values[0], 2 * x * x * np.exp(-x * x) / np.sqrt(np.pi), atol=1e-15)


def test_symplectic_normalisation():
    x = line_grid(-8, 8, 0.01)
    rho = DensityMatrix.fock1(6, random_spin_state(3, 5).density().data)  # any 7x7 state
    frames = np.array([[1.0, 0.0], [0.3, 0.9], [1.0, 1.0]])
    t = symplectic_tomogram(rho, x, frames)
    np.testing.assert_allclose(t.integral(), 1.0, atol=1e-8)


@pytest.mark.parametrize("lam", [-2.0, 0.5, 3.0])
def test_homogeneity(lam):
    rho = DensityMatrix.fock1(5, random_spin_state(2.5, 11).density().data)
    x = np.linspace(-3, 3, 25)
    mu, nu = 0.7, -0.4
    direct = symplectic_tomogram(rho, lam * x, [lam * mu, lam * nu]).values[0]
    scaled = symplectic_tomogram(rho, x, [mu, nu]).values[0] / abs(lam)
    np.testing.assert_allclose(direct, scaled, atol=1e-8)


@pytest.mark.parametrize("n", [0, 1])
def test_symplectic_round_trip(n):
    x = line_grid(-7, 7, 0.05)
    t = optical_tomogram(fock_state(n, 6), x, 32)
    assert fidelity(fock_state(n, 6), reconstruct_from_symplectic(t, 6)) >= 1 - 1e-4


def test_symplectic_reconstruct_coherence():
    x = line_grid(-7, 7, 0.05)
    rho = reconstruct_from_symplectic(optical_tomogram(superposition01(6), x, 32), 6)
    assert rho.data[0, 1] == pytest.approx(0.5, abs=1e-3)


def test_symplectic_reconstruct_needs_equal_angles():
    x = line_grid(-6, 6, 0.1)
    t = symplectic_tomogram(fock_state(0, 3), x, np.array([[1.0, 0.0], [0.8, 0.6], [0.0, 1.0]]))
    with pytest.raises(QuadratureError):
        reconstruct_from_symplectic(t, 3)


# photon number -----------------------------------------------------------------

def test_vacuum_photon_statistics_are_poisson():
    alphas = np.array([0.0, 0.4 - 0.2j, 1.1j, -1.5])
    t = photon_tomogram(fock_state(0, 30), alphas, 12)
    n = np.arange(13)
    for p, a in enumerate(alphas):
        x = abs(a) ** 2
        want = np.exp(-x) * x ** n / np.array([math.factorial(k) for k in n])
        np.testing.assert_allclose(t.values[p], want, atol=1e-15)


def test_photon_at_origin_is_diagonal():
    rho = DensityMatrix.fock1(5, random_spin_state(2.5, 2).density().data)
    t = photon_tomogram(rho, [0.0])
    np.testing.assert_allclose(t.values[0], np.real(np.diag(rho.data)), atol=1e-15)


@pytest.mark.parametrize("gamma", [0.0, 0.5 + 0.5j, -1.2 + 0.3j])
def test_vacuum_count_at_minus_alpha_is_coherent_overlap(gamma):
    rho = coherent_state(gamma, 40)
    alphas = np.array([0.0, 0.3, -0.7 + 0.2j, 1.0j, gamma])
    w0 = photon_tomogram(rho, -alphas, 0, tail_tol=None).values[:, 0]
    np.testing.assert_allclose(w0, husimi_q(rho, alphas), atol=1e-8)
    np.testing.assert_allclose(w0, np.exp(-np.abs(gamma - alphas) ** 2), atol=1e-8)
    np.testing.assert_allclose(husimi_q(rho, alphas, "povm"), w0 / np.pi, atol=1e-8)


def test_photon_tail_detected():
    with pytest.raises(CutoffError):
        photon_tomogram(fock_state(0, 20), [2.0], 3)


def test_photon_totals():
    rho = coherent_state(0.4 - 0.3j, 30)
    t = photon_tomogram(rho, plane_quadrature(1.5, 0.5).nodes, 30)
    assert np.abs(1 - t.totals()).max() < 1e-8


@pytest.mark.parametrize("s", [0.1, 0.5, 0.8])
def test_photon_quantizer_diagonal_generating_function(s):
    g = (s - 1) / (s + 1)
    c = 4 / (math.pi * (1 - s * s))
    for alpha in (0.3 + 0.1j, -0.9j, 1.4):
        for n in (0, 2):
            Q = photon_quantizer_matrix(n, alpha, s, 8)
            x = abs(alpha) ** 2
            for k in range(9):
                want = c * g ** (k - n) * math.exp(-(1 - g) * x) * assoc_laguerre(k, 0, -(1 - g) ** 2 * x / g)
                assert Q[k, k].real == pytest.approx(want, rel=1e-9, abs=1e-12)


def test_photon_quantizer_at_origin_is_diagonal():
    Q = photon_quantizer_matrix(2, 0.0, 0.5, 6)
    assert np.abs(Q - np.diag(np.diag(Q))).max() < 1e-15


@pytest.mark.parametrize("s", [0.0, 1.0, -0.5, 1.5])
def test_photon_quantizer_domain(s):
    with pytest.raises(DomainError):
        photon_quantizer_matrix(0, 0.1, s, 4)


def test_photon_round_trip_vacuum():
    q = plane_quadrature(4.0, 0.1, disk=True)
    t = photon_tomogram(fock_state(0, 120), q.nodes, 120, weights=q.weights, tail_tol=None)
    rho = reconstruct_from_photon(t, 0.5, 6)
    assert fidelity(fock_state(0, 6), rho) >= 1 - 1e-3


def test_photon_round_trip_square_grid_diverges():
    # the corners of the square reach |a| = 5.7 where the alternating series is hopeless
    q = plane_quadrature(4.0, 0.1)
    t = photon_tomogram(fock_state(0, 60), q.nodes, 60, weights=q.weights, tail_tol=None)
    with pytest.raises(CutoffError):
        reconstruct_from_photon(t, 0.5, 6)


# Wigner ----------------------------------------------------------------------

def test_wigner_vacuum_and_one_photon_at_origin():
    assert wigner_function(fock_state(0, 4), [0.0]).values[0] == pytest.approx(1 / np.pi, abs=1e-15)
    assert wigner_function(fock_state(1, 4), [0.0]).values[0] == pytest.approx(-1 / np.pi, abs=1e-15)


def test_wigner_vacuum_profile():
    a = np.array([0.2, 0.5 - 0.5j, 1.3j, -2.0])
    np.testing.assert_allclose(wigner_function(fock_state(0, 4), a).values, np.exp(-2 * np.abs(a) ** 2) / np.pi,
                               atol=1e-15)


def test_wigner_normalisation_is_half():
    # int W d^2alpha = 1/2 with the (1/pi) D(2a) P dequantizer
    for r, h in ((4.0, 0.1), (5.0, 0.05)):
        q = plane_quadrature(r, h)
        g = wigner_function(coherent_state(0.3 + 0.2j, 30), q.nodes, q.weights)
        assert g.integral() == pytest.approx(0.5, abs=1e-6)


def wigner_round_trip(rho, cutoff=6):
    q = plane_quadrature(4.0, 0.1)
    return reconstruct_from_wigner(wigner_function(rho, q.nodes, q.weights), cutoff)


@pytest.mark.parametrize("n", [0, 1])
def test_wigner_round_trip(n):
    assert fidelity(fock_state(n, 6), wigner_round_trip(fock_state(n, 6))) >= 1 - 1e-4


def test_wigner_reconstruction_is_linear():
    q = plane_quadrature(4.0, 0.1)
    w0 = wigner_function(fock_state(0, 6), q.nodes, q.weights)
    w1 = wigner_function(fock_state(1, 6), q.nodes, q.weights)
    mix = w0.__class__(w0.alphas, 0.5 * (w0.values + w1.values), q.weights)
    rho = reconstruct_from_wigner(mix, 6)
    np.testing.assert_allclose(rho.data, np.diag([0.5, 0.5, 0, 0, 0, 0, 0]), atol=1e-4)


def test_wigner_quantizer_constant_is_logged():
    g = wigner_function(fock_state(0, 4), [0.0])
    assert g.to_json()["convention"]["quantizer_constant"] == WIGNER_QUANTIZER_CONST == 4.0


# properties ------------------------------------------------------------------

@given(tj=st.integers(1, 3), seed=st.integers(0, 10 ** 6))
def test_spin_rows_sum_to_one(tj, seed):
    t = spin_tomogram(random_spin_state(tj / 2, seed).density())
    assert t.normalization_error() < 1e-10


@given(seed=st.integers(0, 10 ** 6), mu=st.floats(-2, 2), nu=st.floats(-2, 2), lam=st.sampled_from([-2.0, 0.5, 3.0]))
def test_homogeneity_property(seed, mu, nu, lam):
    if math.hypot(mu, nu) < 0.2:
        return
    rho = DensityMatrix.fock1(3, random_spin_state(1.5, seed).density().data)
    x = np.linspace(-2, 2, 9)
    a = symplectic_tomogram(rho, lam * x, [lam * mu, lam * nu]).values
    b = symplectic_tomogram(rho, x, [mu, nu]).values / abs(lam)
    np.testing.assert_allclose(a, b, atol=1e-8)


@given(seed=st.integers(0, 10 ** 6), re=st.floats(-1.5, 1.5), im=st.floats(-1.5, 1.5))
def test_photon_values_are_probabilities(seed, re, im):
    rho = DensityMatrix.fock1(3, random_spin_state(1.5, seed).density().data)
    t = photon_tomogram(rho, [complex(re, im)], 40)
    assert t.values.min() >= 0
    assert abs(t.totals()[0] - 1) < 1e-8


@given(a=st.floats(0, 1), seed=st.integers(0, 1000))
def test_spin_reconstruction_is_linear(a, seed):
    r1 = random_spin_state(1, seed).density()
    r2 = random_spin_state(1, seed + 1).density()
    t1, t2 = spin_tomogram(r1), spin_tomogram(r2)
    mix = t1.__class__(t1.tj, t1.quadrature, a * t1.values + (1 - a) * t2.values)
    np.testing.assert_allclose(reconstruct_spin(mix).data, a * r1.data + (1 - a) * r2.data, atol=1e-12)
