"""Closed-form transition kernels between the spin tomogram and the CV representations.

Each kernel is the trace of one picture's quantizer against another's
dequantizer, written out in the Fock basis of the sector n1 + n2 = 2j
where |j, m> = |j+m, j-m>.  Everything reduces to three one-mode building
blocks:

* M(a, b; xi) = <a|D(xi)|b>                                (Laguerre form)
* E(a, b; x, xi) = <a| delta(x - mu q - nu p) |b>          (Hermite sum)
* P(a, b; n, alpha) = <a| D(-alpha) g^N D(alpha) |b>        (geometric l-sum)

together with the spin dequantizer elements conj(D_{m,a}) D_{m,b} and the
quantizer elements built from Clebsch-Gordan tables.  This module depends
only on ``specfun``; it never builds density matrices.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import CutoffError, DegenerateFrameError, DomainError
from .specfun import (assoc_laguerre, binomial, clebsch_gordan, hermite, log_factorial, twice,
                      wigner_D_matrix)

TWO_PI = 2.0 * math.pi
# per-mode constant of the Wigner quantizer C D(2a)P that inverts D(2a)P/pi
WIGNER_Q_CONST = 4.0
WIGNER_U_CONST = 1.0 / math.pi
L_TAIL_TOL = 1e-14


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

def xi_from_frame(mu, nu):
    """xi = -(i/sqrt2)(mu + i nu), so that exp(-i(mu q + nu p)) = D(xi)."""
    return -1j / math.sqrt(2.0) * (np.asarray(mu, dtype=float) + 1j * np.asarray(nu, dtype=float))


def ordering_ratio(s: float) -> float:
    if not 0.0 < s < 1.0:
        raise DomainError(f"ordering parameter s={s} outside (0, 1)")
    return (s - 1.0) / (s + 1.0)


def quantizer_prefactor(s: float) -> float:
    return 4.0 / (math.pi * (1.0 - s * s))


def l_sum_limit(g: float, top: int, alpha_max: float) -> int:
    """Last l of sum_l g^l |l><l| needed for elements with indices <= top.

    The displaced overlaps <a|D(-alpha)|l> are concentrated at
    l <= top + |alpha|^2 + 8|alpha|; beyond that the geometric ratio |g|
    must bring the tail below L_TAIL_TOL.
    """
    spread = alpha_max * alpha_max + 8.0 * alpha_max
    return int(top + math.ceil(spread) + math.ceil(math.log(L_TAIL_TOL) / math.log(abs(g))))


# ---------------------------------------------------------------------------
# one-mode building blocks
# ---------------------------------------------------------------------------

def m_element(a: int, b: int, xi):
    """<a|D(xi)|b>: sqrt(lo!/hi!) (xi or -xi*)^|a-b| e^{-|xi|^2/2} L_lo^{|a-b|}(|xi|^2)."""
    xi = np.asarray(xi, dtype=complex)
    lo, hi = min(a, b), max(a, b)
    delta = hi - lo
    x = np.abs(xi) ** 2
    base = xi if a >= b else -np.conj(xi)
    norm = math.exp(0.5 * (log_factorial(lo) - log_factorial(hi)))
    return norm * base ** delta * np.exp(-0.5 * x) * assoc_laguerre(lo, delta, x)


def m_table(amax: int, bmax: int, xi) -> np.ndarray:
    """Stack of m_element over 0..amax x 0..bmax; shape xi.shape + (amax+1, bmax+1)."""
    xi = np.asarray(xi, dtype=complex)
    out = np.empty(xi.shape + (amax + 1, bmax + 1), dtype=complex)
    for a in range(amax + 1):
        for b in range(bmax + 1):
            out[..., a, b] = m_element(a, b, xi)
    return out


def delta_element(a: int, b: int, x, mu, nu):
    """<a| delta(x - mu q - nu p) |b> through the Hermite sum.

    For a >= b, with Delta = a - b and u = x/(sqrt2 |xi|):
    (2 pi)^{-1/2} sqrt(b!/a!) (i xi/|xi|)^Delta 2^{-Delta/2} |xi|^{-1} e^{-u^2}
      * sum_{s=0}^{b} C(a, b-s) / (s! 2^s) H_{Delta+2s}(u)
    and the conjugate of the swapped element for a < b.
    """
    xi = xi_from_frame(mu, nu)
    r = np.abs(xi)
    if np.any(r == 0):
        raise DegenerateFrameError("delta dequantizer undefined at (mu, nu) = (0, 0)")
    if a < b:
        return np.conj(delta_element(b, a, x, mu, nu))
    delta = a - b
    u = np.asarray(x, dtype=float) / (math.sqrt(2.0) * r)
    total = 0.0
    for s in range(b + 1):
        total = total + binomial(a, b - s) / (math.factorial(s) * 2.0 ** s) * hermite(delta + 2 * s, u)
    pref = math.exp(0.5 * (log_factorial(b) - log_factorial(a))) * 2.0 ** (-0.5 * delta) / math.sqrt(TWO_PI)
    return pref * (1j * xi / r) ** delta / r * np.exp(-u * u) * total


def delta_table(amax: int, x, mu, nu) -> np.ndarray:
    shape = np.broadcast(np.asarray(x), np.asarray(mu), np.asarray(nu)).shape
    out = np.empty(shape + (amax + 1, amax + 1), dtype=complex)
    for a in range(amax + 1):
        for b in range(a + 1):
            out[..., a, b] = delta_element(a, b, x, mu, nu)
            out[..., b, a] = np.conj(out[..., a, b])
    return out


def geometric_table(top: int, alpha, s: float) -> np.ndarray:
    """<a| D(-alpha) g^N D(alpha) |b> for a, b <= top; shape alpha.shape + (top+1, top+1)."""
    g = ordering_ratio(s)
    alpha = np.asarray(alpha, dtype=complex)
    L = l_sum_limit(g, top, float(np.abs(alpha).max()) if alpha.size else 0.0)
    left = m_table(top, L, -alpha)  # <a|D(-alpha)|l>
    gl = g ** np.arange(L + 1)
    return np.einsum("...al,l,...bl->...ab", left, gl, np.conj(left))


def geometric_diagonal(k: int, alpha, s: float):
    """Closed form <k| D(-alpha) g^N D(alpha) |k> = g^k e^{-(1-g)|a|^2} L_k(-(1-g)^2 |a|^2 / g)."""
    g = ordering_ratio(s)
    x = np.abs(np.asarray(alpha, dtype=complex)) ** 2
    return g ** k * np.exp(-(1.0 - g) * x) * assoc_laguerre(k, 0, -(1.0 - g) ** 2 * x / g)


def parity_table(top: int, alpha) -> np.ndarray:
    """<a| D(2 alpha) P |b> = M(a, b; 2 alpha) (-1)^b."""
    t = m_table(top, top, 2.0 * np.asarray(alpha, dtype=complex))
    return t * np.where(np.arange(top + 1) % 2, -1.0, 1.0)


# ---------------------------------------------------------------------------
# spin side: dequantizer rows and quantizer elements
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _quantizer_tables(tj: int):
    """CG tables for the quantizer elements of spin j = tj/2.

    Returns (cg_m[L, k], cg_pair[L, k1, k2]) with k the descending index of m:
    cg_m = <j m; j -m|L 0>, cg_pair = (-1)^(j-m2) <j m1; j -m2|L, m1-m2>.
    """
    j = tj / 2
    d = tj + 1
    ms = [(tj - 2 * k) / 2 for k in range(d)]
    cg_m = np.zeros((d, d))
    cg_pair = np.zeros((d, d, d))
    for L in range(d):
        for k, m in enumerate(ms):
            cg_m[L, k] = clebsch_gordan(j, m, j, -m, L, 0)
        for k1, m1 in enumerate(ms):
            for k2, m2 in enumerate(ms):
                M = m1 - m2
                if abs(M) > L:
                    continue
                sign = -1.0 if round(j - m2) % 2 else 1.0
                cg_pair[L, k1, k2] = sign * clebsch_gordan(j, m1, j, -m2, L, M)
    cg_m.setflags(write=False)
    cg_pair.setflags(write=False)
    return cg_m, cg_pair


def _m_index(tj: int, m) -> int:
    tm = twice(m)
    if abs(tm) > tj or (tj - tm) % 2:
        raise ValueError(f"m={m} not allowed for 2j={tj}")
    return (tj - tm) // 2


def quantizer_elements(j, m, omega) -> np.ndarray:
    """Spin quantizer matrix elements Q[a, b] = <j a| D_j(m, W) |j b> (rows/cols m = j..-j).

    Q[m1, m2] = sum_L (2L+1)/(8 pi^2) (-1)^(j-m+M) <j m; j -m|L 0> D^(L)_{0,-M}(W)
                * (-1)^(j-m2) <j m1; j -m2|L M>,  M = m1 - m2.
    """
    tj = twice(j)
    k = _m_index(tj, m)
    omega = np.asarray(omega, dtype=float)
    cg_m, cg_pair = _quantizer_tables(tj)
    d = tj + 1
    diff = np.subtract.outer(np.arange(d), np.arange(d))  # k1 - k2 = -(m1 - m2)
    Mvals = -diff
    out = np.zeros(omega.shape[:-1] + (d, d), dtype=complex)
    base_sign = 1 if ((tj - (tj - 2 * k)) // 2) % 2 == 0 else -1  # (-1)^(j-m)
    for L in range(d):
        if cg_m[L, k] == 0.0:
            continue
        DL = wigner_D_matrix(L, omega[..., 0], omega[..., 1], omega[..., 2])
        col = DL[..., L, :]  # D^(L)_{0, M'} for M' = L..-L
        # D^(L)_{0,-M} sits at column index L + M
        idx = np.clip(L + Mvals, 0, 2 * L)
        mask = np.abs(Mvals) <= L
        sign = base_sign * np.where(Mvals % 2, -1.0, 1.0)
        coeff = (2 * L + 1) / (8 * math.pi ** 2) * cg_m[L, k] * sign * mask * cg_pair[L]
        out += coeff * col[..., idx]
    return out


def dequantizer_elements(j, m, omega) -> np.ndarray:
    """Spin dequantizer elements U[a, b] = conj(D_{m,a}) D_{m,b} (rows/cols m = j..-j)."""
    tj = twice(j)
    k = _m_index(tj, m)
    omega = np.asarray(omega, dtype=float)
    row = wigner_D_matrix(j, omega[..., 0], omega[..., 1], omega[..., 2])[..., k, :]
    return np.conj(row)[..., :, None] * row[..., None, :]


def sector_occupations(j):
    """(n1, n2) arrays for m = j..-j."""
    tj = twice(j)
    k = np.arange(tj + 1)
    return tj - k, k


# ---------------------------------------------------------------------------
# two-mode sector blocks <j b| O1 x O2 |j a> for each CV operator
# ---------------------------------------------------------------------------

def _sector_block(j, t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
    """B[b, a] = t1[n1(b), n1(a)] t2[n2(b), n2(a)] for one-mode tables t1, t2."""
    n1, n2 = sector_occupations(j)
    return t1[..., n1[:, None], n1[None, :]] * t2[..., n2[:, None], n2[None, :]]


def sympl_quantizer_block(j, x, mu, nu) -> np.ndarray:
    """Sector block of (2 pi)^{-2} e^{i(x1+x2)} D(xi1) D(xi2); x, mu, nu have trailing axis 2."""
    x, mu, nu = (np.asarray(v, dtype=float) for v in (x, mu, nu))
    xi = xi_from_frame(mu, nu)
    top = twice(j)
    t1 = m_table(top, top, xi[..., 0])
    t2 = m_table(top, top, xi[..., 1])
    phase = np.exp(1j * (x[..., 0] + x[..., 1])) / TWO_PI ** 2
    return phase[..., None, None] * _sector_block(j, t1, t2)


def sympl_dequantizer_block(j, x, mu, nu) -> np.ndarray:
    """Sector block of delta(x1 - mu1 q1 - nu1 p1) delta(x2 - mu2 q2 - nu2 p2)."""
    x, mu, nu = (np.asarray(v, dtype=float) for v in (x, mu, nu))
    top = twice(j)
    t1 = delta_table(top, x[..., 0], mu[..., 0], nu[..., 0])
    t2 = delta_table(top, x[..., 1], mu[..., 1], nu[..., 1])
    return _sector_block(j, t1, t2)


def photon_quantizer_block(j, n, alpha, s: float) -> np.ndarray:
    """Sector block of D_{n1}(alpha1) x D_{n2}(alpha2) (photon quantizers)."""
    n = np.asarray(n)
    alpha = np.asarray(alpha, dtype=complex)
    g = ordering_ratio(s)
    c = quantizer_prefactor(s)
    top = twice(j)
    t1 = geometric_table(top, alpha[..., 0], s)
    t2 = geometric_table(top, alpha[..., 1], s)
    scale = c * c * g ** (-(n[..., 0] + n[..., 1]).astype(float))
    return scale[..., None, None] * _sector_block(j, t1, t2)


def photon_dequantizer_block(j, n, alpha) -> np.ndarray:
    """Sector block of D^dag(a1)|n1><n1|D(a1) x D^dag(a2)|n2><n2|D(a2)."""
    n = np.asarray(n)
    alpha = np.asarray(alpha, dtype=complex)
    top = twice(j)

    def one(nk, ak):
        col = m_table(top, int(np.max(nk)), -ak)  # <a|D(-alpha)|n'>
        sel = np.take_along_axis(col, np.broadcast_to(np.asarray(nk)[..., None, None], col.shape[:-1] + (1,)),
                                 axis=-1)[..., 0]
        return sel[..., :, None] * np.conj(sel)[..., None, :]

    return _sector_block(j, one(n[..., 0], alpha[..., 0]), one(n[..., 1], alpha[..., 1]))


def wigner_block(j, alpha, const: float) -> np.ndarray:
    """Sector block of const^2 D(2 a1) P x D(2 a2) P."""
    alpha = np.asarray(alpha, dtype=complex)
    top = twice(j)
    t1 = parity_table(top, alpha[..., 0])
    t2 = parity_table(top, alpha[..., 1])
    return const * const * _sector_block(j, t1, t2)


def _contract(spin_op: np.ndarray, cv_block: np.ndarray):
    """Tr[cv_op spin_op] = sum_{a,b} S[a, b] B[b, a]."""
    return np.einsum("...ab,...ba->...", spin_op, cv_block)


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

def kernel_sympl_to_spin(j, m, omega, x, mu, nu):
    """K_{W->omega} = Tr[(2pi)^{-2} e^{i(x1+x2)} D(xi1) D(xi2) U_j(m, W)].

    Expanded: (2pi)^{-2} e^{i(x1+x2)} sum_{m1,m2} conj(D_{m,m1}) D_{m,m2}
    M(j+m2, j+m1; xi1) M(j-m2, j-m1; xi2).
    """
    return _contract(dequantizer_elements(j, m, omega), sympl_quantizer_block(j, x, mu, nu))


def kernel_spin_to_sympl(j, m, omega, x, mu, nu):
    """K_{omega->W} = Tr[delta(x1 - ...) delta(x2 - ...) D_j(m, W)] (real)."""
    return _contract(quantizer_elements(j, m, omega), sympl_dequantizer_block(j, x, mu, nu))


def denom_trace_sympl(j, x, mu, nu):
    """Tr[Pi_2j (2pi)^{-2} e^{i(x1+x2)} D(xi1) D(xi2)]
    = (2pi)^{-2} e^{i(x1+x2)} e^{-(|xi1|^2+|xi2|^2)/2} sum_m L_{j+m}(|xi1|^2) L_{j-m}(|xi2|^2)."""
    x, mu, nu = (np.asarray(v, dtype=float) for v in (x, mu, nu))
    r2 = 0.5 * (mu ** 2 + nu ** 2)
    n1, n2 = sector_occupations(j)
    total = sum(assoc_laguerre(int(a), 0, r2[..., 0]) * assoc_laguerre(int(b), 0, r2[..., 1]) for a, b in zip(n1, n2))
    return np.exp(1j * (x[..., 0] + x[..., 1]) - 0.5 * (r2[..., 0] + r2[..., 1])) / TWO_PI ** 2 * total


def kernel_photon_to_spin(j, m, omega, n, alpha, s: float):
    """K_{w->omega} = Tr[D_{n1}(a1) D_{n2}(a2) U_j(m, W)].

    One-mode factors sum_l M(b, l; -a) g^{l-n} M(l, a'; a) with prefactor 4/(pi(1-s^2)).
    """
    return _contract(dequantizer_elements(j, m, omega), photon_quantizer_block(j, n, alpha, s))


def kernel_spin_to_photon(j, m, omega, n, alpha):
    """K_{omega->w} = Tr[U_{n1}(a1) U_{n2}(a2) D_j(m, W)]."""
    return _contract(quantizer_elements(j, m, omega), photon_dequantizer_block(j, n, alpha))


def denom_trace_photon(j, n, alpha, s: float):
    """Tr[Pi_2j D_{n1}(a1) D_{n2}(a2)]
    = c^2 g^{-n1-n2} sum_m P_{j+m}(a1) P_{j-m}(a2),  P_k = g^k e^{-(1-g)|a|^2} L_k(-(1-g)^2|a|^2/g)."""
    n = np.asarray(n)
    alpha = np.asarray(alpha, dtype=complex)
    g = ordering_ratio(s)
    c = quantizer_prefactor(s)
    n1, n2 = sector_occupations(j)
    total = sum(geometric_diagonal(int(a), alpha[..., 0], s) * geometric_diagonal(int(b), alpha[..., 1], s)
                for a, b in zip(n1, n2))
    return c * c * g ** (-(n[..., 0] + n[..., 1]).astype(float)) * total


def denom_trace_photon_sector(j, alpha, s: float):
    """sum over n1 + n2 = 2j of Tr[Pi_2j D_{n1}(a1) D_{n2}(a2)] (restricted n-sum)."""
    alpha = np.asarray(alpha, dtype=complex)
    tj = twice(j)
    return sum(denom_trace_photon(j, np.broadcast_to([k, tj - k], alpha.shape[:-1] + (2,)), alpha, s)
               for k in range(tj + 1))


def kernel_wigner_to_spin(j, m, omega, alpha):
    """K_{W->omega} = Tr[C^2 D(2a1)P D(2a2)P U_j(m, W)], C the calibrated per-mode constant."""
    return _contract(dequantizer_elements(j, m, omega), wigner_block(j, alpha, WIGNER_Q_CONST))


def kernel_spin_to_wigner(j, m, omega, alpha):
    """K_{omega->W} = Tr[pi^{-2} D(2a1)P D(2a2)P D_j(m, W)]."""
    return _contract(quantizer_elements(j, m, omega), wigner_block(j, alpha, WIGNER_U_CONST))


def denom_trace_wigner(j, alpha):
    """Tr[Pi_2j C^2 D(2a1)P D(2a2)P] = C^2 (-1)^{2j} e^{-2(|a1|^2+|a2|^2)} L^{(1)}_{2j}(4(|a1|^2+|a2|^2))."""
    alpha = np.asarray(alpha, dtype=complex)
    tj = twice(j)
    x = np.abs(alpha[..., 0]) ** 2 + np.abs(alpha[..., 1]) ** 2
    sign = -1.0 if tj % 2 else 1.0
    return WIGNER_Q_CONST ** 2 * sign * np.exp(-2.0 * x) * assoc_laguerre(tj, 1, 4.0 * x)


def kernel_sympl_to_photon(x, mu, nu, n: int, alpha):
    """K_{W->w} = Tr[(1/2pi) e^{i(x - mu q - nu p)} D^dag(a)|n><n|D(a)]
    = (1/2pi) e^{ix} e^{a xi* - a* xi} e^{-|xi|^2/2} L_n(|xi|^2),  |xi|^2 = (mu^2+nu^2)/2."""
    xi = xi_from_frame(mu, nu)
    alpha = np.asarray(alpha, dtype=complex)
    r2 = np.abs(xi) ** 2
    phase = np.exp(1j * np.asarray(x, dtype=float) + alpha * np.conj(xi) - np.conj(alpha) * xi)
    return phase * np.exp(-0.5 * r2) * assoc_laguerre(n, 0, r2) / TWO_PI


def kernel_photon_to_sympl(x, mu, nu, n, alpha, s: float):
    """K_{w->W} = Tr[D_n(a) delta(x - mu q - nu p)]
    = 2 g^{-n} / (pi^{3/2} (1-s) sqrt(s) r) exp(-(x + sqrt2 (mu Re a + nu Im a))^2 / (s r^2)),  r^2 = mu^2 + nu^2."""
    g = ordering_ratio(s)
    mu = np.asarray(mu, dtype=float)
    nu = np.asarray(nu, dtype=float)
    r = np.hypot(mu, nu)
    if np.any(r == 0):
        raise DegenerateFrameError("photon-to-symplectic kernel needs (mu, nu) != (0, 0)")
    alpha = np.asarray(alpha, dtype=complex)
    shift = np.asarray(x, dtype=float) + math.sqrt(2.0) * (mu * alpha.real + nu * alpha.imag)
    pref = 2.0 / (math.pi ** 1.5 * (1.0 - s) * math.sqrt(s) * r)
    return pref * g ** (-np.asarray(n, dtype=float)) * np.exp(-shift ** 2 / (s * r * r))


def check_l_stability(j, alpha, s: float) -> float:
    """Change of the photon quantizer block when the l-sum limit is doubled."""
    g = ordering_ratio(s)
    alpha = np.asarray(alpha, dtype=complex)
    top = twice(j)
    L = l_sum_limit(g, top, float(np.abs(alpha).max()))
    gl = g ** np.arange(2 * L + 1)
    left = m_table(top, 2 * L, -alpha)
    full = np.einsum("...al,l,...bl->...ab", left, gl, np.conj(left))
    short = np.einsum("...al,l,...bl->...ab", left[..., : L + 1], gl[: L + 1], np.conj(left[..., : L + 1]))
    return float(np.abs(full - short).max())


def cutoff_guard(j, cutoff: int) -> None:
    if twice(j) > cutoff:
        raise CutoffError(f"sector 2j={twice(j)} exceeds cutoff {cutoff}")
