"""Tomogram-to-tomogram transforms built on the closed-form kernels.

Spin -> CV: the restricted two-mode tomogram at a CV point is
int dW sum_m omega(m, W) K(m, W; point).  Since every kernel is
sum_{a,b} Q_ab(m, W) B_ba(point), the W-integral is taken once,
A = int dW sum_m omega Q, and each point costs one d x d contraction.

CV -> spin: the numerator int W(point) K(m, W; point) is
sum_{a,b} U_ab(m, W) C_ba with C the CV data integrated against the
one-mode factor tables; the denominator is the same integral of the
sector trace.  Both reorderings are exact rearrangements of the kernel
sums, and ``method="direct"`` evaluates the kernels point by point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels as K
from .errors import ConsistencyError, CutoffError, EmptySectorError, QuadratureError
from .quadrature import (EulerQuadrature, PlaneQuadrature, describe_euler, euler_quadrature,  # noqa: F401
                         gaussian_tail_bound, line_grid, make_euler_quadrature, optical_angles,
                         plane_quadrature, product_pairs, trapezoid_weights)
from .specfun import label_str, twice
from .tomography import (RICHARDSON_EPS, PhotonTomogram, SpinTomogram, SymplecticTomogram, WignerGrid,  # noqa: F401
                         _clamp, _richardson_weights, photon_series_error)

EMPTY_DENOM_TOL = 1e-10
# Gaussian damping is unnecessary once r is folded onto [0, R]: the M
# elements already decay like exp(-r^2/4).  Richardson damping stays available.
SYMPL_EPS = 0.0
# CV->spin denominators come out of quadratures whose noise on an empty
# sector reaches ~1e-4 (photon series); smaller weights cannot be told from 0
MIN_SECTOR_WEIGHT = 1e-3
STABILITY_TOL = 1e-6
NORMALIZATIONS = ("raw", "renormalized")


@dataclass(frozen=True, eq=False)
class RestrictedTomogram:
    """A CV tomogram of the sector-2j part of a two-mode state.

    ``normalization`` is "raw" (values of Tr[Pi rho Pi U], scaled by
    ``sector_weight``) or "renormalized" (divided by the sector weight).
    """

    tomogram: object
    tj: int
    normalization: str = "raw"
    sector_weight: float = 1.0

    @property
    def j(self) -> float:
        return self.tj / 2

    @property
    def values(self) -> np.ndarray:
        return self.tomogram.values

    def renormalized(self) -> "RestrictedTomogram":
        if self.normalization == "renormalized":
            return self
        t = self.tomogram
        scaled = type(t)(**{**t.__dict__, "values": t.values / self.sector_weight})
        return RestrictedTomogram(scaled, self.tj, "renormalized", self.sector_weight)

    def to_json(self) -> dict:
        out = self.tomogram.to_json()
        out["restricted"] = {"j": label_str(self.tj), "normalization": self.normalization,
                             "sector_weight": self.sector_weight}
        return out


def _check_weight(normalization: str, sector_weight: float) -> None:
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    if not 0.0 < sector_weight <= 1.0 + 1e-12:
        raise ValueError("sector weight must lie in (0, 1]")


# ---------------------------------------------------------------------------
# spin -> CV
# ---------------------------------------------------------------------------

def integrated_quantizer(omega_t: SpinTomogram) -> np.ndarray:
    """A_ab = int dW sum_m omega(m, W) Q_ab(m, W) on the tomogram's Euler rule."""
    q = omega_t.quadrature
    if not q.exact_for(omega_t.j):
        raise QuadratureError(f"Euler rule of degree {q.max_degree()} is not exact for j={label_str(omega_t.tj)}")
    j = omega_t.j
    A = np.zeros((omega_t.tj + 1,) * 2, dtype=complex)
    for k in range(omega_t.tj + 1):
        m = (omega_t.tj - 2 * k) / 2
        Q = K.quantizer_elements(j, m, q.nodes)
        A += np.einsum("g,g,gab->ab", q.weights, omega_t.values[:, k], Q)
    return A


def _sector_rows(j, table: np.ndarray) -> np.ndarray:
    """Pick rows/cols of a one-mode table at the sector occupations of mode 1 and mode 2."""
    n1, n2 = K.sector_occupations(j)
    return table[..., n1[:, None], n1[None, :]], table[..., n2[:, None], n2[None, :]]


def _finish(values: np.ndarray, what: str, clamp: bool):
    resid = float(np.abs(values.imag).max()) if values.size else 0.0
    if resid > 1e-8:
        raise ConsistencyError(f"{what} has imaginary residue {resid:.3e}")
    real = values.real
    count = 0
    if clamp:
        real, count = _clamp(real, what)
    return real, {"imag_residue": resid, "clamped": count}


def spin_to_symplectic(omega_t: SpinTomogram, x, frames, sector_weight: float = 1.0,
                       normalization: str = "raw", method: str = "factored") -> RestrictedTomogram:
    """Restricted two-mode symplectic tomogram W(x1, x2 | mu, nu) on x (shared by both modes) x frames.

    ``frames`` has shape (F, 2, 2) holding (mu_k, nu_k) per mode.
    """
    _check_weight(normalization, sector_weight)
    x = np.asarray(x, dtype=float)
    frames = np.asarray(frames, dtype=float).reshape(-1, 2, 2)
    j, top = omega_t.j, omega_t.tj
    scale = sector_weight if normalization == "raw" else 1.0
    if method == "direct":
        values = _direct_spin_to_cv(omega_t, lambda m, om, pts: K.kernel_spin_to_sympl(j, m, om, *pts),
                                    _sympl_points(x, frames)).reshape(len(frames), len(x), len(x))
    else:
        A = integrated_quantizer(omega_t)
        mu, nu = frames[:, :, 0], frames[:, :, 1]
        t1 = K.delta_table(top, x[None, :], mu[:, 0, None], nu[:, 0, None])  # (F, nx, d, d)
        t2 = K.delta_table(top, x[None, :], mu[:, 1, None], nu[:, 1, None])
        T1, _ = _sector_rows(j, t1)
        _, T2 = _sector_rows(j, t2)
        values = np.einsum("ab,fxba,fyba->fxy", A, T1, T2)
    real, meta = _finish(scale * values, "restricted symplectic tomogram", clamp=True)
    tomo = SymplecticTomogram(x, frames, real, {**meta, "source": "spin", "j": label_str(top)})
    return RestrictedTomogram(tomo, top, normalization, sector_weight)


def _sympl_points(x, frames):
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    F = frames.shape[0]
    xs = np.stack([np.broadcast_to(X1, (F,) + X1.shape), np.broadcast_to(X2, (F,) + X2.shape)], axis=-1)
    mu = np.broadcast_to(frames[:, None, None, :, 0], xs.shape)
    nu = np.broadcast_to(frames[:, None, None, :, 1], xs.shape)
    return xs.reshape(-1, 2), mu.reshape(-1, 2), nu.reshape(-1, 2)


def _direct_spin_to_cv(omega_t: SpinTomogram, kernel, points) -> np.ndarray:
    """sum_g w_g sum_m omega(m, W_g) K(m, W_g; points) evaluated node by node."""
    q = omega_t.quadrature
    npts = len(points[0])
    out = np.zeros(npts, dtype=complex)
    for node, w, row in zip(q.nodes, q.weights, omega_t.values):
        for k in range(omega_t.tj + 1):
            if row[k] == 0.0:
                continue
            m = (omega_t.tj - 2 * k) / 2
            out += w * row[k] * kernel(m, np.broadcast_to(node, (npts, 3)), points)
    return out


def spin_to_photon(omega_t: SpinTomogram, alphas, ncut: int | None = None, sector_weight: float = 1.0,
                   normalization: str = "raw", method: str = "factored") -> RestrictedTomogram:
    """Restricted two-mode photon tomogram w_{n1 n2}(a1, a2) for n1, n2 <= ncut (default 2j).

    Entries with n1 + n2 = 2j are the sector table; see :func:`sector_table`.
    """
    _check_weight(normalization, sector_weight)
    pts = np.asarray(alphas, dtype=complex).reshape(-1, 2)
    j, top = omega_t.j, omega_t.tj
    ncut = top if ncut is None else ncut
    scale = sector_weight if normalization == "raw" else 1.0
    if method == "direct":
        nn = np.array([(a, b) for a in range(ncut + 1) for b in range(ncut + 1)])
        P = len(pts)
        rep_a = np.repeat(pts, len(nn), axis=0)
        rep_n = np.tile(nn, (P, 1))
        values = _direct_spin_to_cv(omega_t, lambda m, om, p: K.kernel_spin_to_photon(j, m, om, p[1], p[0]),
                                    (rep_a, rep_n)).reshape(P, ncut + 1, ncut + 1)
    else:
        A = integrated_quantizer(omega_t)
        c1 = K.m_table(top, ncut, -pts[:, 0])  # <b|D(-a)|n>
        c2 = K.m_table(top, ncut, -pts[:, 1])
        n1, n2 = K.sector_occupations(j)
        u1, u2 = c1[:, n1, :], c2[:, n2, :]  # (P, d, N)
        values = np.einsum("ab,pbn,pan,pbk,pak->pnk", A, u1, np.conj(u1), u2, np.conj(u2))
    real, meta = _finish(scale * values, "restricted photon tomogram", clamp=True)
    tomo = PhotonTomogram(pts, real, None, {**meta, "source": "spin", "j": label_str(top)})
    return RestrictedTomogram(tomo, top, normalization, sector_weight)


def sector_table(rt: RestrictedTomogram) -> np.ndarray:
    """Values w_{n1, 2j-n1} for n1 = 2j..0 (descending m = (n1 - n2)/2), shape (P, 2j+1)."""
    n1, n2 = K.sector_occupations(rt.j)
    return rt.values[:, n1, n2]


def spin_to_wigner(omega_t: SpinTomogram, alphas, sector_weight: float = 1.0, normalization: str = "raw",
                   method: str = "factored") -> RestrictedTomogram:
    """Restricted two-mode Wigner function W(a1, a2) with dequantizer pi^{-2} D(2a1)P D(2a2)P."""
    _check_weight(normalization, sector_weight)
    pts = np.asarray(alphas, dtype=complex).reshape(-1, 2)
    j, top = omega_t.j, omega_t.tj
    scale = sector_weight if normalization == "raw" else 1.0
    if method == "direct":
        values = _direct_spin_to_cv(omega_t, lambda m, om, p: K.kernel_spin_to_wigner(j, m, om, p[0]), (pts,))
    else:
        A = integrated_quantizer(omega_t)
        T1, _ = _sector_rows(j, K.parity_table(top, pts[:, 0]))
        _, T2 = _sector_rows(j, K.parity_table(top, pts[:, 1]))
        values = K.WIGNER_U_CONST ** 2 * np.einsum("ab,pba,pba->p", A, T1, T2)
    real, meta = _finish(scale * values, "restricted Wigner function", clamp=False)
    grid = WignerGrid(pts, real, None, {**meta, "source": "spin", "j": label_str(top)})
    return RestrictedTomogram(grid, top, normalization, sector_weight)


# ---------------------------------------------------------------------------
# CV -> spin
# ---------------------------------------------------------------------------

def spin_from_block(j, C: np.ndarray, denominator: complex, grid: EulerQuadrature | None = None,
                    meta: dict | None = None, strict: bool = True,
                    min_weight: float = MIN_SECTOR_WEIGHT) -> SpinTomogram:
    """omega(m, W) = sum_ab U_ab(m, W) C_ba / denominator on an Euler rule.

    With ``strict`` the result must be nonnegative (after the noise clamp)
    and sum to 1 over m; otherwise deviations are only recorded in meta and
    the empty-sector floor applies to |denominator|.
    """
    tj = twice(j)
    # a strict denominator is a sector weight; a non-strict one may carry a sign
    size = denominator.real if strict else abs(denominator)
    if abs(denominator) < EMPTY_DENOM_TOL or size < min_weight:
        raise EmptySectorError(f"denominator {denominator.real:.3e} (sector weight) is below {min_weight:.0e}: "
                               f"input has no resolvable weight in sector 2j={tj}")
    q = make_euler_quadrature(j) if grid is None else grid
    values = np.empty((q.size, tj + 1), dtype=complex)
    for k in range(tj + 1):
        U = K.dequantizer_elements(j, (tj - 2 * k) / 2, q.nodes)
        values[:, k] = np.einsum("gab,ba->g", U, C)
    values = values / denominator
    real, info = _finish(values, "spin tomogram", clamp=strict)
    info.update(meta or {})
    info["denominator"] = [float(np.real(denominator)), float(np.imag(denominator))]
    info["block_trace"] = [float(np.real(np.trace(C))), float(np.imag(np.trace(C)))]
    norm = float(np.abs(real.sum(axis=1) - 1.0).max())
    info["normalization_error"] = norm
    if strict and norm > 1e-6:
        raise ConsistencyError(f"sum_m omega deviates from 1 by {norm:.2e}: denominator and numerator disagree")
    return SpinTomogram(tj, q, real, info)


def wigner_to_spin(grid: WignerGrid, j, euler: EulerQuadrature | None = None,
                   min_weight: float = MIN_SECTOR_WEIGHT) -> SpinTomogram:
    """omega_j from a two-mode Wigner function sampled on a weighted grid."""
    if grid.modes != 2:
        raise ValueError("wigner_to_spin needs a two-mode Wigner grid")
    if grid.weights is None:
        raise QuadratureError("Wigner grid carries no d^2a1 d^2a2 weights")
    top = twice(j)
    pts = grid.alphas
    wv = grid.weights * grid.values
    T1, _ = _sector_rows(j, K.parity_table(top, pts[:, 0]))
    _, T2 = _sector_rows(j, K.parity_table(top, pts[:, 1]))
    C = K.WIGNER_Q_CONST ** 2 * np.einsum("p,pba,pba->ba", wv, T1, T2)
    denom = complex(wv @ K.denom_trace_wigner(j, pts))
    return spin_from_block(j, C, denom, euler, {"source": "wigner"}, min_weight=min_weight)


def photon_series(values: np.ndarray, g: float) -> np.ndarray:
    """F(a1, a2) = sum_{n1, n2} g^{-n1-n2} w_{n1 n2}(a1, a2)."""
    gn = g ** -np.arange(values.shape[1], dtype=float)
    return np.einsum("pnk,n,k->p", values, gn, gn)


def photon_to_spin(tomo: PhotonTomogram, j, s: float, denominator: str = "full",
                   euler: EulerQuadrature | None = None, min_weight: float = MIN_SECTOR_WEIGHT) -> SpinTomogram:
    """omega_j from a two-mode photon tomogram with d^2a1 d^2a2 weights.

    ``denominator="full"`` sums every n in the tomogram (as printed);
    ``"sector"`` restricts the denominator n-sum to n1 + n2 = 2j.
    """
    if tomo.modes != 2:
        raise ValueError("photon_to_spin needs a two-mode photon tomogram")
    if tomo.weights is None:
        raise QuadratureError("photon tomogram carries no weights")
    if denominator not in ("full", "sector"):
        raise ValueError("denominator must be 'full' or 'sector'")
    top = twice(j)
    if tomo.ncut < top:
        raise CutoffError(f"tomogram cutoff {tomo.ncut} below 2j={top}")
    g = K.ordering_ratio(s)
    c = K.quantizer_prefactor(s)
    pts = tomo.alphas
    F = photon_series(tomo.values, g)
    G1, _ = _sector_rows(j, K.geometric_table(top, pts[:, 0], s))
    _, G2 = _sector_rows(j, K.geometric_table(top, pts[:, 1], s))
    wF = tomo.weights * F
    C = c * c * np.einsum("p,pba,pba->ba", wF, G1, G2)
    if denominator == "full":
        diag = K.denom_trace_photon(j, np.zeros(pts.shape, dtype=int), pts, s)  # g^0 factor, times F below
        denom = complex(wF @ diag)
    else:
        denom = 0.0
        for n1 in range(top + 1):
            n = np.broadcast_to([n1, top - n1], pts.shape)
            denom += complex((tomo.weights * tomo.values[:, n1, top - n1]) @ K.denom_trace_photon(j, n, pts, s))
    return spin_from_block(j, C, denom, euler, {"source": "photon", "s": s, "denominator_mode": denominator},
                           strict=denominator == "full", min_weight=min_weight)


def sympl_factor_table(top: int, y, thetas, eps=SYMPL_EPS, n_r: int | None = None) -> np.ndarray:
    """P[t, y, a, b] = int_R |r| dr e^{iry} M(a, b; xi(r, theta_t)) e^{-eps r^2}, eps -> 0 by Richardson.

    xi(r, theta) = -(i/sqrt2) r e^{i theta} is the displacement of the frame
    (r cos theta, r sin theta).
    """
    y = np.asarray(y, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    rmax = 2.0 * math.sqrt(2.0 * top + 2.0) + 10.0
    n_r = n_r or int(max(160, 6 * rmax + 2 * rmax * np.abs(y).max() / math.pi))
    t, wt = np.polynomial.legendre.leggauss(n_r)
    # fold r < 0 onto r > 0: |r| has a kink at 0 that a symmetric rule resolves poorly
    r = 0.5 * rmax * (t + 1.0)
    wr = 0.5 * rmax * wt
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    rw = _richardson_weights(eps) if len(eps) > 1 else np.ones(1)
    damp = (rw[:, None] * np.exp(-np.outer(eps, r * r))).sum(axis=0)
    xi = -1j / math.sqrt(2.0) * np.outer(np.exp(1j * thetas), r)  # (T, R)
    m_pos = K.m_table(top, top, xi)  # (T, R, a, b)
    m_neg = K.m_table(top, top, -xi)
    phase = np.exp(1j * np.outer(y, r))  # (Y, R)
    w = wr * r * damp
    return (np.einsum("yr,r,trab->tyab", phase, w, m_pos)
            + np.einsum("yr,r,trab->tyab", np.conj(phase), w, m_neg))


def symplectic_to_spin(tomo: SymplecticTomogram, j, eps=SYMPL_EPS,
                       euler: EulerQuadrature | None = None, min_weight: float = MIN_SECTOR_WEIGHT) -> SpinTomogram:
    """omega_j from a two-mode optical tomogram on a product of equally spaced angles in [0, pi).

    The (x, mu, nu) integrals are done in polar form per mode,
    mu = r cos(theta), nu = r sin(theta), r real, theta in [0, pi), using
    W(x | r e^{i theta}) = W(x/r | theta)/|r|.
    """
    if tomo.modes != 2:
        raise ValueError("symplectic_to_spin needs a two-mode tomogram")
    ang = tomo.optical_angles()
    t1, t2 = np.unique(np.round(ang[:, 0], 12)), np.unique(np.round(ang[:, 1], 12))
    if len(t1) * len(t2) != len(ang):
        raise QuadratureError("frames must form a product grid of angles")
    for t in (t1, t2):
        if not np.allclose(t, optical_angles(len(t)), atol=1e-9):
            raise QuadratureError("optical angles must be equally spaced on [0, pi)")
    i1 = np.searchsorted(t1, np.round(ang[:, 0], 12))
    i2 = np.searchsorted(t2, np.round(ang[:, 1], 12))
    top = twice(j)
    y = tomo.x
    wy = tomo.x_weights()
    P1 = sympl_factor_table(top, y, t1, eps)
    P2 = P1 if np.array_equal(t1, t2) else sympl_factor_table(top, y, t2, eps)
    S1, _ = _sector_rows(j, P1)
    _, S2 = _sector_rows(j, P2)
    wt = (math.pi / len(t1)) * (math.pi / len(t2))
    vals = tomo.values * wy[None, :, None] * wy[None, None, :]
    C = wt / (2 * math.pi) ** 2 * np.einsum("fxy,fxba,fyba->ba", vals, S1[i1], S2[i2])
    # sector trace of the quantizer integrates to sum_m C_mm
    denom = complex(np.trace(C))
    return spin_from_block(j, C, denom, euler, {"source": "symplectic", "eps": list(np.atleast_1d(eps))},
                           min_weight=min_weight)


# ---------------------------------------------------------------------------
# photon <-> symplectic (one mode, unrestricted)
# ---------------------------------------------------------------------------

def photon_plane_radius(s: float, digits: float = 16.0) -> float:
    """Disk radius that balances the decay of sum_n g^{-n} w_n (rate 2/(1-s) for
    states near the vacuum) against the growth of its roundoff (rate 1/|g| - 1)."""
    g = K.ordering_ratio(s)
    rate = 2.0 / (1.0 - s) + (1.0 / abs(g) - 1.0)
    return math.sqrt(digits * math.log(10.0) / rate)


def photon_to_symplectic(tomo: PhotonTomogram, x, frames, s: float, tol: float = 1e-3) -> SymplecticTomogram:
    """W(x | mu, nu) = sum_n int d^2a w_n(a) K_{w->W}(x, mu, nu, n, a) for a one-mode tomogram.

    The n-sum is done first.  A bound on the error of the truncated,
    alternating series (see :func:`photon_series_error`) is propagated through
    the kernel; above ``tol`` CutoffError is raised.
    """
    if tomo.modes != 1:
        raise ValueError("photon_to_symplectic needs a one-mode tomogram")
    if tomo.weights is None:
        raise QuadratureError("photon tomogram carries no weights")
    g = K.ordering_ratio(s)
    x = np.asarray(x, dtype=float)
    frames = np.asarray(frames, dtype=float).reshape(-1, 2)
    F = tomo.values @ (g ** -np.arange(tomo.ncut + 1, dtype=float))
    wF = tomo.weights * F
    werr = tomo.weights * photon_series_error(tomo.values, tomo.alphas, g)
    a = tomo.alphas[:, 0]
    out = np.empty((len(frames), len(x)))
    bound = 0.0
    for f, (mu, nu) in enumerate(frames):
        kern = K.kernel_photon_to_sympl(x[:, None], mu, nu, 0, a[None, :], s)  # n-dependence is in F
        out[f] = kern @ wF
        bound = max(bound, float((np.abs(kern) @ werr).max()))
    if bound > tol:
        raise CutoffError(f"photon series error bound {bound:.2e} exceeds {tol:.0e}: "
                          "raise the tomogram cutoff or shrink the alpha grid")
    values, clamped = _clamp(out, "symplectic tomogram")
    return SymplecticTomogram(x, frames[:, None, :], values,
                              {"source": "photon", "s": s, "clamped": clamped, "error_bound": bound})


def _photon_from_optical(theta, W, x, pts, ncut, eps, n_r, rmax):
    t, wt = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * rmax * (t + 1.0)  # even integrand: int_R |r| ... = 2 int_0^inf r ...
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    rw = _richardson_weights(eps) if len(eps) > 1 else np.ones(1)
    damp = (rw[:, None] * np.exp(-np.outer(eps, r * r))).sum(axis=0)
    lag = np.stack([np.asarray(K.assoc_laguerre(n, 0, 0.5 * r * r)) for n in range(ncut + 1)], axis=1)
    radial = (rmax * wt * r * damp * np.exp(-0.25 * r * r))[:, None] * lag  # (R, N), 2 x half-width
    # e^{irz} summed against W: only the cosine survives because R_n is even in r.
    # With z = y + c(theta, a), cos(rz) = cos(ry)cos(rc) - sin(ry)sin(rc), and the
    # y-sums do not depend on the amplitude point.
    cy = W @ np.cos(np.outer(x, r))  # (T, R)
    sy = W @ np.sin(np.outer(x, r))
    shift = math.sqrt(2.0) * np.real(pts[:, None] * np.exp(-1j * theta)[None, :])  # (P, T)
    out = np.empty((len(pts), ncut + 1))
    for lo in range(0, len(pts), 256):
        c = shift[lo:lo + 256, :, None] * r  # (p, T, R)
        acc = np.einsum("ptr,tr->pr", np.cos(c), cy) - np.einsum("ptr,tr->pr", np.sin(c), sy)
        out[lo:lo + 256] = (math.pi / len(theta)) / (2 * math.pi) * (acc @ radial)
    return out


def symplectic_to_photon(tomo: SymplecticTomogram, alphas, ncut: int, eps=SYMPL_EPS,
                         n_r: int | None = None, stability_tol: float | None = STABILITY_TOL) -> PhotonTomogram:
    """w_n(a) = int dx dmu dnu W K_{W->w} for a one-mode optical tomogram, n = 0..ncut.

    In polar form w_n(a) = (1/2pi) int_0^pi dtheta int dy W(y|theta) R_n(y + sqrt2 Re(a e^{-i theta}))
    with R_n(z) = int_R |r| dr e^{irz} e^{-r^2/4} L_n(r^2/2).  The radial rule
    is rerun at twice the order; a change above ``stability_tol`` raises
    QuadratureError (pass None to skip).
    """
    if tomo.modes != 1:
        raise ValueError("symplectic_to_photon needs a one-mode tomogram")
    theta = tomo.optical_angles()[:, 0]
    order = np.argsort(theta)
    if not np.allclose(theta[order], optical_angles(len(theta)), atol=1e-9):
        raise QuadratureError("optical angles must be equally spaced on [0, pi)")
    theta = theta[order]
    W = tomo.values[order] * tomo.x_weights()[None, :]
    pts = np.asarray(alphas, dtype=complex).reshape(-1)
    rmax = 2.0 * math.sqrt(2.0 * ncut + 2.0) + 10.0
    zmax = np.abs(tomo.x).max() + math.sqrt(2.0) * (np.abs(pts).max() if pts.size else 0.0)
    n_r = n_r or int(max(160, 6 * rmax + 2 * rmax * zmax / math.pi))
    out = _photon_from_optical(theta, W, tomo.x, pts, ncut, eps, n_r, rmax)
    meta = {"source": "symplectic", "n_r": n_r}
    if stability_tol is not None:
        change = float(np.abs(_photon_from_optical(theta, W, tomo.x, pts, ncut, eps, 2 * n_r, rmax) - out).max())
        meta["doubling_change"] = change
        if change > stability_tol:
            raise QuadratureError(f"radial quadrature unstable under doubling (change {change:.2e})")
    values, clamped = _clamp(out, "photon tomogram")
    meta["clamped"] = clamped
    return PhotonTomogram(pts[:, None], values, None, meta)
