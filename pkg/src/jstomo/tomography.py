"""Tomograms and reconstructions in the spin, symplectic, photon-number and Wigner pictures.

Every symbol here is the trace of the state against a dequantizer, and every
reconstruction sums or integrates the symbol against the dual quantizer:

* spin:        U(m, W) = R^dag |j m><j m| R,  quantizer from irreducible tensor operators
* symplectic:  U(x, mu, nu) = delta(x - mu q - nu p),  quantizer exp(i(x - mu q - nu p)) / 2pi
* photon:      U_n(a) = D^dag(a) |n><n| D(a),  quantizer 4/(pi(1-s^2)) D^dag(a) g^(N-n) D(a)
* Wigner:      U(a) = D(2a) P / pi,  quantizer C_W D(2a) P

Quadratures are q = (a + a^dag)/sqrt2, p = (a - a^dag)/(i sqrt2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConsistencyError, CutoffError, DegenerateFrameError, DomainError, QuadratureError
from .hilbert import DensityMatrix, hermitize
from .quadrature import (EulerQuadrature, describe_euler, make_euler_quadrature, optical_angles,
                         trapezoid_weights)
from .specfun import clebsch_gordan, displacement_matrix, label_str, twice, wigner_D_matrix

# negative tomogram values above this are quadrature noise and are clamped
CLAMP_TOL = 1e-8
IMAG_TOL = 1e-9
# grid points per block in two-mode evaluations (bounds temporary memory)
CHUNK = 4096

# Wigner convention: dequantizer D(2a)P / pi (vacuum W(0) = 1/pi).  The
# printed quantizer 2 D(2a)P reconstructs rho/2 with this dequantizer; the
# round trip on the vacuum fixes the constant to 4 per mode.
WIGNER_DEQUANTIZER_CONST = 1.0 / math.pi
WIGNER_PRINTED_QUANTIZER_CONST = 2.0
WIGNER_QUANTIZER_CONST = 4.0


def _clamp(values: np.ndarray, what: str):
    """Clamp tiny negatives, raise on real negativity; return (values, clamped count)."""
    low = values.min() if values.size else 0.0
    if low < -CLAMP_TOL:
        raise ConsistencyError(f"{what} has negative value {low:.3e} (truncation or quadrature failure)")
    neg = values < 0
    count = int(neg.sum())
    if count:
        values = np.where(neg, 0.0, values)
    return values, count


def _real(values: np.ndarray, what: str) -> np.ndarray:
    resid = np.abs(values.imag).max() if values.size else 0.0
    if resid > IMAG_TOL:
        raise ConsistencyError(f"{what} has imaginary residue {resid:.3e}")
    return values.real.copy()


def _state_factors(rho: DensityMatrix, tol: float = 1e-15):
    """Eigen-decomposition rho = sum_k lam_k |v_k><v_k| restricted to lam_k > tol."""
    lam, vec = np.linalg.eigh(hermitize(rho.data))
    keep = lam > tol
    return lam[keep], vec[:, keep]


def _support(rho: DensityMatrix) -> tuple[int, ...]:
    """Largest occupied occupation per mode (rows/columns with any nonzero entry)."""
    mag = np.abs(rho.data).max(axis=0) > 0
    n = rho.cutoff
    if rho.basis == "fock1":
        idx = np.nonzero(mag)[0]
        return (int(idx.max()) if idx.size else 0,)
    occ = mag.reshape(n + 1, n + 1)
    n1 = np.nonzero(occ.any(axis=1))[0]
    n2 = np.nonzero(occ.any(axis=0))[0]
    return (int(n1.max()) if n1.size else 0, int(n2.max()) if n2.size else 0)


def _two_mode_factors(rho: DensityMatrix):
    """(lam, Psi) with Psi[k] the k-th eigenvector reshaped to (n1, n2), trimmed to the support."""
    lam, vec = _state_factors(rho)
    s1, s2 = _support(rho)
    n = rho.cutoff
    psi = vec.T.reshape(-1, n + 1, n + 1)[:, : s1 + 1, : s2 + 1]
    return lam, psi


# ---------------------------------------------------------------------------
# spin
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpinTomogram:
    """omega(m, W_g) for m = j..-j at the nodes of an Euler quadrature."""

    tj: int
    quadrature: EulerQuadrature
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def j(self) -> float:
        return self.tj / 2

    def normalization_error(self) -> float:
        return float(np.abs(self.values.sum(axis=1) - 1.0).max())

    def integral(self) -> float:
        """(2j+1)/(8 pi^2) sum_m int omega dW; equals 2j+1."""
        return float((self.tj + 1) / (8 * np.pi ** 2) * (self.quadrature.weights @ self.values).sum())

    def to_json(self) -> dict:
        q = self.quadrature
        grid = [{"alpha": float(a), "beta": float(b), "gamma": float(c), "weight": float(w)}
                for (a, b, c), w in zip(q.nodes, q.weights)]
        out = {"kind": "spin", "j": label_str(self.tj), "grid": grid,
               "quadrature": describe_euler(q), "values": self.values.tolist()}
        if self.meta:
            out["meta"] = self.meta
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "SpinTomogram":
        nodes = np.array([[g["alpha"], g["beta"], g["gamma"]] for g in obj["grid"]], dtype=float)
        weights = np.array([g["weight"] for g in obj["grid"]], dtype=float)
        qd = obj.get("quadrature", {})
        q = EulerQuadrature(nodes, weights, qd.get("n_beta", 0), qd.get("n_alpha", 0), qd.get("n_gamma", 0))
        return cls(twice(obj["j"]), q, np.asarray(obj["values"], dtype=float), obj.get("meta", {}))


def _rotation_rows(j, omega) -> np.ndarray:
    omega = np.asarray(omega, dtype=float)
    return wigner_D_matrix(j, omega[..., 0], omega[..., 1], omega[..., 2])


def spin_dequantizer_matrix(j, m, omega) -> np.ndarray:
    """U(m, W) with elements U[m2, m1] = conj(D_{m,m2}) D_{m,m1} (rows/cols m = j..-j)."""
    tj, tm = twice(j), twice(m)
    if abs(tm) > tj or (tj - tm) % 2:
        raise ValueError(f"m={m} not allowed for j={j}")
    row = _rotation_rows(j, omega)[..., (tj - tm) // 2, :]
    return np.conj(row)[..., :, None] * row[..., None, :]


def ito_basis(j) -> dict:
    """Irreducible tensor operators T_{LM} = sum (-1)^(j-m') <j m; j -m'|L M> |m><m'|."""
    tj = twice(j)
    ms = [tj - 2 * k for k in range(tj + 1)]
    out = {}
    for L in range(tj + 1):
        for M in range(-L, L + 1):
            T = np.zeros((tj + 1, tj + 1))
            for r, tm in enumerate(ms):
                for c, tmp in enumerate(ms):
                    if tm - tmp != 2 * M:
                        continue
                    sign = -1.0 if ((tj - tmp) // 2) % 2 else 1.0
                    T[r, c] = sign * clebsch_gordan(tj / 2, tm / 2, tj / 2, -tmp / 2, L, M)
            out[(L, M)] = T
    return out


def spin_quantizer_matrix(j, m, omega) -> np.ndarray:
    """D(m, W) = sum_L (2L+1)/(8 pi^2) sum_M C_{LM}(m, W) T_{LM}.

    C_{LM}(m, W) = Tr[T_{LM}^dag U(m, W)] = (-1)^(j-m+M) <j m; j -m|L 0> D^(L)_{0,-M}(W).
    """
    tj, tm = twice(j), twice(m)
    omega = np.asarray(omega, dtype=float)
    out = np.zeros(omega.shape[:-1] + (tj + 1, tj + 1), dtype=complex)
    for (L, M), T in ito_basis(j).items():
        cg = clebsch_gordan(tj / 2, tm / 2, tj / 2, -tm / 2, L, 0)
        if cg == 0.0:
            continue
        DL = wigner_D_matrix(L, omega[..., 0], omega[..., 1], omega[..., 2])
        sign = -1.0 if ((tj - tm) // 2 + M) % 2 else 1.0
        coeff = (2 * L + 1) / (8 * np.pi ** 2) * sign * cg * DL[..., L, L + M]
        out += coeff[..., None, None] * T
    return out


def _all_spin_quantizers(j, q: EulerQuadrature) -> np.ndarray:
    return _quantizer_stack(twice(j), q)


@lru_cache(maxsize=16)
def _quantizer_stack(tj: int, q: EulerQuadrature) -> np.ndarray:
    # rules hash by identity, so repeated reconstructions on one rule reuse the stack
    out = np.stack([spin_quantizer_matrix(tj / 2, (tj - 2 * k) / 2, q.nodes) for k in range(tj + 1)], axis=1)
    out.flags.writeable = False
    return out


def spin_tomogram(rho: DensityMatrix, grid: EulerQuadrature | None = None) -> SpinTomogram:
    """omega(m, W) = <m| R(W) rho R(W)^dag |m> on every node of ``grid``."""
    if rho.basis != "spin":
        raise ValueError("spin tomogram needs a spin state")
    q = make_euler_quadrature(rho.j) if grid is None else grid
    D = _rotation_rows(rho.j, q.nodes)
    rot = D @ rho.data @ np.conj(np.swapaxes(D, -1, -2))
    values = _real(np.diagonal(rot, axis1=-2, axis2=-1), "spin tomogram")
    values, clamped = _clamp(values, "spin tomogram")
    return SpinTomogram(rho.label, q, values, {"clamped": clamped})


def reconstruct_spin(tomo: SpinTomogram) -> DensityMatrix:
    """rho = sum_m int dW omega(m, W) D(m, W) on the tomogram's quadrature."""
    q = tomo.quadrature
    if not q.exact_for(tomo.j):
        raise QuadratureError(f"Euler rule of degree {q.max_degree()} is not exact for j={label_str(tomo.tj)}")
    quant = _all_spin_quantizers(tomo.j, q)
    rho = np.einsum("g,gk,gkab->ab", q.weights, tomo.values, quant)
    rho = hermitize(rho)
    tr = float(np.real(np.trace(rho)))
    if abs(tr - 1.0) > 1e-10:
        raise ConsistencyError(f"reconstructed trace {tr:.12f}")
    return DensityMatrix("spin", tomo.tj, rho, meta={"trace_before": tr}, check=False)


# ---------------------------------------------------------------------------
# symplectic
# ---------------------------------------------------------------------------

def hermite_functions(nmax: int, u) -> np.ndarray:
    """Oscillator eigenfunctions psi_0..psi_nmax at u; shape u.shape + (nmax+1,)."""
    u = np.asarray(u, dtype=float)
    out = np.empty(u.shape + (nmax + 1,))
    out[..., 0] = np.pi ** -0.25 * np.exp(-0.5 * u * u)
    if nmax >= 1:
        out[..., 1] = math.sqrt(2.0) * u * out[..., 0]
    for n in range(1, nmax):
        out[..., n + 1] = math.sqrt(2.0 / (n + 1)) * u * out[..., n] - math.sqrt(n / (n + 1)) * out[..., n - 1]
    return out


def _frame_polar(mu, nu):
    mu = np.asarray(mu, dtype=float)
    nu = np.asarray(nu, dtype=float)
    r = np.hypot(mu, nu)
    if np.any(r == 0):
        raise DegenerateFrameError("frame (mu, nu) = (0, 0) has no quadrature eigenbasis")
    return r, np.arctan2(nu, mu)


def quadrature_overlaps(nmax: int, x, mu, nu) -> np.ndarray:
    """<x; mu, nu | n> = e^{-i n theta} psi_n(x / r) / sqrt(r) for n = 0..nmax.

    ``mu`` and ``nu`` broadcast against ``x``; output shape
    broadcast_shape + (nmax+1,).
    """
    r, theta = _frame_polar(mu, nu)
    x, r, theta = np.broadcast_arrays(np.asarray(x, dtype=float), r, theta)
    n = np.arange(nmax + 1)
    return hermite_functions(nmax, x / r) / np.sqrt(r)[..., None] * np.exp(-1j * n * theta[..., None])


def symplectic_dequantizer_overlap(n: int, x, mu, nu):
    """Single overlap <x; mu, nu | n>."""
    if n < 0:
        raise ValueError("n must be non-negative")
    val = quadrature_overlaps(n, x, mu, nu)[..., n]
    return val if np.ndim(val) else complex(val)


@dataclass(frozen=True, eq=False)
class SymplecticTomogram:
    """W(x | mu, nu) sampled on an x grid for a list of frames.

    ``frames`` has shape (F, modes, 2) holding (mu, nu) per mode.
    ``values`` has shape (F, nx) for one mode and (F, nx, nx) for two.
    """

    x: np.ndarray
    frames: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def modes(self) -> int:
        return self.frames.shape[1]

    def x_weights(self) -> np.ndarray:
        return trapezoid_weights(self.x)

    def is_optical(self) -> bool:
        return bool(np.allclose(np.hypot(self.frames[..., 0], self.frames[..., 1]), 1.0, atol=1e-12))

    def optical_angles(self) -> np.ndarray:
        """Angles (F, modes) of an optical tomogram."""
        if not self.is_optical():
            raise ValueError("frames are not on the unit circle")
        return np.mod(np.arctan2(self.frames[..., 1], self.frames[..., 0]), 2 * np.pi)

    def integral(self) -> np.ndarray:
        """Integral over all x variables at every frame."""
        w = self.x_weights()
        if self.modes == 1:
            return self.values @ w
        return np.einsum("fxy,x,y->f", self.values, w, w)

    def to_json(self) -> dict:
        step = float(self.x[1] - self.x[0]) if len(self.x) > 1 else 0.0
        out = {"kind": "symplectic", "modes": self.modes,
               "grid": {"x": [float(self.x[0]), float(self.x[-1]), step],
                        "mu": self.frames[..., 0].tolist(), "nu": self.frames[..., 1].tolist()},
               "values": self.values.tolist()}
        if self.meta:
            out["meta"] = self.meta
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "SymplecticTomogram":
        from .quadrature import line_grid

        g = obj["grid"]
        x = line_grid(*g["x"])
        frames = np.stack([np.asarray(g["mu"], dtype=float), np.asarray(g["nu"], dtype=float)], axis=-1)
        if frames.ndim == 2:
            frames = frames[None]
        return cls(x, frames, np.asarray(obj["values"], dtype=float), obj.get("meta", {}))


def optical_frames(thetas1, thetas2=None) -> np.ndarray:
    """Frames (cos t, sin t) for one mode, or the product grid of two angle sets."""
    t1 = np.asarray(thetas1, dtype=float)
    if thetas2 is None:
        return np.stack([np.cos(t1), np.sin(t1)], axis=-1)[:, None, :]
    t2 = np.asarray(thetas2, dtype=float)
    a, b = np.meshgrid(t1, t2, indexing="ij")
    f1 = np.stack([np.cos(a.ravel()), np.sin(a.ravel())], axis=-1)
    f2 = np.stack([np.cos(b.ravel()), np.sin(b.ravel())], axis=-1)
    return np.stack([f1, f2], axis=1)


def symplectic_tomogram(rho: DensityMatrix, x, frames) -> SymplecticTomogram:
    """W(x | mu, nu) = Tr[rho delta(x - mu q - nu p)], a product over modes for two-mode states.

    ``frames``: (mu, nu) for one mode, a (F, 2) array of frames, or the
    general (F, modes, 2) array.
    """
    x = np.asarray(x, dtype=float)
    frames = np.asarray(frames, dtype=float)
    modes = rho.modes
    if modes == 0:
        raise ValueError("symplectic tomogram needs a Fock state")
    if frames.ndim == 1:
        frames = frames.reshape(1, -1, 2)
    elif frames.ndim == 2:
        frames = frames.reshape(frames.shape[0], -1, 2)
    if frames.shape[1] != modes:
        raise ValueError(f"frames carry {frames.shape[1]} modes, state has {modes}")
    if modes == 1:
        lam, vec = _state_factors(rho)
        s = _support(rho)[0]
        phi = quadrature_overlaps(s, x[None, :], frames[:, 0, 0, None], frames[:, 0, 1, None])
        amp = phi @ vec[: s + 1]
        values = (np.abs(amp) ** 2) @ lam
    else:
        lam, psi = _two_mode_factors(rho)
        s1, s2 = psi.shape[1] - 1, psi.shape[2] - 1
        phi1 = quadrature_overlaps(s1, x[None, :], frames[:, 0, 0, None], frames[:, 0, 1, None])
        phi2 = quadrature_overlaps(s2, x[None, :], frames[:, 1, 0, None], frames[:, 1, 1, None])
        values = np.zeros((frames.shape[0], len(x), len(x)))
        for weight, p in zip(lam, psi):
            amp = np.einsum("fxa,ab,fyb->fxy", phi1, p, phi2)
            values += weight * np.abs(amp) ** 2
    values, clamped = _clamp(values, "symplectic tomogram")
    return SymplecticTomogram(x, frames, values, {"clamped": clamped})


def optical_tomogram(rho: DensityMatrix, x, n_angles: int) -> SymplecticTomogram:
    """Symplectic tomogram on unit frames with equally spaced angles in [0, pi) per mode."""
    t = optical_angles(n_angles)
    frames = optical_frames(t) if rho.modes == 1 else optical_frames(t, t)
    return symplectic_tomogram(rho, x, frames)


RICHARDSON_EPS = (1e-2, 3e-3, 1e-3)


def _richardson_weights(eps) -> np.ndarray:
    """Lagrange weights that extrapolate samples at ``eps`` to eps = 0."""
    eps = np.asarray(eps, dtype=float)
    w = np.ones(len(eps))
    for i in range(len(eps)):
        for k in range(len(eps)):
            if k != i:
                w[i] *= -eps[k] / (eps[i] - eps[k])
    return w


def radial_pattern(nmax: int, y, eps=RICHARDSON_EPS, n_r: int | None = None) -> np.ndarray:
    """P[y, a, b] = int_0^inf r dr m_ab(r) (e^{iry} + (-1)^(a-b) e^{-iry}) e^{-eps r^2}.

    ``m_ab(r)`` is <a|D(r/sqrt2)|b> (real argument).  The damped integrals
    are extrapolated to eps -> 0 through the Richardson weights of ``eps``
    (a single eps value is used as is; ``eps=0`` disables damping).
    """
    y = np.asarray(y, dtype=float)
    rmax = 2.0 * math.sqrt(2.0 * nmax + 2.0) + 10.0
    n_r = n_r or int(max(160, 6 * rmax + 2 * rmax * np.abs(y).max() / math.pi))
    t, wt = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * rmax * (t + 1.0)
    wr = 0.5 * rmax * wt
    m = displacement_matrix(nmax + 1, nmax + 1, r / math.sqrt(2.0)).real  # (nr, a, b)
    diff = np.subtract.outer(np.arange(nmax + 1), np.arange(nmax + 1))
    parity = np.where(diff % 2, -1.0, 1.0)
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    weights = _richardson_weights(eps) if len(eps) > 1 else np.ones(1)
    damp = (weights[:, None] * np.exp(-np.outer(eps, r * r))).sum(axis=0)
    phase = np.exp(1j * np.outer(y, r))  # (ny, nr)
    base = (wr * r * damp)[:, None, None] * m
    plus = np.einsum("yr,rab->yab", phase, base)
    minus = np.einsum("yr,rab->yab", np.conj(phase), base)
    return plus + parity * minus


def reconstruct_from_symplectic(tomo: SymplecticTomogram, cutoff: int, eps=RICHARDSON_EPS,
                                strict: bool = True) -> DensityMatrix:
    """Inverse Radon reconstruction of a one-mode state from optical samples w(x, theta).

    rho_ab = (1/2pi) int_0^pi dtheta int dx w(x, theta) e^{i(a-b)(theta - pi/2)} P_ab(x)
    with the radial pattern P of :func:`radial_pattern`.  Angles must be
    equally spaced on [0, pi).
    """
    if tomo.modes != 1:
        raise ValueError("one-mode reconstruction needs a one-mode tomogram")
    theta = tomo.optical_angles()[:, 0]
    nth = len(theta)
    expected = optical_angles(nth)
    order = np.argsort(theta)
    if not np.allclose(theta[order], expected, atol=1e-9):
        raise QuadratureError("optical angles must be equally spaced on [0, pi)")
    values = tomo.values[order]
    wx = tomo.x_weights()
    pattern = radial_pattern(cutoff, tomo.x, eps)
    diff = np.subtract.outer(np.arange(cutoff + 1), np.arange(cutoff + 1))
    ang = np.exp(1j * diff[None] * (expected[:, None, None] - np.pi / 2))  # (nth, a, b)
    radial = np.einsum("tx,x,xab->tab", values, wx, pattern)
    rho = (np.pi / nth) / (2 * np.pi) * (ang * radial).sum(axis=0)
    rho = hermitize(rho)
    tr = float(np.real(np.trace(rho)))
    out = DensityMatrix("fock1", cutoff, rho / tr, check=False,
                        meta={"trace_before": tr, "eps": list(np.atleast_1d(eps))})
    back = symplectic_tomogram_unchecked(out, tomo.x, tomo.frames)
    resid = float(np.abs(back - tomo.values).max())
    out.meta["roundtrip_residual"] = resid
    if strict and resid > 1e-3:
        raise ConsistencyError(f"ill-conditioned reconstruction, round-trip residual {resid:.3e}")
    return out


def symplectic_tomogram_unchecked(rho: DensityMatrix, x, frames) -> np.ndarray:
    """Tomogram values for a possibly non-positive matrix (no clamping)."""
    frames = np.asarray(frames, dtype=float)
    phi = quadrature_overlaps(rho.cutoff, np.asarray(x)[None, :], frames[:, 0, 0, None], frames[:, 0, 1, None])
    return np.real(np.einsum("fxa,ab,fxb->fx", phi, rho.data, np.conj(phi)))


# ---------------------------------------------------------------------------
# photon number
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PhotonTomogram:
    """w_n(alpha) at a list of amplitude points.

    ``alphas`` has shape (P, modes); ``values`` has shape (P, ncut+1) for
    one mode and (P, ncut+1, ncut+1) for two.  ``weights`` (optional) are
    the d^2alpha (or d^2alpha1 d^2alpha2) quadrature weights of the points.
    """

    alphas: np.ndarray
    values: np.ndarray
    weights: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def modes(self) -> int:
        return self.alphas.shape[1]

    @property
    def ncut(self) -> int:
        return self.values.shape[1] - 1

    def totals(self) -> np.ndarray:
        return self.values.reshape(len(self.alphas), -1).sum(axis=1)

    def to_json(self) -> dict:
        pts = np.stack([self.alphas.real, self.alphas.imag], axis=-1).reshape(len(self.alphas), -1)
        out = {"kind": "photon", "modes": self.modes, "alphas": pts.tolist(), "cutoff": self.ncut,
               "values": self.values.tolist()}
        if self.weights is not None:
            out["weights"] = self.weights.tolist()
        if self.meta:
            out["meta"] = self.meta
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "PhotonTomogram":
        pts = np.asarray(obj["alphas"], dtype=float)
        alphas = pts[:, 0::2] + 1j * pts[:, 1::2]
        w = obj.get("weights")
        return cls(alphas, np.asarray(obj["values"], dtype=float),
                   None if w is None else np.asarray(w, dtype=float), obj.get("meta", {}))


def _as_alpha_points(alphas, modes: int) -> np.ndarray:
    a = np.asarray(alphas, dtype=complex)
    if modes == 1:
        return a.reshape(-1, 1)
    a = a.reshape(-1, 2) if a.ndim != 2 or a.shape[1] != 2 else a
    return a


def _unique_displacements(values: np.ndarray, rows: int, cols: int, scale: float = 1.0):
    uniq, inv = np.unique(values, return_inverse=True)
    return displacement_matrix(rows, cols, scale * uniq), inv


def photon_tomogram(rho: DensityMatrix, alphas, ncut: int | None = None, weights=None,
                    tail_tol: float | None = 1e-6) -> PhotonTomogram:
    """w_n(alpha) = <n| D(alpha) rho D(alpha)^dag |n> for n = 0..ncut (per mode)."""
    modes = rho.modes
    if modes == 0:
        raise ValueError("photon tomogram needs a Fock state")
    pts = _as_alpha_points(alphas, modes)
    ncut = rho.cutoff if ncut is None else ncut
    if modes == 1:
        lam, vec = _state_factors(rho)
        s = _support(rho)[0]
        M, inv = _unique_displacements(pts[:, 0], ncut + 1, s + 1)
        amp = M @ vec[: s + 1]  # (U, n, k)
        values = ((np.abs(amp) ** 2) @ lam)[inv]
    else:
        lam, psi = _two_mode_factors(rho)
        M1, inv1 = _unique_displacements(pts[:, 0], ncut + 1, psi.shape[1])
        M2, inv2 = _unique_displacements(pts[:, 1], ncut + 1, psi.shape[2])
        values = np.zeros((len(pts), ncut + 1, ncut + 1))
        for weight, p in zip(lam, psi):
            left = M1 @ p  # (U1, n1, b)
            for lo in range(0, len(pts), CHUNK):
                sl = slice(lo, lo + CHUNK)
                amp = np.einsum("pnb,pmb->pnm", left[inv1[sl]], M2[inv2[sl]])
                values[sl] += weight * (amp.real ** 2 + amp.imag ** 2)
    values, clamped = _clamp(values, "photon tomogram")
    meta = {"clamped": clamped}
    deficit = 1.0 - values.reshape(len(pts), -1).sum(axis=1)
    meta["max_tail"] = float(deficit.max())
    if tail_tol is not None and deficit.max() > tail_tol:
        raise CutoffError(f"photon-number cutoff {ncut} loses {deficit.max():.3e} of the probability")
    w = None if weights is None else np.asarray(weights, dtype=float)
    return PhotonTomogram(pts, values, w, meta)


def husimi_q(rho: DensityMatrix, alphas, convention: str = "unit") -> np.ndarray:
    """Coherent-state expectation <alpha|rho|alpha> for a one-mode state.

    ``convention="unit"`` returns <alpha|rho|alpha>, the normalisation under
    which w_0(-alpha) = Q(alpha) holds exactly; ``"povm"`` divides by pi
    (POVM |alpha><alpha|/pi).
    """
    if rho.basis != "fock1":
        raise ValueError("Q function implemented for one mode")
    a = np.asarray(alphas, dtype=complex)
    n = np.arange(rho.cutoff + 1)
    from scipy.special import gammaln

    mag = np.abs(a)[..., None]
    with np.errstate(divide="ignore"):
        logm = np.where(mag > 0, np.log(np.where(mag > 0, mag, 1.0)), 0.0)
    coeff = np.exp(-0.5 * mag ** 2 + n * logm - 0.5 * gammaln(n + 1)) * np.exp(1j * n * np.angle(a)[..., None])
    coeff = np.where((mag == 0) & (n > 0), 0.0, coeff)
    q = np.real(np.einsum("...a,ab,...b->...", np.conj(coeff), rho.data, coeff))
    if convention == "povm":
        return q / np.pi
    if convention != "unit":
        raise ValueError("convention must be 'unit' or 'povm'")
    return q


def ordering_ratio(s: float) -> float:
    """g(s) = (s - 1)/(s + 1); the l-series converge only for 0 < s < 1."""
    if not 0.0 < s < 1.0:
        raise DomainError(f"ordering parameter s={s} outside (0, 1): the l-series diverges")
    return (s - 1.0) / (s + 1.0)


def photon_quantizer_prefactor(s: float) -> float:
    return 4.0 / (math.pi * (1.0 - s * s))


def l_truncation(g: float, base: int, alpha_max: float, tol: float = 1e-14) -> int:
    """Last l kept in sum_l g^l |l><l| after displacement by |alpha| <= alpha_max."""
    spread = alpha_max ** 2 + 8.0 * alpha_max
    return int(base + math.ceil(spread) + math.ceil(math.log(tol) / math.log(abs(g))))


def displaced_geometric(alphas, s: float, dim: int) -> np.ndarray:
    """Q(alpha) = D(alpha)^dag g^N D(alpha) restricted to |a>, |b> with a, b < dim."""
    g = ordering_ratio(s)
    a = np.asarray(alphas, dtype=complex)
    L = l_truncation(g, dim, float(np.abs(a).max()) if a.size else 0.0)
    Mm = displacement_matrix(dim, L + 1, -a)  # <a|D(-alpha)|l>
    gl = g ** np.arange(L + 1)
    return np.einsum("...al,l,...bl->...ab", Mm, gl, np.conj(Mm))


def photon_quantizer_matrix(n, alpha, s: float, cutoff: int) -> np.ndarray:
    """One-mode quantizer 4/(pi(1-s^2)) g^{-n} D(-alpha) [sum_l g^l |l><l|] D(-alpha)^dag.

    ``n`` and ``alpha`` broadcast; output shape broadcast + (cutoff+1, cutoff+1).
    """
    g = ordering_ratio(s)
    n = np.asarray(n)
    if np.any(n < 0):
        raise ValueError("photon numbers must be non-negative")
    Q = displaced_geometric(alpha, s, cutoff + 1)
    return photon_quantizer_prefactor(s) * (g ** (-n.astype(float)))[..., None, None] * Q


def photon_series_error(values: np.ndarray, alphas: np.ndarray, g: float, tail: int = 3) -> np.ndarray:
    """Error scale of F(alpha) = sum_n g^{-n} w_n(alpha) per point.

    Two sources: the truncated tail (the series peaks near
    n ~ |alpha|^2/|g|, so the last retained terms must be small) and the
    alternating-sum amplification of the relative error of each w_n, which
    for log-space evaluation is about eps (n + |alpha|^2 + 10).
    """
    n = np.arange(values.shape[-1], dtype=float)
    terms = np.abs(values) * np.abs(g) ** -n
    rel = np.finfo(float).eps * (n + np.abs(alphas[:, :1]) ** 2 + 10.0)
    flat = terms.reshape(len(values), -1)
    return flat[:, -tail:].max(axis=1) + (terms * rel.reshape((len(values), -1) + (1,) * (terms.ndim - 2))
                                         ).reshape(len(values), -1).sum(axis=1)


def reconstruct_from_photon(tomo: PhotonTomogram, s: float, cutoff: int, tol: float = 1e-2) -> DensityMatrix:
    """rho = sum_n int d^2alpha w_n(alpha) D_n(alpha) for a one-mode tomogram with weights.

    The n-sum is taken first: F(alpha) = sum_n g^{-n} w_n(alpha).  An
    element-wise error bound built from :func:`photon_series_error` is
    stored in ``meta["error_bound"]``; above ``tol`` the grid is too wide
    for the tomogram cutoff or for double precision (shrink the radius,
    use a disk, or raise the cutoff) and CutoffError is raised.
    """
    if tomo.modes != 1:
        raise ValueError("one-mode reconstruction needs a one-mode tomogram")
    if tomo.weights is None:
        raise QuadratureError("tomogram carries no d^2alpha weights")
    g = ordering_ratio(s)
    c = photon_quantizer_prefactor(s)
    F = tomo.values @ (g ** -np.arange(tomo.ncut + 1, dtype=float))
    Q = displaced_geometric(tomo.alphas[:, 0], s, cutoff + 1)
    err = c * tomo.weights * photon_series_error(tomo.values, tomo.alphas, g)
    bound = float(np.einsum("p,pab->ab", err, np.abs(Q)).max())
    if bound > tol:
        worst = tomo.alphas[int(np.argmax(err * np.abs(Q).max(axis=(1, 2)))), 0]
        raise CutoffError(f"photon-number series unreliable (error bound {bound:.2e}, worst at alpha={worst:.3f}, "
                          f"tomogram cutoff {tomo.ncut})")
    rho = c * np.einsum("p,p,pab->ab", tomo.weights, F, Q)
    rho = hermitize(rho)
    tr = float(np.real(np.trace(rho)))
    return DensityMatrix("fock1", cutoff, rho / tr, check=False,
                         meta={"trace_before": tr, "s": s, "error_bound": bound})


# ---------------------------------------------------------------------------
# Wigner
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WignerGrid:
    """W(alpha) at points of shape (P, modes), optionally with quadrature weights."""

    alphas: np.ndarray
    values: np.ndarray
    weights: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def modes(self) -> int:
        return self.alphas.shape[1]

    def integral(self) -> float:
        if self.weights is None:
            raise QuadratureError("grid carries no weights")
        return float(self.weights @ self.values)

    def to_json(self) -> dict:
        pts = np.stack([self.alphas.real, self.alphas.imag], axis=-1).reshape(len(self.alphas), -1)
        out = {"kind": "wigner", "modes": self.modes, "alphas": pts.tolist(), "values": self.values.tolist(),
               "convention": {"dequantizer": "D(2a)P/pi", "quantizer_constant": WIGNER_QUANTIZER_CONST}}
        if self.weights is not None:
            out["weights"] = self.weights.tolist()
        if self.meta:
            out["meta"] = self.meta
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "WignerGrid":
        pts = np.asarray(obj["alphas"], dtype=float)
        w = obj.get("weights")
        return cls(pts[:, 0::2] + 1j * pts[:, 1::2], np.asarray(obj["values"], dtype=float),
                   None if w is None else np.asarray(w, dtype=float), obj.get("meta", {}))


def displaced_parity(alphas, dim: int) -> np.ndarray:
    """<a| D(2 alpha) P |b> = M(a, b; 2 alpha) (-1)^b for a, b < dim."""
    M = displacement_matrix(dim, dim, 2.0 * np.asarray(alphas, dtype=complex))
    return M * np.where(np.arange(dim) % 2, -1.0, 1.0)


def wigner_function(rho: DensityMatrix, alphas, weights=None) -> WignerGrid:
    """W(alpha) = Tr[rho D(2 alpha) P] / pi per mode (product over modes)."""
    modes = rho.modes
    if modes == 0:
        raise ValueError("Wigner function needs a Fock state")
    pts = _as_alpha_points(alphas, modes)
    if modes == 1:
        s = _support(rho)[0]
        uniq, inv = np.unique(pts[:, 0], return_inverse=True)
        K = displaced_parity(uniq, s + 1)
        vals = np.einsum("ab,uba->u", rho.data[: s + 1, : s + 1], K)[inv]
        values = WIGNER_DEQUANTIZER_CONST * vals
    else:
        lam, psi = _two_mode_factors(rho)
        u1, i1 = np.unique(pts[:, 0], return_inverse=True)
        u2, i2 = np.unique(pts[:, 1], return_inverse=True)
        K1 = displaced_parity(u1, psi.shape[1])
        K2 = displaced_parity(u2, psi.shape[2])
        values = np.zeros(len(pts), dtype=complex)
        for weight, p in zip(lam, psi):
            left = K1 @ p  # (U1, a1, b2)
            val = np.einsum("ac,pab,pcb->p", np.conj(p), left[i1], K2[i2])
            values += weight * val
        values = WIGNER_DEQUANTIZER_CONST ** 2 * values
    values = _real(np.asarray(values), "Wigner function")
    w = None if weights is None else np.asarray(weights, dtype=float)
    return WignerGrid(pts, values, w, {"dequantizer_constant": WIGNER_DEQUANTIZER_CONST})


def wigner_quantizer_matrix(alpha, cutoff: int) -> np.ndarray:
    """C_W D(2 alpha) P on the truncated space (C_W calibrated, see module constants)."""
    return WIGNER_QUANTIZER_CONST * displaced_parity(alpha, cutoff + 1)


def reconstruct_from_wigner(grid: WignerGrid, cutoff: int, trace_tol: float = 1e-2) -> DensityMatrix:
    """rho = int d^2alpha W(alpha) C_W D(2 alpha) P for a one-mode grid with weights."""
    if grid.modes != 1:
        raise ValueError("one-mode reconstruction needs a one-mode grid")
    if grid.weights is None:
        raise QuadratureError("grid carries no d^2alpha weights")
    K = wigner_quantizer_matrix(grid.alphas[:, 0], cutoff)
    rho = hermitize(np.einsum("p,p,pab->ab", grid.weights, grid.values, K))
    tr = float(np.real(np.trace(rho)))
    if abs(tr - 1.0) > trace_tol:
        raise ConsistencyError(f"Wigner reconstruction trace {tr:.6f} deviates from 1 by more than {trace_tol}")
    return DensityMatrix("fock1", cutoff, rho / tr, check=False, meta={"trace_before": tr})
