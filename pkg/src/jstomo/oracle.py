"""Brute-force verification by explicit operators and density matrices.

Two independent routes compute every cross-representation quantity:

* trace route: kernels as Tr[quantizer x dequantizer] with operators built by
  matrix exponentials on a padded Fock space (spin rotations from exp of the
  spin matrices, the spin quantizer as the canonical dual of the
  dequantizer frame, delta dequantizers from a Fourier integral over k);
* pipeline route: a spin tomogram becomes a density matrix, is embedded into
  two modes, and the target tomogram is evaluated from its dequantizer.

This module never imports ``jstomo.kernels`` or ``jstomo.transforms`` at
import time; the transform under test is looked up by name when a
verification runs.
"""
from __future__ import annotations

import importlib
import json
import math
import time
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .errors import JstomoError
from .hilbert import (DensityMatrix, fidelity, fock_state, js_forward, js_inverse, make_paper_state,
                      random_spin_state)
from .quadrature import euler_quadrature
from .specfun import twice

PAD = 40
# the photon quantizer is not trace class; its trace against a delta needs more room
QUANTIZER_PAD = 60
ORACLE_CUTOFF = 24


# ---------------------------------------------------------------------------
# operators on a padded Fock space
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def ladder(dim: int):
    """Annihilation operator and quadratures q, p on a dim-dimensional Fock space."""
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    ad = a.conj().T
    q = (a + ad) / math.sqrt(2.0)
    p = (a - ad) / (1j * math.sqrt(2.0))
    return a, q, p


def displacement_op(alpha: complex, keep: int, pad: int = PAD) -> np.ndarray:
    """exp(alpha a^dag - alpha* a) on keep+pad levels, cropped to keep x keep."""
    a, _, _ = ladder(keep + pad)
    return expm(alpha * a.conj().T - np.conj(alpha) * a)[:keep, :keep]


def parity_op(keep: int) -> np.ndarray:
    return np.diag((-1.0) ** np.arange(keep)).astype(complex)


def weyl_op(x: float, mu: float, nu: float, keep: int, pad: int = PAD) -> np.ndarray:
    """exp(i(x - mu q - nu p)) cropped."""
    _, q, p = ladder(keep + pad)
    return expm(1j * (x * np.eye(keep + pad) - mu * q - nu * p))[:keep, :keep]


def delta_op(x: float, mu: float, nu: float, keep: int) -> np.ndarray:
    """delta(x - mu q - nu p) = (1/2pi) int dk e^{ik(x - mu q - nu p)} by Gauss-Legendre in k.

    Elements between levels below ``keep`` decay like exp(-k^2 r^2/4) times
    a polynomial of degree ~2 keep (r^2 = mu^2 + nu^2), which fixes the
    k-range; the padded space must hold D(xi)|keep> for the largest
    |xi| = k r / sqrt2 reached, and the node count follows the oscillation
    of e^{ik(x - lambda)}.
    """
    r = math.hypot(mu, nu)
    if r == 0:
        raise JstomoError("delta operator needs (mu, nu) != (0, 0)")
    kr = 2.0 * math.sqrt(40.0 + 2.0 * keep)
    xi = kr / math.sqrt(2.0)
    dim = int(keep + xi * xi + 10 * xi + 20)
    _, q, p = ladder(dim)
    lam, vec = np.linalg.eigh(mu * q + nu * p)
    kmax = kr / r
    nodes = int(kmax * (abs(x) + np.abs(lam).max()) / 2.0) + 64
    t, w = np.polynomial.legendre.leggauss(nodes)
    k = kmax * t
    w = kmax * w
    # exp(-ikX) = V exp(-ik lam) V^dag; integrate the phase first
    phase = (w[:, None] * np.exp(1j * np.outer(k, x - lam))).sum(axis=0) / (2 * math.pi)
    top = vec[:keep]
    return (top * phase) @ top.conj().T


def photon_dequantizer_op(n: int, alpha: complex, keep: int) -> np.ndarray:
    """D^dag(alpha) |n><n| D(alpha)."""
    Dm = displacement_op(-alpha, keep + PAD // 2)  # D(-alpha) = D^dag(alpha)
    col = Dm[:keep, n]
    return np.outer(col, col.conj())


def photon_quantizer_op(n: int, alpha: complex, s: float, keep: int, pad: int = PAD) -> np.ndarray:
    """4/(pi(1-s^2)) g^{-n} D(-alpha) g^N D(alpha) with g^N diagonal on the padded space."""
    g = (s - 1.0) / (s + 1.0)
    a, _, _ = ladder(keep + pad)
    D = expm(alpha * a.conj().T - np.conj(alpha) * a)
    gN = np.diag(g ** np.arange(keep + pad))
    full = D.conj().T @ gN @ D
    return 4.0 / (math.pi * (1.0 - s * s)) * g ** (-n) * full[:keep, :keep]


def wigner_dequantizer_op(alpha: complex, keep: int) -> np.ndarray:
    return displacement_op(2 * alpha, keep) @ parity_op(keep) / math.pi


def wigner_quantizer_op(alpha: complex, keep: int, const: float = 4.0) -> np.ndarray:
    return const * displacement_op(2 * alpha, keep) @ parity_op(keep)


# ---------------------------------------------------------------------------
# spin operators
# ---------------------------------------------------------------------------

@lru_cache(maxsize=16)
def spin_matrices(tj: int):
    """J_z, J_y in the basis m = j..-j."""
    j = tj / 2
    m = j - np.arange(tj + 1)
    jz = np.diag(m).astype(complex)
    jp = np.zeros((tj + 1, tj + 1), dtype=complex)
    for k in range(1, tj + 1):
        jp[k - 1, k] = math.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    jy = (jp - jp.conj().T) / 2j
    return jz, jy


def rotation_op(tj: int, omega) -> np.ndarray:
    """R(alpha, beta, gamma) = exp(-i alpha J_z) exp(-i beta J_y) exp(-i gamma J_z)."""
    jz, jy = spin_matrices(tj)
    a, b, c = omega
    return expm(-1j * a * jz) @ expm(-1j * b * jy) @ expm(-1j * c * jz)


def spin_dequantizer_op(tj: int, m, omega) -> np.ndarray:
    """R^dag |m><m| R."""
    k = (tj - twice(m)) // 2
    row = rotation_op(tj, omega)[k]
    return np.outer(row.conj(), row)


@lru_cache(maxsize=8)
def _frame_inverse(tj: int) -> np.ndarray:
    """Inverse of the frame operator S[X] = sum_m int dW U(m,W) Tr[U(m,W) X] (as d^2 x d^2 matrix)."""
    d = tj + 1
    q = euler_quadrature(tj + 2, 2 * tj + 3)
    S = np.zeros((d * d, d * d), dtype=complex)
    for node, w in zip(q.nodes, q.weights):
        R = rotation_op(tj, node)
        for k in range(d):
            U = np.outer(R[k].conj(), R[k]).reshape(-1)
            # S vec(X) = sum w U Tr[U X] = sum w vec(U) (vec(U^T) . vec(X))
            S += w * np.outer(U, U.reshape(d, d).T.reshape(-1))
    return np.linalg.inv(S)


def spin_quantizer_op(tj: int, m, omega) -> np.ndarray:
    """Canonical dual of the dequantizer frame: S^{-1}[U(m, W)]."""
    d = tj + 1
    U = spin_dequantizer_op(tj, m, omega)
    return (_frame_inverse(tj) @ U.reshape(-1)).reshape(d, d)


def embed_spin_op(op: np.ndarray, cutoff: int = ORACLE_CUTOFF) -> np.ndarray:
    """Place a spin-j operator on the sector |j+m, j-m> of the two-mode space."""
    tj = op.shape[0] - 1
    idx = np.array([(tj - k) * (cutoff + 1) + k for k in range(tj + 1)])
    out = np.zeros(((cutoff + 1) ** 2,) * 2, dtype=complex)
    out[np.ix_(idx, idx)] = op
    return out


def sector_projector(tj: int, cutoff: int = ORACLE_CUTOFF) -> np.ndarray:
    return embed_spin_op(np.eye(tj + 1), cutoff)


def two_mode_trace(op1: np.ndarray, op2: np.ndarray, spin_op_2mode: np.ndarray) -> complex:
    return complex(np.trace(np.kron(op1, op2) @ spin_op_2mode))


# ---------------------------------------------------------------------------
# trace-definition kernels
# ---------------------------------------------------------------------------

def trace_sympl_to_spin(j, m, omega, x, mu, nu, cutoff: int = ORACLE_CUTOFF) -> complex:
    tj = twice(j)
    ops = [weyl_op(x[k], mu[k], nu[k], cutoff + 1) / (2 * math.pi) for k in range(2)]
    return two_mode_trace(ops[0], ops[1], embed_spin_op(spin_dequantizer_op(tj, m, omega), cutoff))


def trace_spin_to_sympl(j, m, omega, x, mu, nu, cutoff: int = ORACLE_CUTOFF) -> complex:
    tj = twice(j)
    ops = [delta_op(x[k], mu[k], nu[k], cutoff + 1) for k in range(2)]
    return two_mode_trace(ops[0], ops[1], embed_spin_op(spin_quantizer_op(tj, m, omega), cutoff))


def trace_denom_sympl(j, x, mu, nu, cutoff: int = ORACLE_CUTOFF) -> complex:
    ops = [weyl_op(x[k], mu[k], nu[k], cutoff + 1) / (2 * math.pi) for k in range(2)]
    return two_mode_trace(ops[0], ops[1], sector_projector(twice(j), cutoff))


def trace_photon_to_spin(j, m, omega, n, alpha, s, cutoff: int = ORACLE_CUTOFF) -> complex:
    tj = twice(j)
    ops = [photon_quantizer_op(n[k], alpha[k], s, cutoff + 1) for k in range(2)]
    return two_mode_trace(ops[0], ops[1], embed_spin_op(spin_dequantizer_op(tj, m, omega), cutoff))


def trace_spin_to_photon(j, m, omega, n, alpha, cutoff: int = ORACLE_CUTOFF) -> complex:
    tj = twice(j)
    ops = [photon_dequantizer_op(n[k], alpha[k], cutoff + 1) for k in range(2)]
    return two_mode_trace(ops[0], ops[1], embed_spin_op(spin_quantizer_op(tj, m, omega), cutoff))


def trace_denom_photon(j, n, alpha, s, cutoff: int = ORACLE_CUTOFF) -> complex:
    ops = [photon_quantizer_op(n[k], alpha[k], s, cutoff + 1) for k in range(2)]
    return two_mode_trace(ops[0], ops[1], sector_projector(twice(j), cutoff))


def trace_wigner_to_spin(j, m, omega, alpha, cutoff: int = ORACLE_CUTOFF) -> complex:
    tj = twice(j)
    ops = [wigner_quantizer_op(alpha[k], cutoff + 1) for k in range(2)]
    return two_mode_trace(ops[0], ops[1], embed_spin_op(spin_dequantizer_op(tj, m, omega), cutoff))


def trace_spin_to_wigner(j, m, omega, alpha, cutoff: int = ORACLE_CUTOFF) -> complex:
    tj = twice(j)
    ops = [wigner_dequantizer_op(alpha[k], cutoff + 1) for k in range(2)]
    return two_mode_trace(ops[0], ops[1], embed_spin_op(spin_quantizer_op(tj, m, omega), cutoff))


def trace_denom_wigner(j, alpha, cutoff: int = ORACLE_CUTOFF) -> complex:
    ops = [wigner_quantizer_op(alpha[k], cutoff + 1) for k in range(2)]
    return two_mode_trace(ops[0], ops[1], sector_projector(twice(j), cutoff))


def trace_sympl_to_photon(x, mu, nu, n, alpha, cutoff: int = ORACLE_CUTOFF) -> complex:
    W = weyl_op(x, mu, nu, cutoff + 1) / (2 * math.pi)
    return complex(np.trace(W @ photon_dequantizer_op(n, alpha, cutoff + 1)))


def trace_photon_to_sympl(x, mu, nu, n, alpha, s, cutoff: int = ORACLE_CUTOFF) -> complex:
    """Tr[D_n(alpha) delta(x - mu q - nu p)] on a larger space (the quantizer is not trace class
    uniformly in the cutoff, so both factors are kept on cutoff + QUANTIZER_PAD levels)."""
    keep = cutoff + 1 + QUANTIZER_PAD
    Q = photon_quantizer_op(n, alpha, s, keep)
    return complex(np.trace(Q @ delta_op(x, mu, nu, keep)))


# ---------------------------------------------------------------------------
# pipeline route: states, reference tomograms, reports
# ---------------------------------------------------------------------------

CASE_CUTOFF = 8
TRANSFORMS = ("spin_to_symplectic", "spin_to_photon", "spin_to_wigner",
              "symplectic_to_spin", "photon_to_spin", "wigner_to_spin",
              "photon_to_symplectic", "symplectic_to_photon")
# kernel-based results are compared against the pipeline at these levels
DEFAULT_TOLERANCES = {
    "spin_to_symplectic": 1e-6, "spin_to_photon": 1e-6, "spin_to_wigner": 1e-6,
    "symplectic_to_spin": 1e-4, "photon_to_spin": 1e-4, "wigner_to_spin": 1e-4,
    "photon_to_symplectic": 1e-4, "symplectic_to_photon": 1e-4,
}
DEFAULT_GRIDS = {
    "spin_to_symplectic": {"x": [-5.0, 5.0, 0.25], "mu": [[1.0, 1.0], [1.0, 0.6]], "nu": [[1.0, 1.0], [0.0, 0.8]]},
    "spin_to_photon": {"alpha_diag": [0.0, 0.5, 1.0, 1.5],
                       "alphas": [[[0.3, -0.2], [-0.7, 0.4]], [[0.0, 1.1], [0.5, 0.0]]]},
    "spin_to_wigner": {"alpha_diag": [0.0, 0.25, 0.5, 1.0],
                       "alphas": [[[0.3, -0.2], [-0.7, 0.4]], [[0.0, 1.1], [0.5, 0.0]]]},
    "symplectic_to_spin": {"x": [-6.0, 6.0, 0.1], "angles": "8j+4"},
    # the alternating photon series needs a small s; the ball radius and
    # cutoff grow with j (the series peaks near n ~ |alpha|^2/|g|)
    "photon_to_spin": {"s": 0.1, "spacing": 0.3, "radius": {"0": 1.8, "1/2": 2.2, "1": 2.5, "3/2": 2.7},
                       "ncut": {"0": 20, "1/2": 24, "1": 28, "3/2": 32}},
    "wigner_to_spin": {"radius": 2.75, "spacing": 0.25},
    "photon_to_symplectic": {"s": 0.1, "spacing": 0.1, "ncut": 60, "x": [-5.0, 5.0, 0.25],
                             "mu": [1.0, 0.6, 1.0], "nu": [0.0, 0.8, 1.0]},
    "symplectic_to_photon": {"x": [-7.0, 7.0, 0.1], "angles": 16, "ncut": 6,
                             "alphas": [[0.0, 0.0], [0.3, 0.2], [0.0, -0.5], [1.2, 0.0]]},
}
RANDOM_PER_J = 5
KERNEL_DRAWS = 100
KERNEL_ATOL = 1e-6
KERNEL_RTOL = 1e-8
REL_FLOOR = 1e-6  # relative errors are only meaningful above the absolute tolerance


def _transforms():
    return importlib.import_module("jstomo.transforms")


def _kernels():
    return importlib.import_module("jstomo.kernels")


def _tomography():
    return importlib.import_module("jstomo.tomography")


@dataclass
class StateCase:
    """A test state seen from every side: spin j, two modes on sector 2j, and mode 1 alone."""

    state_id: str
    spin: DensityMatrix
    two_mode: DensityMatrix
    one_mode: DensityMatrix

    @property
    def j(self) -> float:
        return self.spin.j


def reduce_to_mode1(rho2: DensityMatrix) -> DensityMatrix:
    n = rho2.cutoff + 1
    r = np.einsum("akbk->ab", rho2.data.reshape(n, n, n, n))
    return DensityMatrix.fock1(rho2.cutoff, r, check=False)


def resolve_state(spec: str, cutoff: int = CASE_CUTOFF) -> StateCase:
    """``paper:<name or j>``, ``random:<j>:<seed>`` or ``fock:<n>``.

    A Fock state |n> stands for the two-mode state |n, 0>, i.e. spin j = n/2
    with m = j, and for |n> itself on the one-mode side.
    """
    kind, _, rest = spec.partition(":")
    try:
        if kind == "paper":
            rho_j = make_paper_state(rest).density()
        elif kind == "random":
            j, seed = rest.split(":")
            rho_j = random_spin_state(j, int(seed)).density()
        elif kind == "fock":
            n = int(rest)
            vec = np.zeros(n + 1)
            vec[0] = 1.0
            rho_j = DensityMatrix.pure("spin", n, vec)
        else:
            raise ValueError(f"unknown state kind {kind!r}")
    except (ValueError, KeyError) as exc:
        raise JstomoError(f"cannot resolve state spec {spec!r}: {exc}") from exc
    rho2 = js_inverse(rho_j, cutoff)
    rho1 = fock_state(int(rest), cutoff) if kind == "fock" else reduce_to_mode1(rho2)
    return StateCase(spec, rho_j, rho2, rho1)


def default_states(seed: int = 0) -> list[str]:
    states = ["paper:j_half", "paper:j_one", "paper:j_three_half"]
    for tj in (1, 2, 3):
        j = f"{tj}/2" if tj % 2 else str(tj // 2)
        states += [f"random:{j}:{seed * 1000 + 10 * tj + i}" for i in range(RANDOM_PER_J)]
    return states + ["fock:0", "fock:1"]


@dataclass
class VerificationReport:
    transform: str
    state_id: str
    grid: dict
    max_abs_error: float
    max_rel_error: float
    tolerance: float
    passed: bool
    worst: list = field(default_factory=list)
    seconds: float = 0.0
    error: str | None = None

    def to_json(self) -> dict:
        # timings stay out of the serialised report so reruns are byte-identical
        out = asdict(self)
        out.pop("seconds")
        return out

    def line(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def compare(transform: str, state_id: str, grid: dict, got, want, tolerance: float,
            points=None, rel_tolerance: float | None = None) -> VerificationReport:
    """Pointwise comparison.  Passing means every error is strictly below tolerance
    (so a zero tolerance never passes)."""
    got = np.asarray(got).ravel()
    want = np.asarray(want).ravel()
    if got.shape != want.shape:
        raise JstomoError(f"{transform}: shape mismatch {got.shape} vs {want.shape}")
    err = np.abs(got - want)
    big = np.abs(want) > REL_FLOOR
    rel = np.where(big, err / np.where(big, np.abs(want), 1.0), 0.0)
    max_abs = float(err.max()) if err.size else 0.0
    max_rel = float(rel.max()) if rel.size else 0.0
    passed = max_abs < tolerance and (rel_tolerance is None or max_rel < rel_tolerance)
    worst = []
    for i in np.argsort(-err, kind="stable")[:10]:
        item = {"index": int(i), "abs_error": float(err[i]),
                "kernel": _num(got[i]), "oracle": _num(want[i])}
        if points is not None:
            item["point"] = points[i]
        worst.append(item)
    return VerificationReport(transform, state_id, grid, max_abs, max_rel, tolerance, bool(passed), worst)


def _num(v):
    v = complex(v)
    return v.real if v.imag == 0 else [v.real, v.imag]


def _pairs(grid: dict) -> np.ndarray:
    pts = [[a, a] for a in grid.get("alpha_diag", [])]
    pts += [[complex(*p[0]), complex(*p[1])] for p in grid.get("alphas", [])]
    return np.asarray(pts, dtype=complex).reshape(-1, 2)


def _per_j(value, j):
    if isinstance(value, dict):
        key = str(int(j)) if float(j).is_integer() else f"{int(2 * j)}/2"
        return value[key]
    return value


def _line(spec):
    from .quadrature import line_grid

    return line_grid(*spec)


def _restricted(case: StateCase) -> DensityMatrix:
    """The unnormalised sector block re-embedded into the two-mode space."""
    from .hilbert import project_sector, sector_indices

    block, _ = project_sector(case.two_mode, case.j)
    idx = sector_indices(case.j, case.two_mode.cutoff)
    out = np.zeros_like(case.two_mode.data)
    out[np.ix_(idx, idx)] = block
    return DensityMatrix.fock2(case.two_mode.cutoff, out, check=False)


def _reference_spin(case: StateCase, euler) -> np.ndarray:
    """Spin tomogram of the renormalised sector block of the source state."""
    T = _tomography()
    return T.spin_tomogram(js_forward(case.two_mode, case.j), euler).values


# each pipeline returns (kernel-path values, pipeline values, grid summary)

def _run_spin_to_symplectic(case, grid):
    T, X = _tomography(), _transforms()
    x = _line(grid["x"])
    frames = np.stack([np.asarray(grid["mu"], float), np.asarray(grid["nu"], float)], axis=-1)
    got = X.spin_to_symplectic(T.spin_tomogram(case.spin), x, frames).values
    want = T.symplectic_tomogram(_restricted(case), x, frames).values
    return got, want, {**grid, "points": int(got.size)}


def _run_spin_to_photon(case, grid):
    T, X = _tomography(), _transforms()
    pts = _pairs(grid)
    tj = int(round(2 * case.j))
    got = X.spin_to_photon(T.spin_tomogram(case.spin), pts).values
    want = T.photon_tomogram(_restricted(case), pts, tj, tail_tol=None).values
    return got, want, {**grid, "points": int(got.size)}


def _run_spin_to_wigner(case, grid):
    T, X = _tomography(), _transforms()
    pts = _pairs(grid)
    got = X.spin_to_wigner(T.spin_tomogram(case.spin), pts).values
    want = T.wigner_function(_restricted(case), pts).values
    return got, want, {**grid, "points": int(got.size)}


def _run_symplectic_to_spin(case, grid):
    from .quadrature import make_euler_quadrature, optical_angles

    T, X = _tomography(), _transforms()
    x = _line(grid["x"])
    n_ang = grid["angles"]
    if n_ang == "8j+4":
        n_ang = int(round(8 * case.j)) + 4
    t = optical_angles(n_ang)
    tomo = T.symplectic_tomogram(case.two_mode, x, T.optical_frames(t, t))
    euler = make_euler_quadrature(case.j)
    got = X.symplectic_to_spin(tomo, case.j, euler=euler).values
    return got, _reference_spin(case, euler), {**grid, "angles": n_ang, "euler_nodes": euler.size}


def _run_photon_to_spin(case, grid):
    from .quadrature import ball_pairs, make_euler_quadrature, plane_quadrature

    T, X = _tomography(), _transforms()
    radius, ncut = _per_j(grid["radius"], case.j), _per_j(grid["ncut"], case.j)
    q = plane_quadrature(radius, grid["spacing"], disk=True)
    pts, w = ball_pairs(q, radius)
    tomo = T.photon_tomogram(case.two_mode, pts, ncut, weights=w, tail_tol=None)
    euler = make_euler_quadrature(case.j)
    got = X.photon_to_spin(tomo, case.j, grid["s"], euler=euler).values
    summary = {"s": grid["s"], "spacing": grid["spacing"], "radius": radius, "ncut": ncut, "pairs": len(pts)}
    return got, _reference_spin(case, euler), summary


def _run_wigner_to_spin(case, grid):
    from .quadrature import make_euler_quadrature, plane_quadrature, product_pairs

    T, X = _tomography(), _transforms()
    q = plane_quadrature(grid["radius"], grid["spacing"], disk=True)
    pts, w = product_pairs(q)
    wg = T.wigner_function(case.two_mode, pts, weights=w)
    euler = make_euler_quadrature(case.j)
    got = X.wigner_to_spin(wg, case.j, euler=euler).values
    return got, _reference_spin(case, euler), {**grid, "pairs": len(pts)}


def _run_photon_to_symplectic(case, grid):
    from .quadrature import plane_quadrature

    T, X = _tomography(), _transforms()
    s = grid["s"]
    q = plane_quadrature(X.photon_plane_radius(s), grid["spacing"], disk=True)
    tomo = T.photon_tomogram(case.one_mode, q.nodes[:, None], grid["ncut"], weights=q.weights, tail_tol=None)
    x = _line(grid["x"])
    frames = np.stack([np.asarray(grid["mu"], float), np.asarray(grid["nu"], float)], axis=-1)
    got = X.photon_to_symplectic(tomo, x, frames, s).values
    want = T.symplectic_tomogram(case.one_mode, x, frames[:, None, :]).values
    return got, want, {**grid, "radius": q.radius, "points": q.size}


def _run_symplectic_to_photon(case, grid):
    T, X = _tomography(), _transforms()
    x = _line(grid["x"])
    tomo = T.optical_tomogram(case.one_mode, x, grid["angles"])
    pts = np.asarray([complex(*a) for a in grid["alphas"]])
    got = X.symplectic_to_photon(tomo, pts, grid["ncut"]).values
    want = T.photon_tomogram(case.one_mode, pts[:, None], grid["ncut"], tail_tol=None).values
    return got, want, dict(grid)


PIPELINES = {name: globals()[f"_run_{name}"] for name in TRANSFORMS}


def verify_transform(transform: str, state: str | StateCase, grid: dict | None = None,
                     tolerance: float | None = None) -> VerificationReport:
    """Run the kernel-based transform and the stepwise pipeline on one state and compare pointwise.

    Numerical failures of either route are reported (pass flag false) rather
    than raised; an unknown transform or state spec raises.
    """
    if transform not in PIPELINES:
        raise JstomoError(f"unknown transform {transform!r}; choose from {', '.join(TRANSFORMS)}")
    case = resolve_state(state) if isinstance(state, str) else state
    grid = dict(DEFAULT_GRIDS[transform] if grid is None else grid)
    tol = DEFAULT_TOLERANCES[transform] if tolerance is None else float(tolerance)
    t0 = time.perf_counter()
    try:
        got, want, summary = PIPELINES[transform](case, grid)
    except (JstomoError, ArithmeticError, ValueError) as exc:
        rep = VerificationReport(transform, case.state_id, grid, math.inf, math.inf, tol, False,
                                 error=f"{type(exc).__name__}: {exc}")
    else:
        rep = compare(transform, case.state_id, summary, got, want, tol)
    rep.seconds = time.perf_counter() - t0
    return rep


def resolve_tolerances(profile=None) -> dict:
    """``None``/"default" -> defaults; a number -> that tolerance everywhere; a dict overrides per transform."""
    if profile is None or profile == "default":
        return dict(DEFAULT_TOLERANCES)
    if isinstance(profile, (int, float)):
        return {k: float(profile) for k in DEFAULT_TOLERANCES}
    if isinstance(profile, dict):
        unknown = set(profile) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise JstomoError(f"unknown transforms in tolerance profile: {sorted(unknown)}")
        return {**DEFAULT_TOLERANCES, **{k: float(v) for k, v in profile.items()}}
    raise JstomoError(f"bad tolerance profile {profile!r}")


def verify_all(seed: int = 0, profile=None, transforms=TRANSFORMS, states=None,
               progress=None) -> list[VerificationReport]:
    """Every transform on every state, in a fixed order; failures are reported, not raised."""
    tols = resolve_tolerances(profile)
    specs = default_states(seed) if states is None else list(states)
    cases = [resolve_state(s) for s in specs]
    reports = []
    for name in transforms:
        for case in cases:
            rep = verify_transform(name, case, tolerance=tols[name])
            reports.append(rep)
            if progress is not None:
                progress(rep)
    return reports


# ---------------------------------------------------------------------------
# kernel-vs-trace suite
# ---------------------------------------------------------------------------

KERNEL_FAMILIES = ("sympl_to_spin", "spin_to_sympl", "photon_to_spin", "spin_to_photon",
                   "wigner_to_spin", "spin_to_wigner", "sympl_photon")
KERNEL_S = 0.5


def _draw(rng):
    tj = int(rng.integers(1, 4))
    m = (tj - 2 * int(rng.integers(0, tj + 1))) / 2
    return {
        "j": tj / 2, "m": m,
        "omega": np.array([rng.uniform(0, 2 * np.pi), rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi)]),
        "x": rng.uniform(-3, 3, 2), "mu": rng.uniform(-2, 2, 2), "nu": rng.uniform(-2, 2, 2),
        "alpha": rng.uniform(-1, 1, 2) + 1j * rng.uniform(-1, 1, 2), "n": rng.integers(0, 4, 2),
        "s": float(rng.uniform(0.2, 0.8)),
    }


def _family_pairs(family: str, d: dict, cutoff: int):
    """(kernel value, trace value) pairs checked for one draw of a family."""
    K = _kernels()
    j, m, om, x, mu, nu, al, n, s = (d[k] for k in ("j", "m", "omega", "x", "mu", "nu", "alpha", "n", "s"))
    c = {"cutoff": cutoff}
    if family == "sympl_to_spin":
        return [(K.kernel_sympl_to_spin(j, m, om, x, mu, nu), trace_sympl_to_spin(j, m, om, x, mu, nu, **c)),
                (K.denom_trace_sympl(j, x, mu, nu), trace_denom_sympl(j, x, mu, nu, **c))]
    if family == "spin_to_sympl":
        return [(K.kernel_spin_to_sympl(j, m, om, x, mu, nu), trace_spin_to_sympl(j, m, om, x, mu, nu, **c))]
    if family == "photon_to_spin":
        return [(K.kernel_photon_to_spin(j, m, om, n, al, s), trace_photon_to_spin(j, m, om, n, al, s, **c)),
                (K.denom_trace_photon(j, n, al, s), trace_denom_photon(j, n, al, s, **c))]
    if family == "spin_to_photon":
        return [(K.kernel_spin_to_photon(j, m, om, n, al), trace_spin_to_photon(j, m, om, n, al, **c))]
    if family == "wigner_to_spin":
        return [(K.kernel_wigner_to_spin(j, m, om, al), trace_wigner_to_spin(j, m, om, al, **c)),
                (K.denom_trace_wigner(j, al), trace_denom_wigner(j, al, **c))]
    if family == "spin_to_wigner":
        return [(K.kernel_spin_to_wigner(j, m, om, al), trace_spin_to_wigner(j, m, om, al, **c))]
    if family == "sympl_photon":
        x0, mu0, nu0, n0, a0 = float(x[0]), float(mu[0]), float(nu[0]), int(n[0]), complex(al[0])
        return [(K.kernel_sympl_to_photon(x0, mu0, nu0, n0, a0), trace_sympl_to_photon(x0, mu0, nu0, n0, a0, **c)),
                (K.kernel_photon_to_sympl(x0, mu0, nu0, n0, a0, s),
                 trace_photon_to_sympl(x0, mu0, nu0, n0, a0, s, **c))]
    raise JstomoError(f"unknown kernel family {family!r}")


def verify_kernel_family(family: str, seed: int = 0, draws: int = KERNEL_DRAWS, cutoff: int = ORACLE_CUTOFF,
                         atol: float = KERNEL_ATOL, rtol: float = KERNEL_RTOL) -> VerificationReport:
    """Closed-form kernels against Tr[quantizer x dequantizer] on seeded random parameters."""
    rng = np.random.default_rng([seed, KERNEL_FAMILIES.index(family)])
    got, want, where = [], [], []
    t0 = time.perf_counter()
    for i in range(draws):
        d = _draw(rng)
        for k, (a, b) in enumerate(_family_pairs(family, d, cutoff)):
            got.append(complex(np.asarray(a)))
            want.append(complex(b))
            where.append({"draw": i, "term": k, "j": d["j"], "m": d["m"]})
    grid = {"draws": draws, "seed": seed, "cutoff": cutoff, "rtol": rtol}
    rep = compare(f"kernel:{family}", f"draws:{draws}", grid, got, want, atol, where, rel_tolerance=rtol)
    rep.seconds = time.perf_counter() - t0
    return rep


def kernel_suite(seed: int = 0, draws: int = KERNEL_DRAWS, families=KERNEL_FAMILIES,
                 progress=None) -> list[VerificationReport]:
    out = []
    for fam in families:
        rep = verify_kernel_family(fam, seed, draws)
        out.append(rep)
        if progress is not None:
            progress(rep)
    return out


def summary_table(reports) -> str:
    rows = [("transform", "state", "max abs", "max rel", "tol", "result", "sec")]
    for r in reports:
        rows.append((r.transform, r.state_id, f"{r.max_abs_error:.2e}", f"{r.max_rel_error:.2e}",
                     f"{r.tolerance:.0e}", "pass" if r.passed else ("ERROR" if r.error else "FAIL"),
                     f"{r.seconds:.1f}"))
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    failed = sum(not r.passed for r in reports)
    lines.append(f"{len(reports) - failed}/{len(reports)} passed")
    return "\n".join(lines)
