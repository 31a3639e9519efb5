"""Quadrature rules: Euler angles on SU(2), complex planes and real lines."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import twice


@dataclass(frozen=True, eq=False)
class EulerQuadrature:
    """Product rule on (alpha, beta, gamma) for the measure dalpha sin(beta) dbeta dgamma.

    Gauss-Legendre in cos(beta), uniform (trapezoid) in alpha and gamma.
    ``nodes`` has shape (G, 3) with columns alpha, beta, gamma.
    """

    nodes: np.ndarray
    weights: np.ndarray
    n_beta: int
    n_alpha: int
    n_gamma: int

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def alpha(self) -> np.ndarray:
        return self.nodes[:, 0]

    @property
    def beta(self) -> np.ndarray:
        return self.nodes[:, 1]

    @property
    def gamma(self) -> np.ndarray:
        return self.nodes[:, 2]

    def max_degree(self) -> int:
        """Largest L1 + L2 such that D^(L1) x conj(D^(L2)) integrates exactly.

        Degree bound in cos(beta) is 2 n_beta - 1; the uniform rules in
        alpha and gamma are exact for frequencies below their node counts.
        """
        return min(2 * self.n_beta - 1, self.n_alpha - 1, self.n_gamma - 1)

    def exact_for(self, j) -> bool:
        """True if products of rank <= 2j quantizer and dequantizer terms integrate exactly."""
        return self.max_degree() >= 2 * twice(j)


def euler_quadrature(n_beta: int, n_alpha: int, n_gamma: int | None = None) -> EulerQuadrature:
    n_gamma = n_alpha if n_gamma is None else n_gamma
    x, wx = np.polynomial.legendre.leggauss(n_beta)
    beta = np.arccos(x)
    alpha = 2 * np.pi * np.arange(n_alpha) / n_alpha
    gamma = 2 * np.pi * np.arange(n_gamma) / n_gamma
    A, B, C = np.meshgrid(alpha, beta, gamma, indexing="ij")
    WA, WB, WC = np.meshgrid(np.full(n_alpha, 2 * np.pi / n_alpha), wx,
                             np.full(n_gamma, 2 * np.pi / n_gamma), indexing="ij")
    nodes = np.stack([A.ravel(), B.ravel(), C.ravel()], axis=1)
    weights = (WA * WB * WC).ravel()
    return EulerQuadrature(nodes, weights, n_beta, n_alpha, n_gamma)


def make_euler_quadrature(j) -> EulerQuadrature:
    """Rule with 2j+2 beta nodes and 4j+3 alpha/gamma nodes, exact for spin-j reconstruction."""
    tj = twice(j)
    return euler_quadrature(tj + 2, 2 * tj + 3)


def describe_euler(q: EulerQuadrature) -> dict:
    return {"n_beta": q.n_beta, "n_alpha": q.n_alpha, "n_gamma": q.n_gamma, "nodes": q.size,
            "max_degree": q.max_degree()}


@dataclass(frozen=True, eq=False)
class PlaneQuadrature:
    """Uniform square grid on the complex plane with cell-area weights."""

    nodes: np.ndarray
    weights: np.ndarray
    radius: float
    spacing: float

    @property
    def size(self) -> int:
        return len(self.nodes)

    def area(self) -> float:
        return float(self.weights.sum())


def plane_quadrature(radius: float = 4.0, spacing: float = 0.1, disk: bool = False) -> PlaneQuadrature:
    """Nodes k*h + i l*h with |k h|, |l h| <= radius (optionally clipped to the disk).

    For integrands with Gaussian envelopes the equal-weight rule has
    spectrally small error once the envelope is negligible at the edge.
    """
    if radius <= 0 or spacing <= 0:
        raise ValueError("radius and spacing must be positive")
    k = int(math.floor(radius / spacing + 1e-9))
    axis = spacing * np.arange(-k, k + 1)
    re, im = np.meshgrid(axis, axis, indexing="ij")
    nodes = (re + 1j * im).ravel()
    if disk:
        nodes = nodes[np.abs(nodes) <= radius + 1e-12]
    weights = np.full(nodes.shape, spacing * spacing)
    return PlaneQuadrature(nodes, weights, float(radius), float(spacing))


def gaussian_tail_bound(q: PlaneQuadrature, rate: float) -> float:
    """Mass of exp(-rate |a|^2) outside the largest inscribed disk, relative to its total."""
    return math.exp(-rate * q.radius ** 2)


def product_pairs(q1: PlaneQuadrature, q2: PlaneQuadrature | None = None):
    """All (alpha1, alpha2) pairs of two plane rules with product weights."""
    q2 = q1 if q2 is None else q2
    a1, a2 = np.meshgrid(q1.nodes, q2.nodes, indexing="ij")
    w1, w2 = np.meshgrid(q1.weights, q2.weights, indexing="ij")
    return np.stack([a1.ravel(), a2.ravel()], axis=1), (w1 * w2).ravel()


def line_grid(lo: float, hi: float, step: float) -> np.ndarray:
    """Inclusive uniform grid lo, lo+step, ..., hi (endpoint snapped)."""
    if step <= 0 or hi < lo:
        raise ValueError("need step > 0 and hi >= lo")
    n = int(round((hi - lo) / step))
    if abs(lo + n * step - hi) > 1e-9 * max(1.0, abs(hi)):
        raise ValueError(f"range [{lo}, {hi}] is not a multiple of step {step}")
    return lo + step * np.arange(n + 1)


def trapezoid_weights(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    w = np.empty_like(x)
    if len(x) == 1:
        w[:] = 0.0
        return w
    dx = np.diff(x)
    w[0] = dx[0] / 2
    w[-1] = dx[-1] / 2
    w[1:-1] = (dx[:-1] + dx[1:]) / 2
    return w


def optical_angles(count: int) -> np.ndarray:
    """``count`` equally spaced angles on [0, pi)."""
    if count < 1:
        raise ValueError("need at least one angle")
    return np.pi * np.arange(count) / count


def ball_pairs(q1: PlaneQuadrature, radius: float, q2: PlaneQuadrature | None = None):
    """Product pairs restricted to |alpha1|^2 + |alpha2|^2 <= radius^2.

    Two-mode integrands here decay with the total |alpha1|^2 + |alpha2|^2,
    so the ball holds the same accuracy as the product of disks with about
    half the points.
    """
    pts, w = product_pairs(q1, q2)
    keep = (np.abs(pts) ** 2).sum(axis=1) <= radius * radius + 1e-12
    return pts[keep], w[keep]
