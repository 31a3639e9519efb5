"""Special functions used by the tomogram kernels.

Spin labels are handled as doubled integers (``2j``, ``2m``) so that
half-integer selection rules are exact.  Every function that takes a
spin label accepts an int, a float that is an exact half-integer, a
``Fraction`` or a string such as ``"3/2"``.

Factorial ratios are accumulated in log space (``gammaln``) so the
displacement matrix elements stay finite for occupations far above 170.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import gammaln


# ---------------------------------------------------------------------------
# half-integer labels
# ---------------------------------------------------------------------------

def twice(value) -> int:
    """Return ``2*value`` as an int, rejecting anything that is not a half-integer."""
    if isinstance(value, HalfInt):
        return value.twice_value
    if isinstance(value, str):
        value = Fraction(value.strip())
    if isinstance(value, (int, np.integer)):
        return 2 * int(value)
    frac = Fraction(value).limit_denominator(4) if isinstance(value, float) else Fraction(value)
    if isinstance(value, float) and abs(float(frac) - value) > 1e-12:
        raise ValueError(f"{value!r} is not a half-integer")
    doubled = 2 * frac
    if doubled.denominator != 1:
        raise ValueError(f"{value!r} is not a half-integer")
    return int(doubled)


@dataclass(frozen=True, order=True)
class HalfInt:
    """Exact half-integer stored as its double."""

    twice_value: int

    @classmethod
    def of(cls, value) -> "HalfInt":
        return cls(twice(value))

    def __float__(self) -> float:
        return self.twice_value / 2

    def __str__(self) -> str:
        if self.twice_value % 2 == 0:
            return str(self.twice_value // 2)
        return f"{self.twice_value}/2"


def label_str(tj: int) -> str:
    """Format a doubled label for humans: 3 -> '3/2', 2 -> '1'."""
    return str(HalfInt(tj))


def spin_projections(j) -> np.ndarray:
    """Projections m = j, j-1, ..., -j (descending, the basis order used everywhere)."""
    tj = twice(j)
    return np.array([(tj - 2 * k) / 2 for k in range(tj + 1)])


def _check_labels(tj: int, *tms: int) -> None:
    if tj < 0:
        raise ValueError("j must be non-negative")
    for tm in tms:
        if abs(tm) > tj or (tj - tm) % 2:
            raise ValueError(f"projection {tm}/2 not allowed for j={tj}/2")


# ---------------------------------------------------------------------------
# factorials and orthogonal polynomials
# ---------------------------------------------------------------------------

def log_factorial(n):
    return gammaln(np.asarray(n, dtype=float) + 1.0)


def binomial(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def assoc_laguerre(n: int, k: int, x):
    """Associated Laguerre polynomial L_n^(k)(x) by the three-term recurrence.

    Negative ``k`` down to ``-n`` is allowed.
    """
    if n < 0:
        raise ValueError("Laguerre degree must be non-negative")
    if k < -n:
        raise ValueError("Laguerre order must satisfy k >= -n")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + k - x
    for i in range(1, n):
        prev, cur = cur, ((2 * i + 1 + k - x) * cur - (i + k) * prev) / (i + 1)
    return cur if cur.ndim else float(cur)


def laguerre_table(nmax: int, kmax: int, x) -> np.ndarray:
    """Table L[n, k, ...] = L_n^(k)(x) for 0 <= n <= nmax, 0 <= k <= kmax."""
    x = np.asarray(x, dtype=float)
    k = np.arange(kmax + 1, dtype=float).reshape((-1,) + (1,) * x.ndim)
    out = np.empty((nmax + 1, kmax + 1) + x.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = 1.0 + k - x
    for i in range(1, nmax):
        out[i + 1] = ((2 * i + 1 + k - x) * out[i] - (i + k) * out[i - 1]) / (i + 1)
    return out


def hermite(r: int, x):
    """Physicists' Hermite polynomial H_r(x)."""
    if r < 0:
        raise ValueError("Hermite degree must be non-negative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if r == 0:
        return prev if prev.ndim else float(prev)
    cur = 2.0 * x
    for i in range(1, r):
        prev, cur = cur, 2.0 * x * cur - 2.0 * i * prev
    return cur if cur.ndim else float(cur)


def jacobi(n: int, a: int, b: int, x):
    """Jacobi polynomial P_n^(a,b)(x) by the standard recurrence in n."""
    if n < 0:
        raise ValueError("Jacobi degree must be non-negative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 0.5 * (a - b + (a + b + 2) * x)
    for i in range(2, n + 1):
        s = 2 * i + a + b
        c1 = 2 * i * (i + a + b) * (s - 2)
        c2 = (s - 1) * (a * a - b * b)
        c3 = (s - 1) * s * (s - 2)
        c4 = 2 * (i + a - 1) * (i + b - 1) * s
        if c1 == 0:
            raise ValueError("degenerate Jacobi parameters")
        prev, cur = cur, ((c2 + c3 * x) * cur - c4 * prev) / c1
    return cur if cur.ndim else float(cur)


# ---------------------------------------------------------------------------
# rotation matrices
# ---------------------------------------------------------------------------

def _small_d_doubled(tj: int, tm: int, tmp: int, beta):
    sign = 1.0
    # bring (m, m') to m >= m', m + m' >= 0 using
    # d_{m,m'} = (-1)^(m-m') d_{-m,-m'} and d_{m,m'} = (-1)^(m-m') d_{m',m}
    if tm + tmp < 0:
        if ((tm - tmp) // 2) % 2:
            sign = -sign
        tm, tmp = -tm, -tmp
    if tm < tmp:
        if ((tm - tmp) // 2) % 2:
            sign = -sign
        tm, tmp = tmp, tm
    a = (tm - tmp) // 2
    b = (tm + tmp) // 2
    n = (tj - tm) // 2
    # factorial ratio (j+m)!(j-m)!/((j+m')!(j-m')!), checked against expm(-i beta S_y)
    lognorm = 0.5 * (log_factorial((tj + tm) // 2) + log_factorial((tj - tm) // 2)
                     - log_factorial((tj + tmp) // 2) - log_factorial((tj - tmp) // 2))
    beta = np.asarray(beta, dtype=float)
    half = beta / 2.0
    val = np.exp(lognorm) * (-np.sin(half)) ** a * np.cos(half) ** b * jacobi(n, a, b, np.cos(beta))
    return sign * val


def wigner_small_d(j, m, mp, beta):
    """Wigner small-d element d^j_{m,m'}(beta) = <j m| exp(-i beta S_y) |j m'>."""
    tj, tm, tmp = twice(j), twice(m), twice(mp)
    _check_labels(tj, tm, tmp)
    out = _small_d_doubled(tj, tm, tmp, beta)
    return out if np.ndim(out) else float(out)


def wigner_D(j, m, mp, alpha, beta, gamma):
    """Wigner D element e^{-i m alpha} d^j_{m,m'}(beta) e^{-i m' gamma}."""
    tj, tm, tmp = twice(j), twice(m), twice(mp)
    _check_labels(tj, tm, tmp)
    alpha = np.asarray(alpha, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    out = np.exp(-0.5j * tm * alpha) * _small_d_doubled(tj, tm, tmp, beta) * np.exp(-0.5j * tmp * gamma)
    return out if np.ndim(out) else complex(out)


def small_d_matrix(j, beta) -> np.ndarray:
    """d^j(beta) with rows/columns ordered m = j..-j; shape beta.shape + (d, d)."""
    tj = twice(j)
    beta = np.asarray(beta, dtype=float)
    dim = tj + 1
    out = np.empty(beta.shape + (dim, dim))
    for r in range(dim):
        for c in range(dim):
            out[..., r, c] = _small_d_doubled(tj, tj - 2 * r, tj - 2 * c, beta)
    return out


def wigner_D_matrix(j, alpha, beta, gamma) -> np.ndarray:
    """Full D^j(alpha, beta, gamma) with rows/columns ordered m = j..-j."""
    tj = twice(j)
    ms = (tj - 2 * np.arange(tj + 1)) / 2.0
    alpha = np.asarray(alpha, dtype=float)[..., None]
    gamma = np.asarray(gamma, dtype=float)[..., None]
    left = np.exp(-1j * ms * alpha)
    right = np.exp(-1j * ms * gamma)
    return left[..., :, None] * small_d_matrix(j, beta) * right[..., None, :]


# ---------------------------------------------------------------------------
# Clebsch-Gordan coefficients (Condon-Shortley phase, Racah sum)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _cg_doubled(tj1: int, tm1: int, tj2: int, tm2: int, tJ: int, tM: int) -> float:
    if tm1 + tm2 != tM:
        return 0.0
    if tJ < abs(tj1 - tj2) or tJ > tj1 + tj2 or (tj1 + tj2 + tJ) % 2:
        return 0.0
    if abs(tm1) > tj1 or abs(tm2) > tj2 or abs(tM) > tJ:
        return 0.0
    j1, j2, J = tj1 / 2, tj2 / 2, tJ / 2
    m1, m2, M = tm1 / 2, tm2 / 2, tM / 2

    def lf(v: float) -> float:
        return math.lgamma(round(v) + 1)

    pre = 0.5 * (math.log(tJ + 1) + lf(J + j1 - j2) + lf(J - j1 + j2) + lf(j1 + j2 - J)
                 - lf(j1 + j2 + J + 1)
                 + lf(J + M) + lf(J - M) + lf(j1 - m1) + lf(j1 + m1) + lf(j2 - m2) + lf(j2 + m2))
    kmin = max(0, round(j2 - J - m1), round(j1 - J + m2))
    kmax = min(round(j1 + j2 - J), round(j1 - m1), round(j2 + m2))
    total = 0.0
    for k in range(kmin, kmax + 1):
        den = (lf(k) + lf(j1 + j2 - J - k) + lf(j1 - m1 - k) + lf(j2 + m2 - k)
               + lf(J - j2 + m1 + k) + lf(J - j1 - m2 + k))
        total += (-1) ** k * math.exp(pre - den)
    return total


def clebsch_gordan(j1, m1, j2, m2, J, M) -> float:
    """<j1 m1; j2 m2 | J M>; zero when the selection rules fail."""
    tj1, tm1, tj2, tm2, tJ, tM = (twice(v) for v in (j1, m1, j2, m2, J, M))
    for tjx, tmx in ((tj1, tm1), (tj2, tm2), (tJ, tM)):
        if tjx < 0 or (tjx - tmx) % 2:
            raise ValueError("projection and spin labels must differ by an integer")
    return _cg_doubled(tj1, tm1, tj2, tm2, tJ, tM)


# ---------------------------------------------------------------------------
# displacement operator matrix elements
# ---------------------------------------------------------------------------

def displacement_matrix(rows: int, cols: int, beta) -> np.ndarray:
    """<a|D(beta)|b> for 0 <= a < rows, 0 <= b < cols; shape beta.shape + (rows, cols).

    Uses the Laguerre closed form for a >= b and the conjugation rule
    <a|D(beta)|b> = conj(<b|D(-beta)|a>) otherwise.
    """
    beta = np.asarray(beta, dtype=complex)
    x = np.abs(beta) ** 2
    nmax = min(rows, cols) - 1
    kmax = max(rows, cols) - 1
    lag = laguerre_table(max(nmax, 0), max(kmax, 0), x)
    lf = log_factorial(np.arange(max(rows, cols)))
    absb = np.abs(beta)
    with np.errstate(divide="ignore"):
        logabs = np.log(absb)
    # from the angle, not beta/|beta|: complex division overflows for subnormal beta
    phase = np.exp(1j * np.angle(beta))
    envelope = -0.5 * x
    out = np.zeros(beta.shape + (rows, cols), dtype=complex)
    for a in range(rows):
        for b in range(cols):
            lo, hi = min(a, b), max(a, b)
            delta = hi - lo
            if delta == 0:
                mag = np.exp(envelope)
                ph = 1.0
            else:
                mag = np.where(absb > 0, np.exp(delta * np.where(absb > 0, logabs, 0.0)
                                               + 0.5 * (lf[lo] - lf[hi]) + envelope), 0.0)
                ph = phase ** delta if a > b else (-np.conj(phase)) ** delta
            out[..., a, b] = mag * ph * lag[lo, delta]
    return out


def displacement_element(np_: int, n: int, beta) -> complex:
    """Single element <np_|D(beta)|n>."""
    if np_ < 0 or n < 0:
        raise ValueError("occupation numbers must be non-negative")
    val = displacement_matrix(np_ + 1, n + 1, beta)[..., np_, n]
    return val if np.ndim(val) else complex(val)
