"""State spaces: spin-j, truncated one- and two-mode Fock spaces.

Basis conventions
-----------------
* spin-j: index ``k`` holds ``|j, m = j - k>`` (descending m).
* one mode: index ``n`` holds ``|n>``, ``0 <= n <= cutoff``.
* two modes: index ``n1 * (cutoff + 1) + n2`` holds ``|n1, n2>``
  (lexicographic order).

The Jordan-Schwinger identification sends ``|j, m>`` to
``|j + m, j - m>``, so spin index ``k`` maps to occupations
``(2j - k, k)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import ConsistencyError, CutoffError, EmptySectorError
from .specfun import label_str, twice

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = -1e-10
EMPTY_SECTOR_TOL = 1e-14
DEFAULT_CUTOFF = 24

BASES = ("spin", "fock1", "fock2")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive, unit-trace matrix over one of the supported bases.

    ``label`` is ``2j`` for the spin basis and the per-mode cutoff for the
    Fock bases.  Construction validates the invariants unless
    ``check=False``; ``repair=True`` clips small negative eigenvalues and
    renormalises instead of raising.
    """

    basis: str
    label: int
    data: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __init__(self, basis: str, label: int, data, meta: dict | None = None,
                 check: bool = True, repair: bool = False):
        if basis not in BASES:
            raise ValueError(f"unknown basis {basis!r}")
        arr = np.array(data, dtype=complex)
        dim = basis_dim(basis, label)
        if arr.shape != (dim, dim):
            raise ValueError(f"{basis} matrix with label {label} needs shape {(dim, dim)}, got {arr.shape}")
        meta = dict(meta or {})
        if repair:
            arr, info = repair_state(arr)
            meta.update(info)
        elif check:
            check_state(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "label", int(label))
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "meta", meta)

    # constructors -------------------------------------------------------
    @classmethod
    def spin(cls, j, data, **kw) -> "DensityMatrix":
        return cls("spin", twice(j), data, **kw)

    @classmethod
    def fock1(cls, cutoff: int, data, **kw) -> "DensityMatrix":
        return cls("fock1", cutoff, data, **kw)

    @classmethod
    def fock2(cls, cutoff: int, data, **kw) -> "DensityMatrix":
        return cls("fock2", cutoff, data, **kw)

    @classmethod
    def pure(cls, basis: str, label: int, vec, **kw) -> "DensityMatrix":
        v = np.asarray(vec, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(basis, label, np.outer(v, v.conj()), **kw)

    # accessors ----------------------------------------------------------
    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def j(self) -> float:
        if self.basis != "spin":
            raise AttributeError("only spin states carry j")
        return self.label / 2

    @property
    def cutoff(self) -> int:
        if self.basis == "spin":
            raise AttributeError("spin states have no Fock cutoff")
        return self.label

    @property
    def modes(self) -> int:
        return {"spin": 0, "fock1": 1, "fock2": 2}[self.basis]

    def purity(self) -> float:
        return float(np.real(np.trace(self.data @ self.data)))

    def eigvals(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.data)

    # serialisation ------------------------------------------------------
    def to_json(self) -> dict:
        out = {"basis": self.basis}
        if self.basis == "spin":
            out["j"] = label_str(self.label)
        else:
            out["cutoff"] = self.label
        out["re"] = self.data.real.tolist()
        out["im"] = self.data.imag.tolist()
        if self.meta:
            out["meta"] = self.meta
        return out

    @classmethod
    def from_json(cls, obj: dict, check: bool = True) -> "DensityMatrix":
        basis = obj["basis"]
        label = twice(obj["j"]) if basis == "spin" else int(obj["cutoff"])
        data = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
        return cls(basis, label, data, meta=obj.get("meta"), check=check)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1))

    @classmethod
    def load(cls, path, check: bool = True) -> "DensityMatrix":
        return cls.from_json(json.loads(Path(path).read_text()), check=check)


def basis_dim(basis: str, label: int) -> int:
    if basis == "spin":
        return label + 1
    if basis == "fock1":
        return label + 1
    if basis == "fock2":
        return (label + 1) ** 2
    raise ValueError(f"unknown basis {basis!r}")


def check_state(arr: np.ndarray) -> None:
    herm = np.abs(arr - arr.conj().T).max()
    if herm > HERMITIAN_TOL:
        raise ConsistencyError(f"matrix not Hermitian (residual {herm:.3e})")
    tr = np.trace(arr)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ConsistencyError(f"trace {tr.real:.15f} differs from 1")
    lam = np.linalg.eigvalsh(arr).min()
    if lam < PSD_TOL:
        raise ConsistencyError(f"negative eigenvalue {lam:.3e}")


def repair_state(arr: np.ndarray):
    """Hermitise, clip negative eigenvalues and renormalise; report what changed."""
    h = 0.5 * (arr + arr.conj().T)
    lam, vec = np.linalg.eigh(h)
    clipped = float(-lam[lam < 0].sum())
    lam = np.clip(lam, 0.0, None)
    tr = lam.sum()
    if tr <= 0:
        raise ConsistencyError("no positive weight left after clipping")
    fixed = (vec * (lam / tr)) @ vec.conj().T
    return fixed, {"repaired": True, "clipped_weight": clipped, "trace_before": float(np.real(np.trace(arr)))}


def hermitize(arr: np.ndarray) -> np.ndarray:
    return 0.5 * (arr + arr.conj().T)


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity (squared convention, 1 for identical states).

    When either argument is pure to 1e-9 the overlap <psi|sigma|psi> is
    used, which avoids the square-root loss of precision on rank-deficient
    matrices.
    """
    a = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    b = sigma.data if isinstance(sigma, DensityMatrix) else np.asarray(sigma, dtype=complex)
    for p, q in ((a, b), (b, a)):
        lam, vec = np.linalg.eigh(hermitize(p))
        if lam[-1] > 1.0 - 1e-9:
            psi = vec[:, -1]
            return float(np.real(psi.conj() @ q @ psi))
    lam, vec = np.linalg.eigh(hermitize(a))
    root = (vec * np.sqrt(np.clip(lam, 0, None))) @ vec.conj().T
    inner = np.linalg.eigvalsh(hermitize(root @ b @ root))
    return float(np.sum(np.sqrt(np.clip(inner, 0, None))) ** 2)


# ---------------------------------------------------------------------------
# Jordan-Schwinger map
# ---------------------------------------------------------------------------

def js_relabel(n1: int, n2: int):
    """Two-mode occupations -> (j, m) with j = (n1+n2)/2, m = (n1-n2)/2."""
    if n1 < 0 or n2 < 0:
        raise ValueError("occupations must be non-negative")
    return Fraction(n1 + n2, 2), Fraction(n1 - n2, 2)


def fock2_index(n1: int, n2: int, cutoff: int) -> int:
    return n1 * (cutoff + 1) + n2


def sector_indices(j, cutoff: int) -> np.ndarray:
    """Flat two-mode indices of |j+m, j-m> for m = j..-j."""
    tj = twice(j)
    if tj > cutoff:
        raise CutoffError(f"cutoff {cutoff} cannot hold total excitation {tj}")
    return np.array([fock2_index(tj - k, k, cutoff) for k in range(tj + 1)])


def project_sector(rho2: DensityMatrix, j):
    """Block Pi_{2j} rho Pi_{2j} in the m-ordered basis and its weight Tr[Pi rho]."""
    if rho2.basis != "fock2":
        raise ValueError("sector projection needs a two-mode state")
    idx = sector_indices(j, rho2.cutoff)
    block = rho2.data[np.ix_(idx, idx)].copy()
    weight = float(np.real(np.trace(block)))
    if weight < EMPTY_SECTOR_TOL:
        raise EmptySectorError(f"sector 2j={twice(j)} has weight {weight:.3e}")
    return block, weight


def sector_weights(rho2: DensityMatrix) -> np.ndarray:
    """Tr[Pi_n rho] for n = 0..cutoff."""
    n = rho2.cutoff
    diag = np.real(np.diag(rho2.data)).reshape(n + 1, n + 1)
    out = np.zeros(n + 1)
    for n1 in range(n + 1):
        for n2 in range(n + 1 - n1):
            out[n1 + n2] += diag[n1, n2]
    return out


def js_forward(rho2: DensityMatrix, j) -> DensityMatrix:
    """Renormalised projection of a two-mode state onto sector 2j, as a spin-j state."""
    block, weight = project_sector(rho2, j)
    rho = hermitize(block / weight)
    return DensityMatrix.spin(j, rho, meta={"sector_weight": weight}, check=False)


def js_inverse(rho_j: DensityMatrix, cutoff: int = DEFAULT_CUTOFF) -> DensityMatrix:
    """Embed a spin-j state into the two-mode Fock space on sector 2j."""
    if rho_j.basis != "spin":
        raise ValueError("js_inverse needs a spin state")
    idx = sector_indices(rho_j.j, cutoff)
    dim = (cutoff + 1) ** 2
    out = np.zeros((dim, dim), dtype=complex)
    out[np.ix_(idx, idx)] = rho_j.data
    return DensityMatrix.fock2(cutoff, out, check=False)


# ---------------------------------------------------------------------------
# test states
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpinSuperposition:
    """Pure spin-j state sum_m a_m |j, m>; amplitudes stored for m = j..-j."""

    tj: int
    amplitudes: np.ndarray
    norm_factor: float = 1.0
    name: str = ""

    @property
    def j(self) -> float:
        return self.tj / 2

    def density(self) -> DensityMatrix:
        a = self.amplitudes
        return DensityMatrix("spin", self.tj, np.outer(a, a.conj()),
                             meta={"state": self.name, "norm_factor": self.norm_factor})

    def two_mode_vector(self, cutoff: int = DEFAULT_CUTOFF) -> np.ndarray:
        vec = np.zeros((cutoff + 1) ** 2, dtype=complex)
        vec[sector_indices(self.j, cutoff)] = self.amplitudes
        return vec


# reference amplitudes, listed in the order m = -j..j
_PAPER_AMPLITUDES = {
    "j_half": [0.011 - 0.443j, -0.871 - 0.211j],
    "j_one": [-0.272 + 0.105j, 0.274 + 0.252j, -0.876 + 0.096j],
    "j_three_half": [0.166 + 0.812j, 0.144 - 0.187j, 0.182 - 0.109j, -0.055 - 0.457j],
}
PAPER_STATES = tuple(_PAPER_AMPLITUDES)
_BY_TWICE_J = {1: "j_half", 2: "j_one", 3: "j_three_half"}


def paper_state_name(j) -> str:
    try:
        return _BY_TWICE_J[twice(j)]
    except KeyError:
        raise ValueError(f"no reference state for j={j}") from None


def make_paper_state(which) -> SpinSuperposition:
    """Reference superpositions for j = 1/2, 1, 3/2 (name or j value)."""
    name = which if which in _PAPER_AMPLITUDES else paper_state_name(which)
    amps = np.array(_PAPER_AMPLITUDES[name][::-1], dtype=complex)
    norm = float(np.linalg.norm(amps))
    factor = 1.0
    if abs(norm - 1.0) > 1e-12:
        factor = 1.0 / norm
        amps = amps * factor
    return SpinSuperposition(len(amps) - 1, amps, factor, name)


def random_spin_state(j, seed: int) -> SpinSuperposition:
    """Normalised complex-Gaussian amplitudes, deterministic in ``seed``."""
    tj = twice(j)
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(tj + 1) + 1j * rng.standard_normal(tj + 1)
    norm = float(np.linalg.norm(amps))
    return SpinSuperposition(tj, amps / norm, 1.0 / norm, f"random_j{label_str(tj)}_seed{seed}")


def fock_state(n: int, cutoff: int = DEFAULT_CUTOFF) -> DensityMatrix:
    if not 0 <= n <= cutoff:
        raise CutoffError(f"|{n}> does not fit under cutoff {cutoff}")
    vec = np.zeros(cutoff + 1)
    vec[n] = 1.0
    return DensityMatrix.pure("fock1", cutoff, vec, meta={"state": f"fock{n}"})


def coherent_vector(gamma: complex, cutoff: int) -> np.ndarray:
    """Truncated coherent-state amplitudes e^{-|g|^2/2} g^n / sqrt(n!) (not renormalised)."""
    from scipy.special import gammaln

    n = np.arange(cutoff + 1)
    g = complex(gamma)
    if g == 0:
        vec = np.zeros(cutoff + 1, dtype=complex)
        vec[0] = 1.0
        return vec
    logmag = -0.5 * abs(g) ** 2 + n * np.log(abs(g)) - 0.5 * gammaln(n + 1)
    return np.exp(logmag) * np.exp(1j * n * np.angle(g))


def coherent_state(gamma: complex, cutoff: int = DEFAULT_CUTOFF) -> DensityMatrix:
    vec = coherent_vector(gamma, cutoff)
    tail = 1.0 - float(np.vdot(vec, vec).real)
    return DensityMatrix.pure("fock1", cutoff, vec, meta={"state": f"coherent({gamma})", "tail": tail})
