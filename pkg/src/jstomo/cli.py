"""jstomo command line: states, tomograms, transforms, figure reproduction and verification.

Exit codes: 0 success, 2 usage error, 3 numerical or verification failure.
Settings are resolved as command-line flags > ``--config`` JSON file > defaults.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import hilbert as H
from . import oracle as O
from . import tomography as T
from . import transforms as X
from .errors import DomainError, JstomoError
from .quadrature import ball_pairs, euler_quadrature, line_grid, make_euler_quadrature, plane_quadrature
from .specfun import label_str, twice

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
FIG_TOLERANCE = 1e-6
FIG4_ALPHAS = (0.0, 0.5, 1.0, 1.5)
DIRECTIONS = ("spin-to-symplectic", "spin-to-photon", "spin-to-wigner", "symplectic-to-spin",
              "photon-to-spin", "wigner-to-spin", "photon-to-symplectic", "symplectic-to-photon")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    cutoff: int = H.DEFAULT_CUTOFF
    s: float = 0.1
    n_beta: int | None = None  # Euler rule orders; None picks the exact rule for j
    n_alpha: int | None = None
    x: str = "-5:5:0.1"
    mu: list = field(default_factory=lambda: [1.0, 1.0])
    nu: list = field(default_factory=lambda: [1.0, 1.0])
    alpha_diag: list = field(default_factory=lambda: list(FIG4_ALPHAS))
    tolerance: object = "default"
    out: str = "out"
    seed: int = 0

    def validate(self) -> "RunConfig":
        if not isinstance(self.cutoff, int) or self.cutoff < 1:
            raise UsageError(f"cutoff must be a positive integer, got {self.cutoff!r}")
        if not 0.0 < float(self.s) < 1.0:
            raise UsageError(f"s must lie in (0, 1), got {self.s!r}")
        for name in ("n_beta", "n_alpha"):
            v = getattr(self, name)
            if v is not None and (not isinstance(v, int) or v < 1):
                raise UsageError(f"{name} must be a positive integer")
        parse_range(self.x)
        try:
            O.resolve_tolerances(self.tolerance)
        except JstomoError as exc:
            raise UsageError(str(exc)) from None
        return self


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return RunConfig(**data)


def resolve_config(args) -> RunConfig:
    cfg = load_config(getattr(args, "config", None))
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            setattr(cfg, f.name, v)
    return cfg.validate()


# ----------------------------------------------------------------------------
# argument parsing helpers
# ----------------------------------------------------------------------------

def parse_range(text: str) -> np.ndarray:
    try:
        lo, hi, step = (float(v) for v in str(text).split(":"))
        return line_grid(lo, hi, step)
    except ValueError as exc:
        raise UsageError(f"bad range {text!r} (want lo:hi:step): {exc}") from None


def parse_complex(text) -> complex:
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"bad complex number {text!r}") from None


def split_list(values) -> list[str]:
    out = []
    for v in values or []:
        out += [p for p in str(v).split(",") if p != ""]
    return out


def parse_alphas(values, modes: int) -> np.ndarray:
    """One-mode: '0.5+0.2i' per entry.  Two-mode: 'a1,a2' per entry."""
    pts = []
    for v in values or []:
        parts = str(v).split(",")
        if len(parts) != modes:
            raise UsageError(f"amplitude {v!r} needs {modes} comma-separated value(s)")
        pts.append([parse_complex(p) for p in parts])
    return np.asarray(pts, dtype=complex).reshape(-1, modes)


def parse_plane(text: str):
    try:
        radius, spacing = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"bad plane grid {text!r} (want radius:spacing)") from None
    return radius, spacing


def parse_j(text):
    try:
        return twice(text) / 2
    except (ValueError, TypeError):
        raise UsageError(f"bad j {text!r}") from None


def euler_for(j, cfg: RunConfig):
    if cfg.n_beta is None and cfg.n_alpha is None:
        return make_euler_quadrature(j)
    base = make_euler_quadrature(j)
    return euler_quadrature(cfg.n_beta or base.n_beta, cfg.n_alpha or base.n_alpha)


def use_color() -> bool:
    return "NO_COLOR" not in os.environ and sys.stdout.isatty()


def colorize(text: str) -> str:
    if not use_color():
        return text
    return text.replace(" pass", " \033[32mpass\033[0m").replace(" FAIL", " \033[31mFAIL\033[0m").replace(
        " ERROR", " \033[31mERROR\033[0m")


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True, indent=1) + "\n")
    return path


def output_path(args, cfg: RunConfig, default_name: str) -> Path:
    if getattr(args, "output", None):
        return Path(args.output)
    return Path(cfg.out) / default_name


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def load_state(path) -> H.DensityMatrix:
    obj = read_json(path)
    if "basis" not in obj:
        raise UsageError(f"{path} is not a state file")
    return H.DensityMatrix.from_json(obj)


def load_tomogram(path):
    obj = read_json(path)
    kinds = {"spin": T.SpinTomogram, "symplectic": T.SymplecticTomogram, "photon": T.PhotonTomogram,
             "wigner": T.WignerGrid}
    kind = obj.get("kind")
    if kind not in kinds:
        raise UsageError(f"{path} is not a tomogram file")
    return kind, kinds[kind].from_json(obj)


# ----------------------------------------------------------------------------
# state
# ----------------------------------------------------------------------------

def cmd_state(args, cfg: RunConfig) -> int:
    if args.source == "paper":
        try:
            sup = H.make_paper_state(parse_j(args.j))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        rho, name = sup.density(), sup.name
    elif args.source == "random":
        sup = H.random_spin_state(parse_j(args.j), cfg.seed if args.seed is None else args.seed)
        rho, name = sup.density(), sup.name
    elif args.source == "fock":
        rho, name = H.fock_state(args.n, cfg.cutoff), f"fock{args.n}"
    else:
        rho = load_state(args.input)
        name = Path(args.input).stem
    if args.embed:
        if rho.basis != "spin":
            raise UsageError("--embed needs a spin state")
        rho = H.js_inverse(rho, cfg.cutoff)
    path = output_path(args, cfg, f"state_{name}.json")
    write_json(path, rho.to_json())
    info = {"file": str(path), "basis": rho.basis, "dim": rho.dim, "trace": float(np.real(np.trace(rho.data))),
            "purity": rho.purity()}
    if rho.meta.get("norm_factor") is not None:
        info["norm_factor"] = rho.meta["norm_factor"]
    print(json.dumps(info, sort_keys=True))
    return EXIT_OK


# ----------------------------------------------------------------------------
# tomogram
# ----------------------------------------------------------------------------

def _frames(mu, nu, modes: int) -> np.ndarray:
    mu = np.asarray([float(v) for v in split_list(mu)])
    nu = np.asarray([float(v) for v in split_list(nu)])
    if len(mu) != len(nu) or len(mu) % modes:
        raise UsageError(f"--mu/--nu need matching lists with a multiple of {modes} values")
    return np.stack([mu, nu], axis=-1).reshape(-1, modes, 2)


def _cv_points(args, modes: int):
    """Amplitude points and weights from --alpha / --alpha-diag / --plane."""
    if getattr(args, "plane", None):
        radius, spacing = parse_plane(args.plane)
        q = plane_quadrature(radius, spacing, disk=True)
        if modes == 1:
            return q.nodes[:, None], q.weights
        return ball_pairs(q, radius)
    pts = parse_alphas(args.alpha, modes)
    diag = [float(v) for v in split_list(getattr(args, "alpha_diag", None))]
    if diag:
        if modes != 2:
            raise UsageError("--alpha-diag is for two-mode states")
        pts = np.concatenate([pts, np.array([[a, a] for a in diag], dtype=complex)])
    if not len(pts):
        raise UsageError("give amplitudes with --alpha, --alpha-diag or --plane")
    return pts, None


def cmd_tomogram(args, cfg: RunConfig) -> int:
    rho = load_state(args.input)
    rep = args.representation
    if rep == "spin":
        if rho.basis == "fock2":
            if args.j is None:
                raise UsageError("a two-mode state needs --j to pick the sector")
            rho = H.js_forward(rho, parse_j(args.j))
        elif rho.basis != "spin":
            raise UsageError("spin tomogram needs a spin or two-mode state")
        elif args.j is not None and twice(args.j) != rho.label:
            raise UsageError(f"state has j={label_str(rho.label)}, --j says {args.j}")
        tomo = T.spin_tomogram(rho, euler_for(rho.j, cfg))
    else:
        if rho.basis == "spin":
            raise UsageError(f"{rep} tomogram needs a Fock state; embed spin states with `state ... --embed`")
        if rep == "symplectic":
            x = parse_range(cfg.x)
            if args.angles:
                tomo = T.optical_tomogram(rho, x, args.angles)
            else:
                tomo = T.symplectic_tomogram(rho, x, _frames(cfg.mu, cfg.nu, rho.modes))
        elif rep == "photon":
            pts, w = _cv_points(args, rho.modes)
            tomo = T.photon_tomogram(rho, pts, args.ncut, weights=w)
        else:
            pts, w = _cv_points(args, rho.modes)
            tomo = T.wigner_function(rho, pts, weights=w)
    path = output_path(args, cfg, f"tomogram_{rep}.json")
    write_json(path, tomo.to_json())
    if args.csv:
        write_tomogram_csv(path.with_suffix(".csv"), tomo)
    print(json.dumps({"file": str(path), "kind": rep, "values": int(np.asarray(tomo.values).size)}))
    return EXIT_OK


def write_tomogram_csv(path, tomo) -> Path:
    from .plotting import write_csv

    if isinstance(tomo, T.SpinTomogram):
        rows = [(float(a), float(b), float(c), float(w), label_str(tomo.tj - 2 * k), float(v[k]))
                for (a, b, c), w, v in zip(tomo.quadrature.nodes, tomo.quadrature.weights, tomo.values)
                for k in range(tomo.tj + 1)]
        return write_csv(path, ["alpha", "beta", "gamma", "weight", "m", "omega"], rows)
    if isinstance(tomo, T.SymplecticTomogram):
        rows = []
        for f, frame in enumerate(tomo.frames):
            fr = [float(v) for v in frame.ravel()]
            if tomo.modes == 1:
                rows += [(f, *fr, float(x), float(tomo.values[f, i])) for i, x in enumerate(tomo.x)]
            else:
                rows += [(f, *fr, float(x1), float(x2), float(tomo.values[f, i, k]))
                         for i, x1 in enumerate(tomo.x) for k, x2 in enumerate(tomo.x)]
        head = ["frame"] + (["mu", "nu", "x"] if tomo.modes == 1 else ["mu1", "nu1", "mu2", "nu2", "x1", "x2"])
        return write_csv(path, head + ["W"], rows)
    if isinstance(tomo, T.PhotonTomogram):
        rows = []
        for p, a in enumerate(tomo.alphas):
            amp = [float(v) for z in a for v in (z.real, z.imag)]
            for idx in np.ndindex(*tomo.values.shape[1:]):
                rows.append((*amp, *idx, float(tomo.values[(p,) + idx])))
        head = ["re_a", "im_a", "n"] if tomo.modes == 1 else ["re_a1", "im_a1", "re_a2", "im_a2", "n1", "n2"]
        return write_csv(path, head + ["w"], rows)
    rows = [(*[float(v) for z in a for v in (z.real, z.imag)], float(w)) for a, w in zip(tomo.alphas, tomo.values)]
    head = ["re_a", "im_a"] if tomo.modes == 1 else ["re_a1", "im_a1", "re_a2", "im_a2"]
    return write_csv(path, head + ["W"], rows)


# ----------------------------------------------------------------------------
# transform
# ----------------------------------------------------------------------------

KERNELS_USED = {
    "spin-to-symplectic": ["kernel_spin_to_sympl"],
    "spin-to-photon": ["kernel_spin_to_photon"],
    "spin-to-wigner": ["kernel_spin_to_wigner"],
    "symplectic-to-spin": ["kernel_sympl_to_spin", "denom_trace_sympl"],
    "photon-to-spin": ["kernel_photon_to_spin", "denom_trace_photon"],
    "wigner-to-spin": ["kernel_wigner_to_spin", "denom_trace_wigner"],
    "photon-to-symplectic": ["kernel_photon_to_sympl"],
    "symplectic-to-photon": ["kernel_sympl_to_photon"],
}


def _expect(kind: str, want: str, direction: str):
    if kind != want:
        raise UsageError(f"{direction} needs a {want} tomogram, got {kind}")


def cmd_transform(args, cfg: RunConfig) -> int:
    d = args.direction
    kind, src = load_tomogram(args.input)
    prov = {"direction": d, "kernels": KERNELS_USED[d], "source": str(args.input)}
    if d.startswith("spin-to-"):
        _expect(kind, "spin", d)
        if d == "spin-to-symplectic":
            x = parse_range(cfg.x)
            res = X.spin_to_symplectic(src, x, _frames(cfg.mu, cfg.nu, 2), normalization=args.normalization)
        else:
            pts, _ = _cv_points(args, 2)
            if d == "spin-to-photon":
                res = X.spin_to_photon(src, pts, args.ncut, normalization=args.normalization)
            else:
                res = X.spin_to_wigner(src, pts, normalization=args.normalization)
        prov["quadrature"] = {"euler": src.quadrature.size, "exact": src.quadrature.exact_for(src.j)}
        out = res.to_json()
    elif d.endswith("-to-spin"):
        if args.j is None:
            raise UsageError(f"{d} needs --j")
        j = parse_j(args.j)
        euler = euler_for(j, cfg)
        if d == "symplectic-to-spin":
            _expect(kind, "symplectic", d)
            res = X.symplectic_to_spin(src, j, euler=euler)
        elif d == "photon-to-spin":
            _expect(kind, "photon", d)
            res = X.photon_to_spin(src, j, cfg.s, denominator=args.denominator, euler=euler)
            prov["s"] = cfg.s
        else:
            _expect(kind, "wigner", d)
            res = X.wigner_to_spin(src, j, euler=euler)
        prov["quadrature"] = {"euler": euler.size}
        out = res.to_json()
    elif d == "photon-to-symplectic":
        _expect(kind, "photon", d)
        res = X.photon_to_symplectic(src, parse_range(cfg.x), _frames(cfg.mu, cfg.nu, 1)[:, 0, :], cfg.s)
        prov["s"] = cfg.s
        out = res.to_json()
    else:
        _expect(kind, "symplectic", d)
        pts, _ = _cv_points(args, 1)
        res = X.symplectic_to_photon(src, pts[:, 0], args.ncut if args.ncut is not None else 10)
        out = res.to_json()
    out.setdefault("meta", {})["provenance"] = prov
    path = output_path(args, cfg, f"transform_{d}.json")
    write_json(path, out)
    print(json.dumps({"file": str(path), "direction": d}))
    return EXIT_OK


# ----------------------------------------------------------------------------
# reproduce
# ----------------------------------------------------------------------------

def _fig_tolerance(cfg: RunConfig) -> float:
    tol = cfg.tolerance
    return FIG_TOLERANCE if tol == "default" or isinstance(tol, dict) else float(tol)


def _report_lines(path, reports):
    path.write_text("".join(r.line() + "\n" for r in reports))


def reproduce_fig3(cfg: RunConfig, tol: float, out: Path):
    from .plotting import symplectic_surfaces, write_csv

    x = parse_range(cfg.x)
    frames = _frames(cfg.mu, cfg.nu, 2)[:1]
    grid = {"x": [float(x[0]), float(x[-1]), float(x[1] - x[0])],
            "mu": [frames[0, :, 0].tolist()], "nu": [frames[0, :, 1].tolist()]}
    panels, titles, reports = [], [], []
    for name in H.PAPER_STATES:
        sup = H.make_paper_state(name)
        tag = label_str(sup.tj).replace("/", "_")
        omega = T.spin_tomogram(sup.density(), euler_for(sup.j, cfg))
        res = X.spin_to_symplectic(omega, x, frames)
        vals = res.values[0]
        write_json(out / f"fig3_j{tag}.json", res.to_json())
        write_csv(out / f"fig3_j{tag}.csv", ["x1", "x2", "W"],
                  [(float(a), float(b), float(vals[i, k])) for i, a in enumerate(x) for k, b in enumerate(x)])
        panels.append(vals)
        titles.append(f"j = {label_str(sup.tj)}")
        reports.append(O.verify_transform("spin_to_symplectic", f"paper:{name}", grid, tol))
    symplectic_surfaces(out / "fig3.png", x, panels, titles)
    return reports


def reproduce_fig4(cfg: RunConfig, tol: float, out: Path):
    from .plotting import photon_bars, write_csv

    alphas = [float(a) for a in split_list(cfg.alpha_diag)]
    pts = np.array([[a, a] for a in alphas], dtype=complex)
    rows, row_titles, csv_rows, tables, reports = [], [], [], {}, []
    for name in H.PAPER_STATES:
        sup = H.make_paper_state(name)
        omega = T.spin_tomogram(sup.density(), euler_for(sup.j, cfg))
        res = X.spin_to_photon(omega, pts)
        table = X.sector_table(res)  # (P, 2j+1), n1 = 2j..0
        lab = label_str(sup.tj)
        tables[lab] = {"alphas": alphas, "n1": list(range(sup.tj, -1, -1)), "values": table.tolist()}
        row = []
        for p, a in enumerate(alphas):
            bars = []
            for k in range(sup.tj + 1):
                n1, n2 = sup.tj - k, k
                bars.append((f"({n1},{n2})", float(table[p, k])))
                csv_rows.append((lab, a, n1, n2, float(table[p, k])))
            row.append(bars[::-1])
        rows.append(row)
        row_titles.append(f"j = {lab}")
        reports.append(O.verify_transform("spin_to_photon", f"paper:{name}", {"alpha_diag": alphas}, tol))
    write_json(out / "fig4.json", {"kind": "photon_sector_tables", "tables": tables})
    write_csv(out / "fig4.csv", ["j", "alpha", "n1", "n2", "w"], csv_rows)
    photon_bars(out / "fig4.png", rows, row_titles, [f"a1 = a2 = {a:g}" for a in alphas])
    return reports


def cmd_reproduce(args, cfg: RunConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    tol = _fig_tolerance(cfg)
    t0 = time.perf_counter()
    reports = reproduce_fig3(cfg, tol, out) if args.figure == "fig3" else reproduce_fig4(cfg, tol, out)
    _report_lines(out / f"{args.figure}_report.jsonl", reports)
    print(colorize(O.summary_table(reports)))
    print(f"{args.figure}: wrote {out} in {time.perf_counter() - t0:.1f} s")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_NUMERIC


# ----------------------------------------------------------------------------
# verify
# ----------------------------------------------------------------------------

def cmd_verify(args, cfg: RunConfig) -> int:
    profile = cfg.tolerance
    reports = []
    emit = (lambda r: print(r.line(), flush=True)) if args.json else None
    if args.only in (None, "transforms"):
        names = args.transform or O.TRANSFORMS
        bad = set(names) - set(O.TRANSFORMS)
        if bad:
            raise UsageError(f"unknown transforms: {', '.join(sorted(bad))}")
        try:
            reports += O.verify_all(cfg.seed, profile, transforms=names, states=args.state or None, progress=emit)
        except JstomoError as exc:
            raise UsageError(str(exc)) from None
    if args.only in (None, "kernels"):
        ks = O.kernel_suite(cfg.seed, args.draws, progress=emit)
        if isinstance(profile, (int, float)):
            for r in ks:  # a scalar tolerance profile applies to the kernel suite too
                r.tolerance = float(profile)
                r.passed = r.max_abs_error < r.tolerance and r.max_rel_error < O.KERNEL_RTOL
        reports += ks
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _report_lines(out / "verify_report.jsonl", reports)
    if not args.json:
        print(colorize(O.summary_table(reports)))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_NUMERIC


# ----------------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------------

def _tolerance(text: str):
    if text == "default":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance must be a number or 'default', got {text!r}") from None


_VALUE_LIKE = re.compile(r"^-[\d.]")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with run settings (flags override it)")
    common.add_argument("--out", help="output directory (default: out)")
    common.add_argument("--cutoff", type=int, help="Fock cutoff per mode (maximal occupation)")
    common.add_argument("--seed", type=int)

    p = argparse.ArgumentParser(prog="jstomo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    st = sub.add_parser("state", parents=[common], help="write a density-matrix JSON file")
    st.add_argument("source", choices=("paper", "random", "fock", "file"))
    st.add_argument("--j", help="spin (paper/random), e.g. 1/2")
    st.add_argument("--n", type=int, default=0, help="occupation (fock)")
    st.add_argument("--in", dest="input", help="state file (file)")
    st.add_argument("--embed", action="store_true", help="write the two-mode embedding of a spin state")
    st.add_argument("-o", "--output")
    st.set_defaults(func=cmd_state)

    tm = sub.add_parser("tomogram", parents=[common], help="tomogram of a state file")
    tm.add_argument("representation", choices=("spin", "symplectic", "photon", "wigner"))
    tm.add_argument("--in", dest="input", required=True)
    tm.add_argument("--j")
    tm.add_argument("--x", help="x grid lo:hi:step")
    tm.add_argument("--mu", nargs="+", help="mu per frame and mode")
    tm.add_argument("--nu", nargs="+")
    tm.add_argument("--angles", type=int, help="optical tomogram with this many angles per mode")
    tm.add_argument("--alpha", nargs="+", help="amplitudes; 'a1,a2' for two modes")
    tm.add_argument("--alpha-diag", nargs="+", help="two-mode points a1 = a2 (comma list)")
    tm.add_argument("--plane", help="weighted grid radius:spacing (disk, or ball for two modes)")
    tm.add_argument("--ncut", type=int, help="photon-number cutoff of the table")
    tm.add_argument("--n-beta", dest="n_beta", type=int)
    tm.add_argument("--n-alpha", dest="n_alpha", type=int)
    tm.add_argument("--csv", action="store_true", help="also write a CSV grid")
    tm.add_argument("-o", "--output")
    tm.set_defaults(func=cmd_tomogram)

    tr = sub.add_parser("transform", parents=[common], help="kernel-based transform of a tomogram file")
    tr.add_argument("direction", choices=DIRECTIONS)
    tr.add_argument("--in", dest="input", required=True)
    tr.add_argument("--j")
    tr.add_argument("--s", type=float, help="photon ordering parameter in (0, 1)")
    tr.add_argument("--x")
    tr.add_argument("--mu", nargs="+")
    tr.add_argument("--nu", nargs="+")
    tr.add_argument("--alpha", nargs="+")
    tr.add_argument("--alpha-diag", nargs="+")
    tr.add_argument("--ncut", type=int)
    tr.add_argument("--normalization", choices=X.NORMALIZATIONS, default="raw")
    tr.add_argument("--denominator", choices=("full", "sector"), default="full")
    tr.add_argument("--n-beta", dest="n_beta", type=int)
    tr.add_argument("--n-alpha", dest="n_alpha", type=int)
    tr.add_argument("-o", "--output")
    tr.set_defaults(func=cmd_transform)

    rp = sub.add_parser("reproduce", parents=[common], help="spin-to-CV figure pipelines with oracle checks")
    rp.add_argument("figure", choices=("fig3", "fig4"))
    rp.add_argument("--tolerance", type=_tolerance)
    rp.add_argument("--x")
    rp.add_argument("--alpha-diag", nargs="+")
    rp.set_defaults(func=cmd_reproduce)

    vf = sub.add_parser("verify", parents=[common], help="oracle verification of kernels and transforms")
    vf.add_argument("--only", choices=("kernels", "transforms"))
    vf.add_argument("--json", action="store_true", help="JSON lines on stdout")
    vf.add_argument("--tolerance", type=_tolerance, help="'default' or one number for every check")
    vf.add_argument("--transform", nargs="+", help="restrict to these transforms")
    vf.add_argument("--state", nargs="+", help="state specs, e.g. paper:j_one random:1:3 fock:1")
    vf.add_argument("--draws", type=int, default=O.KERNEL_DRAWS)
    vf.set_defaults(func=cmd_verify)
    # values such as -5:5:0.1 or -0.5+0.2i are arguments, not options
    for parser in (p, st, tm, tr, rp, vf):
        parser._negative_number_matcher = _VALUE_LIKE
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"jstomo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"jstomo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (JstomoError, ArithmeticError) as exc:
        print(f"jstomo: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"jstomo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
