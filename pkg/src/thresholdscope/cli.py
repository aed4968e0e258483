"""Batch command-line front end.

Every subcommand writes one table (CSV) or one document (JSON) to --output,
or to stdout when no path is given. Files are written atomically. Exit codes:
0 success, 1 computational error (the error class is printed), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .errors import ResidualTooLarge, ThresholdScopeError

SCHEMAS = {
    "jost": "x, re_theta_plus, im_theta_plus, re_theta_minus, im_theta_minus",
    "wronskian": "re_zeta, im_zeta, re_w, im_w, abs_w",
    "detect": "z0_re, z0_im, re_w, im_w, classification, rank",
    "bound-states": "kappa, E",
    "lap-sweep": "re_z, im_z, norm, resolution, refined_norm",
    "disk2d": "r, re_phi, im_phi, re_theta, im_theta, re_ratio, im_ratio",
    "bifurcate": "epsilon, re_E, im_E, wronskian_abs",
    "bessel-selftest": "re_z, im_z, regime, wronskian_dev, hankel_wronskian_dev, rel_err_j0, rel_err_y0",
    "shift-demo": "n, residual, ratio_to_previous, n_times_last_psi",
    "rank-demo": "min_rank, svd_nullity",
}


@dataclass
class RunConfig:
    subcommand: str
    potential_file: str | None = None
    params: dict = field(default_factory=dict)
    output: str | None = None
    format: str = "csv"
    seed: int = 0
    plot_data: str | None = None
    selftest: bool = False


@dataclass
class Result:
    header: list[str]
    rows: list[list[Any]]
    document: dict
    plot: tuple[list[float], list[float]] | None = None


# -- parsing helpers ---------------------------------------------------------


def parse_complex(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("i", "j")
    if t in ("j", "+j"):
        return 1j
    if t == "-j":
        return -1j
    return complex(t)


def _complex_arg(text: str) -> complex:
    try:
        return parse_complex(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _cpair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _potential(cfg: RunConfig):
    from .potentials import Potential

    p = cfg.params
    if cfg.potential_file:
        return Potential.load(cfg.potential_file)
    if p.get("barrier_g") is not None:
        return Potential.indicator(-1.0, 1.0, p["barrier_g"])
    if p.get("well_g") is not None:
        return Potential.indicator(-1.0, 1.0, -p["well_g"])
    raise UsageError("one of --potential, --barrier-g or --well-g is required")


class UsageError(Exception):
    pass


# -- subcommands -------------------------------------------------------------


def cmd_jost(cfg: RunConfig) -> Result:
    from .jost import SpectralPoint, jost_minus, jost_plus, verify_jost_bounds
    from .numerics import Grid

    p = cfg.params
    V = _potential(cfg)
    sp = SpectralPoint.from_zeta(p["zeta"])
    R = V.support_radius
    grid = Grid.uniform(-R - p["L"], R + p["L"], p["points"])
    plus, minus = jost_plus(V, sp, grid), jost_minus(V, sp, grid)
    reports = [verify_jost_bounds(V, sp, s, raise_on_fail=False) for s in (plus, minus)]
    x = grid.nodes
    rows = [[a, b.real, b.imag, c.real, c.imag] for a, b, c in zip(x, plus.theta, minus.theta)]
    doc = {
        "zeta": _cpair(sp.zeta),
        "x": x.tolist(),
        "theta_plus": [_cpair(v) for v in plus.theta],
        "theta_minus": [_cpair(v) for v in minus.theta],
        "truncation_terms": [plus.truncation_terms, minus.truncation_terms],
        "certified_tail": [plus.certified_tail, minus.certified_tail],
        "bounds": {r.side: {"ratios": r.ratios, "passed": r.passed} for r in reports},
    }
    return Result(SCHEMAS["jost"].split(", "), rows, doc, (x.tolist(), np.abs(plus.theta).tolist()))


def cmd_wronskian(cfg: RunConfig) -> Result:
    from .jost import SpectralPoint, wronskian

    p = cfg.params
    V = _potential(cfg)
    if p.get("zeta_grid"):
        g = p["zeta_grid"]
        if len(g) != 6:
            raise UsageError("--zeta-grid needs re_min,re_max,n_re,im_min,im_max,n_im")
        res = np.linspace(g[0], g[1], int(g[2]))
        ims = np.linspace(g[3], g[4], int(g[5]))
        zetas = [complex(a, b) for b in ims for a in res]
    else:
        zetas = [p["zeta"]]
    if any(z.imag < 0 for z in zetas):
        raise UsageError("--zeta must have nonnegative imaginary part")
    vals = [wronskian(V, SpectralPoint.from_zeta(z)) for z in zetas]
    rows = [[z.real, z.imag, w.real, w.imag, abs(w)] for z, w in zip(zetas, vals)]
    doc = {"zeta": [_cpair(z) for z in zetas], "w": [_cpair(w) for w in vals]}
    return Result(SCHEMAS["wronskian"].split(", "), rows, doc, ([abs(z) for z in zetas], [abs(w) for w in vals]))


def cmd_detect(cfg: RunConfig) -> Result:
    from .resolvent import detect_virtual_level

    V = _potential(cfg)
    rep = detect_virtual_level(V, cfg.params["z0"])
    z0, w = rep.z0, rep.wronskian_value
    rows = [[z0.real, z0.imag, w.real, w.imag, rep.classification, rep.rank]]
    plot = None
    if rep.virtual_state is not None:
        plot = (rep.grid.nodes.tolist(), rep.virtual_state.real.tolist())
    return Result(SCHEMAS["detect"].split(", "), rows, rep.to_dict(), plot)


def cmd_bound_states(cfg: RunConfig) -> Result:
    from .resolvent import bound_states

    p = cfg.params
    V = _potential(cfg)
    found = bound_states(V, (p["kappa_min"], p["kappa_max"]))
    rows = [[k, E] for k, E in found]
    doc = {"kappa": [k for k, _ in found], "E": [E for _, E in found]}
    return Result(SCHEMAS["bound-states"].split(", "), rows, doc, ([k for k, _ in found], [E for _, E in found]))


def cmd_lap_sweep(cfg: RunConfig) -> Result:
    from .lapnorm import WeightPair, default_path, lap_sweep

    p = cfg.params
    fam = p["family"]
    if fam == "generic1d":
        family = ("generic1d", _potential(cfg))
    elif fam in ("barrier1d", "disk2d_radial"):
        family = (fam, p["g"] if p.get("g") is not None else (1.0 if fam == "barrier1d" else 0.01))
    else:
        family = fam
    w = WeightPair(p["s"], p["sprime"], p["space"])
    ks = range(p["kmin"], p["kmax"] + 1)
    path = default_path(p["z0"], ks)
    sw = lap_sweep(family, w, path, L=p["L"], n=p["points"], z0=p["z0"])
    rows = [[sp.z.real, sp.z.imag, v, r, f] for sp, v, r, f in zip(sw.path, sw.norms, sw.grid_resolutions, sw.refined_norms)]
    doc = {
        "path": [_cpair(sp.z) for sp in sw.path],
        "norms": sw.norms,
        "grid_resolutions": sw.grid_resolutions,
        "refined_norms": sw.refined_norms,
        "z0": _cpair(sw.z0),
        "classification": sw.classification,
        "fit_exponent": sw.fit_exponent,
        "plateau_spread": sw.plateau_spread,
        "log_fit": sw.log_fit,
    }
    dist = [abs(sp.z - sw.z0) for sp in sw.path]
    return Result(SCHEMAS["lap-sweep"].split(", "), rows, doc, (dist, sw.norms))


def cmd_disk2d(cfg: RunConfig) -> Result:
    from . import disk2d

    p = cfg.params
    g, zeta = p["g"], p["zeta"]
    c = disk2d.disk_coefficients(zeta, g)
    r = np.geomspace(1e-2, p["L"], p["points"])
    phi, theta, _, _ = disk2d.radial_solutions(r, zeta, g, c)
    ratio = theta / c.wronskian
    rows = [[a, b.real, b.imag, t.real, t.imag, q.real, q.imag] for a, b, t, q in zip(r, phi, theta, ratio)]
    doc = {
        "zeta": _cpair(zeta),
        "g": g,
        "Z": _cpair(c.Z),
        "a": _cpair(c.a),
        "b": _cpair(c.b),
        "A": _cpair(c.A),
        "B": _cpair(c.B),
        "wronskian": _cpair(c.wronskian),
        "gamma": disk2d.gamma(g),
        "r": r.tolist(),
        "theta_over_w": [_cpair(v) for v in ratio],
    }
    return Result(SCHEMAS["disk2d"].split(", "), rows, doc, (r.tolist(), np.abs(ratio).tolist()))


def cmd_bifurcate(cfg: RunConfig) -> Result:
    from .bifurcation import track_bifurcation
    from .potentials import Potential

    p = cfg.params
    V = _potential(cfg)
    W = Potential.load(p["perturbation"]) if p.get("perturbation") else Potential.indicator(-1.0, 1.0, 1.0)
    path = track_bifurcation(V, W, p["z0"], p["eps"])
    rows = [[e, E.real, E.imag, a] for e, E, a in zip(path.epsilons, path.eigenvalues, path.wronskian_abs)]
    doc = {
        "epsilons": path.epsilons,
        "eigenvalues": [_cpair(E) for E in path.eigenvalues],
        "z0": _cpair(path.z0),
        "law_fit": list(path.law_fit) if path.law_fit else None,
        "wronskian_abs": path.wronskian_abs,
        "absent_counts": {repr(k): v for k, v in path.absent_counts.items()} if path.absent_counts else None,
    }
    plot = (path.epsilons, [abs(E - path.z0) for E in path.eigenvalues])
    return Result(SCHEMAS["bifurcate"].split(", "), rows, doc, plot)


def bessel_test_points(n: int, seed: int) -> np.ndarray:
    """Half in the series disk, half beyond it; |Im z| <= 6 keeps the Wronskian well conditioned."""
    rng = np.random.default_rng(seed)
    k = n // 2
    small = rng.uniform(0.05, 10.0, k) * np.exp(1j * rng.uniform(-np.pi / 2, np.pi, k))
    re = rng.uniform(13.0, 60.0, n - k) * rng.choice([-1.0, 1.0], n - k)
    large = re + 1j * rng.uniform(-3.0, 6.0, n - k)
    return np.concatenate([small, large])


def cmd_bessel_selftest(cfg: RunConfig) -> Result:
    from scipy import special

    from .bessel import SERIES_RADIUS, bessel_all, hankel_wronskian_check, wronskian_deviation

    p = cfg.params
    zs = bessel_test_points(p["n"], cfg.seed)
    J0, Y0 = bessel_all(zs)[:2]
    rows, worst = [], 0.0
    for z, j, y in zip(zs, J0, Y0):
        wd = abs(wronskian_deviation(z))
        hd = abs(hankel_wronskian_check(z))
        ej = abs(j - special.jv(0, z)) / max(abs(special.jv(0, z)), 1e-300)
        ey = abs(y - special.yv(0, z)) / max(abs(special.yv(0, z)), 1e-300)
        worst = max(worst, wd, hd)
        rows.append([z.real, z.imag, "series" if abs(z) <= SERIES_RADIUS else "asymptotic", wd, hd, ej, ey])
    doc = {"points": [_cpair(z) for z in zs], "max_wronskian_deviation": worst, "threshold": p["threshold"]}
    doc["passed"] = worst <= p["threshold"]
    res = Result(SCHEMAS["bessel-selftest"].split(", "), rows, doc, ([abs(z) for z in zs], [r[3] for r in rows]))
    if not doc["passed"]:
        err = ResidualTooLarge(f"Wronskian deviation {worst:.3g} exceeds {p['threshold']:.3g}")
        err.result = res
        raise err
    return res


def cmd_shift_demo(cfg: RunConfig) -> Result:
    from .discrete import engineered_virtual_state

    p = cfg.params
    sizes = [p["n"] * 2**i for i in range(p["doublings"] + 1)]
    results = [engineered_virtual_state(n, p["z0"]) for n in sizes]
    rows, prev = [], None
    for n, r in zip(sizes, results):
        rows.append([n, r.residual, (prev / r.residual) if prev else "", r.tail_product.real])
        prev = r.residual
    doc = {
        "sizes": sizes,
        "residuals": [r.residual for r in results],
        "tail_products": [_cpair(r.tail_product) for r in results],
        "l2_partial": [r.l2_partial for r in results],
        "z0": _cpair(p["z0"]),
    }
    return Result(SCHEMAS["shift-demo"].split(", "), rows, doc, ([float(n) for n in sizes], [r.residual for r in results]))


def _matrix(name: str, seed: int) -> np.ndarray:
    from .discrete import jordan_block, planted_nullity_matrix

    if name == "jordan3":
        return jordan_block(3)
    if name.startswith("zero"):
        n = int(name[4:] or 3)
        return np.zeros((n, n), dtype=complex)
    if name.startswith("planted:"):
        _, n, k = name.split(":")
        return planted_nullity_matrix(int(n), int(k), seed)
    if name.startswith("random:"):
        n = int(name.split(":")[1])
        rng = np.random.default_rng(seed)
        return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    path = Path(name)
    if not path.exists():
        raise UsageError(f"--matrix: unknown matrix {name!r}")
    data = json.loads(path.read_text())
    return np.array([[complex(*c) if isinstance(c, list) else complex(c) for c in row] for row in data], dtype=complex)


def cmd_rank_demo(cfg: RunConfig) -> Result:
    from .discrete import min_rank_regularizer, svd_nullity

    p = cfg.params
    try:
        M = _matrix(p["matrix"], cfg.seed)
    except (ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"--matrix: {exc}")
    r = min_rank_regularizer(M, trials=p["trials"], seed=cfg.seed)
    k = svd_nullity(M)
    return Result(SCHEMAS["rank-demo"].split(", "), [[r, k]], {"min_rank": r, "svd_nullity": k, "size": M.shape[0]})


HANDLERS: dict[str, Callable[[RunConfig], Result]] = {
    "jost": cmd_jost,
    "wronskian": cmd_wronskian,
    "detect": cmd_detect,
    "bound-states": cmd_bound_states,
    "lap-sweep": cmd_lap_sweep,
    "disk2d": cmd_disk2d,
    "bifurcate": cmd_bifurcate,
    "bessel-selftest": cmd_bessel_selftest,
    "shift-demo": cmd_shift_demo,
    "rank-demo": cmd_rank_demo,
}


# -- self tests --------------------------------------------------------------


def _selftests() -> dict[str, list[tuple[str, Callable[[], bool]]]]:
    from . import bessel, discrete, disk2d, jost, lapnorm, resolvent
    from .bifurcation import construct_3d_family
    from .potentials import Potential

    well = Potential.indicator(-1.0, 1.0, -0.5)

    def jost_closed_form():
        sp = jost.SpectralPoint.from_zeta(0.7 + 0.2j)
        x = np.linspace(-3, 3, 13)
        th = jost.jost_plus(well, sp, jost.default_grid(well)).field.theta(x)[0]
        return np.max(np.abs(th - jost.barrier_jost(-0.5, sp.zeta, x)[0])) < 1e-10

    def jost_bounds():
        V = Potential.random_piecewise_constant(3)
        sp = jost.SpectralPoint.from_zeta(0.4 + 0.3j)
        return verify(V, sp)

    def verify(V, sp):
        sol = jost.jost_plus(V, sp)
        return jost.verify_jost_bounds(V, sp, sol, raise_on_fail=False).passed

    def wronskian_closed_form():
        z = 1.3 + 0.4j
        return abs(jost.wronskian(well, z) - jost.barrier_wronskian(-0.5, z)) < 1e-8 * abs(jost.barrier_wronskian(-0.5, z))

    def zero_is_virtual():
        return resolvent.detect_virtual_level(Potential.zero(), 0).classification == "virtual_level"

    def barrier_regular():
        return resolvent.detect_virtual_level(Potential.indicator(-1, 1, 1.0), 0).classification == "regular"

    def free_kernel_symmetric():
        K = resolvent.free1d(jost.SpectralPoint.from_z(-0.3))
        x = np.linspace(-2, 2, 9)
        M = K.matrix(x)
        return np.allclose(M, M.T)

    def lap_small():
        w = lapnorm.WeightPair(1.1, 1.1)
        v = lapnorm.weighted_norm(resolvent.barrier1d(1.0, jost.SpectralPoint.from_z(-0.01)), w, L=20, n=200)
        return np.isfinite(v.norm) and v.norm > 0

    def disk_gamma():
        from scipy.special import iv

        return abs(disk2d.gamma(0.04) - 0.2 * iv(1, 0.2)) < 1e-12

    def bessel_wronskian():
        zs = bessel_test_points(20, 1)
        return max(abs(bessel.wronskian_deviation(z)) for z in zs) < 1e-9

    def family_residual():
        return construct_3d_family(0.5).residual < 1e-10

    def jordan():
        return discrete.min_rank_regularizer(discrete.jordan_block(3)) == 1

    def shift():
        return engineered_virtual_state_ratio() >= 1.8

    def engineered_virtual_state_ratio():
        a = discrete.engineered_virtual_state(200).residual
        b = discrete.engineered_virtual_state(400).residual
        return a / b

    return {
        "jost": [("closed_form", jost_closed_form), ("bounds", jost_bounds)],
        "wronskian": [("closed_form", wronskian_closed_form)],
        "detect": [("zero_potential", zero_is_virtual), ("barrier", barrier_regular)],
        "bound-states": [("closed_form", wronskian_closed_form)],
        "lap-sweep": [("symmetric_kernel", free_kernel_symmetric), ("finite_norm", lap_small)],
        "disk2d": [("gamma", disk_gamma)],
        "bifurcate": [("family_residual", family_residual)],
        "bessel-selftest": [("wronskian", bessel_wronskian)],
        "shift-demo": [("doubling", shift)],
        "rank-demo": [("jordan3", jordan)],
    }


def run_selftest(sub: str, out) -> int:
    ok = True
    for name, fn in _selftests()[sub]:
        try:
            passed = bool(fn())
        except ThresholdScopeError as exc:
            passed = False
            name = f"{name} ({type(exc).__name__})"
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'} {sub}:{name}", file=out)
    return 0 if ok else 1


# -- output ------------------------------------------------------------------


def _fmt(v):
    if isinstance(v, (np.floating, np.integer)):
        v = v.item()
    return repr(v) if isinstance(v, float) else v


def render(res: Result, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(res.document, sort_keys=True, indent=2, default=_json_default) + "\n"
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(res.header)
    for row in res.rows:
        wr.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"cannot serialize {type(o).__name__}")


def write_atomic(path: str, text: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def plot_text(res: Result) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["x", "y"])
    for a, b in zip(*res.plot):
        wr.writerow([repr(float(a)), repr(float(b))])
    return buf.getvalue()


# -- argument parser ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thresholdscope", description="Threshold resonance computations.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, description=f"{help_text} CSV columns: {SCHEMAS[name]}.")
        p.add_argument("--output", "-o", help="output path (stdout if omitted)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--plot-data", help="also write x,y columns for plotting to this path")
        p.add_argument("--selftest", action="store_true", help="run built-in checks for this command")
        return p

    def potential_args(p):
        p.add_argument("--potential", dest="potential_file", help="potential JSON file")
        p.add_argument("--barrier-g", type=float, help="use g * 1_[-1,1]")
        p.add_argument("--well-g", type=float, help="use -g * 1_[-1,1]")

    p = add("jost", "Jost solutions on a grid with the bound-check report.")
    potential_args(p)
    p.add_argument("--zeta", type=_complex_arg, default=0.5 + 0j)
    p.add_argument("--L", type=float, default=2.0)
    p.add_argument("--points", type=int, default=201)

    p = add("wronskian", "Wronskian at one zeta or on a rectangular zeta grid.")
    potential_args(p)
    p.add_argument("--zeta", type=_complex_arg, default=0j)
    p.add_argument("--zeta-grid", type=_float_list, help="re_min,re_max,n_re,im_min,im_max,n_im")

    p = add("detect", "Classify z0 as regular, virtual level or bound state.")
    potential_args(p)
    p.add_argument("--z0", type=_complex_arg, default=0j)

    p = add("bound-states", "Negative eigenvalues E = -kappa^2 in a kappa range.")
    potential_args(p)
    p.add_argument("--kappa-min", type=float, default=1e-4)
    p.add_argument("--kappa-max", type=float, default=5.0)

    p = add("lap-sweep", "Weighted resolvent norms along a path toward z0.")
    potential_args(p)
    p.add_argument("--family", default="free1d", choices=("free1d", "barrier1d", "generic1d", "free3d", "disk2d_radial", "sector2d"))
    p.add_argument("--g", type=float)
    p.add_argument("--s", type=float, default=1.1)
    p.add_argument("--sprime", type=float, default=1.1)
    p.add_argument("--space", default="L2s_to_L2ms", choices=("L2s_to_L2ms", "L1_to_L2ms", "L2s_to_Linf", "L1_to_Linf"))
    p.add_argument("--z0", type=_complex_arg, default=0j)
    p.add_argument("--kmin", type=int, default=1)
    p.add_argument("--kmax", type=int, default=5)
    p.add_argument("--L", type=float, default=40.0)
    p.add_argument("--points", type=int, default=400)

    p = add("disk2d", "Disk matching coefficients, Gamma(g) and radial samples.")
    p.add_argument("--g", type=float, default=0.01)
    p.add_argument("--zeta", type=_complex_arg, default=0.01j)
    p.add_argument("--L", type=float, default=10.0)
    p.add_argument("--points", type=int, default=50)

    p = add("bifurcate", "Track the eigenvalue emerging under V - eps W.")
    potential_args(p)
    p.add_argument("--perturbation", help="W as potential JSON (default 1_[-1,1])")
    p.add_argument("--z0", type=_complex_arg, default=0j)
    p.add_argument("--eps", type=_float_list, default=[1e-1, 3e-2, 1e-2])

    p = add("bessel-selftest", "Deviation table for the Bessel routines.")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--threshold", type=float, default=1e-9)

    p = add("shift-demo", "Residual of the engineered virtual state under doubling.")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--doublings", type=int, default=1)
    p.add_argument("--z0", type=_complex_arg, default=1 + 0j)

    p = add("rank-demo", "Least regularizing rank against SVD nullity.")
    p.add_argument("--matrix", default="jordan3", help="jordan3, zeroN, random:N, planted:N:K or a JSON file")
    p.add_argument("--trials", type=int, default=5)
    return parser


_COMMON = {"subcommand", "potential_file", "output", "format", "seed", "plot_data", "selftest"}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    d = vars(ns)
    return RunConfig(
        subcommand=ns.subcommand,
        potential_file=d.get("potential_file"),
        params={k: v for k, v in d.items() if k not in _COMMON},
        output=ns.output,
        format=ns.format,
        seed=ns.seed,
        plot_data=ns.plot_data,
        selftest=ns.selftest,
    )


def _validate(cfg: RunConfig) -> None:
    p = cfg.params
    for key in ("points", "n", "trials"):
        if key in p and p[key] is not None and p[key] < 1:
            raise UsageError(f"--{key} must be positive")
    if "L" in p and p["L"] <= 0:
        raise UsageError("--L must be positive")
    if cfg.potential_file and not Path(cfg.potential_file).exists():
        raise UsageError(f"--potential: no such file {cfg.potential_file!r}")


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        _validate(cfg)
        if cfg.selftest:
            return run_selftest(cfg.subcommand, stdout)
        res = HANDLERS[cfg.subcommand](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return 2
    except ResidualTooLarge as exc:
        res = getattr(exc, "result", None)
        if res is not None:
            _emit(cfg, res, stdout)
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    except ThresholdScopeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    _emit(cfg, res, stdout)
    return 0


def _emit(cfg: RunConfig, res: Result, stdout) -> None:
    text = render(res, cfg.format)
    if cfg.output:
        write_atomic(cfg.output, text)
    else:
        stdout.write(text)
    if cfg.plot_data and res.plot is not None:
        write_atomic(cfg.plot_data, plot_text(res))


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
