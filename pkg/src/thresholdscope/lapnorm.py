"""Weighted operator norms of discretized resolvent kernels and sweeps toward a threshold."""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import GridTooCoarse
from .jost import SpectralPoint
from .numerics import Grid, Tolerance, top_singular_value
from .potentials import japanese

SpaceTag = Literal["L2s_to_L2ms", "L1_to_L2ms", "L2s_to_Linf", "L1_to_Linf"]


@dataclass(frozen=True)
class WeightPair:
    """Input weight <y>^s and output weight <x>^-sprime for the given pair of spaces."""

    s: float
    sprime: float
    space_tag: SpaceTag = "L2s_to_L2ms"

    def __post_init__(self):
        if self.s < 0 or self.sprime < 0:
            raise ValueError("weight exponents must be nonnegative")
        if self.space_tag not in ("L2s_to_L2ms", "L1_to_L2ms", "L2s_to_Linf", "L1_to_Linf"):
            raise ValueError(f"unknown space tag {self.space_tag!r}")


def thread_cap() -> int:
    raw = os.environ.get("THRESHOLDSCOPE_THREADS")
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# -- families ----------------------------------------------------------------


def make_kernel(family, sp: SpectralPoint):
    """Kernel handle for a family given as a name or (name, parameter)."""
    from . import disk2d, resolvent

    name, arg = (family, None) if isinstance(family, str) else family
    if name == "free1d":
        return resolvent.free1d(sp)
    if name == "barrier1d":
        return resolvent.barrier1d(1.0 if arg is None else arg, sp)
    if name == "generic1d":
        return resolvent.generic1d(arg, sp)
    if name in ("free3d", "radial3d"):
        return resolvent.radial3d(sp)
    if name == "disk2d_radial":
        return disk2d.kernel2d_radial(0.01 if arg is None else arg, sp)
    if name == "sector2d":
        return disk2d.free_sector_kernel(sp, 1 if arg is None else arg)
    if callable(name):
        return name(sp)
    raise ValueError(f"unknown kernel family {name!r}")


def grid_for(K, L: float, n: int) -> Grid:
    """Trapezoid grid on [-L, L] for the line, midpoint grid on (0, L] with r^p dr otherwise."""
    if K.domain == "line":
        return Grid.uniform(-L, L, n)
    g = Grid.midpoint(0.0, L, n)
    return Grid(g.nodes, g.weights * g.nodes**K.radial_power)


# -- norms -------------------------------------------------------------------


def _discrete_norm(K, w: WeightPair, grid: Grid, tol: Tolerance, matrix=None) -> float:
    x, d = grid.nodes, grid.weights
    M = K.matrix(x) if matrix is None else matrix
    wo = japanese(x) ** (-w.sprime)
    wi = japanese(x) ** (-w.s)
    W = wo[:, None] * M * wi[None, :]
    if w.space_tag == "L2s_to_L2ms":
        sd = np.sqrt(d)
        return top_singular_value(sd[:, None] * W * sd[None, :], tol)
    if w.space_tag == "L1_to_L2ms":
        return float(np.sqrt(np.max(np.sum(d[:, None] * np.abs(W) ** 2, axis=0))))
    if w.space_tag == "L2s_to_Linf":
        return float(np.sqrt(np.max(np.sum(np.abs(W) ** 2 * d[None, :], axis=1))))
    return float(np.max(np.abs(W)))


@dataclass
class NormValue:
    norm: float
    coarse: float
    refined: float
    resolution: int


def weighted_norm(K, w: WeightPair, L: float = 40.0, n: int = 400, tol: Tolerance = Tolerance(rel=1e-10), check: bool = True) -> NormValue:
    """Norm on an n-point grid plus the n/2 estimate and a Richardson value.

    GridTooCoarse if the two resolutions disagree by more than 10%.
    """
    fine = _discrete_norm(K, w, grid_for(K, L, n), tol)
    coarse = _discrete_norm(K, w, grid_for(K, L, max(n // 2, 3)), tol)
    if check and abs(fine - coarse) > 0.1 * max(abs(fine), 1e-300):
        raise GridTooCoarse(f"norms {fine:.6g} and {coarse:.6g} at n={n} and n/2 differ by >10%")
    refined = fine + (fine - coarse) / 3.0
    return NormValue(fine, coarse, refined, n)


def weighted_norm_on(K, w: WeightPair, grid: Grid, tol: Tolerance = Tolerance(rel=1e-10)) -> float:
    """Norm on a caller-supplied grid (no resolution check)."""
    return _discrete_norm(K, w, grid, tol)


# -- sweeps ------------------------------------------------------------------


def default_path(z0, k_values: Sequence[int] = (1, 2, 3, 4, 5)) -> list[complex]:
    """z0 - 10^-k at the threshold 0; z0 + i 10^-k inside the essential spectrum."""
    z0 = complex(z0)
    if z0 == 0:
        return [-(10.0 ** -k) + 0j for k in k_values]
    return [z0 + 1j * 10.0 ** -k for k in k_values]


def path_from_zetas(zetas) -> list[complex]:
    return [complex(z) ** 2 for z in zetas]


@dataclass
class NormSweep:
    path: list[SpectralPoint]
    norms: list[float]
    grid_resolutions: list[int]
    refined_norms: list[float]
    z0: complex
    classification: str
    fit_exponent: float
    plateau_spread: float
    log_fit: float | None = None
    extra: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["re_z", "im_z", "norm", "resolution", "refined_norm"])
        for sp, nv, res, ref in zip(self.path, self.norms, self.grid_resolutions, self.refined_norms):
            wr.writerow([repr(sp.z.real), repr(sp.z.imag), repr(nv), res, repr(ref)])
        return buf.getvalue()


def classify(distances: Sequence[float], norms: Sequence[float]):
    """(classification, log-log slope of the last three, plateau spread, log-law coefficient).

    uniformly_bounded when the last three norms vary by < 20% and the slope
    exceeds -0.1; otherwise diverging, with the power law or, when the slope
    is shallow, the coefficient c of norm ~ c ln(1/distance).
    """
    d = np.asarray(distances, dtype=float)[-3:]
    v = np.asarray(norms, dtype=float)[-3:]
    slope = float(np.polyfit(np.log(d), np.log(v), 1)[0])
    spread = float((v.max() - v.min()) / v.min())
    if spread < 0.2 and slope > -0.1:
        return "uniformly_bounded", slope, spread, None
    logc = float(np.polyfit(np.log(1 / d), v, 1)[0])
    kind = "diverging(log)" if slope > -0.1 else "diverging(fit_exponent)"
    return kind, slope, spread, logc


def lap_sweep(family, w: WeightPair, path: Sequence, L: float = 40.0, n: int = 400, z0=None, check: bool = True, threads: int | None = None) -> NormSweep:
    """Weighted norms of the family's kernel along a path of z values.

    Points are evaluated in parallel (capped by THRESHOLDSCOPE_THREADS);
    output order follows the path.
    """
    pts = [p if isinstance(p, SpectralPoint) else SpectralPoint.from_z(p) for p in path]
    if z0 is None:
        z0 = 0j if all(abs(p.z) < 1 for p in pts) and all(p.z.imag == 0 for p in pts) else complex(round(pts[-1].z.real, 12))
    z0 = complex(z0)

    def one(sp):
        return weighted_norm(make_kernel(family, sp), w, L, n, check=check)

    workers = threads if threads is not None else thread_cap()
    if workers > 1 and len(pts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            vals = list(ex.map(one, pts))
    else:
        vals = [one(sp) for sp in pts]
    norms = [v.norm for v in vals]
    dist = [abs(sp.z - z0) for sp in pts]
    kind, slope, spread, logc = classify(dist, norms)
    return NormSweep(pts, norms, [v.resolution for v in vals], [v.refined for v in vals], z0, kind, slope, spread, logc)


@dataclass
class ConvergenceReport:
    differences: list[float]
    final: float
    decreasing: bool


def convergence_check(family, w: WeightPair, path: Sequence, L: float = 40.0, n: int = 400) -> ConvergenceReport:
    """Weighted norms of K(z_i) - K(z_last) along the path on one fixed grid."""
    pts = [p if isinstance(p, SpectralPoint) else SpectralPoint.from_z(p) for p in path]
    kernels = [make_kernel(family, sp) for sp in pts]
    grid = grid_for(kernels[-1], L, n)
    last = kernels[-1].matrix(grid.nodes)
    diffs = []
    for K in kernels[:-1]:
        diffs.append(_discrete_norm(K, w, grid, Tolerance(rel=1e-10), matrix=K.matrix(grid.nodes) - last))
    diffs.append(0.0)
    arr = np.asarray(diffs)
    decreasing = bool(np.all(np.diff(arr) <= 1e-12 * max(arr.max(), 1e-300)))
    return ConvergenceReport(diffs, float(arr[-2]) if arr.size > 1 else 0.0, decreasing)
