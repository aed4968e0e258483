"""Resolvent kernels, their action on sampled functions, and threshold classification.

In one dimension the kernel is theta_+(max(x, y)) theta_-(min(x, y)) / w(zeta).
Radial kernels (2D disk, 3D free s-wave) share the same separable shape
left(min) * right(max) / w and are consumed by the weighted-norm code through
a common handle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Literal

import numpy as np

from .errors import ResidualTooLarge, WronskianTooSmall
from .jost import JostPair, SpectralPoint, barrier_jost, barrier_wronskian, default_grid, wronskian
from .numerics import Grid, Tolerance, find_zeros
from .potentials import Potential

Family = Literal["free1d", "barrier1d", "generic1d", "free3d", "radial3d", "disk2d_radial", "sector2d"]


def tol_w(zeta: complex) -> float:
    """Default threshold below which w(zeta) counts as zero."""
    return 1e-8 * (1 + abs(zeta))


def as_point(sp) -> SpectralPoint:
    return sp if isinstance(sp, SpectralPoint) else SpectralPoint.from_zeta(sp)


@dataclass(frozen=True)
class KernelHandle:
    """Integral kernel of a resolvent at one spectral point.

    Separable families store left/right factors and the Wronskian; the
    kernel is left(min) right(max) / w. ``radial_power`` is the exponent of
    r in the integration measure (0 on the line, 1 in 2D, 2 in 3D).
    """

    family: str
    sp: SpectralPoint
    left: Callable | None
    right: Callable | None
    w: complex
    domain: Literal["line", "halfline", "space3d"] = "line"
    radial_power: int = 0
    params: dict = field(default_factory=dict)
    point_eval: Callable | None = None

    def eval(self, x, y):
        if self.point_eval is not None:
            return self.point_eval(x, y)
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        lo, hi = np.minimum(x, y), np.maximum(x, y)
        return self.left(lo) * self.right(hi) / self.w

    __call__ = eval

    def matrix(self, xs, ys=None):
        """K(x_i, y_j) assembled from factor samples."""
        xs = np.asarray(xs, dtype=float)
        ys = xs if ys is None else np.asarray(ys, dtype=float)
        if self.left is None:
            return self.eval(xs[:, None], ys[None, :])
        lx, rx = self.left(xs), self.right(xs)
        ly, ry = (lx, rx) if ys is xs else (self.left(ys), self.right(ys))
        below = xs[:, None] >= ys[None, :]
        return np.where(below, rx[:, None] * ly[None, :], lx[:, None] * ry[None, :]) / self.w


# -- families ----------------------------------------------------------------


def free1d(sp) -> KernelHandle:
    """exp(-|x - y| sqrt(-z)) / (2 sqrt(-z)), Re sqrt(-z) > 0; here sqrt(-z) = -i zeta."""
    sp = as_point(sp)
    zeta = sp.zeta
    w = -2j * zeta
    if abs(w) <= tol_w(zeta):
        raise WronskianTooSmall(f"free kernel is singular at zeta={zeta}")
    return KernelHandle(
        "free1d", sp,
        left=lambda x: np.exp(-1j * zeta * x),
        right=lambda x: np.exp(1j * zeta * x),
        w=w,
    )


def barrier1d(g: float, sp) -> KernelHandle:
    """Closed-form kernel for V = g on [-1, 1]."""
    sp = as_point(sp)
    zeta = sp.zeta
    w = barrier_wronskian(g, zeta)
    if abs(w) <= tol_w(zeta):
        raise WronskianTooSmall(f"|w({zeta})| = {abs(w):.3g}")
    return KernelHandle(
        "barrier1d", sp,
        left=lambda x: barrier_jost(g, zeta, x)[2],
        right=lambda x: barrier_jost(g, zeta, x)[0],
        w=w,
        params={"g": g},
    )


def generic1d(V: Potential, sp, tol: Tolerance = Tolerance(rel=1e-9)) -> KernelHandle:
    sp = as_point(sp)
    pair = JostPair(V, sp.zeta)
    w = wronskian(V, sp, tol, pair=pair)
    if abs(w) <= tol_w(sp.zeta):
        raise WronskianTooSmall(f"|w({sp.zeta})| = {abs(w):.3g}")
    return KernelHandle(
        "generic1d", sp,
        left=lambda x: pair.theta_minus(x)[0],
        right=lambda x: pair.theta_plus(x)[0],
        w=w,
        params={"V": V},
    )


def kernel(V: Potential, sp, tol: Tolerance = Tolerance(rel=1e-9)) -> KernelHandle:
    """Resolvent kernel of -d^2/dx^2 + V at z = zeta^2 (free1d when V vanishes)."""
    if V.is_zero:
        return free1d(sp)
    return generic1d(V, sp, tol)


def free3d(sp) -> KernelHandle:
    """exp(i zeta |x - y|) / (4 pi |x - y|) for points of R^3 (last axis)."""
    sp = as_point(sp)
    zeta = sp.zeta

    def point_eval(x, y):
        d = np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float), axis=-1)
        return np.exp(1j * zeta * d) / (4 * np.pi * d)

    return KernelHandle("free3d", sp, None, None, 1.0, domain="space3d", point_eval=point_eval)


def radial3d(sp) -> KernelHandle:
    """Free 3D kernel on radial functions, measure r^2 dr.

    Averaging over the sphere gives (exp(i zeta (r+s)) - exp(i zeta |r-s|)) / (2 i zeta r s),
    i.e. sin(zeta r<) exp(i zeta r>) / (zeta r< r>), which tends to 1/max(r, s) as zeta -> 0.
    """
    sp = as_point(sp)
    zeta = sp.zeta

    def left(r):
        r = np.asarray(r, dtype=float)
        if zeta == 0:
            return np.ones_like(r, dtype=complex)
        return np.sin(zeta * r) / (zeta * r)

    def right(r):
        r = np.asarray(r, dtype=float)
        return np.exp(1j * zeta * r) / r

    return KernelHandle("radial3d", sp, left, right, 1.0, domain="halfline", radial_power=2)


# -- action ------------------------------------------------------------------


@dataclass
class Applied:
    u: np.ndarray
    residual: float
    checked_nodes: int


def _second_difference(x, u):
    h0 = x[1:-1] - x[:-2]
    h1 = x[2:] - x[1:-1]
    return 2 * (u[:-2] / (h0 * (h0 + h1)) - u[1:-1] / (h0 * h1) + u[2:] / (h1 * (h0 + h1)))


def apply(K: KernelHandle, f, grid: Grid, tol: float = 1e-4, V: Potential | None = None, check: bool = True) -> Applied:
    """u(x_i) = sum_j K(x_i, y_j) f(y_j) w_j on a 1D grid.

    The residual |(-D^2 + V - z) u - f| is measured with the three-point
    stencil at interior nodes whose stencil does not straddle a jump of V or
    of f; it must stay below tol * (1 + max|f|).
    """
    f = np.asarray(f, dtype=complex)
    x = grid.nodes
    u = K.matrix(x) @ (grid.weights * f)
    if not check or x.size < 3:
        return Applied(u, 0.0, 0)
    if V is None:
        V = K.params.get("V")
        if V is None and "g" in K.params:
            V = Potential.indicator(-1.0, 1.0, K.params["g"])
    Vx = V(x[1:-1]) if V is not None else 0.0
    res = -_second_difference(x, u) + (Vx - K.sp.z) * u[1:-1] - f[1:-1]
    mask = np.ones(x.size - 2, dtype=bool)
    if V is not None:
        for b in V.breakpoints:
            mask &= ~((x[:-2] <= b) & (x[2:] >= b))
    fscale = float(np.max(np.abs(f))) if f.size else 0.0
    jump = np.abs(f[2:] - 2 * f[1:-1] + f[:-2])
    mask &= jump <= 0.1 * max(fscale, 1e-300)
    r = float(np.max(np.abs(res[mask]))) if mask.any() else 0.0
    if r > tol * (1 + fscale):
        raise ResidualTooLarge(f"residual {r:.3g} exceeds {tol * (1 + fscale):.3g}; refine the grid")
    return Applied(u, r, int(mask.sum()))


# -- classification ----------------------------------------------------------


@dataclass
class VirtualLevelReport:
    z0: complex
    wronskian_value: complex
    classification: Literal["regular", "virtual_level", "bound_state", "excluded"]
    rank: int = 0
    virtual_state: np.ndarray | None = None
    grid: Grid | None = None
    evidence: Callable[[], Any] | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        out = {
            "z0": [self.z0.real, self.z0.imag],
            "wronskian": [self.wronskian_value.real, self.wronskian_value.imag],
            "classification": self.classification,
            "rank": self.rank,
        }
        if self.virtual_state is not None:
            out["grid"] = self.grid.nodes.tolist()
            out["virtual_state_re"] = self.virtual_state.real.tolist()
            out["virtual_state_im"] = self.virtual_state.imag.tolist()
        return out


def detect_virtual_level(V: Potential, z0, tol: Tolerance = Tolerance(rel=1e-9), grid: Grid | None = None) -> VirtualLevelReport:
    """Classify the threshold point z0 by the Wronskian at sqrt(z0).

    z0 >= 0: virtual_level when |w| <= tol_w, else regular (with a lazily
    computed norm sweep toward z0 as evidence). Real z0 < 0 is tested as a
    bound state. Non-real z0 is excluded.
    """
    z0 = complex(z0)
    if z0.imag != 0 or not np.isfinite(z0.real):
        return VirtualLevelReport(z0, complex("nan"), "excluded")
    sp = SpectralPoint.from_z(z0)
    pair = JostPair(V, sp.zeta)
    w = wronskian(V, sp, tol, pair=pair)
    grid = grid if grid is not None else default_grid(V)
    if abs(w) <= tol_w(sp.zeta):
        state = pair.theta_plus(grid.nodes)[0]
        kind = "virtual_level" if z0.real >= 0 else "bound_state"
        return VirtualLevelReport(z0, w, kind, 1, state, grid)

    def evidence():
        from .lapnorm import WeightPair, lap_sweep, default_path

        return lap_sweep(("generic1d", V), WeightPair(1.1, 1.1), default_path(z0))

    return VirtualLevelReport(z0, w, "regular", 0, None, grid, evidence)


def bound_states(V: Potential, kappa_range: tuple[float, float], tol: Tolerance = Tolerance(rel=1e-9), samples: int = 200) -> list[tuple[float, float]]:
    """Zeros of kappa -> w(i kappa) in the range, as (kappa, E = -kappa^2)."""
    kmin, kmax = kappa_range
    if not 0 < kmin < kmax:
        raise ValueError("need 0 < kappa_min < kappa_max")
    if V.is_zero:
        return []

    def f(k):
        return wronskian(V, SpectralPoint.from_zeta(1j * k), tol)

    out = []
    for k in find_zeros(f, (kmin, kmax), Tolerance(abs=1e150), samples=samples):
        if abs(f(k)) <= tol_w(1j * k):
            out.append((float(k), -float(k) ** 2))
    return out
