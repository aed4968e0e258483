"""Shared numeric engine: quadrature, complex ODE integration, root finding,
largest singular values, and argument-principle zero search in the plane."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.integrate

from .errors import NoRoot, NonConvergence, StepUnderflow

__all__ = [
    "Grid",
    "Tolerance",
    "integrate",
    "solve_ivp",
    "find_zero",
    "find_zeros",
    "top_singular_value",
    "winding_number",
    "find_complex_zeros",
    "newton_complex",
    "gauss_legendre_panels",
]


@dataclass(frozen=True)
class Tolerance:
    rel: float = 1e-10
    abs: float = 1e-12
    max_iter: int = 500

    def __post_init__(self):
        if not (self.rel > 0 and self.abs > 0):
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be a positive integer")


@dataclass(frozen=True, eq=False)
class Grid:
    """Quadrature grid: strictly increasing nodes with nonnegative weights."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 1 or weights.shape != nodes.shape:
            raise ValueError("nodes and weights must be 1-D arrays of equal length")
        if nodes.size > 1 and np.any(np.diff(nodes) <= 0):
            raise ValueError("grid nodes must be strictly increasing")
        if np.any(weights < 0):
            raise ValueError("quadrature weights must be nonnegative")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.nodes.size

    @classmethod
    def uniform(cls, a: float, b: float, n: int) -> "Grid":
        """Trapezoid rule on ``n`` equispaced nodes including both ends."""
        x = np.linspace(a, b, n)
        w = np.full(n, (b - a) / (n - 1))
        w[0] = w[-1] = 0.5 * w[0]
        return cls(x, w)

    @classmethod
    def midpoint(cls, a: float, b: float, n: int) -> "Grid":
        h = (b - a) / n
        return cls(a + h * (np.arange(n) + 0.5), np.full(n, h))

    @classmethod
    def from_nodes(cls, nodes) -> "Grid":
        x = np.asarray(nodes, dtype=float)
        if x.size == 1:
            return cls(x, np.zeros(1))
        dx = np.diff(x)
        w = np.zeros_like(x)
        w[:-1] += 0.5 * dx
        w[1:] += 0.5 * dx
        return cls(x, w)

    @classmethod
    def gauss(cls, breaks: Sequence[float], order: int = 8) -> "Grid":
        x, w = gauss_legendre_panels(breaks, order)
        return cls(x, w)


def gauss_legendre_panels(breaks: Sequence[float], order: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights on consecutive panels."""
    t, wt = np.polynomial.legendre.leggauss(order)
    breaks = np.asarray(breaks, dtype=float)
    a, b = breaks[:-1, None], breaks[1:, None]
    x = 0.5 * (a + b) + 0.5 * (b - a) * t
    w = 0.5 * (b - a) * wt
    return x.ravel(), w.ravel()


# Gauss-Kronrod 7/15 pair on [-1, 1].
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES15 = np.concatenate([-_XK[:-1], _XK[::-1]])
_WK15 = np.concatenate([_WK[:-1], _WK[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes.
_WG15 = np.zeros(15)
_WG15[1::2] = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk15(f, a, b):
    c, h = 0.5 * (a + b), 0.5 * (b - a)
    x = c + h * _NODES15
    try:
        y = np.asarray(f(x), dtype=complex)
        if y.shape != x.shape:
            raise ValueError
    except (TypeError, ValueError):
        y = np.array([f(xi) for xi in x], dtype=complex)
    if not np.all(np.isfinite(y)):
        raise ValueError(f"integrand not finite on [{a}, {b}]")
    k = h * np.dot(_WK15, y)
    g = h * np.dot(_WG15, y)
    return k, abs(k - g)


def integrate(
    f: Callable,
    a: float,
    b: float,
    tol: Tolerance = Tolerance(),
    points: Sequence[float] = (),
) -> complex:
    """Adaptive Gauss-Kronrod quadrature of a complex integrand on [a, b].

    ``f`` may be vectorized (called with an array of nodes) or scalar.
    ``points`` are interior breakpoints (discontinuities, log singularities)
    that always become panel edges. Raises ``NonConvergence`` when more than
    ``tol.max_iter`` subdivisions are needed.
    """
    if not a < b:
        raise ValueError("integrate requires a < b")
    edges = sorted({a, b, *[p for p in points if a < p < b]})
    heap = []
    total, err = 0j, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, e = _gk15(f, lo, hi)
        total += val
        err += e
        heapq.heappush(heap, (-e, lo, hi, val))
    splits = 0
    while err > max(tol.abs, tol.rel * abs(total)):
        if splits >= tol.max_iter:
            raise NonConvergence(
                f"quadrature error {err:.3g} after {splits} subdivisions"
            )
        e, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        total += v1 + v2 - val
        err += e1 + e2 + e
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        splits += 1
    return complex(total)


@dataclass
class Trajectory:
    t: np.ndarray
    y: np.ndarray  # shape (dim, len(t))
    nfev: int = 0


def solve_ivp(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0,
    span: tuple[float, float],
    tol: Tolerance = Tolerance(),
    t_eval=None,
    breakpoints: Sequence[float] = (),
    max_step: float = np.inf,
    first_step: float | None = None,
) -> Trajectory:
    """Complex-valued IVP with the DOP853 embedded pair and dense output.

    Integration restarts at every breakpoint inside ``span`` so that
    piecewise-continuous right-hand sides keep full order. ``span`` may run
    backwards.
    """
    a, b = float(span[0]), float(span[1])
    direction = 1.0 if b >= a else -1.0
    inner = sorted((p for p in breakpoints if min(a, b) < p < max(a, b)), reverse=direction < 0)
    stops = [a, *inner, b]
    if t_eval is None:
        t_eval = np.array([a, b])
    t_eval = np.asarray(t_eval, dtype=float)
    out = np.empty((np.size(y0), t_eval.size), dtype=complex)
    filled = np.zeros(t_eval.size, dtype=bool)
    y = np.asarray(y0, dtype=complex)
    nfev = 0
    for lo, hi in zip(stops[:-1], stops[1:]):
        if lo == hi:
            continue
        kw = {}
        if first_step is not None:
            kw["first_step"] = first_step
        sol = scipy.integrate.solve_ivp(
            rhs, (lo, hi), y, method="DOP853", rtol=tol.rel, atol=tol.abs,
            dense_output=True, max_step=max_step, **kw,
        )
        nfev += sol.nfev
        if sol.status < 0:
            if "step size" in sol.message.lower():
                raise StepUnderflow(sol.message)
            raise NonConvergence(sol.message)
        seg_lo, seg_hi = min(lo, hi), max(lo, hi)
        mask = (~filled) & (t_eval >= seg_lo) & (t_eval <= seg_hi)
        if mask.any():
            out[:, mask] = sol.sol(t_eval[mask])
            filled |= mask
        y = sol.y[:, -1]
    return Trajectory(t_eval, out, nfev)


def _deriv(f, t, h):
    fp, fm = f(t + h), f(t - h)
    f0 = f(t)
    return f0, (fp - fm) / (2 * h), (fp - 2 * f0 + fm) / h**2


def _polish_min(f, lo, hi, tol):
    """Safeguarded Newton on d|f|^2/dt inside a bracket with a sign change."""

    def dphi(t):
        h = 1e-5 * max(1.0, abs(t), hi - lo)
        f0, f1, f2 = _deriv(f, t, h)
        return 2 * (np.conj(f0) * f1).real, 2 * (abs(f1) ** 2 + (np.conj(f0) * f2).real)

    g_lo, _ = dphi(lo)
    t = 0.5 * (lo + hi)
    for _ in range(tol.max_iter):
        g, gp = dphi(t)
        if g == 0:
            break
        if (g < 0) == (g_lo < 0):
            lo, g_lo = t, g
        else:
            hi = t
        step = t - g / gp if gp > 0 else None
        if step is not None and abs(g / gp) < 1e-15 * max(1.0, abs(t)):
            break
        t = step if step is not None and lo < step < hi else 0.5 * (lo + hi)
        if hi - lo <= 1e-15 * max(1.0, abs(t)):
            break
    return t


def find_zeros(
    f: Callable[[float], complex],
    bracket: tuple[float, float],
    tol: Tolerance = Tolerance(abs=1e-10),
    samples: int = 200,
) -> list[float]:
    """All local minima of |f|^2 in ``bracket`` at which |f| <= tol.abs.

    Minima are located by sign changes of d|f|^2/dt on a sample grid and
    refined by Newton on the derivative with bisection fallback.
    """
    lo, hi = bracket
    ts = np.linspace(lo, hi, samples)
    vals = np.array([abs(f(t)) ** 2 for t in ts])
    roots = []
    for i in range(1, samples - 1):
        if vals[i] <= vals[i - 1] and vals[i] <= vals[i + 1]:
            t = _polish_min(f, ts[i - 1], ts[i + 1], tol)
            if abs(f(t)) <= tol.abs:
                roots.append(t)
    for end, nb in ((0, 1), (samples - 1, samples - 2)):
        if vals[end] <= vals[nb]:
            a, b = sorted((ts[end], ts[nb]))
            t = _polish_min(f, a, b, tol)
            if abs(f(t)) <= tol.abs:
                roots.append(t)
    roots.sort()
    merged = []
    for r in roots:
        if not merged or abs(r - merged[-1]) > 1e-9 * max(1.0, abs(r)):
            merged.append(r)
    return merged


def find_zero(
    f: Callable[[float], complex],
    bracket: tuple[float, float] | None = None,
    seed: float | None = None,
    tol: Tolerance = Tolerance(abs=1e-10),
) -> float:
    """Location ``t`` with |f(t)| <= tol.abs; the best one if several exist."""
    if bracket is None:
        if seed is None:
            raise ValueError("need a bracket or a seed")
        width = 0.5 * max(1.0, abs(seed))
        bracket = (seed - width, seed + width)
    roots = find_zeros(f, bracket, tol)
    if not roots:
        raise NoRoot(f"no zero of |f| below {tol.abs:g} in {bracket}")
    return min(roots, key=lambda t: abs(f(t)))


def top_singular_value(M, tol: Tolerance = Tolerance(rel=1e-10), seed: int = 0, block: int = 40) -> float:
    """Largest singular value of M by Krylov power iteration on M^H M.

    Each cycle runs ``block`` Lanczos steps with full reorthogonalization and
    restarts from the top Ritz vector; it stops once the Ritz residual
    certifies the requested relative accuracy. Clustered top singular values
    do not slow it down the way plain power iteration does.
    """
    M = np.asarray(M, dtype=complex)
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    if M.size == 0:
        return 0.0
    n = M.shape[1]
    m = max(1, min(block, n))
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    steps = 0
    while steps < tol.max_iter:
        Q = np.zeros((n, m + 1), dtype=complex)
        alpha = np.zeros(m)
        beta = np.zeros(m)
        Q[:, 0] = v
        k_used = m
        for k in range(m):
            u = M.conj().T @ (M @ Q[:, k])
            steps += 1
            alpha[k] = np.vdot(Q[:, k], u).real
            u = u - Q[:, : k + 1] @ (Q[:, : k + 1].conj().T @ u)
            u = u - Q[:, : k + 1] @ (Q[:, : k + 1].conj().T @ u)
            beta[k] = np.linalg.norm(u)
            if beta[k] <= 1e-14 * max(abs(alpha[: k + 1]).max(), 1e-300):
                k_used = k + 1
                break
            Q[:, k + 1] = u / beta[k]
        T = np.diag(alpha[:k_used]) + np.diag(beta[: k_used - 1], 1) + np.diag(beta[: k_used - 1], -1)
        evals, evecs = np.linalg.eigh(T)
        lam, s = evals[-1], evecs[:, -1]
        if lam <= 0:
            return 0.0
        resid = abs(beta[k_used - 1] * s[-1])
        if resid <= 2 * tol.rel * lam or k_used < m or k_used == n:
            return float(np.sqrt(lam))
        v = Q[:, :k_used] @ s
        v /= np.linalg.norm(v)
    raise NonConvergence(f"Krylov power iteration stalled after {steps} products")


# --- zero search in the complex plane -------------------------------------


def _contour_phase(f, pts, max_refine=12):
    """Total change of arg f along the polyline ``pts`` (closed by caller)."""
    total = 0.0
    vals = [f(p) for p in pts]
    stack = list(zip(pts[:-1], pts[1:], vals[:-1], vals[1:]))[::-1]
    depth = {}
    while stack:
        p, q, fp, fq = stack.pop()
        if fp == 0 or fq == 0:
            raise ZeroDivisionError("function vanishes on the contour")
        d = np.angle(fq / fp)
        key = (p, q)
        lvl = depth.get(key, 0)
        if abs(d) > np.pi / 4 and lvl < max_refine:
            m = 0.5 * (p + q)
            fm = f(m)
            depth[(p, m)] = depth[(m, q)] = lvl + 1
            stack.append((m, q, fm, fq))
            stack.append((p, m, fp, fm))
            continue
        total += d
    return total


def winding_number(f: Callable[[complex], complex], corners: Sequence[complex], per_edge: int = 16) -> int:
    """Number of zeros of analytic ``f`` inside the polygon ``corners``."""
    pts = []
    cs = list(corners) + [corners[0]]
    for p, q in zip(cs[:-1], cs[1:]):
        pts.extend(p + (q - p) * np.arange(per_edge) / per_edge)
    pts.append(cs[0])
    return int(round(_contour_phase(f, pts) / (2 * np.pi)))


def newton_complex(f, z0: complex, tol: float = 1e-13, max_iter: int = 60, h: float | None = None) -> complex:
    z = complex(z0)
    for _ in range(max_iter):
        step = h if h is not None else 1e-6 * max(abs(z), 1e-3)
        fz = f(z)
        df = (f(z + step) - f(z - step)) / (2 * step)
        if df == 0:
            break
        dz = fz / df
        z -= dz
        if abs(dz) <= tol * max(abs(z), 1e-12):
            break
    return z


def find_complex_zeros(
    f: Callable[[complex], complex],
    lower_left: complex,
    upper_right: complex,
    min_size: float | None = None,
    max_depth: int = 24,
) -> list[complex]:
    """Zeros of analytic ``f`` in a rectangle via argument-principle bisection.

    Cells with nonzero winding number are split along their longer side until
    they are smaller than ``min_size``; each surviving cell is polished with
    Newton's method from its center.
    """
    x0, y0 = lower_left.real, lower_left.imag
    x1, y1 = upper_right.real, upper_right.imag
    if min_size is None:
        min_size = 1e-3 * max(x1 - x0, y1 - y0)
    zeros: list[complex] = []

    def corners(a, b, c, d):
        return [complex(a, c), complex(b, c), complex(b, d), complex(a, d)]

    stack = [(x0, x1, y0, y1, 0)]
    while stack:
        a, b, c, d, depth = stack.pop()
        try:
            n = winding_number(f, corners(a, b, c, d))
        except ZeroDivisionError:
            # zero sits on the cell boundary; nudge the cell
            eps = 1e-7 * max(b - a, d - c)
            stack.append((a - eps, b + eps, c - eps if c > y0 else c, d + eps, depth))
            continue
        if n <= 0:
            continue
        if max(b - a, d - c) <= min_size or depth >= max_depth:
            z = newton_complex(f, complex(0.5 * (a + b), 0.5 * (c + d)))
            zeros.append(z)
            continue
        if b - a >= d - c:
            m = 0.5 * (a + b)
            stack += [(a, m, c, d, depth + 1), (m, b, c, d, depth + 1)]
        else:
            m = 0.5 * (c + d)
            stack += [(a, b, c, m, depth + 1), (a, b, m, d, depth + 1)]
    out: list[complex] = []
    for z in sorted(zeros, key=lambda z: (z.real, z.imag)):
        if not any(abs(z - o) < 10 * min_size for o in out):
            out.append(z)
    return out
