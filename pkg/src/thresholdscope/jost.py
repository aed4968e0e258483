"""Jost solutions of -psi'' + V psi = zeta^2 psi by the Volterra series.

With F(x) = exp(-i zeta x) theta_+(x), the integral equation reads

    F(x) = 1 + int_x^inf K(y - x) V(y) F(y) dy,   K(d) = (exp(2 i zeta d) - 1) / (2 i zeta),

and F = sum_n F_n with F_0 = 1, F_n = T[V F_{n-1}]. Each term is computed by a
Nystrom scheme on Gauss-Legendre panels aligned with the breakpoints of V,
sweeping right to left. Across a panel edge b the kernel splits exactly as
K(y - x) = exp(2 i zeta (b - x)) K(y - b) + K(b - x), so information travels
between panels through three numbers per edge and every step stays stable as
zeta -> 0. The series is stopped once the factorial majorant of the dropped
tail is below tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np
from scipy.special import gammainc

from .errors import BoundViolation, InconsistentWronskian, TruncationFailure
from .numerics import Grid, Tolerance, solve_ivp
from .potentials import MomentData, Potential, japanese, reflect

PANEL_ORDER = 16
MAX_TERMS = 600


@dataclass(frozen=True)
class SpectralPoint:
    """zeta in the closed upper half-plane and z = zeta^2."""

    zeta: complex
    z: complex
    half_plane_tag: Literal["boundary", "interior"]

    @classmethod
    def from_zeta(cls, zeta) -> "SpectralPoint":
        zeta = complex(zeta)
        if zeta.imag < 0:
            raise ValueError(f"zeta={zeta} lies in the lower half-plane")
        tag = "boundary" if zeta.imag == 0 else "interior"
        return cls(zeta, zeta * zeta, tag)

    @classmethod
    def from_z(cls, z) -> "SpectralPoint":
        """Square root with Im zeta >= 0 (zeta = i sqrt(-z), Re sqrt(-z) > 0)."""
        z = complex(z)
        if z.imag == 0 and z.real >= 0:
            return cls.from_zeta(np.sqrt(z.real))
        zeta = 1j * np.sqrt(-z)
        return cls(zeta, z, "boundary" if zeta.imag == 0 else "interior")


def _kfun(zeta: complex, d):
    """(exp(2 i zeta d) - 1) / (2 i zeta), equal to d at zeta = 0."""
    d = np.asarray(d, dtype=float)
    if zeta == 0:
        return d.astype(complex)
    return np.expm1(2j * zeta * d) / (2j * zeta)


@lru_cache(maxsize=8)
def _reference_panel(p: int):
    t, w = np.polynomial.legendre.leggauss(p)
    vander = np.polynomial.legendre.legvander(t, p - 1)
    vinv = np.linalg.inv(vander)
    # A[m, n] = int_{t_m}^{1} P_n(t) dt
    A = np.empty((p, p))
    for n in range(p):
        e = np.zeros(p)
        e[n] = 1.0
        prim = np.polynomial.legendre.legint(e)
        A[:, n] = np.polynomial.legendre.legval(1.0, prim) - np.polynomial.legendre.legval(t, prim)
    return t, w, A @ vinv, vinv


class JostField:
    """theta_+(., zeta) for a potential, evaluable at arbitrary points."""

    def __init__(self, V: Potential, zeta: complex, tol: Tolerance = Tolerance(abs=1e-14)):
        self.V = V
        self.zeta = complex(zeta)
        self.tol = tol
        self.moments = MomentData(V, tol)
        p = PANEL_ORDER
        t, w, S, vinv = _reference_panel(p)
        self._vinv = vinv
        breaks = V.breakpoints
        if not breaks or self.moments.M == 0:
            self.edges = np.array([])
            self.terms = 0
            self.certified_tail = 0.0
            return
        lo, hi = min(breaks[0], 0.0), max(breaks[-1], 0.0)
        cuts = sorted({lo, hi, 0.0, *breaks})
        hmax = min(0.5, 2.0 / max(abs(self.zeta), 1e-300))
        edges = [cuts[0]]
        for a, b in zip(cuts[:-1], cuts[1:]):
            n = max(1, int(np.ceil((b - a) / hmax)))
            edges.extend(np.linspace(a, b, n + 1)[1:])
        self.edges = np.array(edges)
        a_, b_ = self.edges[:-1, None], self.edges[1:, None]
        self._h = (b_ - a_).ravel()
        self.nodes = 0.5 * (a_ + b_) + 0.5 * (b_ - a_) * t  # (panels, p)
        self.weights = 0.5 * (b_ - a_) * w
        self.Vn = V(self.nodes)
        self._S = S
        self._solve()

    # -- series ------------------------------------------------------------

    def _panel_ops(self):
        if getattr(self, "_ops", None) is None:
            zeta = self.zeta
            ops = []
            for j in range(self.nodes.shape[0]):
                a, b = self.edges[j], self.edges[j + 1]
                x = self.nodes[j]
                Sh = self._S * (0.5 * (b - a))
                dx = x[None, :] - x[:, None]  # y_k - x_m
                wj = self.weights[j]
                ops.append((
                    Sh * _kfun(zeta, dx),
                    Sh * np.exp(2j * zeta * dx),
                    np.exp(2j * zeta * (b - x)),
                    _kfun(zeta, b - x),
                    wj * _kfun(zeta, x - a),
                    wj * np.exp(2j * zeta * (x - a)),
                    np.exp(2j * zeta * (b - a)),
                    complex(_kfun(zeta, b - a)),
                    wj,
                ))
            self._ops = ops
        return self._ops

    def _sweep(self, G):
        """One application of T to samples G on the panels.

        Returns values and derivatives at nodes, and at panel edges the
        values, derivatives and the tail integrals int_edge^inf G.
        """
        zeta = self.zeta
        P = self.nodes.shape[0]
        Fn = np.empty_like(G)
        Dn = np.empty_like(G)
        Fe = np.zeros(P + 1, dtype=complex)
        De = np.zeros(P + 1, dtype=complex)
        Qe = np.zeros(P + 1, dtype=complex)
        ops = self._panel_ops()
        for j in range(P - 1, -1, -1):
            SK, SE, eb, kb, wK, wE, eab, kab, wj = ops[j]
            g = G[j]
            Fn[j] = SK @ g + eb * Fe[j + 1] + kb * Qe[j + 1]
            Dn[j] = -(SE @ g) + eb * De[j + 1]
            Fe[j] = np.dot(wK, g) + eab * Fe[j + 1] + kab * Qe[j + 1]
            De[j] = -np.dot(wE, g) + eab * De[j + 1]
            Qe[j] = np.dot(wj, g) + Qe[j + 1]
        return Fn, Dn, Fe, De, Qe

    def _majorant(self):
        """Rate t and prefactor of |F_n| <= pref * t^n / n! on the panels."""
        M = self.moments.M
        lo = self.edges[0]
        pref = float(japanese(min(lo, 0.0)))
        t_weighted = np.sqrt(2.0) * M / float(japanese(abs(self.zeta)))
        if self.zeta != 0 and M / abs(self.zeta) < t_weighted:
            return M / abs(self.zeta), 1.0
        return t_weighted, pref

    def _solve(self):
        t, pref = self._majorant()
        F = np.ones_like(self.Vn)
        D = np.zeros_like(self.Vn)
        P = self.nodes.shape[0]
        Fe = np.ones(P + 1, dtype=complex)
        De = np.zeros(P + 1, dtype=complex)
        Qe = np.zeros(P + 1, dtype=complex)
        term = np.ones_like(self.Vn)
        n = 0
        tail = pref * (np.exp(t) - 1.0)
        while tail > self.tol.abs:
            if n >= MAX_TERMS:
                raise TruncationFailure(f"majorant tail {tail:.3g} after {n} terms")
            fn, dn, fe, de, qe = self._sweep(self.Vn * term)
            F += fn
            D += dn
            Fe += fe
            De += de
            Qe += qe
            term = fn
            n += 1
            # remainder of exp(t) after n+1 terms, times pref
            tail = pref * np.exp(t) * gammainc(n + 1, t) if t > 0 else 0.0
        self.terms = n
        self.certified_tail = float(tail)
        self.F, self.D = F, D
        self.Fe, self.De, self.Qe = Fe, De, Qe
        self.G = self.Vn * F

    # -- evaluation --------------------------------------------------------

    def F_and_derivative(self, x):
        """F(x) and F'(x) at arbitrary real points."""
        x = np.asarray(x, dtype=float)
        shape = x.shape
        x = x.ravel()
        F = np.ones(x.size, dtype=complex)
        D = np.zeros(x.size, dtype=complex)
        if self.edges.size == 0:
            return F.reshape(shape), D.reshape(shape)
        zeta = self.zeta
        lo, hi = self.edges[0], self.edges[-1]
        left = x < lo
        if left.any():
            xl = x[left]
            e = np.exp(2j * zeta * (lo - xl))
            F[left] = 1.0 + e * (self.Fe[0] - 1.0) + _kfun(zeta, lo - xl) * self.Qe[0]
            D[left] = e * self.De[0]
        inside = (x >= lo) & (x <= hi)
        if inside.any():
            idx = np.nonzero(inside)[0]
            panel = np.clip(np.searchsorted(self.edges, x[idx], side="right") - 1, 0, self.nodes.shape[0] - 1)
            p = PANEL_ORDER
            t, w = np.polynomial.legendre.leggauss(p)
            for j in np.unique(panel):
                sel = idx[panel == j]
                xs = x[sel]
                a, b = self.edges[j], self.edges[j + 1]
                coef = self._vinv @ self.G[j]
                # Gauss rule on [x, b] for each evaluation point
                ys = 0.5 * (xs[:, None] + b) + 0.5 * (b - xs[:, None]) * t[None, :]
                ws = 0.5 * (b - xs[:, None]) * w[None, :]
                tref = (2 * ys - a - b) / (b - a)
                gy = np.polynomial.legendre.legval(tref, coef)
                d = ys - xs[:, None]
                eb = np.exp(2j * zeta * (b - xs))
                F[sel] = (
                    1.0
                    + np.sum(ws * _kfun(zeta, d) * gy, axis=1)
                    + eb * (self.Fe[j + 1] - 1.0)
                    + _kfun(zeta, b - xs) * self.Qe[j + 1]
                )
                D[sel] = -np.sum(ws * np.exp(2j * zeta * d) * gy, axis=1) + eb * self.De[j + 1]
        return F.reshape(shape), D.reshape(shape)

    def theta(self, x):
        """theta_+(x) and d/dx theta_+(x)."""
        x = np.asarray(x, dtype=float)
        F, D = self.F_and_derivative(x)
        e = np.exp(1j * self.zeta * x)
        th = e * F
        return th, 1j * self.zeta * th + e * D


@dataclass
class JostSolution:
    grid: Grid
    theta: np.ndarray
    dtheta: np.ndarray
    side: Literal["plus", "minus"]
    truncation_terms: int
    certified_tail: float
    zeta: complex = 0j
    field: JostField | None = field(default=None, repr=False)

    def __call__(self, x):
        """(theta, dtheta) at arbitrary points."""
        x = np.asarray(x, dtype=float)
        if self.side == "plus":
            return self.field.theta(x)
        th, dth = self.field.theta(-x)
        return th, -dth


def default_grid(V: Potential, outer: float = 2.0, n: int = 401) -> Grid:
    R = max(V.support_radius, 1e-12)
    return Grid.uniform(-R - outer, R + outer, n)


def jost_plus(V: Potential, sp: SpectralPoint, grid: Grid | None = None, tol: Tolerance = Tolerance(abs=1e-14)) -> JostSolution:
    """theta_+ with theta_+(x) = exp(i zeta x) to the right of the support."""
    grid = grid if grid is not None else default_grid(V)
    fld = JostField(V, sp.zeta, tol)
    th, dth = fld.theta(grid.nodes)
    return JostSolution(grid, th, dth, "plus", fld.terms, fld.certified_tail, sp.zeta, fld)


def jost_minus(V: Potential, sp: SpectralPoint, grid: Grid | None = None, tol: Tolerance = Tolerance(abs=1e-14)) -> JostSolution:
    """theta_-(x; V) = theta_+(-x; reflect(V))."""
    grid = grid if grid is not None else default_grid(V)
    fld = JostField(reflect(V), sp.zeta, tol)
    th, dth = fld.theta(-grid.nodes)
    return JostSolution(grid, th, -dth, "minus", fld.terms, fld.certified_tail, sp.zeta, fld)


class JostPair:
    """Both Jost solutions at one spectral point, sharing the setup cost."""

    def __init__(self, V: Potential, zeta: complex, tol: Tolerance = Tolerance(abs=1e-14)):
        self.V = V
        self.zeta = complex(zeta)
        self.plus = JostField(V, zeta, tol)
        self.minus = JostField(reflect(V), zeta, tol)

    def theta_plus(self, x):
        return self.plus.theta(x)

    def theta_minus(self, x):
        th, dth = self.minus.theta(-np.asarray(x, dtype=float))
        return th, -dth

    def wronskian_at(self, x):
        tp, dtp = self.theta_plus(x)
        tm, dtm = self.theta_minus(x)
        return tp * dtm - dtp * tm, np.abs(tp * dtm) + np.abs(dtp * tm)


def wronskian(V: Potential, sp: SpectralPoint | complex, tol: Tolerance = Tolerance(rel=1e-9), pair: JostPair | None = None) -> complex:
    """w(zeta) = theta_+ theta_-' - theta_+' theta_- at x = 0.

    The value is recomputed at two further interior points; a spread above
    100 * tol.rel relative to the size of the products signals solver failure.
    """
    zeta = sp.zeta if isinstance(sp, SpectralPoint) else complex(sp)
    pair = pair if pair is not None else JostPair(V, zeta)
    R = V.support_radius
    xs = np.array([0.0, -0.5 * R, 0.5 * R])
    w, scale = pair.wronskian_at(xs)
    spread = float(np.max(np.abs(w - w[0])))
    ref = float(max(np.max(scale), 1e-300))
    if spread > 100 * tol.rel * ref:
        raise InconsistentWronskian(f"Wronskian spread {spread:.3g} (scale {ref:.3g}) at zeta={zeta}")
    return complex(w[0])


def barrier_wronskian(g: float, zeta: complex) -> complex:
    """Closed-form w(zeta) for V = g * 1_[-1,1] (zeta != +-sqrt(g))."""
    zeta = complex(zeta)
    Z = branch_sqrt(zeta * zeta - g)
    return 1j / (2 * Z) * (np.exp(2j * (zeta + Z)) * (Z - zeta) ** 2 - np.exp(2j * (zeta - Z)) * (Z + zeta) ** 2)


def branch_sqrt(w: complex) -> complex:
    """Square root in the closed upper half-plane (nonnegative reals stay >= 0)."""
    r = np.sqrt(complex(w))
    if r.imag < 0 or (r.imag == 0 and r.real < 0):
        r = -r
    return r


def barrier_jost(g: float, zeta: complex, x):
    """Closed-form theta_+ and theta_- (and derivatives) for g * 1_[-1,1]."""
    zeta = complex(zeta)
    x = np.asarray(x, dtype=float)
    Z = branch_sqrt(zeta * zeta - g)
    S = np.exp(1j * (zeta - Z)) * (Z + zeta) / (2 * Z)
    Rc = np.exp(1j * (zeta + Z)) * (Z - zeta) / (2 * Z)

    def plus(x):
        inside = np.abs(x) <= 1
        right = x > 1
        th = np.empty(x.shape, dtype=complex)
        dth = np.empty(x.shape, dtype=complex)
        xi = x[inside]
        th[inside] = S * np.exp(1j * Z * xi) + Rc * np.exp(-1j * Z * xi)
        dth[inside] = 1j * Z * (S * np.exp(1j * Z * xi) - Rc * np.exp(-1j * Z * xi))
        xr = x[right]
        th[right] = np.exp(1j * zeta * xr)
        dth[right] = 1j * zeta * th[right]
        left = x < -1
        if left.any():
            # continue with the free solution matching at x = -1
            t1 = S * np.exp(-1j * Z) + Rc * np.exp(1j * Z)
            d1 = 1j * Z * (S * np.exp(-1j * Z) - Rc * np.exp(1j * Z))
            xl = x[left] + 1.0
            if zeta == 0:
                th[left] = t1 + d1 * xl
                dth[left] = d1
            else:
                c, s = np.cos(zeta * xl), np.sin(zeta * xl)
                th[left] = t1 * c + d1 * s / zeta
                dth[left] = -t1 * zeta * s + d1 * c
        return th, dth

    tp, dtp = plus(x)
    tm, dtm = plus(-x)
    return tp, dtp, tm, -dtm


def jost_plus_ode(V: Potential, zeta: complex, x_eval, tol: Tolerance = Tolerance(rel=1e-12, abs=1e-14)):
    """Independent check: integrate theta'' = (V - zeta^2) theta leftwards from x = R."""
    zeta = complex(zeta)
    x_eval = np.asarray(x_eval, dtype=float)
    R = max(V.support_radius, float(np.max(x_eval)))

    def rhs(x, y):
        return np.array([y[1], (V(np.array([x]))[0] - zeta * zeta) * y[0]])

    y0 = np.array([np.exp(1j * zeta * R), 1j * zeta * np.exp(1j * zeta * R)])
    order = np.argsort(-x_eval)
    traj = solve_ivp(rhs, y0, (R, float(np.min(x_eval))), tol, t_eval=x_eval[order], breakpoints=V.breakpoints)
    th = np.empty(x_eval.size, dtype=complex)
    dth = np.empty(x_eval.size, dtype=complex)
    th[order], dth[order] = traj.y[0], traj.y[1]
    return th, dth


# -- quantitative estimates ------------------------------------------------


@dataclass
class BoundReport:
    side: str
    ratios: dict[str, float]
    passed: bool


def verify_jost_bounds(V: Potential, sp: SpectralPoint, sol: JostSolution, tol: float = 1e-6, raise_on_fail: bool = True) -> BoundReport:
    """Max over the grid of |LHS| / RHS for the four Jost estimates.

    For the plus side these are, with t = sqrt(2) Mplus(x) / <zeta>:
      value:       |theta| <= <x^-> e^t e^{-x Im zeta}
      value_zeta:  |theta| <= e^{Mplus/|zeta|} e^{-x Im zeta}        (zeta != 0)
      difference:  |theta - e^{i zeta x}| <= sqrt(2) <x^-> / <zeta> e^t e^{-x Im zeta} Mplus
      derivative:  |theta' - i zeta e^{i zeta x}| <= e^t e^{-x Im zeta} Mplus
    and the mirror images for the minus side.
    """
    zeta = sp.zeta
    x = sol.grid.nodes
    md = MomentData(V)
    sign = 1.0 if sol.side == "plus" else -1.0
    Mtail = md.Mplus(x) if sol.side == "plus" else md.Mminus(x)
    # <x^-> for plus, <x^+> for minus
    xw = np.where(sign * x < 0, japanese(x), 1.0)
    jz = float(japanese(abs(zeta)))
    decay = np.exp(-sign * x * zeta.imag)
    growth = np.exp(np.sqrt(2.0) * Mtail / jz)
    free = np.exp(sign * 1j * zeta * x)
    tiny = 1e-300
    ratios = {}
    ratios["value"] = float(np.max(np.abs(sol.theta) / (xw * growth * decay)))
    if zeta != 0:
        with np.errstate(over="ignore"):
            ratios["value_zeta"] = float(np.max(np.abs(sol.theta) / (np.exp(Mtail / abs(zeta)) * decay)))
    diff_rhs = np.sqrt(2.0) * xw / jz * growth * decay * Mtail
    diff = np.abs(sol.theta - free)
    ratios["difference"] = float(np.max(np.where(diff_rhs > tiny, diff / np.maximum(diff_rhs, tiny), np.where(diff > 1e-13, np.inf, 0.0))))
    der_rhs = growth * decay * Mtail
    der = np.abs(sol.dtheta - sign * 1j * zeta * free)
    ratios["derivative"] = float(np.max(np.where(der_rhs > tiny, der / np.maximum(der_rhs, tiny), np.where(der > 1e-13, np.inf, 0.0))))
    passed = all(r <= 1 + tol for r in ratios.values())
    if not passed and raise_on_fail:
        worst = max(ratios, key=ratios.get)
        raise BoundViolation(f"{sol.side}:{worst}", ratios[worst])
    return BoundReport(sol.side, ratios, passed)


def wronskian_lower_bound(M: float, sp: SpectralPoint | complex) -> float:
    """2|zeta| - 2 (2 + sqrt 2) M exp(2 sqrt 2 M / <zeta>)."""
    zeta = sp.zeta if isinstance(sp, SpectralPoint) else complex(sp)
    return 2 * abs(zeta) - 2 * (2 + np.sqrt(2.0)) * M * np.exp(2 * np.sqrt(2.0) * M / float(japanese(abs(zeta))))
