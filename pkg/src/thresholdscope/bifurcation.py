"""Eigenvalues emerging from a threshold: shallow wells, an explicit 3D family,
and tracking zeros of the Wronskian under small perturbations."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import EigenvalueLost, NoRoot
from .jost import JostField, SpectralPoint, barrier_wronskian, wronskian
from .numerics import Tolerance, find_complex_zeros, integrate
from .potentials import Potential, fit_potential
from .resolvent import detect_virtual_level, tol_w

DEFAULT_EPSILONS = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)


# -- shallow well ------------------------------------------------------------


def shallow_well_eigenvalue(g: float, tol: Tolerance = Tolerance(rel=1e-9), samples: int = 40) -> complex:
    """Ground state E = -kappa^2 of -d^2/dx^2 - g 1_[-1,1], kappa the zero of w(i kappa) in (0, g]."""
    if not 0 < g <= 0.5:
        raise ValueError("g must lie in (0, 0.5]")
    V = Potential.indicator(-1.0, 1.0, -g)

    def w(k):
        return wronskian(V, SpectralPoint.from_zeta(1j * k), tol)

    ks = np.geomspace(1e-3 * g, g, samples)
    vals = np.array([w(k).real for k in ks])
    idx = np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]
    if idx.size == 0:
        raise NoRoot(f"w(i kappa) keeps its sign on (0, {g}]")
    i = idx[-1]
    k = brentq(lambda t: w(t).real, ks[i], ks[i + 1], xtol=1e-15 * g, rtol=1e-15)
    if abs(w(k)) > tol_w(1j * k):
        raise NoRoot(f"|w| = {abs(w(k)):.3g} at the sign change")
    return complex(-k * k)


def power_law_fit(x, y):
    """(exponent, prefactor) of |y| ~ prefactor * x^exponent by least squares in log-log."""
    p = np.polyfit(np.log(np.asarray(x, dtype=float)), np.log(np.abs(np.asarray(y))), 1)
    return float(p[0]), float(np.exp(p[1]))


# -- explicit 3D family ------------------------------------------------------


def family_state(r, zeta):
    """psi(r), psi'(r), psi''(r): e^{i zeta r}/r outside the unit ball, P e^{i zeta (1+r^2)/2} inside, P = (3-r^2)/2."""
    zeta = complex(zeta)
    r = np.asarray(r, dtype=float)
    psi, d1, d2 = (np.empty(r.shape, dtype=complex) for _ in range(3))
    inside = r <= 1
    ri = r[inside]
    e = np.exp(1j * zeta * (1 + ri**2) / 2)
    P, dP = (3 - ri**2) / 2, -ri
    q, dq = 1j * zeta * ri, 1j * zeta  # e' = q e
    psi[inside] = P * e
    d1[inside] = (dP + P * q) * e
    d2[inside] = (-1 + dP * q + dP * q + P * dq + P * q * q) * e
    ro = r[~inside]
    eo = np.exp(1j * zeta * ro)
    psi[~inside] = eo / ro
    d1[~inside] = eo * (1j * zeta / ro - 1 / ro**2)
    d2[~inside] = eo * (-(zeta**2) / ro - 2j * zeta / ro**2 + 2 / ro**3)
    return psi, d1, d2


def family_potential(r, zeta):
    """V(r, zeta) = zeta^2 (1 - r^2) + 3 i zeta - (6 + 4 i zeta r^2) / (3 - r^2) on [0, 1], zero beyond."""
    zeta = complex(zeta)
    r = np.asarray(r, dtype=float)
    inner = zeta**2 * (1 - r**2) + 3j * zeta - (6 + 4j * zeta * r**2) / (3 - r**2)
    return np.where(r <= 1, inner, 0.0)


@dataclass
class Family3D:
    zeta: complex
    potential: Potential
    r: np.ndarray
    psi: np.ndarray
    residual: float
    fitted_residual: float
    value_jump: float
    derivative_jump: float
    norm_squared: float | None = None
    tail_decay_rate: float | None = None


def construct_3d_family(zeta, r=None, tol: Tolerance = Tolerance(rel=1e-12, abs=1e-14)) -> Family3D:
    """State and potential with -psi'' - (2/r) psi' + V psi = zeta^2 psi.

    The potential is also fitted as a piecewise polynomial on [0, 1] so the
    half-line Jost machinery can use it. For Im zeta > 0 the L^2(r^2 dr) norm
    and the exponential decay rate of |psi|^2 r^2 are attached.
    """
    zeta = complex(zeta)
    r = np.linspace(0.01, 4.0, 400) if r is None else np.asarray(r, dtype=float)
    psi, d1, d2 = family_state(r, zeta)
    lhs = -d2 - 2 * d1 / r + family_potential(r, zeta) * psi - zeta**2 * psi
    V = fit_potential(lambda x: family_potential(x, zeta), np.linspace(0.0, 1.0, 5), 12)
    lhs_fit = -d2 - 2 * d1 / r + V(r) * psi - zeta**2 * psi
    scale = np.maximum(1.0, np.abs(psi))
    off_break = ~np.isin(r, V.breakpoints)
    inner = family_state(np.array([1.0]), zeta)
    e = np.exp(1j * zeta)
    vj = abs(inner[0][0] - e)
    dj = abs(inner[1][0] - (1j * zeta - 1) * e)
    fam = Family3D(zeta, V, r, psi, float(np.max(np.abs(lhs) / scale)), float(np.max((np.abs(lhs_fit) / scale)[off_break])), vj, dj)
    if zeta.imag > 0:
        inside = integrate(lambda x: np.abs(family_state(x, zeta)[0]) ** 2 * x**2, 0.0, 1.0, tol).real
        fam.norm_squared = inside + np.exp(-2 * zeta.imag) / (2 * zeta.imag)
        rr = np.linspace(5.0, 50.0, 200)
        dens = np.abs(family_state(rr, zeta)[0]) ** 2 * rr**2
        fam.tail_decay_rate = float(-np.polyfit(rr, np.log(dens), 1)[0])
    return fam


def halfline_jost_value(V: Potential, zeta) -> complex:
    """theta_+(0, zeta) for the half-line problem -u'' + V u = zeta^2 u; it vanishes at a
    threshold resonance (or eigenvalue) of the radial operator with u = r psi, u(0) = 0."""
    return complex(JostField(V, zeta).theta(np.array([0.0]))[0][0])


# -- perturbative tracking ---------------------------------------------------


@dataclass
class BifurcationPath:
    epsilons: list[float]
    eigenvalues: list[complex]
    z0: complex
    law_fit: tuple[float, float] | None
    wronskian_abs: list[float] = field(default_factory=list)
    absent_counts: dict | None = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["epsilon", "re_E", "im_E", "wronskian_abs"])
        for eps, E, wa in zip(self.epsilons, self.eigenvalues, self.wronskian_abs):
            wr.writerow([repr(eps), repr(E.real), repr(E.imag), repr(wa)])
        return buf.getvalue()


def _zeros_in_box(V: Potential, zeta0: complex, half: float, floor: float):
    cache: dict[complex, complex] = {}

    def w(zeta):
        zeta = complex(zeta)
        if zeta not in cache:
            cache[zeta] = wronskian(V, SpectralPoint.from_zeta(zeta) if zeta.imag >= 0 else zeta)
        return cache[zeta]

    lo = complex(zeta0.real - half, max(zeta0.imag - half, 0.0) + floor)
    hi = complex(zeta0.real + half, zeta0.imag + half)
    zeros = find_complex_zeros(w, lo, hi, min_size=0.2 * half)
    return [z for z in zeros if abs(w(z)) <= tol_w(z)]


def eigenvalue_count_near(V: Potential, z0, radius: float) -> int:
    """Zeros of w in the zeta box over the disc |z - z0| < radius (Im zeta > 0)."""
    zeta0 = SpectralPoint.from_z(z0).zeta
    half = np.sqrt(radius) if z0 == 0 else radius / (2 * max(abs(zeta0), 1e-12))
    return len([z for z in _zeros_in_box(V, zeta0, half, 1e-9) if z.imag > 0 and abs(z * z - z0) < radius])


def track_bifurcation(
    V: Potential,
    W: Potential,
    z0=0.0,
    eps_list=DEFAULT_EPSILONS,
    search_half_width: float = 1.0,
    radius: float = 0.01,
) -> BifurcationPath:
    """Eigenvalue of -d^2/dx^2 + V - eps W nearest z0 for decreasing eps.

    At a virtual level each step searches a zeta box around the threshold
    whose size follows the previous eigenvalue; a step that finds nothing
    raises EigenvalueLost. At a regular z0 the number of eigenvalues with
    |E - z0| < radius is recorded for each eps instead.
    """
    z0 = complex(z0)
    eps_list = sorted(eps_list, reverse=True)
    report = detect_virtual_level(V, z0)
    zeta0 = SpectralPoint.from_z(z0).zeta
    if report.classification != "virtual_level":
        counts = {eps: eigenvalue_count_near(V - W.scaled(eps), z0, radius) for eps in eps_list}
        return BifurcationPath(list(eps_list), [], z0, None, [], counts)
    half = search_half_width
    eigs, was, done = [], [], []
    for eps in eps_list:
        P = V - W.scaled(eps)
        found = [z for z in _zeros_in_box(P, zeta0, half, 1e-3 * half) if z.imag > 0]
        if not found:
            found = [z for z in _zeros_in_box(P, zeta0, 3 * half, 1e-4 * half) if z.imag > 0]
        if not found:
            raise EigenvalueLost(f"no eigenvalue near z0={z0} at eps={eps}")
        zeta = min(found, key=lambda z: abs(z - zeta0))
        E = zeta * zeta
        eigs.append(complex(E))
        was.append(abs(wronskian(P, SpectralPoint.from_zeta(zeta))))
        done.append(eps)
        half = max(3 * abs(zeta - zeta0), 1e-8)
    fit = power_law_fit(done, [E - z0 for E in eigs]) if len(done) >= 2 else None
    return BifurcationPath(done, eigs, z0, fit, was)


def resonant_well_depth(lo: float = 1.0, hi: float = 4.0) -> float:
    """Smallest depth g* with w(0) = 0 for -g 1_[-1,1] (closed-form Wronskian), = pi^2/4."""
    return brentq(lambda g: barrier_wronskian(-g, 0.0).real, lo, hi, xtol=1e-15)
