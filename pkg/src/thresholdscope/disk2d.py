"""Radial theory of -Delta + g 1_{|x|<1} in the plane.

Radial solutions regular at the origin (phi) and outgoing at infinity (theta)
are glued from Bessel functions at r = 1. The radial resolvent kernel is
phi(min) theta(max) / w with w = theta phi' - phi theta' evaluated at r = 1,
acting against the measure r dr.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bessel import bessel_all, j0_series_only
from .errors import MonotonicityViolation, NearBranchPoint, WronskianTooSmall
from .jost import SpectralPoint, branch_sqrt
from .numerics import Tolerance, solve_ivp
from .resolvent import KernelHandle, as_point

BRANCH_EXCLUSION = 1e-6


@dataclass(frozen=True)
class DiskCoefficients:
    zeta: complex
    g: float
    Z: complex
    a: complex
    b: complex
    A: complex
    B: complex

    @property
    def wronskian(self) -> complex:
        """w_g(1, zeta) = -2 B / pi."""
        return -2 * self.B / np.pi


def _bessel_at(z):
    J0, Y0, J1, Y1, H0, H1 = (v[0] for v in bessel_all(z))
    return J0, Y0, -J1, -Y1, H0, -H1  # values and derivatives


def disk_coefficients(zeta, g: float) -> DiskCoefficients:
    """Matching coefficients at r = 1 (Z = sqrt(zeta^2 - g), Im Z >= 0)."""
    zeta = complex(zeta)
    if zeta.imag < 0:
        raise ValueError("zeta must lie in the closed upper half-plane")
    sg = np.sqrt(g)
    if min(abs(zeta - sg), abs(zeta + sg)) < BRANCH_EXCLUSION:
        raise NearBranchPoint(f"zeta={zeta} within {BRANCH_EXCLUSION} of +-sqrt(g)")
    Z = branch_sqrt(zeta * zeta - g)
    J0Z, Y0Z, dJ0Z, dY0Z, _, _ = _bessel_at(Z)
    J0z, Y0z, dJ0z, dY0z, H0z, dH0z = _bessel_at(zeta)
    h = np.pi / 2
    a = h * (zeta * J0Z * dY0z - Z * dJ0Z * Y0z)
    b = h * (Z * dJ0Z * J0z - zeta * J0Z * dJ0z)
    A = h * (Z * H0z * dY0Z - zeta * dH0z * Y0Z)
    B = h * (zeta * dH0z * J0Z - Z * H0z * dJ0Z)
    return DiskCoefficients(zeta, g, Z, a, b, A, B)


def gamma(g: float) -> float:
    """Gamma(g) = i sqrt(g) J0'(i sqrt(g)) = sqrt(g) I1(sqrt(g))."""
    z = 1j * np.sqrt(g)
    J1 = bessel_all(z)[2][0]
    return float((-z * J1).real)


def radial_solutions(r, zeta, g: float, coeffs: DiskCoefficients | None = None):
    """(phi, theta, dphi, dtheta) at radii r > 0."""
    c = coeffs if coeffs is not None else disk_coefficients(zeta, g)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r <= 0):
        raise ValueError("radii must be positive")
    phi, theta, dphi, dtheta = (np.empty(r.shape, dtype=complex) for _ in range(4))
    inner = r <= 1
    if inner.any():
        ri = r[inner]
        J0, Y0, J1, Y1, _, _ = bessel_all(c.Z * ri)
        phi[inner] = J0
        dphi[inner] = -c.Z * J1
        theta[inner] = c.A * J0 + c.B * Y0
        dtheta[inner] = -c.Z * (c.A * J1 + c.B * Y1)
    outer = ~inner
    if outer.any():
        ro = r[outer]
        J0, Y0, J1, Y1, H0, H1 = bessel_all(c.zeta * ro)
        phi[outer] = c.a * J0 + c.b * Y0
        dphi[outer] = -c.zeta * (c.a * J1 + c.b * Y1)
        theta[outer] = H0
        dtheta[outer] = -c.zeta * H1
    return phi, theta, dphi, dtheta


def kernel2d_radial(g: float, sp, tol_B: float = 1e-12) -> KernelHandle:
    """phi(min) theta(max) / w_g(1, zeta) against r dr."""
    sp = as_point(sp)
    c = disk_coefficients(sp.zeta, g)
    if abs(c.B) <= tol_B:
        raise WronskianTooSmall(f"|B({sp.zeta})| = {abs(c.B):.3g}")
    return KernelHandle(
        "disk2d_radial", sp,
        left=lambda r: radial_solutions(r, sp.zeta, g, c)[0],
        right=lambda r: radial_solutions(r, sp.zeta, g, c)[1],
        w=c.wronskian,
        domain="halfline",
        radial_power=1,
        params={"g": g, "coeffs": c},
    )


def threshold_ratio(r, zeta, g: float):
    """theta_g(r, zeta) / w_g(1, zeta); tends to 1/Gamma(g) for r >= 1 as zeta -> 0."""
    c = disk_coefficients(zeta, g)
    return radial_solutions(r, zeta, g, c)[1] / c.wronskian


def log_bound_profile(r, s):
    """ln(2 + max) ln(2 + 1/min)-type envelope: ln(2 + r<) ln(2 + 1/r>)."""
    lo, hi = np.minimum(r, s), np.maximum(r, s)
    return np.log(2 + lo) * np.log(2 + 1 / hi)


def kernel_bound_constant(g: float, zetas, radii) -> float:
    """max |K(r, s)| / envelope over the (r, s) grid and all zetas."""
    radii = np.asarray(radii, dtype=float)
    env = log_bound_profile(radii[:, None], radii[None, :])
    worst = 0.0
    for zeta in zetas:
        K = kernel2d_radial(g, zeta).matrix(radii)
        worst = max(worst, float(np.max(np.abs(K) / env)))
    return worst


def threshold_limit_factors(r, g: float):
    """zeta -> 0 limits of phi_g and theta_g / w_g at radii r.

    Outside the disk phi = I0(sqrt g) + Gamma ln r and theta / w = 1 / Gamma;
    inside phi = I0(sqrt g r) and theta / w = (pi/2) [(Y1/J1)(Z) J0(Z r) - Y0(Z r)]
    with Z = i sqrt(g), the ratio A / B tending to -Y1(Z) / J1(Z).
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    Z = 1j * np.sqrt(g)
    J0Z, Y0Z, J1Z, Y1Z = (v[0] for v in bessel_all(Z)[:4])
    G = gamma(g)
    phi = np.empty(r.shape, dtype=complex)
    chi = np.empty(r.shape, dtype=complex)
    inner = r <= 1
    if inner.any():
        J0, Y0 = bessel_all(Z * r[inner])[:2]
        phi[inner] = J0
        chi[inner] = (np.pi / 2) * (Y1Z / J1Z * J0 - Y0)
    outer = ~inner
    phi[outer] = J0Z + G * np.log(r[outer])
    chi[outer] = 1 / G
    return phi, chi


def threshold_limit_kernel(g: float, radii):
    """Limit kernel phi_0(r<) chi_0(r>) on a radius grid."""
    radii = np.asarray(radii, dtype=float)
    phi, chi = threshold_limit_factors(radii, g)
    below = radii[:, None] >= radii[None, :]
    return np.where(below, chi[:, None] * phi[None, :], phi[:, None] * chi[None, :])


def limit_bound_constant(g: float, radii) -> float:
    """max |K_0(r, s)| / envelope for the zeta -> 0 limit kernel."""
    radii = np.asarray(radii, dtype=float)
    env = log_bound_profile(radii[:, None], radii[None, :])
    return float(np.max(np.abs(threshold_limit_kernel(g, radii)) / env))


def b_lower_bound_scan(g: float, zeta_grid):
    """(min over the grid of |B| / ln(2 + 1/|zeta|), the minimizing zeta)."""
    best, witness = np.inf, None
    for zeta in np.ravel(zeta_grid):
        B = disk_coefficients(zeta, g).B
        ratio = abs(B) / np.log(2 + 1 / abs(zeta))
        if ratio < best:
            best, witness = ratio, complex(zeta)
    return float(best), witness


def ab_ratio_max(g: float, zeta_grid) -> float:
    """max |A / B| over sampled zetas (caller keeps them away from zeta^2 = g)."""
    return float(max(abs(c.A / c.B) for c in (disk_coefficients(z, g) for z in np.ravel(zeta_grid))))


def punctured_disk_points(eps: float, n: int = 50, seed: int = 0):
    """zeta in the closed upper half-plane with zeta^2 sampled in D_eps minus 0."""
    rng = np.random.default_rng(seed)
    rad = eps * np.sqrt(rng.uniform(1e-6, 1.0, n))
    ang = rng.uniform(-np.pi, np.pi, n)
    z2 = rad * np.exp(1j * ang)
    return np.array([branch_sqrt(w) for w in z2])


# -- non-radial sectors ------------------------------------------------------


@dataclass
class ModeProfile:
    m: int
    g: float
    r: np.ndarray
    phi: np.ndarray
    log_growth: float
    monotone: bool


def nonradial_mode_profile(m: int, g: float, r, tol: Tolerance = Tolerance(rel=1e-11, abs=1e-13)) -> ModeProfile:
    """Solve (-d_r^2 - r^-1 d_r + m^2/r^2 + g) phi = 0 inward from phi(1) = 1, phi'(1) = -m.

    In t = -ln r the equation becomes u'' = (m^2 + g e^{-2t}) u, u(0) = 1,
    u'(0) = m. The profile must decrease strictly in r on (min r, 1) and
    dominate eps |ln r| near the origin.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    r = np.sort(np.asarray(r, dtype=float))
    if r[0] <= 0 or r[-1] > 1:
        raise ValueError("radii must lie in (0, 1]")
    t = -np.log(r)

    def rhs(s, y):
        return np.array([y[1], (m * m + g * np.exp(-2 * s)) * y[0]])

    T = float(t.max())
    order = np.argsort(t)
    traj = solve_ivp(rhs, np.array([1.0, float(m)], dtype=complex), (0.0, T), tol, t_eval=t[order])
    u = np.empty(t.size)
    du = np.empty(t.size)
    u[order], du[order] = traj.y[0].real, traj.y[1].real
    inner = t > 0
    monotone = bool(np.all(du[inner] > 0)) and bool(np.all(np.diff(u[order]) >= 0))
    degenerate = m == 0 and g == 0
    if not monotone and not degenerate:
        raise MonotonicityViolation(f"phi_{m} is not decreasing in r for g={g}")
    tail = t >= 0.5 * T
    log_growth = float(np.min(u[tail] / t[tail])) if np.any(tail & (t > 0)) else 0.0
    return ModeProfile(m, g, r, u, log_growth, monotone)


def free_sector_kernel(sp, m: int = 1) -> KernelHandle:
    """Free 2D resolvent on the angular sector e^{i m angle}, against r dr.

    From the addition theorem, (i/4) H0(zeta|x-y|) has sector kernel
    (i pi / 2) J_m(zeta r<) H_m(zeta r>); at zeta = i this is I_m(r<) K_m(r>)
    and for m = 1 it tends to r< / (2 r>) as zeta -> 0.
    """
    if m != 1:
        raise NotImplementedError("only the m = 1 sector is provided")
    sp = as_point(sp)
    zeta = sp.zeta

    def left(r):
        return bessel_all(zeta * np.asarray(r, dtype=float))[2]

    def right(r):
        return bessel_all(zeta * np.asarray(r, dtype=float))[5]

    return KernelHandle("sector2d", sp, left, right, 2 / (1j * np.pi), domain="halfline", radial_power=1, params={"m": m})


def j0_near_zero(z):
    """J0 by its ascending series; exposed for small-argument checks."""
    return j0_series_only(z)


__all__ = [
    "DiskCoefficients",
    "ModeProfile",
    "SpectralPoint",
    "ab_ratio_max",
    "b_lower_bound_scan",
    "disk_coefficients",
    "free_sector_kernel",
    "gamma",
    "kernel2d_radial",
    "kernel_bound_constant",
    "limit_bound_constant",
    "log_bound_profile",
    "nonradial_mode_profile",
    "punctured_disk_points",
    "radial_solutions",
    "threshold_limit_factors",
    "threshold_limit_kernel",
    "threshold_ratio",
]
