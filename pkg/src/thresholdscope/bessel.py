"""Bessel functions of order 0 and 1 for complex argument.

Ascending series for |z| <= 12, summed in extended precision so the
cancellation inside the series (and in H = J + iY when Im z is large) stays
below 1e-12. Beyond |z| = 12 the Hankel expansions for H^(1) and H^(2) are
summed separately up to their smallest term and J, Y are recovered from them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainError

SERIES_RADIUS = 12.0
_EULER = np.longdouble("0.577215664901532860606512090082402431")
_PI = np.longdouble("3.14159265358979323846264338327950288")
_SERIES_TERMS = 70


@dataclass(frozen=True)
class BesselValue:
    """J0, Y0, H0^(1) and the derivatives J0' = -J1, Y0' = -Y1 at one argument."""

    j0: complex
    y0: complex
    h1_0: complex
    dj0: complex
    dy0: complex
    arg: complex
    regime: Literal["series", "asymptotic"]


def _check_domain(z: np.ndarray) -> None:
    if np.any(z == 0):
        raise DomainError("Bessel functions of the second kind are singular at 0")
    if np.any((z.imag == 0) & (z.real < 0)):
        raise DomainError("argument on the branch cut (-inf, 0]")


def _series(z: np.ndarray):
    """(J0, Y0, J1, Y1, H0, H1) by ascending series in long double."""
    zl = z.astype(np.clongdouble)
    q = -(zl * zl) / 4
    t0 = np.ones_like(zl)  # (-z^2/4)^k / (k!)^2
    t1 = np.ones_like(zl)  # (-z^2/4)^k / (k! (k+1)!)
    s_j0 = t0.copy()
    s_j1 = t1.copy()
    s_y0 = np.zeros_like(zl)  # sum_{k>=1} H_k (-z^2/4)^k/(k!)^2
    s_y1 = (-_EULER + (1 - _EULER)) * t1  # sum (psi(k+1)+psi(k+2)) t1_k
    harm = np.longdouble(0)
    for k in range(1, _SERIES_TERMS):
        t0 = t0 * q / (k * k)
        t1 = t1 * q / (k * (k + 1))
        harm = harm + np.longdouble(1) / k
        s_j0 = s_j0 + t0
        s_j1 = s_j1 + t1
        s_y0 = s_y0 + harm * t0
        s_y1 = s_y1 + (2 * (harm - _EULER) + np.longdouble(1) / (k + 1)) * t1
    half = zl / 2
    log_half = np.log(half)
    J0 = s_j0
    J1 = half * s_j1
    Y0 = (2 / _PI) * ((log_half + _EULER) * J0 - s_y0)
    Y1 = -2 / (_PI * zl) + (2 / _PI) * log_half * J1 - half * s_y1 / _PI
    H0 = J0 + 1j * Y0
    H1 = J1 + 1j * Y1
    return tuple(np.asarray(v, dtype=complex) for v in (J0, Y0, J1, Y1, H0, H1))


def _hankel_sums(nu: int, z: np.ndarray):
    """sum_k i^k a_k / z^k and sum_k (-i)^k a_k / z^k, truncated at the smallest term."""
    mu = 4.0 * nu * nu
    p = np.ones_like(z)
    m = np.ones_like(z)
    term = np.ones_like(z)
    active = np.ones(z.shape, dtype=bool)
    prev = np.abs(term)
    for k in range(1, 60):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * z)
        mag = np.abs(term)
        active &= mag < prev
        if not active.any():
            break
        p = np.where(active, p + term * (1j) ** k, p)
        m = np.where(active, m + term * (-1j) ** k, m)
        active &= mag > 1e-18 * np.abs(p)
        prev = mag
    return p, m


def _hankel_pair(z: np.ndarray):
    """[(J, Y, H^(1), H^(2)) for order 0, same for order 1], valid for Re z >= 0."""
    amp = np.sqrt(2.0 / (np.pi * z))
    out = []
    for nu in (0, 1):
        p, m = _hankel_sums(nu, z)
        phase = z - nu * np.pi / 2 - np.pi / 4
        h1 = amp * np.exp(1j * phase) * p
        h2 = amp * np.exp(-1j * phase) * m
        out.append(((h1 + h2) / 2, (h1 - h2) / 2j, h1, h2))
    return out


def _asymptotic(z: np.ndarray):
    J0, Y0, J1, Y1, H0, H1 = (np.empty(z.shape, dtype=complex) for _ in range(6))
    right = z.real >= 0
    if right.any():
        (a, b, c, _), (d, e, f, _) = _hankel_pair(z[right])
        J0[right], Y0[right], H0[right], J1[right], Y1[right], H1[right] = a, b, c, d, e, f
    left = ~right
    if left.any():
        # z = u exp(+-i pi) with Re u > 0, away from the Stokes line of H^(2)
        u = -z[left]
        s = np.where(z[left].imag >= 0, 1.0, -1.0)
        res = []
        for n, (j, y, h1, h2) in enumerate(_hankel_pair(u)):
            sign = (-1) ** n
            jz = sign * j
            yz = sign * (y + 2j * s * j)
            hz = np.where(s > 0, -sign * h2, jz + 1j * yz)
            res.append((jz, yz, hz))
        (J0[left], Y0[left], H0[left]), (J1[left], Y1[left], H1[left]) = res
    return J0, Y0, J1, Y1, H0, H1


def bessel_all(z):
    """Arrays (J0, Y0, J1, Y1, H0^(1), H1^(1)) at complex points z."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    _check_domain(z)
    small = np.abs(z) <= SERIES_RADIUS
    res = [np.empty(z.shape, dtype=complex) for _ in range(6)]
    if small.any():
        for r, v in zip(res, _series(z[small])):
            r[small] = v
    if (~small).any():
        for r, v in zip(res, _asymptotic(z[~small])):
            r[~small] = v
    return tuple(res)


def j0_series_only(z):
    """J0 by the ascending series alone (entire; z = 0 allowed)."""
    zl = np.asarray(z, dtype=complex).astype(np.clongdouble)
    q = -(zl * zl) / 4
    t = np.ones_like(zl)
    s = t.copy()
    for k in range(1, _SERIES_TERMS):
        t = t * q / (k * k)
        s = s + t
    return np.asarray(s, dtype=complex)


def bessel0(zarg) -> BesselValue:
    zarg = complex(zarg)
    J0, Y0, J1, Y1, H0, _ = (complex(v[0]) for v in bessel_all(zarg))
    regime = "series" if abs(zarg) <= SERIES_RADIUS else "asymptotic"
    return BesselValue(J0, Y0, H0, -J1, -Y1, zarg, regime)


def bessel1(zarg):
    """(J1, Y1, H1^(1)) at one argument."""
    _, _, J1, Y1, _, H1 = (complex(v[0]) for v in bessel_all(complex(zarg)))
    return J1, Y1, H1


def hankel_wronskian_check(zarg) -> complex:
    """W(J0, H0^(1))(z) - 2i/(pi z)."""
    b = bessel0(zarg)
    dh = b.dj0 + 1j * b.dy0
    return b.j0 * dh - b.dj0 * b.h1_0 - 2j / (np.pi * complex(zarg))


def wronskian_deviation(zarg) -> complex:
    """W(J0, Y0)(z) - 2/(pi z)."""
    b = bessel0(zarg)
    return b.j0 * b.dy0 - b.dj0 * b.y0 - 2 / (np.pi * complex(zarg))
