import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special
from scipy.integrate import quad

from thresholdscope import disk2d
from thresholdscope.errors import MonotonicityViolation, NearBranchPoint
from thresholdscope.jost import SpectralPoint


def test_gamma_matches_modified_bessel():
    for g in (1e-4, 0.01, 0.5, 1.0):
        s = np.sqrt(g)
        assert disk2d.gamma(g) == pytest.approx(s * special.iv(1, s), rel=1e-12)
    assert disk2d.gamma(1e-4) == pytest.approx(0.5e-4, rel=1e-4)


def test_branch_point_exclusion():
    with pytest.raises(NearBranchPoint):
        disk2d.disk_coefficients(0.1 + 1e-8, 0.01)


@given(st.builds(complex, st.floats(0.01, 3), st.floats(0.0, 1)))
def test_matching_at_unit_radius(zeta):
    g = 0.5
    if abs(zeta - np.sqrt(g)) < 1e-3:
        return
    c = disk2d.disk_coefficients(zeta, g)
    # compare the inner and outer representations at r = 1 exactly
    J0Z, Y0Z, J1Z, Y1Z = (special.jv(0, c.Z), special.yv(0, c.Z), special.jv(1, c.Z), special.yv(1, c.Z))
    J0, Y0, J1, Y1 = (special.jv(0, zeta), special.yv(0, zeta), special.jv(1, zeta), special.yv(1, zeta))
    H0, H1 = special.hankel1(0, zeta), special.hankel1(1, zeta)
    assert abs(J0Z - (c.a * J0 + c.b * Y0)) < 1e-9 * max(1, abs(J0Z))
    assert abs(-c.Z * J1Z - (-zeta * (c.a * J1 + c.b * Y1))) < 1e-9 * max(1, abs(c.Z * J1Z))
    assert abs(c.A * J0Z + c.B * Y0Z - H0) < 1e-9 * max(1, abs(H0))
    assert abs(-c.Z * (c.A * J1Z + c.B * Y1Z) + zeta * H1) < 1e-9 * max(1, abs(H1))


@given(st.builds(complex, st.floats(0.05, 2), st.floats(0.01, 1)), st.floats(0.1, 5))
def test_r_times_wronskian_constant(zeta, r):
    g = 0.3
    if abs(zeta - np.sqrt(g)) < 1e-3:
        return
    c = disk2d.disk_coefficients(zeta, g)
    phi, th, dphi, dth = disk2d.radial_solutions(np.array([r]), zeta, g, c)
    W = r * (th[0] * dphi[0] - phi[0] * dth[0])
    assert abs(W - c.wronskian) < 1e-8 * max(1, abs(c.wronskian))


def test_radial_solutions_solve_the_ode():
    g, zeta = 0.4, 0.6 + 0.2j
    r = np.linspace(0.2, 3.0, 2001)
    phi = disk2d.radial_solutions(r, zeta, g)[0]
    h = r[1] - r[0]
    d2 = (phi[2:] - 2 * phi[1:-1] + phi[:-2]) / h**2
    d1 = (phi[2:] - phi[:-2]) / (2 * h)
    rr = r[1:-1]
    V = np.where(rr < 1, g, 0.0)
    res = -d2 - d1 / rr + (V - zeta**2) * phi[1:-1]
    away = np.abs(rr - 1) > 2 * h
    assert np.max(np.abs(res[away])) < 1e-4


def test_threshold_ratio_constant_outside_disk():
    zeta = 1e-6j
    ratio = disk2d.threshold_ratio(np.array([1.0, 2.0, 5.0]), zeta, 0.01)
    # independent of r up to O(ln r / ln(1/|zeta|))
    assert np.ptp(np.abs(ratio)) / np.abs(ratio).max() < 0.15


def test_kernel_symmetry_and_wronskian_guard():
    K = disk2d.kernel2d_radial(0.01, SpectralPoint.from_zeta(0.1j))
    r = np.geomspace(0.05, 10, 9)
    M = K.matrix(r)
    assert np.allclose(M, M.T)


def test_kernel_bound_constant_finite():
    radii = np.geomspace(1e-2, 1e2, 12)
    C = disk2d.kernel_bound_constant(0.01, [1j * 10.0**-k for k in range(1, 6)], radii)
    assert np.isfinite(C) and C > 0


def test_b_lower_bound_on_punctured_disk():
    pts = disk2d.punctured_disk_points(1e-3, 40, seed=2)
    assert all(abs(disk2d.disk_coefficients(z, 0.01).B) > 0.5 for z in pts)
    assert all(z.imag >= 0 for z in pts)


@pytest.mark.parametrize("m,g", [(0, 0.5), (1, 0.5), (2, 1.0)])
def test_nonradial_profiles_match_modified_bessel(m, g):
    # the regular-at-infinity-decreasing profile is a combination of I_m and K_m in r sqrt(g)
    r = np.geomspace(1e-3, 1.0, 30)
    prof = disk2d.nonradial_mode_profile(m, g, r)
    s = np.sqrt(g)
    A = np.array([[special.iv(m, s), special.kv(m, s)], [s * special.ivp(m, s), s * special.kvp(m, s)]])
    a, b = np.linalg.solve(A, [1.0, -m])
    ref = a * special.iv(m, s * r) + b * special.kv(m, s * r)
    assert np.allclose(prof.phi, ref, rtol=1e-8)
    assert prof.monotone and prof.log_growth > 0


def test_free_profile_degenerate():
    prof = disk2d.nonradial_mode_profile(0, 0.0, np.geomspace(1e-3, 1.0, 10))
    assert np.allclose(prof.phi, 1.0)


def test_monotonicity_violation_detected():
    # a negative coupling with m = 0 makes the profile oscillate near 0
    with pytest.raises(MonotonicityViolation):
        disk2d.nonradial_mode_profile(0, -40.0, np.geomspace(1e-3, 1.0, 50))


def test_sector_kernel_at_imaginary_zeta():
    K = disk2d.free_sector_kernel(SpectralPoint.from_zeta(1j))
    r, s = 0.5, 2.0
    assert K(r, s) == pytest.approx(special.iv(1, r) * special.kv(1, s), rel=1e-10)


def test_sector_kernel_is_angular_projection():
    # (i/4) H0(zeta |x - y|) projected on e^{i angle}: (1/2pi) int (i/4) H0 e^{-i t} dt
    zeta = 0.8 + 0.6j
    r, s = 0.7, 1.9
    d = lambda t: np.sqrt(r * r + s * s - 2 * r * s * np.cos(t))
    f = lambda t: 0.25j * special.hankel1(0, zeta * d(t)) * np.cos(t)
    val = quad(lambda t: f(t).real, 0, 2 * np.pi, limit=200)[0] + 1j * quad(lambda t: f(t).imag, 0, 2 * np.pi, limit=200)[0]
    K = disk2d.free_sector_kernel(SpectralPoint.from_zeta(zeta))
    assert K(r, s) == pytest.approx(val, rel=1e-8)


@pytest.mark.parametrize("g", [0.01, 1.0])
def test_limit_factors_wronskian_and_continuity(g):
    h = 1e-6
    for r in (0.4, 2.0):
        p, c = disk2d.threshold_limit_factors(np.array([r - h, r, r + h]), g)
        W = r * (c[1] * (p[2] - p[0]) - p[1] * (c[2] - c[0])) / (2 * h)
        assert W == pytest.approx(1.0, abs=1e-6)
    p, c = disk2d.threshold_limit_factors(np.array([1 - 1e-12, 1 + 1e-12]), g)
    assert abs(p[0] - p[1]) < 1e-9 and abs(c[0] - c[1]) < 1e-9 * abs(c[0])
    assert c[1] == pytest.approx(1 / disk2d.gamma(g))


def test_kernel_approaches_limit_kernel():
    r = np.array([0.5, 2.0])
    K = disk2d.kernel2d_radial(1.0, 1e-300j).matrix(r)
    assert np.allclose(K, disk2d.threshold_limit_kernel(1.0, r), rtol=2e-2)


def test_bound_constant_below_limit_constant():
    radii = np.geomspace(1e-2, 1e2, 10)
    C0 = disk2d.limit_bound_constant(1.0, radii)
    Cs = [disk2d.kernel_bound_constant(1.0, [1j * 10.0**-k], radii) for k in (1, 3, 10, 50)]
    assert all(np.diff(Cs) > 0) and max(Cs) <= C0
