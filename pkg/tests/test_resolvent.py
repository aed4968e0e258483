import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad
from scipy.optimize import brentq

from thresholdscope.errors import ResidualTooLarge, WronskianTooSmall
from thresholdscope.jost import SpectralPoint
from thresholdscope.numerics import Grid
from thresholdscope.potentials import Potential
from thresholdscope.resolvent import (
    apply,
    barrier1d,
    bound_states,
    detect_virtual_level,
    free1d,
    free3d,
    generic1d,
    kernel,
    radial3d,
    tol_w,
)


def well_levels(g):
    """kappa values of -d^2/dx^2 - g 1_[-1,1]: k tan k = kappa (even), -k cot k = kappa (odd), k^2 + kappa^2 = g."""
    out = []
    s = np.sqrt(g)
    even = lambda k: k * np.tan(k) - np.sqrt(max(g - k * k, 0.0))
    odd = lambda k: -k / np.tan(k) - np.sqrt(max(g - k * k, 0.0))
    n = 0
    while n * np.pi / 2 < s:
        lo, hi = n * np.pi / 2 + 1e-12, min((n + 1) * np.pi / 2 - 1e-12, s)
        f = even if n % 2 == 0 else odd
        if f(lo) * f(hi) < 0:
            k = brentq(f, lo, hi, xtol=1e-15)
            out.append(np.sqrt(max(g - k * k, 0.0)))
        n += 1
    return sorted(out)


@given(st.floats(0.05, 5.0))
def test_free_kernel_closed_form(kappa):
    K = free1d(SpectralPoint.from_z(-kappa**2))
    x, y = 0.3, -1.1
    assert K(x, y) == pytest.approx(np.exp(-kappa * 1.4) / (2 * kappa), rel=1e-13)


def test_free_kernel_singular_at_threshold():
    with pytest.raises(WronskianTooSmall):
        free1d(SpectralPoint.from_zeta(0.0))


@given(st.builds(complex, st.floats(0, 2), st.floats(0.01, 1)))
def test_barrier_kernel_matches_generic(zeta):
    V = Potential.indicator(-1.0, 1.0, 1.0)
    sp = SpectralPoint.from_zeta(zeta)
    xs = np.linspace(-2.5, 2.5, 6)
    assert np.allclose(barrier1d(1.0, sp).matrix(xs), generic1d(V, sp).matrix(xs), rtol=1e-8, atol=1e-12)


def test_kernel_dispatch():
    sp = SpectralPoint.from_z(-1.0)
    assert kernel(Potential.zero(), sp).family == "free1d"
    assert kernel(Potential.indicator(-1, 1, 1.0), sp).family == "generic1d"


def test_kernel_symmetric():
    K = generic1d(Potential.random_piecewise_constant(4), SpectralPoint.from_zeta(0.4 + 0.4j))
    M = K.matrix(np.linspace(-3, 3, 15))
    assert np.allclose(M, M.T, rtol=1e-10, atol=1e-14)


def test_apply_matches_quadrature():
    sp = SpectralPoint.from_z(-0.25)
    K = free1d(sp)
    f = lambda y: np.exp(-(y**2))
    grid = Grid.uniform(-12, 12, 1201)
    out = apply(K, f(grid.nodes), grid)
    ref = quad(lambda y: (K(0.0, y) * f(y)).real, -np.inf, np.inf)[0]
    assert out.u[600] == pytest.approx(ref, rel=1e-4)
    assert out.residual < 1e-3


def test_apply_with_potential_jump():
    V = Potential.indicator(-1.0, 1.0, 1.0)
    K = barrier1d(1.0, SpectralPoint.from_z(-1.0))
    grid = Grid.uniform(-8, 8, 1601)
    f = np.exp(-((grid.nodes - 0.5) ** 2))
    out = apply(K, f, grid, V=V)
    assert out.checked_nodes < grid.nodes.size - 2


def test_apply_residual_guard():
    K = free1d(SpectralPoint.from_z(-1.0))
    grid = Grid.uniform(-5, 5, 11)
    with pytest.raises(ResidualTooLarge):
        apply(K, np.exp(-grid.nodes**2), grid, tol=1e-8)


def test_free3d_and_radial_limits():
    sp = SpectralPoint.from_z(-1e-8)
    K = free3d(sp)
    x, y = np.array([0.0, 0.0, 0.0]), np.array([1.0, 2.0, 2.0])
    assert abs(K(x, y)) == pytest.approx(1 / (4 * np.pi * 3), rel=1e-3)
    R = radial3d(sp)
    assert R(0.5, 2.0) == pytest.approx(0.5, rel=1e-3)


def test_radial_kernel_is_spherical_average():
    # average of exp(i zeta |x - y|) / |x - y| over the sphere |y| = s equals the radial factor
    zeta = 0.7 + 0.3j
    r, s = 0.8, 1.7
    avg = quad(lambda c: (np.exp(1j * zeta * np.sqrt(r * r + s * s - 2 * r * s * c)) / np.sqrt(r * r + s * s - 2 * r * s * c)).real, -1, 1)[0] / 2
    avg_im = quad(lambda c: (np.exp(1j * zeta * np.sqrt(r * r + s * s - 2 * r * s * c)) / np.sqrt(r * r + s * s - 2 * r * s * c)).imag, -1, 1)[0] / 2
    assert radial3d(SpectralPoint.from_zeta(zeta))(r, s) == pytest.approx(avg + 1j * avg_im, rel=1e-10)


def test_detect_zero_potential_virtual_level():
    rep = detect_virtual_level(Potential.zero(), 0.0)
    assert rep.classification == "virtual_level"
    assert rep.rank == 1
    assert np.allclose(rep.virtual_state, 1.0)


def test_detect_barrier_regular():
    rep = detect_virtual_level(Potential.indicator(-1, 1, 1.0), 0.0)
    assert rep.classification == "regular"
    assert rep.virtual_state is None
    assert callable(rep.evidence)


def test_detect_resonant_well():
    rep = detect_virtual_level(Potential.indicator(-1, 1, -np.pi**2 / 4), 0.0)
    assert rep.classification == "virtual_level"
    state = rep.virtual_state
    # bounded: constant outside the well
    outside = np.abs(rep.grid.nodes) > 1.2
    assert np.ptp(np.abs(state[outside])) < 1e-8


def test_detect_bound_state_and_excluded():
    g = 1.0
    kappa = well_levels(g)[0]
    rep = detect_virtual_level(Potential.indicator(-1, 1, -g), -kappa**2)
    assert rep.classification == "bound_state"
    assert detect_virtual_level(Potential.zero(), 1j).classification == "excluded"


@pytest.mark.parametrize("g", [0.3, 1.0, 10.0])
def test_bound_states_match_transcendental_equation(g):
    found = bound_states(Potential.indicator(-1, 1, -g), (1e-3, np.sqrt(g)))
    ref = well_levels(g)
    assert len(found) == len(ref)
    assert np.allclose([k for k, _ in found], ref, rtol=1e-9)
    assert all(E == pytest.approx(-k * k) for k, E in found)


def test_no_bound_states_for_barrier_or_zero():
    assert bound_states(Potential.indicator(-1, 1, 1.0), (1e-3, 3.0)) == []
    assert bound_states(Potential.zero(), (1e-3, 3.0)) == []


def test_tol_w_scales():
    assert tol_w(0) == pytest.approx(1e-8)
    assert tol_w(3) == pytest.approx(4e-8)
