import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from thresholdscope.bessel import (
    SERIES_RADIUS,
    bessel0,
    bessel1,
    bessel_all,
    hankel_wronskian_check,
    j0_series_only,
    wronskian_deviation,
)
from thresholdscope.cli import bessel_test_points
from thresholdscope.errors import DomainError

args = st.builds(complex, st.floats(-40, 40), st.floats(-6, 6)).filter(lambda z: abs(z) > 1e-3 and not (z.imag == 0 and z.real < 0))


def mp_values(z):
    z = mpmath.mpc(z.real, z.imag)
    return [complex(mpmath.besselj(0, z)), complex(mpmath.bessely(0, z)), complex(mpmath.besselj(1, z)), complex(mpmath.bessely(1, z))]


@given(args)
def test_against_mpmath(z):
    mine = [v[0] for v in bessel_all(z)[:4]]
    for a, b in zip(mine, mp_values(z)):
        assert abs(a - b) <= 1e-10 * max(abs(b), 1e-3)


@given(args)
def test_hankel_is_j_plus_iy(z):
    J0, Y0, J1, Y1, H0, H1 = (v[0] for v in bessel_all(z))
    assert abs(H0 - special.hankel1(0, z)) <= 1e-10 * max(abs(special.hankel1(0, z)), 1e-3)
    assert abs(H1 - special.hankel1(1, z)) <= 1e-10 * max(abs(special.hankel1(1, z)), 1e-3)


def test_hankel_decays_in_upper_half_plane():
    # computed directly, so no cancellation between J0 and i Y0
    z = 2.0 + 30j
    h = bessel0(z).h1_0
    assert abs(h - special.hankel1(0, z)) <= 1e-12 * abs(special.hankel1(0, z))


def test_j0_of_one_against_series():
    s = sum((-1) ** k / (4**k * mpmath.factorial(k) ** 2) for k in range(40))
    assert abs(bessel0(1.0).j0 - float(s)) < 1e-15
    assert abs(j0_series_only(1.0) - float(s)) < 1e-15


def test_domain_errors():
    assert j0_series_only(0.0) == 1.0
    with pytest.raises(DomainError):
        bessel_all(0.0)
    with pytest.raises(DomainError):
        bessel_all(-3.0)


@given(args)
def test_wronskian_identities(z):
    assert abs(wronskian_deviation(z)) < 1e-9
    assert abs(hankel_wronskian_check(z)) < 1e-9


def test_regimes_on_selftest_points():
    zs = bessel_test_points(50, 0)
    regimes = [bessel0(z).regime for z in zs]
    assert "series" in regimes and "asymptotic" in regimes
    assert max(abs(wronskian_deviation(z)) for z in zs) < 1e-9


def test_continuity_across_regime_boundary():
    for phase in np.linspace(-np.pi / 2, np.pi, 7):
        u = np.exp(1j * phase)
        a = bessel0(SERIES_RADIUS * (1 - 1e-9) * u)
        b = bessel0(SERIES_RADIUS * (1 + 1e-9) * u)
        assert a.regime == "series" and b.regime == "asymptotic"
        for v in (a, b):
            ref = complex(mpmath.besselj(0, mpmath.mpc(v.arg.real, v.arg.imag)))
            assert abs(v.j0 - ref) < 1e-10 * abs(ref)


def test_bessel1_order_one():
    J1, Y1, H1 = bessel1(3.0 + 0.5j)
    assert J1 == pytest.approx(special.jv(1, 3.0 + 0.5j), rel=1e-12)
    assert Y1 == pytest.approx(special.yv(1, 3.0 + 0.5j), rel=1e-12)


def test_vectorized_shapes():
    z = np.array([[1.0, 2.0], [15.0, 30.0 + 1j]])
    out = bessel_all(z)
    assert all(v.shape == z.shape for v in out)
