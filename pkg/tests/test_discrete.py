import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import polygamma

from thresholdscope.discrete import (
    engineered_virtual_state,
    jordan_block,
    left_shift,
    min_rank_regularizer,
    planted_nullity_matrix,
    shift_resolvent,
    svd_nullity,
)
from thresholdscope.errors import DomainError


@given(st.floats(1.01, 5.0), st.floats(0, 2 * np.pi))
def test_shift_resolvent_inverts_except_last_row(mod, arg):
    z = mod * np.exp(1j * arg)
    m = shift_resolvent(12, z)
    E = (left_shift(12) - z * np.eye(12)) @ m.resolvent_matrix - np.eye(12)
    assert np.max(np.abs(E[:-1])) < 1e-12
    assert m.identity_defect < 1e-12


def test_shift_resolvent_entries():
    R = shift_resolvent(3, 2.0).resolvent_matrix
    assert np.allclose(R, [[-0.5, -0.25, -0.125], [0, -0.5, -0.25], [0, 0, -0.5]])


@pytest.mark.parametrize("z", [1.0, 0.5j, 0.0])
def test_shift_resolvent_domain(z):
    with pytest.raises(DomainError):
        shift_resolvent(5, z)


def test_virtual_state_matches_trigamma():
    # for z0 = 1 and phi_i = i^-2, Psi_i = -sum_{k >= i} k^-2 = -trigamma(i)
    res = engineered_virtual_state(50)
    i = np.arange(1, 51)
    assert np.allclose(res.Psi, -polygamma(1, i), rtol=1e-12)
    assert res.residual == pytest.approx(polygamma(1, 51), rel=1e-10)


def test_residual_halves_when_n_doubles():
    a = engineered_virtual_state(200).residual
    b = engineered_virtual_state(400).residual
    assert a / b >= 1.8


def test_virtual_state_not_square_summable():
    parts = [engineered_virtual_state(n).l2_partial for n in (100, 1000)]
    assert parts[1] > parts[0]
    # i Psi_i -> -1: harmonic tail
    assert engineered_virtual_state(1000).tail_product.real == pytest.approx(-1.0, abs=2e-3)


def test_virtual_state_on_unit_circle():
    res = engineered_virtual_state(100, z0=1j)
    assert res.residual < 1e-3
    with pytest.raises(DomainError):
        engineered_virtual_state(10, z0=2.0)


def test_finitely_supported_phi_is_eigenvector():
    res = engineered_virtual_state(20, phi=np.array([1.0, 0.5, 0.25]))
    assert res.degenerate
    assert res.residual < 1e-14


def test_jordan_block():
    assert min_rank_regularizer(jordan_block(3)) == 1
    assert svd_nullity(jordan_block(3)) == 1


def test_extremes():
    assert min_rank_regularizer(np.zeros((4, 4))) == 4
    assert min_rank_regularizer(np.eye(5)) == 0


@given(st.integers(0, 100_000), st.integers(1, 12))
def test_matches_svd_nullity(seed, n):
    k = seed % (n + 1)
    M = planted_nullity_matrix(n, k, seed)
    assert svd_nullity(M) == k
    assert min_rank_regularizer(M, seed=seed) == k


def test_size_limit():
    with pytest.raises(ValueError):
        min_rank_regularizer(np.eye(13))
