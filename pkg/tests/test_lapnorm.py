import numpy as np
import pytest
from hypothesis import given, strategies as st

from thresholdscope.errors import GridTooCoarse
from thresholdscope.jost import SpectralPoint
from thresholdscope.lapnorm import (
    WeightPair,
    classify,
    convergence_check,
    default_path,
    grid_for,
    lap_sweep,
    make_kernel,
    thread_cap,
    weighted_norm,
    weighted_norm_on,
)
from thresholdscope.numerics import Grid
from thresholdscope.potentials import Potential, japanese
from thresholdscope.resolvent import KernelHandle


def rank_one(a, b):
    sp = SpectralPoint.from_z(-1.0)
    return KernelHandle("rank1", sp, None, None, 1.0, point_eval=lambda x, y: a(x) * b(y))


def test_weight_pair_validation():
    with pytest.raises(ValueError):
        WeightPair(-1, 1)
    with pytest.raises(ValueError):
        WeightPair(1, 1, "nonsense")


@pytest.mark.parametrize("tag", ["L2s_to_L2ms", "L1_to_L2ms", "L2s_to_Linf", "L1_to_Linf"])
def test_rank_one_norms(tag):
    a = lambda x: np.exp(-np.asarray(x) ** 2)
    b = lambda y: 1 / (1 + np.asarray(y) ** 2)
    w = WeightPair(0.5, 1.0, tag)
    g = Grid.uniform(-20, 20, 801)
    x, d = g.nodes, g.weights
    A = np.abs(a(x)) * japanese(x) ** -1.0
    B = np.abs(b(x)) * japanese(x) ** -0.5
    ref = {
        "L2s_to_L2ms": np.sqrt(np.sum(d * A**2) * np.sum(d * B**2)),
        "L1_to_L2ms": np.sqrt(np.sum(d * A**2)) * B.max(),
        "L2s_to_Linf": A.max() * np.sqrt(np.sum(d * B**2)),
        "L1_to_Linf": A.max() * B.max(),
    }[tag]
    assert weighted_norm_on(rank_one(a, b), w, g) == pytest.approx(ref, rel=1e-8)


def test_norm_resolution_check():
    sp = SpectralPoint.from_zeta(6.0 + 0.01j)
    with pytest.raises(GridTooCoarse):
        weighted_norm(make_kernel("free1d", sp), WeightPair(1.1, 1.1), L=40, n=20)


def test_refined_value_and_resolution():
    v = weighted_norm(make_kernel("free1d", SpectralPoint.from_z(-0.5)), WeightPair(1.1, 1.1), L=20, n=200)
    assert v.resolution == 200
    assert abs(v.norm - v.coarse) < 0.1 * v.norm


def test_free_kernel_norm_grows_like_inverse_sqrt():
    sw = lap_sweep("free1d", WeightPair(1.1, 1.1), default_path(0, (2, 3, 4)), L=30, n=300)
    assert sw.classification.startswith("diverging")
    assert sw.fit_exponent == pytest.approx(-0.5, abs=0.05)


def test_classify_synthetic():
    d = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5]
    assert classify(d, [1.0, 1.01, 1.02, 1.02, 1.02])[0] == "uniformly_bounded"
    kind, slope, _, _ = classify(d, [np.sqrt(1 / t) for t in d])
    assert kind == "diverging(fit_exponent)" and slope == pytest.approx(-0.5)
    kind, _, _, c = classify(d, [20 + 2 * np.log(1 / t) for t in d])
    assert kind == "diverging(log)" and c == pytest.approx(2.0)


def test_sweep_deterministic_across_threads():
    path = default_path(0, (1, 2, 3))
    a = lap_sweep("barrier1d", WeightPair(1.1, 1.1), path, L=20, n=200, threads=1)
    b = lap_sweep("barrier1d", WeightPair(1.1, 1.1), path, L=20, n=200, threads=3)
    assert a.norms == b.norms
    assert a.to_csv() == b.to_csv()
    assert a.to_csv().splitlines()[0] == "re_z,im_z,norm,resolution,refined_norm"


def test_thread_cap_env(monkeypatch):
    monkeypatch.setenv("THRESHOLDSCOPE_THREADS", "2")
    assert thread_cap() == 2
    monkeypatch.setenv("THRESHOLDSCOPE_THREADS", "junk")
    assert thread_cap() == 1


def test_default_path_inside_spectrum():
    p = default_path(2.0, (1, 2))
    assert p == [2.0 + 0.1j, 2.0 + 0.01j]


def test_make_kernel_families():
    sp = SpectralPoint.from_z(-0.01)
    assert make_kernel("free1d", sp).family == "free1d"
    assert make_kernel(("barrier1d", 2.0), sp).params["g"] == 2.0
    assert make_kernel(("generic1d", Potential.indicator(-1, 1, 1.0)), sp).family == "generic1d"
    assert make_kernel("radial3d", sp).radial_power == 2
    assert make_kernel("sector2d", sp).radial_power == 1
    with pytest.raises(ValueError):
        make_kernel("unknown", sp)


def test_grid_for_radial_measure():
    K = make_kernel("radial3d", SpectralPoint.from_z(-1.0))
    g = grid_for(K, 2.0, 100)
    assert np.sum(g.weights) == pytest.approx(8 / 3, rel=1e-3)


def test_convergence_toward_barrier_limit():
    path = default_path(0, (1, 2, 3, 4))
    rep = convergence_check("barrier1d", WeightPair(1.1, 1.1), path, L=20, n=200)
    assert rep.decreasing
    assert rep.differences[-1] == 0.0


@given(st.floats(0.2, 3.0))
def test_positive_kernel_domination_3d(kappa):
    # at z = -kappa^2 the radial kernel is dominated pointwise by its zeta = 0 limit
    r = np.geomspace(1e-2, 10, 25)
    K = make_kernel("radial3d", SpectralPoint.from_z(-(kappa**2))).matrix(r)
    K0 = 1 / np.maximum(r[:, None], r[None, :])
    assert np.all(np.abs(K) <= K0 * (1 + 1e-12))
