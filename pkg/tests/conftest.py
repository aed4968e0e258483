import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def transfer_jost(V, zeta, x):
    """theta_+ and theta_- at x for a piecewise-constant potential, by exact
    propagation through each constant piece (cos / sin / k)."""
    zeta = complex(zeta)
    segs = sorted(V.segments, key=lambda s: s.a)
    for s in segs:
        assert len(s.coeffs) == 1 or all(c == 0 for c in s.coeffs[1:])

    def value(pos):
        for s in segs:
            if s.a <= pos <= s.b:
                return complex(s.coeffs[0])
        return 0j

    def step(u, du, x0, x1, c):
        k = np.sqrt(zeta * zeta - c + 0j)
        h = x1 - x0
        if abs(k) < 1e-14:
            return u + du * h, du
        cs, sn = np.cos(k * h), np.sin(k * h)
        return u * cs + du * sn / k, -u * k * sn + du * cs

    edges = sorted({s.a for s in segs} | {s.b for s in segs})
    R = max(abs(edges[0]), abs(edges[-1])) if edges else 0.0

    def propagate(start, target, u, du):
        pts = [start] + [e for e in (sorted(edges, reverse=bool(target < start))) if min(start, target) < e < max(start, target)] + [target]
        for p, q in zip(pts[:-1], pts[1:]):
            u, du = step(u, du, p, q, value(0.5 * (p + q)))
        return u, du

    R = R + 1.0
    tp = propagate(R, x, np.exp(1j * zeta * R), 1j * zeta * np.exp(1j * zeta * R))
    tm = propagate(-R, x, np.exp(1j * zeta * R), -1j * zeta * np.exp(1j * zeta * R))
    return tp, tm


def transfer_wronskian(V, zeta):
    (a, da), (b, db) = transfer_jost(V, zeta, 0.0)
    return a * db - da * b


@pytest.fixture
def oracle_wronskian():
    return transfer_wronskian
