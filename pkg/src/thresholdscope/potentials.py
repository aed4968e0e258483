"""Compactly supported, piecewise-polynomial complex potentials on the line."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import PotentialFormatError
from .numerics import Tolerance, integrate


def japanese(x):
    """<x> = sqrt(1 + x^2)."""
    return np.sqrt(1.0 + np.square(x))


def _weight_antiderivative(x):
    # d/dx [(x <x> + asinh x) / 2] = <x>
    return 0.5 * (x * japanese(x) + np.arcsinh(x))


@dataclass(frozen=True)
class Segment:
    a: float
    b: float
    coeffs: tuple[complex, ...]  # ascending powers of (x - center)
    center: float = 0.0

    def __call__(self, x):
        t = np.asarray(x, dtype=float) - self.center
        out = np.zeros(t.shape, dtype=complex)
        for c in reversed(self.coeffs):
            out = out * t + c
        return out

    def recentered(self, center: float) -> tuple[complex, ...]:
        """Coefficients in powers of (x - center)."""
        if center == self.center:
            return self.coeffs
        P = np.polynomial.Polynomial
        re = P([c.real for c in self.coeffs])(P([center - self.center, 1.0])).coef
        im = P([c.imag for c in self.coeffs])(P([center - self.center, 1.0])).coef
        n = max(re.size, im.size)
        return tuple(complex(c) for c in np.pad(re, (0, n - re.size)) + 1j * np.pad(im, (0, n - im.size)))

    @property
    def is_constant(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def weighted_abs_integral(self, lo: float, hi: float, tol: Tolerance) -> float:
        """int_lo^hi <y> |V(y)| dy restricted to this segment."""
        lo, hi = max(lo, self.a), min(hi, self.b)
        if hi <= lo:
            return 0.0
        if self.is_constant:
            return abs(self.coeffs[0]) * float(_weight_antiderivative(hi) - _weight_antiderivative(lo))
        return integrate(lambda y: japanese(y) * np.abs(self(y)), lo, hi, tol).real


@dataclass(frozen=True)
class Potential:
    """V(x) = sum of polynomial pieces on disjoint intervals inside [-R, R]."""

    segments: tuple[Segment, ...]
    support_radius: float

    def __post_init__(self):
        segs = tuple(sorted(self.segments, key=lambda s: s.a))
        for s in segs:
            if not s.a < s.b:
                raise PotentialFormatError(f"empty interval [{s.a}, {s.b}]")
            if s.a < -self.support_radius - 1e-12 or s.b > self.support_radius + 1e-12:
                raise PotentialFormatError(
                    f"interval [{s.a}, {s.b}] outside support radius {self.support_radius}"
                )
        for s, t in zip(segs[:-1], segs[1:]):
            if t.a < s.b:
                raise PotentialFormatError(f"overlapping intervals [{s.a},{s.b}] and [{t.a},{t.b}]")
        object.__setattr__(self, "segments", segs)

    # -- construction ------------------------------------------------------

    @classmethod
    def zero(cls, support_radius: float = 1.0) -> "Potential":
        return cls((), support_radius)

    @classmethod
    def indicator(cls, a: float, b: float, height: complex = 1.0, support_radius: float | None = None) -> "Potential":
        R = support_radius if support_radius is not None else max(abs(a), abs(b))
        return cls((Segment(a, b, (complex(height),)),), R)

    @classmethod
    def piecewise_constant(cls, edges: Sequence[float], values: Sequence[complex]) -> "Potential":
        segs = tuple(
            Segment(float(a), float(b), (complex(v),))
            for a, b, v in zip(edges[:-1], edges[1:], values)
            if v != 0
        )
        R = max(abs(edges[0]), abs(edges[-1]))
        return cls(segs, R)

    @classmethod
    def random_piecewise_constant(cls, seed: int, max_moment: float = 5.0, pieces: int = 4, radius: float = 2.0) -> "Potential":
        """Seeded complex piecewise-constant potential with first moment <= max_moment."""
        rng = np.random.default_rng(seed)
        edges = np.sort(rng.uniform(-radius, radius, pieces + 1))
        edges[0], edges[-1] = -radius, radius
        vals = rng.normal(size=pieces) + 1j * rng.normal(size=pieces)
        V = cls.piecewise_constant(edges, vals)
        M = first_moment(V)
        target = rng.uniform(0.2, 1.0) * max_moment
        scale = target / M if M > 0 else 0.0
        return V.scaled(scale)

    def scaled(self, c: complex) -> "Potential":
        return Potential(
            tuple(Segment(s.a, s.b, tuple(c * k for k in s.coeffs), s.center) for s in self.segments),
            self.support_radius,
        )

    def __add__(self, other: "Potential") -> "Potential":
        """Sum of two potentials; segments are re-cut at the union of breakpoints."""
        R = max(self.support_radius, other.support_radius)
        cuts = sorted({e for s in (*self.segments, *other.segments) for e in (s.a, s.b)})
        segs = []
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            mid = 0.5 * (lo + hi)
            coeffs = np.zeros(1, dtype=complex)
            for s in (*self.segments, *other.segments):
                if s.a <= mid <= s.b:
                    c = np.array(s.recentered(0.0), dtype=complex)
                    n = max(c.size, coeffs.size)
                    coeffs = np.pad(coeffs, (0, n - coeffs.size)) + np.pad(c, (0, n - c.size))
            if np.any(coeffs != 0):
                segs.append(Segment(lo, hi, tuple(complex(c) for c in coeffs)))
        return Potential(tuple(segs), R)

    def __sub__(self, other: "Potential") -> "Potential":
        return self + other.scaled(-1.0)

    # -- evaluation --------------------------------------------------------

    @property
    def breakpoints(self) -> list[float]:
        return sorted({e for s in self.segments for e in (s.a, s.b)})

    @property
    def is_zero(self) -> bool:
        return all(all(c == 0 for c in s.coeffs) for s in self.segments)

    def __call__(self, x):
        """V(x); at a breakpoint the mean of the one-sided limits."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for s in self.segments:
            inside = (x > s.a) & (x < s.b)
            if inside.any():
                out[inside] += s(x[inside])
            for edge in (s.a, s.b):
                at = x == edge
                if at.any():
                    out[at] += 0.5 * s(x[at])
        return out

    def segment_at(self, x: float) -> Segment | None:
        for s in self.segments:
            if s.a <= x <= s.b:
                return s
        return None

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "segments": [
                {"a": s.a, "b": s.b, "coeffs": [[c.real, c.imag] for c in s.coeffs]}
                | ({"center": s.center} if s.center else {})
                for s in self.segments
            ],
            "support_radius": self.support_radius,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Potential":
        try:
            segs = []
            for item in data["segments"]:
                coeffs = []
                for c in item["coeffs"]:
                    if isinstance(c, (list, tuple)):
                        re, im = c
                        coeffs.append(complex(float(re), float(im)))
                    else:
                        coeffs.append(complex(float(c)))
                if not coeffs:
                    raise PotentialFormatError("segment without coefficients")
                segs.append(Segment(float(item["a"]), float(item["b"]), tuple(coeffs), float(item.get("center", 0.0))))
            R = float(data["support_radius"])
        except (KeyError, TypeError, ValueError) as exc:
            raise PotentialFormatError(f"malformed potential document: {exc}") from exc
        return cls(tuple(segs), R)

    @classmethod
    def load(cls, path: str | Path) -> "Potential":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise PotentialFormatError(f"{path}: {exc}") from exc
        return cls.from_dict(data)

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))


def fit_potential(func, edges: Iterable[float], degree: int = 12) -> Potential:
    """Piecewise Chebyshev interpolant of a smooth complex function.

    Each piece is stored in powers of (x - midpoint) to keep Horner
    evaluation well conditioned.
    """
    edges = list(edges)
    segs = []
    k = np.arange(degree + 1)
    t = np.cos(np.pi * (k + 0.5) / (degree + 1))
    for a, b in zip(edges[:-1], edges[1:]):
        c, hw = 0.5 * (a + b), 0.5 * (b - a)
        y = np.asarray(func(c + hw * t), dtype=complex)
        cheb_re = np.polynomial.chebyshev.chebfit(t, y.real, degree)
        cheb_im = np.polynomial.chebyshev.chebfit(t, y.imag, degree)
        mono = np.polynomial.chebyshev.cheb2poly(cheb_re) + 1j * np.polynomial.chebyshev.cheb2poly(cheb_im)
        mono = mono / hw ** np.arange(mono.size)
        segs.append(Segment(a, b, tuple(complex(m) for m in mono), c))
    R = max(abs(edges[0]), abs(edges[-1]))
    return Potential(tuple(segs), R)


class MomentData:
    """Total and tail first moments of |V| with weight <x>."""

    def __init__(self, V: Potential, tol: Tolerance = Tolerance()):
        self.potential = V
        self.tol = tol
        self._totals = [s.weighted_abs_integral(s.a, s.b, tol) for s in V.segments]
        self.M = float(sum(self._totals))

    def _mminus_scalar(self, x: float) -> float:
        acc = 0.0
        for s, tot in zip(self.potential.segments, self._totals):
            if s.b <= x:
                acc += tot
            elif s.a < x:
                acc += s.weighted_abs_integral(s.a, x, self.tol)
        return acc

    def Mminus(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            return self._mminus_scalar(float(x))
        return np.array([self._mminus_scalar(xi) for xi in x.ravel()]).reshape(x.shape)

    def Mplus(self, x):
        return np.maximum(self.M - self.Mminus(x), 0.0)


def first_moment(V: Potential, tol: Tolerance = Tolerance()) -> float:
    """M = int <x> |V(x)| dx."""
    return sum(s.weighted_abs_integral(s.a, s.b, tol) for s in V.segments)


def tail_moments(V: Potential, x, tol: Tolerance = Tolerance()):
    """(Mplus(x), Mminus(x)) = (int_x^inf, int_-inf^x) of <y>|V(y)| dy."""
    md = MomentData(V, tol)
    return md.Mplus(x), md.Mminus(x)


def reflect(V: Potential) -> Potential:
    """x -> V(-x)."""
    segs = []
    for s in V.segments:
        coeffs = tuple(c * (-1) ** k for k, c in enumerate(s.coeffs))
        segs.append(Segment(-s.b, -s.a, coeffs, -s.center))
    return Potential(tuple(segs), V.support_radius)
