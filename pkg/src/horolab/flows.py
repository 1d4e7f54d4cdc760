"""Horocycle orbits, twisted orbit integrals and discrepancy on SL(2,Z)\\H.

Functions on the surface are :class:`TestFunction` objects evaluated at
reduced points.  Anything that lives on SL(2,Z)\\SL(2,R) (lifted cusp
forms included) is passed around as a callable ``f(A, B, C, D)`` of matrix
entry arrays; :func:`group_callable` converts the supported objects.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import numpy as np

from . import sl2
from .automorphic import CuspFormSeries
from .sl2 import GroupElement, InvalidInput, reduce_array

REFERENCE_SEED = 1729
REFERENCE_N = 1_000_000


class CapabilityError(ValueError):
    pass


# ---------------------------------------------------------------------------
# test functions


class TestFunction:
    """Weight-zero function on the surface, evaluated on reduced coordinates."""

    __test__ = False  # not a pytest class

    def __init__(self, name: str, func, sup: float | None = None):
        self.name = name
        self.func = func
        self.sup = sup

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return self.func(reduce_array(z))

    def on_group(self, A, B, C, D):
        A, B, C, D = (np.asarray(v, dtype=float) for v in (A, B, C, D))
        return self((A * 1j + B) / (C * 1j + D))

    def centered(self, mean: float) -> "TestFunction":
        return TestFunction(f"{self.name}-centered", lambda z: self.func(z) - mean)

    def scaled(self, factor: float) -> "TestFunction":
        return TestFunction(self.name, lambda z: factor * self.func(z))

    def __repr__(self):
        return f"TestFunction({self.name!r})"


def _step(u, width):
    return 0.5 * (1.0 + np.tanh(u / width))


def smooth_box(name: str, x_band: str, y_lo: float | None, y_hi: float, width: float = 0.05) -> TestFunction:
    """Smoothed indicator of {x in band, y_lo < y < y_hi} on reduced coordinates.

    ``x_band`` is "centre" (|x| < 1/4) or "edge" (|x| > 1/4); both are even
    in x and the edge band wraps across x = +-1/2, so the boxes respect the
    side and arc identifications.  ``y_lo=None`` means the bottom arc.
    """

    def func(z):
        x, y = z.real, z.imag
        cx = _step(0.25 - np.abs(x), width)
        fx = cx if x_band == "centre" else 1.0 - cx
        fy = _step(y_hi - y, width)
        if y_lo is not None:
            fy = fy * _step(y - y_lo, width)
        return fx * fy

    return TestFunction(name, func, sup=1.0)


def cusp_proxy(scale: float = 1.0) -> TestFunction:
    """y^6 |Delta(z)| / scale, a Gamma-invariant function decaying in the cusp."""
    delta = CuspFormSeries.delta()

    def func(z):
        return z.imag**6 * np.abs(delta(z)) / scale

    return TestFunction("y6|Delta|", func)


def hyperbolic_distance(z, w):
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return np.arccosh(1.0 + np.abs(z - w) ** 2 / (2.0 * z.imag * w.imag))


def bump(center: complex = 2j, radius: float = 0.2, name: str | None = None) -> TestFunction:
    """C-infinity bump exp(1 - 1/(1 - r^2)) in hyperbolic distance from ``center``.

    ``radius`` must keep the support inside the fundamental domain.
    """

    def func(z):
        r = hyperbolic_distance(z, center) / radius
        out = np.zeros(r.shape)
        inside = r < 1
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - r[inside] ** 2))
        return out

    return TestFunction(name or f"bump(r={radius:g})", func, sup=1.0)


def default_functions() -> list[TestFunction]:
    y_edges = [None, 1.2, 1.6, 2.4, 4.0]
    out = []
    for band in ("centre", "edge"):
        for lo, hi in zip(y_edges[:-1], y_edges[1:]):
            lo_s = "arc" if lo is None else f"{lo:g}"
            out.append(smooth_box(f"box[{band},{lo_s}-{hi:g}]", band, lo, hi))
    out.append(cusp_proxy())
    return out


@dataclass(frozen=True)
class TestSuite:
    __test__ = False

    functions: tuple
    reference_means: np.ndarray
    reference_errors: np.ndarray
    seed: int
    n: int

    @property
    def names(self) -> list[str]:
        return [f.name for f in self.functions]

    def evaluate(self, z) -> np.ndarray:
        """Matrix (functions x points) of values at points assumed reduced."""
        z = np.asarray(z, dtype=complex).ravel()
        return np.vstack([f.func(z) for f in self.functions])


def build_suite(functions, seed: int = REFERENCE_SEED, n: int = REFERENCE_N, workers: int = 1) -> TestSuite:
    sample = sl2.sample_invariant_measure(n, seed, workers).z
    means, errs = [], []
    for f in functions:
        v = f.func(sample)
        means.append(v.mean())
        errs.append(v.std(ddof=1) / math.sqrt(v.size))
    return TestSuite(tuple(functions), np.array(means), np.array(errs), int(seed), int(n))


@lru_cache(maxsize=4)
def default_suite(seed: int = REFERENCE_SEED, n: int = REFERENCE_N) -> TestSuite:
    """The eight boxes plus y^6|Delta| rescaled to reference mean one."""
    base = build_suite(default_functions(), seed, n)
    funcs = list(base.functions)
    m = base.reference_means[-1]
    funcs[-1] = cusp_proxy(scale=m)
    means = base.reference_means.copy()
    errs = base.reference_errors.copy()
    means[-1] /= m
    errs[-1] /= m
    return TestSuite(tuple(funcs), means, errs, base.seed, base.n)


# ---------------------------------------------------------------------------
# orbits


GENERIC_BASEPOINT = sl2.k(1.0)  # horocycle based at the irrational cusp cot(1)


@dataclass(frozen=True)
class OrbitSpec:
    kind: str
    basepoint: GroupElement = sl2.IDENTITY
    T: float | None = None
    nodes: int | None = None
    gamma: float | None = None
    N: int | None = None
    q: int | None = None
    y: float | None = None

    def __post_init__(self):
        if self.kind == "continuous":
            if self.T is None or not self.T > 0:
                raise InvalidInput("continuous orbit needs T > 0")
            if self.nodes is None or self.nodes < 2:
                raise InvalidInput("continuous orbit needs nodes >= 2")
        elif self.kind == "sparse":
            if self.gamma is None or self.gamma < 0:
                raise InvalidInput("sparse orbit needs gamma >= 0")
            if self.N is None or self.N < 1:
                raise InvalidInput("sparse orbit needs N >= 1")
        elif self.kind == "rational":
            if self.q is None or self.q < 1:
                raise InvalidInput("rational orbit needs q >= 1")
            if self.y is None or not self.y > 0:
                raise InvalidInput("rational orbit needs y > 0")
        else:
            raise InvalidInput(f"unknown orbit kind {self.kind!r}")

    @classmethod
    def continuous(cls, T, nodes=None, basepoint=sl2.IDENTITY):
        if nodes is None:
            nodes = max(64, int(math.ceil(8 * T)))
        return cls("continuous", basepoint, T=T, nodes=nodes)

    @classmethod
    def sparse(cls, gamma, N, basepoint=sl2.IDENTITY):
        return cls("sparse", basepoint, gamma=gamma, N=N)

    @classmethod
    def rational(cls, q, y):
        return cls("rational", sl2.IDENTITY, q=q, y=y)


def _orbit(x0: GroupElement, t):
    # x0 n(t) . i = x0 . (t + i)
    return reduce_array(x0.act(np.asarray(t, dtype=float) + 1j))


def horocycle_points(spec: OrbitSpec) -> np.ndarray:
    if spec.kind != "continuous":
        raise InvalidInput("horocycle_points needs a continuous spec")
    return _orbit(spec.basepoint, np.linspace(0.0, spec.T, spec.nodes))


def sparse_horocycle_points(spec: OrbitSpec) -> np.ndarray:
    if spec.kind != "sparse":
        raise InvalidInput("sparse_horocycle_points needs a sparse spec")
    j = np.arange(1, spec.N + 1, dtype=float)
    return _orbit(spec.basepoint, j ** (1.0 + spec.gamma))


def rational_horocycle_points(q: int, y: float) -> np.ndarray:
    OrbitSpec.rational(q, y)
    return reduce_array(np.arange(q) / q + 1j * y)


def orbit_points(spec: OrbitSpec) -> np.ndarray:
    if spec.kind == "continuous":
        return horocycle_points(spec)
    if spec.kind == "sparse":
        return sparse_horocycle_points(spec)
    return rational_horocycle_points(spec.q, spec.y)


# ---------------------------------------------------------------------------
# twisted integrals


def group_callable(f):
    if isinstance(f, CuspFormSeries):
        return f.lifted
    if isinstance(f, TestFunction):
        return f.on_group
    if callable(f):
        return f
    raise InvalidInput(f"cannot evaluate {f!r} on the group")


def weyl_integral(f, x0: GroupElement, T: float, xi: float, nodes: int) -> complex:
    """Trapezoid value of (1/T) int_0^T e(xi t) f(x0 n(t)) dt."""
    if nodes < 8:
        raise InvalidInput("weyl_integral needs nodes >= 8")
    if not T > 0:
        raise InvalidInput("T must be positive")
    fg = group_callable(f)
    t = np.linspace(0.0, T, nodes)
    A = np.full_like(t, float(x0.a))
    C = np.full_like(t, float(x0.c))
    B = float(x0.a) * t + float(x0.b)
    D = float(x0.c) * t + float(x0.d)
    vals = np.asarray(fg(A, B, C, D)) * np.exp(2j * math.pi * xi * t)
    w = np.full(nodes, T / (nodes - 1))
    w[0] *= 0.5
    w[-1] *= 0.5
    return complex(np.dot(w, vals) / T)


# ---------------------------------------------------------------------------
# discrepancy


@dataclass(frozen=True)
class DiscrepancyReport:
    names: tuple
    deviations: np.ndarray
    reference_errors: np.ndarray
    sample_errors: np.ndarray
    orbit_size: int
    seed: int
    meta: dict = field(default_factory=dict)

    @property
    def max_deviation(self) -> float:
        return float(np.max(self.deviations))

    def combined_errors(self) -> np.ndarray:
        return np.hypot(self.reference_errors, self.sample_errors)

    def above_floor(self, factor: float = 5.0) -> np.ndarray:
        return self.deviations > factor * self.reference_errors

    def rows(self):
        for i, name in enumerate(self.names):
            yield name, float(self.deviations[i]), float(self.reference_errors[i])


def discrepancy(points, suite: TestSuite, meta: dict | None = None) -> DiscrepancyReport:
    points = np.asarray(points, dtype=complex).ravel()
    if points.size == 0 or not suite.functions:
        raise InvalidInput("discrepancy needs points and test functions")
    vals = suite.evaluate(reduce_array(points))
    means = vals.mean(axis=1)
    if points.size > 1:
        sample_err = vals.std(axis=1, ddof=1) / math.sqrt(points.size)
    else:
        sample_err = np.zeros(len(suite.functions))
    return DiscrepancyReport(
        tuple(suite.names),
        np.abs(means - suite.reference_means),
        suite.reference_errors.copy(),
        sample_err,
        int(points.size),
        suite.seed,
        dict(meta or {}),
    )


# ---------------------------------------------------------------------------
# matrix coefficients


@dataclass(frozen=True)
class MatrixCoefficient:
    estimate: complex
    stderr: float
    n: int
    seed: int


def _haar_matrices(z, theta):
    x, y = z.real, z.imag
    ry = np.sqrt(y)
    c, s = np.cos(theta), np.sin(theta)
    return ry * c + x * s / ry, -ry * s + x * c / ry, s / ry, c / ry


def matrix_coefficient(f, g, t: float, n: int, seed: int, normalize: bool = False, workers: int = 1) -> MatrixCoefficient:
    """Monte Carlo estimate of <a(e^t) f, g> with both functions centred."""
    if n < 10_000:
        raise InvalidInput("matrix_coefficient needs n >= 10^4")
    fg, gg = group_callable(f), group_callable(g)
    z, theta = sl2.sample_group_measure(n, seed, workers)
    A, B, C, D = _haar_matrices(z, theta)
    e = math.exp(t / 2)
    f_here = np.asarray(fg(A, B, C, D))
    g_here = np.asarray(gg(A, B, C, D))
    f_moved = np.asarray(fg(A * e, B / e, C * e, D / e))
    f_mean, g_mean = f_here.mean(), g_here.mean()
    prod = (f_moved - f_mean) * np.conj(g_here - g_mean)
    est = prod.mean()
    err = prod.std(ddof=1) / math.sqrt(n)
    if normalize:
        norm = math.sqrt(np.mean(np.abs(f_here - f_mean) ** 2) * np.mean(np.abs(g_here - g_mean) ** 2))
        est, err = est / norm, err / norm
    if np.isrealobj(f_here) and np.isrealobj(g_here):
        est = float(np.real(est))
    return MatrixCoefficient(est, float(err), int(n), int(seed))


# ---------------------------------------------------------------------------
# gamma_max


def gamma_max(alpha):
    """(1 - 2 alpha)^2 / (16 (3 - 2 alpha)); exact when alpha is rational."""
    if isinstance(alpha, Rational):
        alpha = Fraction(alpha)
    if not 0 <= alpha <= Fraction(1, 2):
        raise InvalidInput("alpha must lie in [0, 1/2]")
    return (1 - 2 * alpha) ** 2 / (16 * (3 - 2 * alpha))


# ---------------------------------------------------------------------------
# Sobolev norms

_BASIS = {
    "H": lambda s: (np.exp(s), 0.0, 0.0, np.exp(-s)),
    "E": lambda s: (1.0, s, 0.0, 1.0),
    "F": lambda s: (1.0, 0.0, s, 1.0),
}
MAX_SOBOLEV_ORDER = 3


@dataclass(frozen=True)
class SobolevEstimate:
    p: float
    d: int
    value: float
    terms: dict = field(default_factory=dict)


def _right_mult(A, B, C, D, m):
    a_, b_, c_, d_ = m
    return A * a_ + B * c_, A * b_ + B * d_, C * a_ + D * c_, C * b_ + D * d_


def derivative(fg, word: str, A, B, C, D, h: float | None = None):
    """Right derivative along the monomial ``word`` by central differences."""
    if not word:
        return np.asarray(fg(A, B, C, D))
    m = len(word)
    if h is None:
        h = {1: 1e-4, 2: 1e-3, 3: 5e-3}[m]
    total = 0.0
    for signs in itertools.product((1.0, -1.0), repeat=m):
        g = (A, B, C, D)
        for letter, sgn in zip(word, signs):
            g = _right_mult(*g, _BASIS[letter](sgn * h))
        total = total + np.prod(signs) * np.asarray(fg(*g))
    return total / (2 * h) ** m


def sobolev_estimate(f, p: float, d: int, n: int = 20_000, seed: int = REFERENCE_SEED) -> SobolevEstimate:
    """Sum over monomials of order <= d of the L^p norms of right derivatives.

    L^p norms are Monte Carlo averages over Haar measure; p = inf uses the
    sampled maximum.
    """
    if d > MAX_SOBOLEV_ORDER:
        raise CapabilityError(f"derivatives above order {MAX_SOBOLEV_ORDER} are not supported")
    if not (p >= 1):
        raise InvalidInput("p must be >= 1")
    fg = group_callable(f)
    z, theta = sl2.sample_group_measure(n, seed)
    g = _haar_matrices(z, theta)
    terms = {}
    for order in range(d + 1):
        for word in itertools.product("HEF", repeat=order):
            w = "".join(word)
            vals = np.abs(derivative(fg, w, *g))
            if math.isinf(p):
                terms[w] = float(vals.max())
            else:
                terms[w] = float(np.mean(vals**p) ** (1.0 / p))
    return SobolevEstimate(p, d, sum(terms.values()), terms)
