"""SL(2) arithmetic on the upper half-plane.

Matrices act by fractional linear transformations.  Reduction to the
standard fundamental domain of SL(2, Z) uses the convention

    -1/2 <= Re z < 1/2,   |z| >= 1,   and Re z >= 0 on the arc |z| = 1,

except at the corner rho = exp(2 pi i / 3), which keeps Re z = -1/2.

Vectorised helpers work on complex numpy arrays; the scalar API works on
:class:`Point` and :class:`GroupElement` values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from numbers import Integral, Real

import numpy as np

from . import _rng

ROOT3_2 = math.sqrt(3.0) / 2.0
VOLUME = math.pi / 3.0  # hyperbolic area of the fundamental domain
ARC_TOL = 1e-13
MAX_REDUCTION_STEPS = 10_000
Y_MAX = 1e10  # truncated mass above this height is 3 / (pi * Y_MAX) < 1e-9


class InvalidInput(ValueError):
    pass


class ReductionFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class GroupElement:
    """2x2 matrix with positive determinant.

    Entries may be Python ints (exact lattice elements) or floats.
    """

    a: Real
    b: Real
    c: Real
    d: Real

    def __post_init__(self):
        for v in (self.a, self.b, self.c, self.d):
            if not (isinstance(v, Integral) or math.isfinite(v)):
                raise InvalidInput(f"non-finite matrix entry {v!r}")
        if not self.det > 0:
            raise InvalidInput(f"determinant must be positive, got {self.det}")

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    @property
    def is_integral(self) -> bool:
        return all(isinstance(v, Integral) for v in (self.a, self.b, self.c, self.d))

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "GroupElement":
        if self.is_integral and self.det == 1:
            return GroupElement(self.d, -self.b, -self.c, self.a)
        det = self.det
        return GroupElement(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def act(self, z):
        """Fractional linear action on a complex scalar or array."""
        return (self.a * z + self.b) / (self.c * z + self.d)

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def allclose(self, other: "GroupElement", tol: float = 1e-12) -> bool:
        return bool(np.allclose(self.as_array(), other.as_array(), atol=tol, rtol=0))


IDENTITY = GroupElement(1, 0, 0, 1)
W = GroupElement(0, 1, -1, 0)  # z -> -1/z


def n(x) -> GroupElement:
    return GroupElement(1, x, 0, 1)


def a(y) -> GroupElement:
    if not y > 0:
        raise InvalidInput("a(y) needs y > 0")
    r = math.sqrt(y)
    return GroupElement(r, 0.0, 0.0, 1.0 / r)


def k(theta: float) -> GroupElement:
    c, s = math.cos(theta), math.sin(theta)
    return GroupElement(c, -s, s, c)


@dataclass(frozen=True)
class Point:
    x: float
    y: float
    reduced: bool = field(default=False, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidInput("point coordinates must be finite")
        if not self.y > 0:
            raise InvalidInput(f"point must lie in the upper half-plane, got y={self.y}")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def of(cls, z: complex, reduced: bool = False) -> "Point":
        return cls(float(z.real), float(z.imag), reduced)


def mobius_act(g: GroupElement, z: Point) -> Point:
    w = g.act(z.z)
    # imaginary part computed from the closed form keeps precision near the real axis
    den = abs(g.c * z.z + g.d) ** 2
    return Point(float(w.real), float(g.det * z.y / den))


def in_fundamental_domain(z, tol: float = ARC_TOL):
    """Boolean (array) test of the boundary convention."""
    z = np.asarray(z)
    x, y = z.real, z.imag
    r2 = x * x + y * y
    ok = (x >= -0.5) & (x < 0.5) & (r2 >= 1 - tol)
    on_arc = np.abs(r2 - 1) <= tol
    ok &= ~(on_arc & (x < 0) & (x > -0.5 + 1e-12))
    return ok


def reduce_array(z, with_witness: bool = False):
    """Reduce an array of points; optionally return the witnesses.

    The witness arrays ``(A, B, C, D)`` hold integers stored as floats with
    ``[[A, B], [C, D]] . z`` equal to the reduced point.
    """
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    x = z.real.ravel().copy()
    y = z.imag.ravel().copy()
    if np.any(~np.isfinite(x)) or np.any(~np.isfinite(y)):
        raise InvalidInput("non-finite point")
    if np.any(y <= 0):
        raise InvalidInput("points must lie in the upper half-plane")
    if with_witness:
        A = np.ones_like(x)
        B = np.zeros_like(x)
        C = np.zeros_like(x)
        D = np.ones_like(x)
    idx = np.arange(x.size)
    for _ in range(MAX_REDUCTION_STEPS):
        xs = x[idx]
        shift = np.floor(xs + 0.5)
        xs = xs - shift
        x[idx] = xs
        if with_witness:
            A[idx] -= shift * C[idx]
            B[idx] -= shift * D[idx]
        ys = y[idx]
        r2 = xs * xs + ys * ys
        inv = r2 < 1 - ARC_TOL
        idx = idx[inv]
        if idx.size == 0:
            break
        r2 = r2[inv]
        x[idx] = -xs[inv] / r2
        y[idx] = ys[inv] / r2
        if with_witness:
            A[idx], B[idx], C[idx], D[idx] = C[idx], D[idx], -A[idx], -B[idx]
    else:
        raise ReductionFailure(f"reduction did not terminate in {MAX_REDUCTION_STEPS} steps")

    r2 = x * x + y * y
    flip = (np.abs(r2 - 1) <= ARC_TOL) & (x < 0) & (x > -0.5 + 1e-12)
    if flip.any():
        x[flip] = -x[flip] / r2[flip]
        y[flip] = y[flip] / r2[flip]
        if with_witness:
            A[flip], B[flip], C[flip], D[flip] = C[flip], D[flip], -A[flip], -B[flip]
        over = flip & (x >= 0.5)
        x[over] -= 1.0
        if with_witness:
            A[over] -= C[over]
            B[over] -= D[over]
    out = (x + 1j * y).reshape(shape)
    if with_witness:
        return out, tuple(v.reshape(shape) for v in (A, B, C, D))
    return out


def reduce_to_fundamental_domain(z: Point) -> tuple[Point, GroupElement]:
    """Return ``(z*, gamma)`` with ``gamma . z = z*`` and ``z*`` reduced."""
    zr, (A, B, C, D) = reduce_array(np.array([z.z]), with_witness=True)
    gamma = GroupElement(int(A[0]), int(B[0]), int(C[0]), int(D[0]))
    return Point(float(zr[0].real), float(zr[0].imag), reduced=True), gamma


def height(z: Point) -> float:
    return reduce_to_fundamental_domain(z)[0].y


def iwasawa_decompose(g: GroupElement) -> tuple[float, float, float]:
    """Write ``g = sqrt(det g) * n(x) a(y) k(theta)``; returns ``(x, y, theta)``."""
    a_, b_, c_, d_ = (float(v) for v in (g.a, g.b, g.c, g.d))
    den = c_ * c_ + d_ * d_
    x = (a_ * c_ + b_ * d_) / den
    y = float(g.det) / den
    theta = math.atan2(c_, d_)
    return x, y, theta


def iwasawa_compose(x: float, y: float, theta: float, scale: float = 1.0) -> GroupElement:
    g = n(x) @ a(y) @ k(theta)
    return GroupElement(scale * g.a, scale * g.b, scale * g.c, scale * g.d)


@dataclass(frozen=True)
class MeasureSample:
    """i.i.d. points of the fundamental domain with equal weights."""

    z: np.ndarray
    weights: np.ndarray
    seed: int
    target_mass: float = 1.0

    @property
    def points(self) -> list[Point]:
        return [Point(float(p.real), float(p.imag), reduced=True) for p in self.z]

    def __len__(self):
        return self.z.size


_BLOCK = 4096


def _sample_chunk(seed: int, index: int, size: int) -> np.ndarray:
    rng = _rng.stream(seed, index)
    inv0 = 1.0 / ROOT3_2
    span = inv0 - 1.0 / Y_MAX
    parts, have = [], 0
    while have < size:
        # fixed block size keeps a shorter sample a prefix of a longer one
        x = rng.random(_BLOCK) - 0.5
        y = 1.0 / (inv0 - rng.random(_BLOCK) * span)
        keep = x * x + y * y >= 1.0
        parts.append(x[keep] + 1j * y[keep])
        have += parts[-1].size
    return np.concatenate(parts)[:size]


def sample_invariant_measure(n: int, seed: int, workers: int = 1, target_mass: float = 1.0) -> MeasureSample:
    """Rejection-sample the normalised hyperbolic measure on the fundamental domain.

    Proposals are uniform in x and follow dy / y^2 on [sqrt(3)/2, Y_MAX] by
    inverse CDF; points below the unit circle are rejected.  Sample ``n`` is
    a prefix of sample ``n' > n`` for the same seed.
    """
    if not isinstance(n, Integral) or n < 1:
        raise InvalidInput("sample size must be a positive integer")
    parts = _rng.map_chunks(lambda i, m: _sample_chunk(seed, i, m), int(n), workers)
    z = np.concatenate(parts)
    return MeasureSample(z, np.full(z.size, target_mass / z.size), int(seed), target_mass)


def sample_group_measure(n: int, seed: int, workers: int = 1):
    """Haar sample on SL(2,Z)\\SL(2,R) as ``(z, theta)`` with g = n(x) a(y) k(theta)."""
    z = sample_invariant_measure(n, seed, workers).z
    rng = _rng.stream(seed, 1 << 30)
    theta = rng.random(z.size) * (2 * math.pi)
    return z, theta
