"""Hecke operators on level one, normalised eigenvalues and the amplifier."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .automorphic import CuspFormSeries
from .sl2 import GroupElement, InvalidInput, Point, reduce_array


class CoverageError(ValueError):
    pass


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def primes_between(lo: float, hi: float) -> list[int]:
    return [p for p in range(max(2, math.ceil(lo)), math.floor(hi) + 1) if is_prime(p)]


def divisors(n: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def sigma1(n: int) -> int:
    return sum(divisors(n))


@dataclass(frozen=True)
class HeckeCosets:
    n: int
    reps: tuple

    def __len__(self):
        return len(self.reps)


def hecke_coset_reps(n: int) -> HeckeCosets:
    """Upper-triangular representatives [[a, b], [0, d]], ad = n, 0 <= b < d."""
    if n < 1:
        raise InvalidInput("n must be >= 1")
    reps = []
    for a_ in divisors(n):
        d_ = n // a_
        reps.extend(GroupElement(a_, b_, 0, d_) for b_ in range(d_))
    return HeckeCosets(n, tuple(reps))


def hecke_points(z: Point, n: int) -> np.ndarray:
    """The Hecke orbit of ``z``: reduced images under all det-n cosets."""
    zc = z.z if isinstance(z, Point) else complex(z)
    reps = hecke_coset_reps(n).reps
    return reduce_array(np.array([g.act(zc) for g in reps]))


def apply_hecke_weight_0(f, n: int, z):
    """n^(-1/2) sum over det-n cosets of f(gamma z); f takes complex arrays."""
    z = np.asarray(z, dtype=complex)
    total = 0.0
    for g in hecke_coset_reps(n).reps:
        total = total + f(g.act(z))
    return total / math.sqrt(n)


def apply_hecke_weight_k(f, p: int, z, k: int):
    """(T_p f)(z) = p^(k-1) f(pz) + p^(-1) sum_{j<p} f((z+j)/p)."""
    if not is_prime(p):
        raise InvalidInput(f"{p} is not prime")
    z = np.asarray(z, dtype=complex)
    out = p ** (k - 1) * np.asarray(f(p * z), dtype=complex)
    for j in range(p):
        out = out + np.asarray(f((z + j) / p), dtype=complex) / p
    return out


@dataclass(frozen=True)
class EigenvalueTable:
    """lambda(n) = a(n) n^(-(k-1)/2), so Ramanujan reads |lambda(p)| <= 2."""

    values: np.ndarray  # values[n] for 1 <= n <= N, values[0] unused
    weight: int = 12

    @classmethod
    def from_form(cls, f: CuspFormSeries, N: int) -> "EigenvalueTable":
        coeffs = [f.a(m) for m in range(N + 1)]
        shift = (f.weight - 1) / 2.0
        vals = np.zeros(N + 1)
        for m in range(1, N + 1):
            vals[m] = coeffs[m] / m**shift
        return cls(vals, f.weight)

    @classmethod
    def delta(cls, N: int) -> "EigenvalueTable":
        return cls.from_form(CuspFormSeries.delta(N), N)

    @property
    def N(self) -> int:
        return self.values.size - 1

    def __call__(self, m: int) -> float:
        if not 1 <= m <= self.N:
            raise CoverageError(f"table covers 1..{self.N}, asked for {m}")
        return float(self.values[m])


def verify_convolution(lam: EigenvalueTable, m: int, n: int) -> float:
    """|lambda(m) lambda(n) - sum_{d | (m, n)} lambda(mn / d^2)|."""
    if m * n > lam.N:
        raise CoverageError(f"table must cover mn = {m * n}")
    g = math.gcd(m, n)
    rhs = sum(lam(m * n // (d * d)) for d in divisors(g))
    return abs(lam(m) * lam(n) - rhs)


def _sign(v: complex) -> complex:
    return 1.0 if v == 0 else v / abs(v)


@dataclass(frozen=True)
class AmplifierCoefficients:
    K: int
    primes: tuple
    coeffs: dict  # n -> a(n), supported on primes l in [K, 2K] and their squares
    total: float  # sum_n a(n) lambda(n)

    @property
    def size(self) -> int:
        return len(self.primes)


def amplifier_coefficients(lam: EigenvalueTable, K: int) -> AmplifierCoefficients:
    """a(l) = conj sign lambda(l), a(l^2) = conj sign lambda(l^2) for primes l in [K, 2K]."""
    if (2 * K) ** 2 > lam.N:
        raise CoverageError(f"table must cover (2K)^2 = {(2 * K) ** 2}")
    primes = primes_between(K, 2 * K)
    coeffs = {}
    total = 0.0
    for ell in primes:
        for m in (ell, ell * ell):
            c = _sign(lam(m)).conjugate()
            coeffs[m] = c
            total += c * lam(m)
    return AmplifierCoefficients(K, tuple(primes), coeffs, float(np.real(total)))
