"""Level-one automorphic forms: the discriminant Delta, completed zeta,
K-Bessel functions and the completed Eisenstein series E*(s, z).

Normalisations::

    xi(s)     = pi^(-s/2) Gamma(s/2) zeta(s)
    E*(s, z)  = xi(2s) y^s + xi(2-2s) y^(1-s)
                + 4 sqrt(y) sum_n K_{s-1/2}(2 pi n y) cos(2 pi n x) sum_{ab=n} (a/b)^(s-1/2)

E* is invariant under SL(2, Z), symmetric under s -> 1-s, and has simple
poles at s = 0, 1 with constant residues -1/2 and 1/2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .sl2 import InvalidInput, Point, reduce_array

TWO_PI = 2.0 * math.pi


class PoleError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Ramanujan tau and q-expansions


@lru_cache(maxsize=None)
def _tau_block(size: int) -> tuple[int, ...]:
    # Delta = q * (prod (1 - q^m)^3)^8 and prod (1 - q^m)^3 = sum (-1)^k (2k+1) q^(k(k+1)/2)
    sparse = []
    k = 0
    while k * (k + 1) // 2 < size:
        sparse.append((k * (k + 1) // 2, (-1) ** k * (2 * k + 1)))
        k += 1
    prod = np.zeros(size, dtype=object)
    prod[:] = 0
    prod[0] = 1
    for _ in range(8):
        new = np.zeros(size, dtype=object)
        new[:] = 0
        for shift, coeff in sparse:
            new[shift:] += coeff * prod[: size - shift]
        prod = new
    return (0,) + tuple(int(v) for v in prod[: size - 1])


def tau_coefficients(N: int) -> tuple[int, ...]:
    """``(0, tau(1), ..., tau(N))`` as exact integers."""
    if N < 1:
        raise InvalidInput("N must be >= 1")
    size = 64
    while size < N + 1:
        size *= 2
    return _tau_block(size)[: N + 1]


def tau(n: int) -> int:
    return tau_coefficients(n)[n]


def _terms_needed(y_min: float, tol: float, weight: int) -> int:
    """Smallest N with sum_{n>N} 4 n^(k/2) e^(-2 pi n y) < tol.

    Uses |a(n)| <= d(n) n^((k-1)/2) with a 2x safety factor and d(n) <= 2 sqrt(n).
    """
    r = math.exp(-TWO_PI * y_min)
    half_k = weight / 2.0
    n = 1
    while True:
        ratio = r * ((n + 2) / (n + 1)) ** half_k
        if ratio < 1:
            log_next = math.log(4.0) + half_k * math.log(n + 1) + (n + 1) * math.log(r)
            if log_next - math.log1p(-ratio) < math.log(tol):
                return n
        n += 1
        if n > 10_000_000:
            raise InvalidInput("point too close to the real axis for a direct q-expansion")


@dataclass(frozen=True)
class CuspFormSeries:
    """Holomorphic cusp form of weight ``k`` given by its q-expansion.

    ``coeffs[n]`` is a(n) with ``coeffs[0] == 0``.  Direct evaluation picks
    the number of terms from the divisor-bound tail rule; points where more
    terms are needed than are stored raise unless the form can regenerate
    them (Delta can).
    """

    weight: int
    coeffs: tuple
    name: str = "f"

    @classmethod
    def delta(cls, N: int = 256) -> "CuspFormSeries":
        return cls(12, tau_coefficients(N), "Delta")

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def a(self, n: int):
        if n > self.N:
            if self.name == "Delta":
                return tau(n)
            raise InvalidInput(f"coefficient {n} not stored")
        return self.coeffs[n]

    def _coeff_array(self, N: int) -> np.ndarray:
        if N > self.N:
            if self.name != "Delta":
                raise InvalidInput(f"needs {N} coefficients, only {self.N} stored")
            return np.array(tau_coefficients(N), dtype=float)
        return np.array(self.coeffs[: N + 1], dtype=float)

    def __call__(self, z, tol: float = 1e-20):
        """Direct q-expansion sum at a complex scalar or array."""
        if tol <= 0:
            raise InvalidInput("tol must be positive")
        z = np.asarray(z, dtype=complex)
        if z.size == 0:
            return z.copy()
        y_min = float(np.min(z.imag))
        if y_min <= 0:
            raise InvalidInput("points must lie in the upper half-plane")
        N = _terms_needed(y_min, tol, self.weight)
        c = self._coeff_array(N)
        q = np.exp(TWO_PI * 1j * z)
        acc = np.zeros_like(q)
        for n in range(N, 0, -1):
            acc = (acc + c[n]) * q
        return acc if acc.ndim else complex(acc)

    def modular(self, z, tol: float = 1e-20):
        """Evaluate through reduction: f(z) = (cz+d)^(-k) f(gamma z)."""
        z = np.asarray(z, dtype=complex)
        zr, (_, _, C, D) = reduce_array(z, with_witness=True)
        return self(zr, tol) * (C * z + D) ** (-self.weight)

    def lifted(self, A, B, C, D, tol: float = 1e-20):
        """Lift to SL(2,Z)\\SL(2,R): g -> f(g i) (c i + d)^(-k)."""
        A, B, C, D = (np.asarray(v, dtype=float) for v in (A, B, C, D))
        gi = (A * 1j + B) / (C * 1j + D)
        return self.modular(gi, tol) * (C * 1j + D) ** (-self.weight)


def eval_delta(z, tol: float = 1e-20):
    if isinstance(z, Point):
        z = z.z
    return CuspFormSeries.delta()(z, tol)


# ---------------------------------------------------------------------------
# Gamma, zeta, xi

_B2K = special.bernoulli(64)[2::2]  # B_2, B_4, ...
_FACT2K = np.array([math.factorial(2 * j) for j in range(1, 33)], dtype=float)


def gamma(s: complex) -> complex:
    return complex(np.exp(special.loggamma(complex(s))))


def _zeta_em(s: complex) -> complex:
    # Euler-Maclaurin with N terms and M Bernoulli corrections
    N = 20 + int(abs(s.imag))
    M = 20
    n = np.arange(1, N, dtype=float)
    total = complex(np.sum(n ** (-s)))
    NN = float(N)
    total += NN ** (1 - s) / (s - 1) + 0.5 * NN ** (-s)
    rising = s  # s (s+1) ... (s+2j-2)
    power = NN ** (-s - 1)
    for j in range(1, M + 1):
        total += _B2K[j - 1] / _FACT2K[j - 1] * rising * power
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        power /= NN * NN
    return total


def zeta(s: complex) -> complex:
    s = complex(s)
    if abs(s - 1) < 1e-8:
        raise PoleError("zeta has a pole at s = 1")
    if s.real < 0:
        return 2**s * math.pi ** (s - 1) * cmath.sin(math.pi * s / 2) * gamma(1 - s) * _zeta_em(1 - s)
    return _zeta_em(s)


def xi_completed_zeta(s: complex) -> complex:
    s = complex(s)
    if abs(s) < 1e-8 or abs(s - 1) < 1e-8:
        raise PoleError(f"xi has a pole at s = {s}")
    if s.real < 0:
        # Gamma(s/2) zeta(s) meets poles against trivial zeros here
        return xi_completed_zeta(1 - s)
    return math.pi ** (-s / 2) * gamma(s / 2) * zeta(s)


xi = xi_completed_zeta


# ---------------------------------------------------------------------------
# K-Bessel


def bessel_k_integral(nu: complex, x, chunk: int = 4096):
    """K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt by the trapezoid rule.

    The integrand is even and decays doubly exponentially, so the trapezoid
    rule on [0, t*] is exponentially convergent.  t* is placed where the
    integrand bound has dropped by e^-(50 + pi |Im nu| / 2) below its peak;
    the step resolves both the peak width and the oscillation of cosh(nu t).
    """
    nu = complex(nu)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise InvalidInput("bessel_k needs x > 0")
    flat = x.ravel()
    out = np.empty(flat.size, dtype=complex)
    re, im = abs(nu.real), abs(nu.imag)
    margin = 50.0 + 0.5 * math.pi * im
    for start in range(0, flat.size, chunk):
        xs = flat[start : start + chunk]
        t_peak = np.arcsinh(re / xs)
        t_star = t_peak + np.arccosh(1.0 + margin / xs)
        width = 1.0 / np.maximum(1.0, (xs * xs + abs(nu) ** 2) ** 0.25)
        h_req = np.minimum(0.35 * width, 0.6 / max(1.0, im))
        m = int(np.ceil(np.max(t_star / h_req))) + 1
        h = t_star / m
        j = np.arange(m + 1, dtype=float)
        t = h[:, None] * j[None, :]
        vals = np.exp(-xs[:, None] * np.cosh(t)) * np.cosh(nu * t)
        vals[:, 0] *= 0.5
        vals[:, -1] *= 0.5
        out[start : start + chunk] = h * vals.sum(axis=1)
    out = out.reshape(x.shape)
    return out if out.ndim else complex(out)


SHIFT_THRESHOLD = 4.0  # |Im nu| above which the real-axis rule loses > 1e-13 to cancellation


def bessel_k_shifted(nu: complex, x, budget: int = 1 << 22):
    """K_nu(x) = (1/2) int_R exp(-x cosh(u + i alpha) + nu (u + i alpha)) du.

    For large |Im nu| the real-axis integrand oscillates with amplitude far
    above the result (which is of size e^(-pi |Im nu| / 2)).  The line is
    moved to pass through the saddle t0 = asinh(nu / x) of the exponent,
    alpha = Im t0, kept at least delta = 2 / |Im nu| away from the lines
    Im t = +-pi/2 where the integrand stops decaying.  The integrand is
    analytic in a strip of half-width delta about the line, which sets the
    trapezoid step.
    """
    nu = complex(nu)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise InvalidInput("bessel_k needs x > 0")
    b = nu.imag
    cap = 0.5 * math.pi - min(0.5 * math.pi, 2.0 / max(abs(b), 1e-300))
    flat = x.ravel()
    out = np.empty(flat.size, dtype=complex)
    for idx, xv in enumerate(flat):
        t0 = cmath.asinh(nu / xv)
        alpha = max(-cap, min(cap, t0.imag))
        delta = 0.5 * math.pi - abs(alpha)
        xc = xv * math.cos(alpha)
        # the modulus exp(Re(nu) u - x cos(alpha) cosh u) peaks near u = Re t0
        centre = t0.real
        t_peak = math.asinh(abs(nu.real) / xc)
        reach = t_peak + math.acosh(1.0 + 45.0 / xc)
        lo, hi = min(centre, 0.0) - reach, max(centre, 0.0) + reach
        h = min(delta / 7.0, 0.35 / max(1.0, (xc * xc + abs(nu) ** 2) ** 0.25))
        m = int(math.ceil((hi - lo) / h)) + 1
        if m > budget:
            raise InvalidInput(f"bessel_k: order {nu} at x = {xv} needs {m} nodes")
        u = np.linspace(lo, hi, m)
        t = u + 1j * alpha
        vals = np.exp(-xv * np.cosh(t) + nu * t)
        step = u[1] - u[0]
        out[idx] = 0.5 * step * (vals.sum() - 0.5 * (vals[0] + vals[-1]))
    out = out.reshape(x.shape)
    return out if out.ndim else complex(out)


def bessel_k(nu: complex, x):
    """K_nu(x) for x > 0.

    Real order goes through scipy; complex order through the real-axis
    integral, or the shifted contour once |Im nu| > SHIFT_THRESHOLD.
    """
    nu = complex(nu)
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise InvalidInput("bessel_k needs x > 0")
    if nu.imag == 0:
        r = special.kv(nu.real, xa)
        return r if np.ndim(r) else float(r)
    if abs(nu.imag) > SHIFT_THRESHOLD:
        return bessel_k_shifted(nu, xa)
    return bessel_k_integral(nu, xa)


# ---------------------------------------------------------------------------
# Eisenstein series


def divisor_ratio_sum(n: int, nu: complex) -> complex:
    """sum_{ab = n} (a/b)^nu."""
    total = 0j
    for a_ in range(1, math.isqrt(n) + 1):
        if n % a_ == 0:
            b_ = n // a_
            total += (a_ / b_) ** nu
            if a_ != b_:
                total += (b_ / a_) ** nu
    return total


def _modes_needed(s: complex, y_min: float, tol: float) -> int:
    nu_re = abs(s.real - 0.5)
    n = 1
    while True:
        bound = 4 * math.sqrt(y_min) * 2 * math.sqrt(n) * n**nu_re * special.kv(nu_re, TWO_PI * n * y_min)
        tail = bound / (1 - math.exp(-TWO_PI * y_min))
        if tail < tol:
            return n
        n += 1


def _check_poles(s: complex):
    if abs(s) < 1e-8 or abs(s - 1) < 1e-8:
        raise PoleError(f"E* has a pole at s = {s}")


def eisenstein_star_array(s: complex, z, M: int | None = None, tol: float = 1e-13):
    """E*(s, z) on an array of points (any points; they are reduced first)."""
    s = complex(s)
    _check_poles(s)
    z = np.asarray(z, dtype=complex)
    if abs(s - 0.5) < 1e-3:
        # the two constant-term poles at s = 1/2 cancel; use the mean value property
        r = 0.05
        ring = s + r * np.exp(2j * math.pi * np.arange(16) / 16)
        return sum(eisenstein_star_array(w, z, M, tol) for w in ring) / 16
    zr = reduce_array(z)
    x, y = zr.real, zr.imag
    out = xi(2 * s) * y**s + xi(2 - 2 * s) * y ** (1 - s)
    if M is None:
        M = _modes_needed(s, float(np.min(y)) if y.size else 1.0, tol)
    nu = s - 0.5
    sqy = 4 * np.sqrt(y)
    for m in range(1, M + 1):
        out = out + sqy * bessel_k(nu, TWO_PI * m * y) * np.cos(TWO_PI * m * x) * divisor_ratio_sum(m, nu)
    return out


def eval_eisenstein_star(s: complex, z, M: int | None = None) -> complex:
    if M is not None and M < 1:
        raise InvalidInput("M must be >= 1")
    zc = z.z if isinstance(z, Point) else complex(z)
    return complex(eisenstein_star_array(s, np.array([zc]), M)[0])


def eisenstein_residue_check(z_list, eps: float, pole: int = 1) -> float:
    """Max pairwise spread of the residue proxy across ``z_list``.

    ``pole=1`` uses (s-1) E*(s, z) at s = 1 + eps; ``pole=0`` uses
    s E*(s, z) at s = eps.  Both tend to constants with an O(eps) error.
    """
    if not 1e-4 <= eps <= 1e-2:
        raise InvalidInput("eps must lie in [1e-4, 1e-2]")
    zs = np.array([p.z if isinstance(p, Point) else complex(p) for p in z_list])
    if pole == 1:
        vals = eps * eisenstein_star_array(1 + eps, zs)
    elif pole == 0:
        vals = eps * eisenstein_star_array(eps, zs)
    else:
        raise InvalidInput("pole must be 0 or 1")
    return float(np.max(np.abs(vals[:, None] - vals[None, :])))
