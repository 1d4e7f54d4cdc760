"""Period integrals of Delta: Fourier coefficients along closed horocycles,
character-twisted Mellin periods, and the Rankin-Selberg integral.

Every period comes with an independent closed-form side (a Dirichlet
series times Gamma factors) evaluated only where the series converges
absolutely.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import sl2
from .automorphic import CuspFormSeries, PoleError, eisenstein_star_array, gamma, tau_coefficients, xi
from .flows import weyl_integral
from .hecke import divisors, is_prime
from .sl2 import InvalidInput


class CapabilityError(ValueError):
    pass


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class PeriodResult:
    value: complex
    error: float
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.error >= 0:
            raise ValueError("error estimate must be non-negative")


# ---------------------------------------------------------------------------
# Dirichlet characters of prime modulus


def primitive_root(q: int) -> int:
    if not is_prime(q):
        raise InvalidInput(f"{q} is not prime")
    if q == 2:
        return 1
    factors = [p for p in divisors(q - 1) if p > 1 and is_prime(p)]
    for g in range(2, q):
        if all(pow(g, (q - 1) // p, q) != 1 for p in factors):
            return g
    raise ArithmeticError("no primitive root")  # unreachable for prime q


@dataclass(frozen=True)
class DirichletCharacter:
    """chi(g^m) = e(index * m / (q - 1)) for a fixed primitive root g."""

    q: int
    index: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise InvalidInput(f"modulus {self.q} must be prime")
        object.__setattr__(self, "index", self.index % (self.q - 1) if self.q > 2 else 0)

    @classmethod
    def quadratic(cls, q: int) -> "DirichletCharacter":
        if q == 2 or not is_prime(q):
            raise InvalidInput("the quadratic character needs an odd prime modulus")
        return cls(q, (q - 1) // 2)

    @classmethod
    def principal(cls, q: int) -> "DirichletCharacter":
        return cls(q, 0)

    @property
    def is_primitive(self) -> bool:
        # prime modulus: every non-principal character is primitive
        return self.index != 0

    @property
    def values(self) -> np.ndarray:
        q = self.q
        g = primitive_root(q)
        out = np.zeros(q, dtype=complex)
        x = 1
        for m in range(q - 1):
            out[x] = cmath.exp(2j * math.pi * self.index * m / (q - 1))
            x = x * g % q
        # exact values for real characters
        if (2 * self.index) % (q - 1) == 0:
            out = np.round(out.real) + 0j
        return out

    def __call__(self, x: int) -> complex:
        return complex(self.values[x % self.q])

    def conj(self) -> "DirichletCharacter":
        return DirichletCharacter(self.q, -self.index)

    def gauss_sum(self) -> complex:
        x = np.arange(self.q)
        return complex(np.dot(self.values, np.exp(2j * math.pi * x / self.q)))


# ---------------------------------------------------------------------------
# Fourier coefficients along closed horocycles


def fourier_coeff_via_horocycle(f: CuspFormSeries, n: int, nodes: int | None = None) -> complex:
    """a(n) = e^(2 pi) n^(k/2) (1/n) int_0^n e(-t) f~(a(1/n) n(t)) dt.

    The horocycle a(1/n) n(t), 0 <= t <= n, traces x + i/n once, and
    the lift f~(g) = f(g i) (ci + d)^(-k) contributes n^(-k/2).
    """
    if n < 1:
        raise InvalidInput("n must be >= 1")
    if nodes is None:
        nodes = max(64, 8 * n)
    if nodes < 8 * n:
        raise InvalidInput(f"nodes must be >= 8n = {8 * n}")
    w = weyl_integral(f, sl2.a(1.0 / n), float(n), -1.0, nodes)
    return math.exp(2 * math.pi) * n ** (f.weight / 2) * w


# ---------------------------------------------------------------------------
# twisted Mellin period


@dataclass(frozen=True)
class YGrid:
    """Gauss-Legendre panels in u = log y on [log y_min, log y_max]."""

    y_min: float
    y_max: float
    panels: int = 48
    order: int = 16

    def __post_init__(self):
        if not 0 < self.y_min < self.y_max:
            raise InvalidInput("need 0 < y_min < y_max")
        if self.panels < 2 or self.order < 2:
            raise InvalidInput("need at least 2 panels of order 2")

    def nodes(self, panels: int | None = None):
        P = panels or self.panels
        x, w = np.polynomial.legendre.leggauss(self.order)
        edges = np.linspace(math.log(self.y_min), math.log(self.y_max), P + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        u = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        wu = (half[:, None] * w[None, :]).ravel()
        return u, wu


def _gamma_upper_bound(a: float, x: float) -> float:
    """Upper bound for Gamma(a, x), valid for x > max(0, a - 1)."""
    if a <= 1:
        return x ** (a - 1) * math.exp(-x)
    if x <= a - 1:
        return math.inf
    return x ** (a - 1) * math.exp(-x) / (1 - (a - 1) / x)


def _coeff_abs_tail(f: CuspFormSeries, a: float, X: float, power: float) -> float:
    """sum_n |a(n)| Gamma(a, 2 pi n X) (2 pi n)^(-power) bounded termwise."""
    total = 0.0
    for n in range(1, 10_000):
        term = abs(f.a(n)) * _gamma_upper_bound(a, 2 * math.pi * n * X) * (2 * math.pi * n) ** (-power)
        total += term
        if n > 4 and term < 1e-30 * max(total, 1e-300):
            break
    return total


def default_ygrid(f: CuspFormSeries, chi: DirichletCharacter, s: complex) -> YGrid:
    # cusp x/q sits at height 1/(q^2 y) after reduction, so the lower end
    # decays like exp(-2 pi / (q^2 y)); the upper end like exp(-2 pi y)
    sp = (complex(s) + (f.weight - 2) / 2).real
    q = chi.q
    return YGrid(1.0 / (7.0 * q * q), 8.0 + sp, 48, 16)


def _twisted_integrand(f: CuspFormSeries, chi: DirichletCharacter, y: np.ndarray) -> np.ndarray:
    vals = chi.values
    total = np.zeros(y.size, dtype=complex)
    for x in range(1, chi.q):
        total += vals[x] * f.modular(x / chi.q + 1j * y)
    return total / chi.q


def twisted_period_mellin(f: CuspFormSeries, chi: DirichletCharacter, s: complex, y_grid: YGrid | None = None) -> PeriodResult:
    """int_0^inf (1/q) sum_x chi(x) f(x/q + iy) y^(s + (k-2)/2) dy / y.

    The error estimate is the panel-halving difference plus analytic
    bounds for both truncated ends and a rounding floor.
    """
    if not isinstance(chi, DirichletCharacter):
        raise InvalidInput("chi must be a DirichletCharacter")
    if not chi.is_primitive:
        raise CapabilityError("the period needs a primitive character")
    s = complex(s)
    if not s.real > 1.5:
        raise DomainError("Re(s) must exceed 3/2")
    grid = y_grid or default_ygrid(f, chi, s)
    k = f.weight
    sp = s + (k - 2) / 2

    def integrate(panels):
        u, w = grid.nodes(panels)
        y = np.exp(u)
        g = _twisted_integrand(f, chi, y) * np.exp(sp * u)
        return complex(np.dot(w, g)), float(np.dot(w, np.abs(g)))

    fine, mass = integrate(grid.panels)
    coarse, _ = integrate(max(1, grid.panels // 2))
    sr = sp.real
    upper = _coeff_abs_tail(f, sr, grid.y_max, sr)
    # below y_min: |f(x/q + iy)| <= (qy)^-k F(1/(q^2 y)), F(Y) = sum |a(n)| e^(-2 pi n Y)
    Ymin = 1.0 / (chi.q**2 * grid.y_min)
    a_low = k - sr
    lower = chi.q ** (k - 2 * sr) * _coeff_abs_tail(f, a_low, Ymin, a_low)
    err = abs(fine - coarse) + upper + lower + 64 * np.finfo(float).eps * mass
    params = {"q": chi.q, "index": chi.index, "s": s, "s_shift": sp, "y_min": grid.y_min,
              "y_max": grid.y_max, "panels": grid.panels, "order": grid.order}
    return PeriodResult(fine, float(err), params)


def twisted_period_series(f: CuspFormSeries, chi: DirichletCharacter, s: complex, N: int = 10_000) -> PeriodResult:
    """(g(chi)/q) (2 pi)^(-s') Gamma(s') sum_{n <= N} a(n) conj chi(n) n^(-s')."""
    s = complex(s)
    if not s.real > 1.5:
        raise DomainError("Re(s) must exceed 3/2")
    k = f.weight
    sp = s + (k - 2) / 2
    coeffs = np.array([float(f.a(m)) for m in range(N + 1)]) if f.name != "Delta" else np.array(tau_coefficients(N), dtype=float)
    n = np.arange(1, N + 1, dtype=float)
    chib = np.conj(chi.values[np.arange(1, N + 1) % chi.q])
    series = complex(np.sum(coeffs[1:] * chib * n ** (-sp)))
    pref = chi.gauss_sum() / chi.q * (2 * math.pi) ** (-sp) * gamma(sp)
    # divisor-bound tail: |a(n)| <= d(n) n^((k-1)/2) <= 2 sqrt(n) n^((k-1)/2)
    expo = sp.real - (k - 1) / 2 - 0.5
    tail = 2 * N ** (1 - expo) / (expo - 1) if expo > 1 else math.inf
    return PeriodResult(complex(pref * series), float(abs(pref) * tail), {"q": chi.q, "s": s, "s_shift": sp, "N": N})


# ---------------------------------------------------------------------------
# Rankin-Selberg


def _check_pole(s: complex, tol: float = 1e-3):
    if abs(s) < tol or abs(s - 1) < tol:
        raise PoleError(f"s = {s} is within {tol} of a pole of E*")


def rankin_selberg_integral(f: CuspFormSeries, s: complex, mc_n: int, seed: int, workers: int = 1, chunk: int = 1 << 16) -> PeriodResult:
    """Monte Carlo value of int_F y^12 |f(z)|^2 E*(s, z) dx dy / y^2.

    The sample is Haar-distributed on the fundamental domain, whose
    area is pi / 3.  ``params['min_integrand']`` is the smallest real part
    seen, which must be positive for real s > 1.
    """
    s = complex(s)
    _check_pole(s)
    if mc_n < 100_000:
        raise InvalidInput("mc_n must be >= 1e5")
    if f.weight != 12:
        raise InvalidInput("rankin_selberg_integral expects weight 12")
    z = sl2.sample_invariant_measure(int(mc_n), seed, workers).z
    total = 0j
    total_sq = 0.0
    lo = math.inf
    for start in range(0, z.size, chunk):
        zc = z[start : start + chunk]
        y = zc.imag
        g = y**12 * np.abs(f(zc)) ** 2 * eisenstein_star_array(s, zc)
        total += complex(np.sum(g))
        total_sq += float(np.sum(np.abs(g) ** 2))
        lo = min(lo, float(np.min(g.real)))
    m = z.size
    mean = total / m
    var = max(total_sq / m - abs(mean) ** 2, 0.0) * m / (m - 1)
    vol = sl2.VOLUME
    return PeriodResult(vol * mean, vol * math.sqrt(var / m), {"s": s, "n": m, "seed": seed, "min_integrand": lo})


def rankin_selberg_unfolded(s: complex, N: int = 10_000) -> PeriodResult:
    """xi(2s) Gamma(s + 11) (4 pi)^(-(s + 11)) sum_n tau(n)^2 n^(-(s + 11)), Re(s) > 1.

    With lambda(n) = tau(n) n^(-11/2) the series is sum lambda(n)^2 n^(-s).
    Its tail is replaced by c N^(1-s) / (s - 1), c the mean of lambda^2 on
    (N/2, N]; the size of that correction is the reported error.
    """
    s = complex(s)
    if not s.real > 1:
        raise DomainError("the unfolded series needs Re(s) > 1")
    t = np.array(tau_coefficients(N), dtype=float)
    n = np.arange(1, N + 1, dtype=float)
    lam2 = (t[1:] / n**5.5) ** 2
    partial = complex(np.sum(lam2 * n ** (-s)))
    c = float(np.mean(lam2[N // 2 :]))
    tail = c * N ** (1 - s) / (s - 1)
    pref = xi(2 * s) * gamma(s + 11) * (4 * math.pi) ** (-(s + 11))
    return PeriodResult(complex(pref * (partial + tail)), float(abs(pref * tail)), {"s": s, "N": N})


def second_moment(X: int) -> float:
    """sum_{n <= X} tau(n)^2 n^(-11)."""
    if X < 1:
        raise InvalidInput("X must be >= 1")
    t = tau_coefficients(X)
    return float(sum((t[m] * t[m]) / m**11 for m in range(1, X + 1)))
