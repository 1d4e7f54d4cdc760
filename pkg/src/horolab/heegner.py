"""Binary quadratic forms of negative discriminant, the class group, and
Heegner (CM) points on the modular surface.

Only fundamental discriminants are accepted, so every form class
corresponds to an ideal class of the maximal order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .hecke import is_prime, primes_between
from .sl2 import InvalidInput, reduce_array


class CapabilityError(ValueError):
    pass


def _squarefree(m: int) -> bool:
    m = abs(m)
    f = 2
    while f * f <= m:
        if m % (f * f) == 0:
            return False
        f += 1
    return m != 0


def is_fundamental(D: int) -> bool:
    if D % 4 == 1:
        return _squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def nearest_fundamental(D: int) -> int:
    """Closest negative fundamental discriminant to D (ties go to smaller |D|)."""
    for delta in range(0, abs(D)):
        for cand in (D + delta, D - delta):
            if cand < 0 and is_fundamental(cand):
                return cand
    raise InvalidInput(f"no fundamental discriminant near {D}")


def _xgcd(a: int, b: int):
    """(g, u, v) with u a + v b = g = gcd(a, b) >= 0."""
    u0, v0, u1, v1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    if a < 0:
        a, u0, v0 = -a, -u0, -v0
    return a, u0, v0


@dataclass(frozen=True)
class QuadraticForm:
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def is_primitive(self) -> bool:
        return math.gcd(math.gcd(self.a, self.b), self.c) == 1

    @property
    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def reduce(self) -> "QuadraticForm":
        a, b, c = self.a, self.b, self.c
        D = self.discriminant
        if D >= 0 or a <= 0:
            raise InvalidInput("only positive definite forms are supported")

        def normalize(a, b):
            if -a < b <= a:
                return b
            r = (a - b) // (2 * a)
            return b + 2 * r * a

        b = normalize(a, b)
        c = (b * b - D) // (4 * a)
        while a > c:
            a, b, c = c, -b, a
            b = normalize(a, b)
            c = (b * b - D) // (4 * a)
        if a == c and b < 0:
            b = -b
        return QuadraticForm(a, b, c)

    def inverse(self) -> "QuadraticForm":
        return QuadraticForm(self.a, -self.b, self.c).reduce()

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def root(self) -> complex:
        """The root (-b + i sqrt|D|) / (2a) in the upper half-plane."""
        return complex(-self.b, math.sqrt(-self.discriminant)) / (2 * self.a)

    def __repr__(self):
        return f"({self.a},{self.b},{self.c})"


def principal_form(D: int) -> QuadraticForm:
    b = D % 2
    return QuadraticForm(1, b, (b * b - D) // 4)


def compose(f1: QuadraticForm, f2: QuadraticForm) -> QuadraticForm:
    """Gauss composition of primitive forms of equal discriminant, reduced."""
    D = f1.discriminant
    if f2.discriminant != D:
        raise InvalidInput(f"discriminants differ: {D} vs {f2.discriminant}")
    if f1.a > f2.a:
        f1, f2 = f2, f1
    a1, b1, _ = f1.a, f1.b, f1.c
    a2, b2, c2 = f2.a, f2.b, f2.c
    s = (b1 + b2) // 2
    n_ = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, u, v = _xgcd(s, d)
        x2, y2 = u, -v
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * n_ - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    num = b3 * b3 - D
    if num % (4 * a3):
        raise ArithmeticError("composition produced a non-integral form")
    return QuadraticForm(a3, b3, num // (4 * a3)).reduce()


def reduced_forms(D: int) -> list[QuadraticForm]:
    """All primitive reduced forms of fundamental discriminant D < 0."""
    if D >= 0 or D % 4 not in (0, 1):
        raise InvalidInput(f"{D} is not a negative discriminant")
    if not is_fundamental(D):
        raise CapabilityError(f"{D} is not fundamental; non-maximal orders are unsupported")
    out = []
    a_max = math.isqrt(-D // 3)
    for a in range(1, a_max + 1):
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            f = QuadraticForm(a, b, c)
            if f.is_reduced and f.is_primitive:
                out.append(f)
    return out


def class_number(D: int) -> int:
    return len(reduced_forms(D))


@dataclass(frozen=True)
class ClassGroup:
    D: int
    elements: tuple

    @classmethod
    def of(cls, D: int) -> "ClassGroup":
        return cls(D, tuple(reduced_forms(D)))

    @property
    def identity(self) -> QuadraticForm:
        return principal_form(self.D)

    @property
    def order(self) -> int:
        return len(self.elements)

    def compose(self, f, g) -> QuadraticForm:
        return compose(f, g)

    def power(self, f: QuadraticForm, m: int) -> QuadraticForm:
        if m < 0:
            return self.power(f.inverse(), -m)
        out, base = self.identity, f
        while m:
            if m & 1:
                out = compose(out, base)
            base = compose(base, base)
            m >>= 1
        return out

    def element_order(self, f: QuadraticForm) -> int:
        g, m = f.reduce(), 1
        e = self.identity
        while g != e:
            g = compose(g, f)
            m += 1
        return m

    def subgroup(self, generators) -> frozenset:
        """The subgroup generated by ``generators`` (closure under composition)."""
        for g in generators:
            if g.discriminant != self.D:
                raise InvalidInput(f"generator {g} has discriminant {g.discriminant}, expected {self.D}")
        seen = {self.identity}
        frontier = [self.identity]
        gens = [g.reduce() for g in generators]
        while frontier:
            nxt = []
            for h in frontier:
                for g in gens:
                    k = compose(h, g)
                    if k not in seen:
                        seen.add(k)
                        nxt.append(k)
            frontier = nxt
        return frozenset(seen)

    def coset(self, subgroup, rep: QuadraticForm) -> frozenset:
        return frozenset(compose(rep, s) for s in subgroup)

    def cosets(self, subgroup) -> list[frozenset]:
        remaining = set(self.elements)
        out = []
        for f in self.elements:
            if f in remaining:
                c = self.coset(subgroup, f)
                out.append(c)
                remaining -= c
        return out

    def generator(self) -> QuadraticForm | None:
        """An element of maximal order (a generator when the group is cyclic)."""
        best, best_order = None, 0
        for f in self.elements:
            m = self.element_order(f)
            if m > best_order:
                best, best_order = f, m
        return best


@dataclass(frozen=True)
class HeegnerSet:
    D: int
    forms: tuple
    roots: np.ndarray  # roots of the forms, before reduction
    points: np.ndarray  # reduced points, one per class

    def __len__(self):
        return len(self.forms)


def cm_points(forms) -> np.ndarray:
    return reduce_array(np.array([f.root() for f in forms], dtype=complex))


def heegner_points(D: int) -> HeegnerSet:
    forms = tuple(reduced_forms(D))
    roots = np.array([f.root() for f in forms], dtype=complex)
    return HeegnerSet(D, forms, roots, reduce_array(roots))


def coset_points(D: int, generators, rep: QuadraticForm) -> np.ndarray:
    """CM points of the coset rep * <generators>."""
    group = ClassGroup.of(D)
    if rep.discriminant != D:
        raise InvalidInput(f"coset representative {rep} has wrong discriminant")
    coset = group.coset(group.subgroup(generators), rep.reduce())
    order = {f: i for i, f in enumerate(group.elements)}
    return cm_points(sorted(coset, key=order.__getitem__))


# ---------------------------------------------------------------------------
# Kronecker symbol and split primes


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a / n)."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    # Jacobi symbol (a / n) for odd n > 0
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def split_prime_weight(D: int, delta: float) -> int:
    """#{q prime: |D|^delta <= q <= 2 |D|^delta, (D / q) = +1}."""
    if not delta > 0:
        raise InvalidInput("delta must be positive")
    lo = abs(D) ** delta
    return sum(1 for q in primes_between(lo - 1e-9, 2 * lo + 1e-9) if kronecker(D, q) == 1)


def is_split(D: int, q: int) -> bool:
    return is_prime(q) and kronecker(D, q) == 1


def represented_values(f: QuadraticForm, bound: int) -> set[int]:
    """Values f(x, y) <= bound over primitive (x, y)."""
    out = set()
    r = math.isqrt(4 * bound) + 2
    for x, y in product(range(-r, r + 1), repeat=2):
        if math.gcd(x, y) == 1:
            v = f(x, y)
            if 0 < v <= bound:
                out.add(v)
    return out
