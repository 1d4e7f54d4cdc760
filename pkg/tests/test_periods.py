import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from horolab import automorphic as am
from horolab import periods
from horolab.automorphic import CuspFormSeries, PoleError
from horolab.periods import CapabilityError, DirichletCharacter, DomainError, PeriodResult, YGrid
from horolab.sl2 import InvalidInput

DELTA = CuspFormSeries.delta()
ZERO = CuspFormSeries(12, (0,) * 64, "zero")


def test_fourier_coefficients():
    for n in range(1, 31):
        a = periods.fourier_coeff_via_horocycle(DELTA, n)
        assert abs(a - am.tau(n)) < 1e-6 * abs(am.tau(n)), n
    assert periods.fourier_coeff_via_horocycle(DELTA, 1) == pytest.approx(1, rel=1e-6)
    assert periods.fourier_coeff_via_horocycle(DELTA, 2) == pytest.approx(-24, rel=1e-6)
    assert periods.fourier_coeff_via_horocycle(ZERO, 3) == 0


def test_fourier_errors():
    with pytest.raises(InvalidInput):
        periods.fourier_coeff_via_horocycle(DELTA, 10, nodes=79)
    with pytest.raises(InvalidInput):
        periods.fourier_coeff_via_horocycle(DELTA, 0)


@pytest.mark.parametrize("q", [5, 7, 11, 13])
def test_character_axioms(q):
    for idx in range(q - 1):
        chi = DirichletCharacter(q, idx)
        v = chi.values
        assert v[0] == 0
        assert np.allclose(np.abs(v[1:]), 1)
        for x in range(q):
            for y in range(q):
                assert abs(chi(x * y) - chi(x) * chi(y)) < 1e-12
        if idx:
            assert abs(v.sum()) < 1e-12
            assert abs(abs(chi.gauss_sum()) - math.sqrt(q)) < 1e-12
    # orthogonality of distinct characters
    chars = [DirichletCharacter(q, i).values for i in range(q - 1)]
    gram = np.array([[np.vdot(b, a) for a in chars] for b in chars])
    assert np.allclose(gram, (q - 1) * np.eye(q - 1))


def test_quadratic_character_is_legendre():
    import sympy

    for q in (5, 7, 11, 97):
        chi = DirichletCharacter.quadratic(q)
        assert [int(chi(x).real) for x in range(1, q)] == [sympy.legendre_symbol(x, q) for x in range(1, q)]
    assert DirichletCharacter.quadratic(5).gauss_sum() == pytest.approx(math.sqrt(5))
    assert not DirichletCharacter.principal(5).is_primitive
    with pytest.raises(InvalidInput):
        DirichletCharacter(6, 1)


def _mpmath_period(chi, s):
    # independent route: (g/q) (2 pi)^-s' Gamma(s') sum a(n) conj chi(n) n^-s'
    mpmath.mp.dps = 30
    sp = s + 5
    t = am.tau_coefficients(4000)
    series = mpmath.fsum(t[n] * complex(chi(n)).conjugate() * mpmath.power(n, -sp) for n in range(1, 4001))
    return complex(chi.gauss_sum() / chi.q * (2 * mpmath.pi) ** (-sp) * mpmath.gamma(sp) * series)


@pytest.mark.parametrize("q,idx,s", [(5, 2, 3.0), (7, 1, 3.0), (5, 1, 2.5 + 1j)])
def test_twisted_period_identity(q, idx, s):
    chi = DirichletCharacter(q, idx)
    m = periods.twisted_period_mellin(DELTA, chi, s)
    ref = _mpmath_period(chi, s)
    assert abs(m.value - ref) < 1e-4 * abs(ref)
    ser = periods.twisted_period_series(DELTA, chi, s)
    assert abs(ser.value - ref) < 1e-4 * abs(ref)


@pytest.mark.parametrize("q,idx,s", [(5, 2, 6.0), (7, 1, 6.0), (5, 1, 5.5 + 1j)])
def test_twisted_error_estimate_is_honest(q, idx, s):
    # far enough right that 4000 terms of the series are exact to double precision
    chi = DirichletCharacter(q, idx)
    m = periods.twisted_period_mellin(DELTA, chi, s)
    ref = _mpmath_period(chi, s)
    assert abs(m.value - ref) <= m.error
    ser = periods.twisted_period_series(DELTA, chi, s)
    assert abs(ser.value - ref) <= ser.error + 1e-14 * abs(ref)


def test_twisted_conjugation():
    s = 3.0
    # even real character: conj(chi) = chi, value real up to the real Gauss sum
    chi = DirichletCharacter.quadratic(5)
    p = periods.twisted_period_mellin(DELTA, chi, s).value
    assert abs(p.imag) < 1e-10 * abs(p)
    # general character: P(conj chi) = chi(-1) conj P(chi) for real coefficients and real s
    chi = DirichletCharacter(7, 1)
    a = periods.twisted_period_mellin(DELTA, chi, s).value
    b = periods.twisted_period_mellin(DELTA, chi.conj(), s).value
    assert abs(b - chi(-1) * a.conjugate()) < 1e-10 * abs(a)


def test_twisted_refinement_within_error():
    chi = DirichletCharacter.quadratic(5)
    base = periods.default_ygrid(DELTA, chi, 3.0)
    r1 = periods.twisted_period_mellin(DELTA, chi, 3.0, base)
    r2 = periods.twisted_period_mellin(DELTA, chi, 3.0, YGrid(base.y_min, base.y_max, 2 * base.panels, base.order))
    assert abs(r1.value - r2.value) < r1.error
    assert r1.error > 0 and r1.params["q"] == 5


def test_twisted_errors():
    with pytest.raises(CapabilityError):
        periods.twisted_period_mellin(DELTA, DirichletCharacter.principal(5), 3.0)
    with pytest.raises(DomainError):
        periods.twisted_period_mellin(DELTA, DirichletCharacter.quadratic(5), 1.5)
    with pytest.raises(DomainError):
        periods.twisted_period_series(DELTA, DirichletCharacter.quadratic(5), 1.0)
    with pytest.raises(ValueError):
        PeriodResult(1.0, -1e-3)


def test_twisted_integrand_orthogonality():
    # a constant added to f is annihilated by a non-principal character
    chi = DirichletCharacter(7, 2)
    y = np.array([0.1, 0.5, 2.0])
    base = periods._twisted_integrand(DELTA, chi, y)

    class Shifted:
        weight = 12

        def modular(self, z):
            return DELTA.modular(z) + 3.0

    assert np.allclose(periods._twisted_integrand(Shifted(), chi, y), base, rtol=0, atol=1e-13)


def test_rankin_selberg_at_two():
    mc = periods.rankin_selberg_integral(DELTA, 2.0, 200_000, seed=11)
    ref = periods.rankin_selberg_unfolded(2.0)
    assert abs(mc.value - ref.value) < max(1e-3 * abs(ref.value), 3 * math.hypot(mc.error, ref.error))
    # y^12 |Delta|^2 underflows to 0 high in the cusp
    assert mc.params["min_integrand"] >= 0


@pytest.mark.parametrize("s", [2.0, 1.5 + 1j])
def test_rankin_selberg_symmetry(s):
    a = periods.rankin_selberg_integral(DELTA, s, 100_000, seed=5)
    b = periods.rankin_selberg_integral(DELTA, 1 - s, 100_000, seed=6)
    assert abs(a.value - b.value) < 3 * math.hypot(a.error, b.error)


def test_rankin_selberg_errors():
    with pytest.raises(PoleError):
        periods.rankin_selberg_integral(DELTA, 1.0, 100_000, seed=1)
    with pytest.raises(InvalidInput):
        periods.rankin_selberg_integral(DELTA, 2.0, 1000, seed=1)
    with pytest.raises(DomainError):
        periods.rankin_selberg_unfolded(0.9)


@given(st.floats(1.3, 4.0), st.floats(-5, 5))
def test_unfolded_truncation_consistent(re, im):
    s = complex(re, im)
    a = periods.rankin_selberg_unfolded(s, 4000)
    b = periods.rankin_selberg_unfolded(s, 8000)
    assert abs(a.value - b.value) <= 2 * (a.error + b.error) + 1e-14 * abs(b.value)


def test_second_moment():
    r = periods.second_moment(2000) / periods.second_moment(1000)
    assert 1.8 <= r <= 2.2
    assert periods.second_moment(1) == 1
    assert periods.second_moment(2) == pytest.approx(1 + 576 / 2**11)
