"""
Periods of the discriminant form
================================

Fourier coefficients from closed horocycles, twisted periods against
a Dirichlet series, and the Rankin-Selberg unfolding.
"""

from horolab import automorphic as am
from horolab import periods
from horolab.automorphic import CuspFormSeries
from horolab.periods import DirichletCharacter

delta = CuspFormSeries.delta()

# tau(n) from integrals along the horocycle at height 1/n
for n in (1, 2, 3, 10, 30):
    a = periods.fourier_coeff_via_horocycle(delta, n)
    print(f"n = {n:>2}: horocycle {a.real:+.6e}   tau(n) = {am.tau(n)}")

# twisted period: Mellin integral versus Gauss sum x Gamma x series
chi = DirichletCharacter.quadratic(5)
m = periods.twisted_period_mellin(delta, chi, 3.0)
s = periods.twisted_period_series(delta, chi, 3.0)
print("Mellin  ", m.value, "+-", m.error)
print("series  ", s.value, "+-", s.error)

# Rankin-Selberg at s = 2, and its reflection
mc = periods.rankin_selberg_integral(delta, 2.0, 200_000, seed=3)
mc_reflected = periods.rankin_selberg_integral(delta, -1.0, 200_000, seed=4)
oracle = periods.rankin_selberg_unfolded(2.0)
print("Monte Carlo s = 2  ", mc.value.real, "+-", mc.error)
print("Monte Carlo s = -1 ", mc_reflected.value.real, "+-", mc_reflected.error)
print("unfolded series    ", oracle.value.real)

# the mean square of tau(n) n^(-11/2) is constant
for X in (500, 1000, 2000):
    print(f"sum_(n <= {X}) lambda(n)^2 = {periods.second_moment(X):.2f}")
