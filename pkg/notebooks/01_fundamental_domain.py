"""
Reduction and the invariant measure
===================================

Points of the upper half-plane are moved into the standard fundamental
domain, and the sampler draws points distributed like dx dy / y^2.
"""

import math

import numpy as np

from horolab import sl2

# a point close to the real axis needs many inversions
z = sl2.Point(0.37, 0.002)
zr, g = sl2.reduce_to_fundamental_domain(z)
print("reduced point:", zr.z)
print("witness:", g, "det", g.det)
print("g . z agrees:", abs(sl2.mobius_act(g, z).z - zr.z) < 1e-12)

# boundary convention: rho stays put, the other corner folds onto it
rho = complex(-0.5, math.sqrt(3) / 2)
print("rho ->", sl2.reduce_array(rho), " -conj(rho) ->", sl2.reduce_array(-rho.conjugate()))

# Haar sample on the domain; the cusp region y >= Y has mass 3 / (pi Y)
sample = sl2.sample_invariant_measure(200_000, seed=1)
for Y in (1.5, 2.0, 4.0):
    frac = np.mean(sample.z.imag >= Y)
    print(f"P(y >= {Y}) = {frac:.4f}   exact {3 / (math.pi * Y):.4f}")

# the sample is reproducible and a prefix of any larger sample
small = sl2.sample_invariant_measure(1000, seed=1)
print("prefix property:", np.array_equal(small.z, sample.z[:1000]))
