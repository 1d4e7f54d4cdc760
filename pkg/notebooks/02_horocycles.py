"""
Horocycles and discrepancy
==========================

Long horocycle orbits, pushed to the modular surface, are compared with
the invariant measure through a fixed suite of smooth test functions.
"""

import numpy as np

from horolab import flows, hecke, sl2
from horolab.flows import OrbitSpec

suite = flows.default_suite()
print("test functions:", suite.names)

# 1. the horocycle through i closes up at height 1 and never spreads out
for N in (10**3, 10**5):
    rep = flows.discrepancy(flows.sparse_horocycle_points(OrbitSpec.sparse(0, N)), suite)
    print(f"identity basepoint, N = {N:>6}: max deviation {rep.max_deviation:.4f}")

# 2. from a generic basepoint the long horocycle equidistributes
x0 = flows.GENERIC_BASEPOINT
for T in (10**2, 10**3, 10**4):
    rep = flows.discrepancy(flows.horocycle_points(OrbitSpec.continuous(T, basepoint=x0)), suite)
    print(f"generic basepoint, T = {T:>6}: max deviation {rep.max_deviation:.4f}")

# 3. sampling the horocycle only at times j^(1 + gamma)
for N in (10**2, 10**3, 10**4):
    rep = flows.discrepancy(flows.sparse_horocycle_points(OrbitSpec.sparse(0.01, N, x0)), suite)
    print(f"sparse gamma = 0.01, N = {N:>6}: max deviation {rep.max_deviation:.4f}")

# 4. closed horocycles of height 1/q sampled at the q rational points
for q in (11, 97, 997):
    rep = flows.discrepancy(flows.rational_horocycle_points(q, 1 / q), suite)
    print(f"rational q = {q:>4}: max deviation {rep.max_deviation:.4f}")

# 5. Hecke orbits of i
for p in (11, 101, 1009):
    rep = flows.discrepancy(hecke.hecke_points(sl2.Point(0, 1), p), suite)
    print(f"Hecke orbit p = {p:>4}: max deviation {rep.max_deviation:.4f}")

# 6. mixing: correlations of a bump decay along the geodesic flow
f = flows.bump(2j, 0.2)
for t in (0.0, 1.0, 2.0, 4.0):
    c = flows.matrix_coefficient(f, f, t, 100_000, seed=2, normalize=True)
    print(f"t = {t}: normalized correlation {c.estimate:+.4f} +- {c.stderr:.4f}")
print("gamma_max(0) =", flows.gamma_max(0))
