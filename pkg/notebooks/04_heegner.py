"""
Heegner points
==============

Class groups of imaginary quadratic fields and the CM points they
produce on the modular surface.
"""

from horolab import flows, heegner
from horolab.heegner import ClassGroup

suite = flows.default_suite()

G = ClassGroup.of(-23)
print("D = -23 classes:", G.elements)
f = G.elements[1]
print("powers of", f, ":", [G.power(f, m) for m in range(4)])

for D in (-23, -2003, -20003):
    D = heegner.nearest_fundamental(D)
    H = heegner.heegner_points(D)
    rep = flows.discrepancy(H.points, suite)
    print(f"D = {D}: h = {len(H)}, max deviation {rep.max_deviation:.4f}")

# a subgroup of index 3 splits the Heegner set into three cosets
D = -2003
G = ClassGroup.of(D)
sub = G.subgroup([G.power(G.generator(), 3)])
for coset in G.cosets(sub):
    rep = min(coset, key=lambda q: (q.a, q.b))
    pts = heegner.coset_points(D, sorted(sub, key=lambda q: (q.a, q.b)), rep)
    print(f"coset of {rep}: {len(pts)} points")
print("split primes in [|D|^0.25, 2|D|^0.25]:", heegner.split_prime_weight(D, 0.25))
