# # Counting sections with lattice points
#
# On a smooth toric surface h0(D) is the number of lattice points of the
# divisor polygon. This is the exact oracle behind every truncated nu value.

# %%
from fractions import Fraction

from nucert.nu_bounds import SurfacePair, nu_lower_bound, windowed_nu
from nucert.toric_oracle import (ToricPairProvider, bidegree_class, degree_class, h0, hirzebruch,
                                 intersection_number, projective_plane)

p2 = projective_plane()
print([h0(degree_class(p2, d)) for d in range(6)])  # (d+1)(d+2)/2

f1 = hirzebruch(1)
L = bidegree_class(f1, 1, 2)  # S + 2F, ample
print("self-intersections on F1:", [f1.self_intersection(i) for i in range(4)])
print("h0(n L) on F1:", [h0(n * L) for n in range(1, 6)])

# %% [markdown]
# The ratio S_n / (n h0(nL)) approaches nu(L; E). For L = O(4) and a line
# E on P2 the limit is 4/3, and the closed-form lower bound is 7/6.

# %%
L, E = degree_class(p2, 4), degree_class(p2, 1)
window = windowed_nu(ToricPairProvider(L, E), 10, 40)
print("min over n in [10, 40]:", float(window.minimum), "at n =", window.argmin)
pair = SurfacePair(intersection_number(L, L), intersection_number(L, E), intersection_number(E, E))
print("lower bound:", nu_lower_bound(pair))
assert window.minimum >= nu_lower_bound(pair)
assert window.values[40] == Fraction(4, 3)
