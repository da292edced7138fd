# # Vanishing orders, adapted bases and the choice of b
#
# H0(P2, O(b)) has the monomial basis, and each monomial has a vanishing
# order along each coordinate line. The monomials are adapted to both
# filtrations at once, so the sum of orders equals sum_{mu>=1} h0(O(b) - mu D).

# %%
from fractions import Fraction

from nucert.filtration_model import (adapted_basis, epsilon_from_certificate, find_epsilon_b,
                                     from_toric, mu_sum, profile_sum)
from nucert.multiplicity_solver import certify
from nucert.toric_oracle import degree_class, intersection_form_of, projective_plane

p2 = projective_plane()
lines = {"D1": p2.ray_divisor(0), "D2": p2.ray_divisor(1)}
for b in range(1, 5):
    space = from_toric(degree_class(p2, b), lines)
    basis = adapted_basis(space, ("D1", "D2"))
    print(b, space.profiles["D1"], mu_sum(space, basis, "D1"), profile_sum(space, "D1"))

# %% [markdown]
# With four lines and m = (1, 1, 1, 1), look for the smallest b with
# S_b >= (1 + eps) h0(bL) m_i b for every i.

# %%
four = [degree_class(p2, 1)] * 4
cert = certify(intersection_form_of(four), assumed_ample=False)
eps = epsilon_from_certificate(cert)
print("eps =", eps)
result = find_epsilon_b(None, four, cert.m, eps)
print("b =", result.b, "sums", result.sums, "thresholds", [str(t) for t in result.thresholds])

# %%
# Too large an epsilon is refused: the lower bound 7/6 cannot certify nu > 7/5.
try:
    find_epsilon_b(None, four, cert.m, Fraction(2, 5))
except ValueError as exc:
    print(exc)
