# # Four lines in the projective plane
#
# The smallest interesting case: r = 4 lines in general position on P2.
# We build their intersection form, solve for the balanced weights,
# round to integer multiplicities and check the resulting inequalities
# exactly.

# %%
from fractions import Fraction

from nucert.multiplicity_solver import certify, integer_nu_bounds, verify_certificate
from nucert.toric_oracle import degree_class, intersection_form_of, projective_plane

p2 = projective_plane()
lines = [degree_class(p2, 1)] * 4
form = intersection_form_of(lines)
print(form.entries)  # every pair of lines meets once

# %% [markdown]
# By symmetry the fixed point is the barycenter, so the solver should
# return x = (1/4, 1/4, 1/4, 1/4) and the rounding m = (1, 1, 1, 1).

# %%
cert = certify(form, assumed_ample=False)
print("m =", cert.m, "denominator =", cert.denominator)
print("margins:", [str(mg) for mg in cert.margins])

# %%
# L = D_1 + ... + D_4 is O(4). The lower bound for nu(L; D_i) is 7/6 > m_i = 1.
print([str(b) for b in integer_nu_bounds(form, cert.m)])
assert verify_certificate(form, cert)
assert cert.margins == (Fraction(1, 6),) * 4
