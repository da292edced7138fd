# # Solving for multiplicities on random intersection forms
#
# Any symmetric positive integer matrix whose 2x2 minors satisfy the Hodge
# inequality is accepted. The ampleness of the underlying divisors is then
# the user's claim, and the certificate records it.

# %%
import numpy as np

from nucert.intersection_core import IntersectionForm, validate_form
from nucert.multiplicity_solver import certify, solve_fixed_point

form = IntersectionForm([[3, 4, 6], [4, 2, 6], [6, 6, 9]])
print(validate_form(form).ok)

fp = solve_fixed_point(form)
print("x =", np.round(fp.x.coords, 6), "residual", fp.residual, "via", fp.method)

# %%
cert = certify(form)
print("m =", cert.m, "over", cert.denominator)
print("margins:", [float(mg) for mg in cert.margins])

# %% [markdown]
# A form that breaks the Hodge inequality is rejected before any solving.

# %%
bad = IntersectionForm([[2, 1], [1, 2]])
for v in validate_form(bad).violations:
    print(v)
