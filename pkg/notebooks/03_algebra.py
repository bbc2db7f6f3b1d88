# %% [markdown]
# # Closure under sums, products, sections and interlacing
#
# Each operation yields another linear recurrence.  The characteristic
# polynomial of a sum divides the lcm of the parts; a product has roots at
# the pairwise products.

# %%
import numpy as np

from recshape import add, cos_n, fibonacci, geometric, interlace, multiply, reduce, section, verify_satisfies

a, b = fibonacci(), geometric(-0.5, 2.0)
n = 40

s = add(a, b)
p = multiply(cos_n(), b)
print("sum order", s.order, "residual", verify_satisfies(s, a.terms(n) + b.terms(n)))
print("product order", p.order, "residual", verify_satisfies(p, cos_n().terms(n) * b.terms(n)))

# %% [markdown]
# Splitting a sequence into its residue classes mod g and interlacing them
# again gives back the original values.

# %%
parts = [section(a, 3, k) for k in range(3)]
back = interlace(parts)
print(np.allclose(back.terms(30), a.terms(30)), back.order, reduce(back).order)
