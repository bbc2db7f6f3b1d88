# %% [markdown]
# # Three kinds of closure
#
# The dominant characteristic roots decide the shape of the closure:
#
# * modulus above one (or a repeated root on the circle): the values escape,
#   and the closure is a discrete set;
# * modulus below one: the values converge to 0, so the closure is the
#   sequence plus its limit;
# * modulus exactly one with simple roots: a trigonometric polynomial, whose
#   range supplies the intervals.

# %%
from recshape import closure_of, constant, cos_n, fibonacci, geometric, periodic_from_values

cases = {
    "fibonacci": fibonacci(),
    "halving": geometric(0.5),
    "constant 3": constant(3.0),
    "period 3": periodic_from_values([1.0, -2.0, 0.5]),
    "cos n": cos_n(),
}
for name, rec in cases.items():
    r = closure_of(rec)
    print(f"{name:12s} {r.classification.name:22s} {r.intervals.to_list()} {list(r.countable_extras)[:6]}")
