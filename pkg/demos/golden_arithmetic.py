# Exact arithmetic in Q(sqrt 5)
#
# Every number the matrices produce lives in the golden field, so nothing
# has to be rounded until a norm or an angle is taken.

# %%
from nuetrack.exactnum import c_value, fibonacci, golden_phi, to_approx

phi = golden_phi()
print("phi =", phi)
print("phi^2 - phi - 1 =", phi * phi - phi - 1)

# %%
# The block constants c(a) = (2/sqrt5) phi^(2a) grow by phi^2 at each step
# and sit just above twice an even-index Fibonacci number.

for a in range(6):
    c = c_value(a)
    print(a, c, "ratio to 2F(2a):", float(c) / (2 * fibonacci(2 * a)) if a else "-")

# %%
# Converting to a float comes with an enclosure. Raising the precision
# shrinks the interval and keeps it inside the old one.

coarse, fine = to_approx(c_value(10), 64), to_approx(c_value(10), 256)
print(coarse)
print(fine)
print("nested:", coarse.encloses(fine))
