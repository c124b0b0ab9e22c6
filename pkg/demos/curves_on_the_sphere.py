# Curves on the seven-punctured sphere
#
# Curves are normal coordinates on a fixed ideal triangulation. Intersection
# numbers come from curver and are checked against crossings of geodesic
# representatives computed here.

# %%
from nuetrack.curves import (
    RHO,
    TAU,
    alpha,
    apply,
    carried_weights,
    crossing_number,
    fills,
    gamma,
    gamma0,
    intersection,
)

for i in range(6):
    print(f"alpha_{i}", alpha(i).coords)

# %%
print("i(alpha_0, alpha_1) =", intersection(alpha(0), alpha(1)))
print("i(alpha_0, alpha_3) =", intersection(alpha(0), alpha(3)), "crossings", crossing_number(alpha(0), alpha(3)))
print("rho^7 alpha_0 == alpha_0:", apply(RHO ** 7, alpha(0)) == alpha(0))
print("tau alpha_1 == alpha_1:", apply(TAU, alpha(1)) == alpha(1))

# %%
report = fills(alpha(0), alpha(5))
print("alpha_0 and alpha_5 fill:", report.fills)
for comp in report.components:
    print("  punctures", comp.punctures, "boundaries", comp.boundary_components)

# %%
# gamma_0 and its images sit on the train track with the weights the
# matrices predict.

print("gamma_0 weights", list(carried_weights(gamma0())))
for n in range(1, 5):
    print(f"gamma_{n}", list(carried_weights(gamma(n))))
print("alpha_0 carried:", carried_weights(alpha(0)))
