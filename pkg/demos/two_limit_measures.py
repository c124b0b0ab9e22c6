# Two limits that never meet
#
# Normalized weight vectors of even-index curves converge, and so do those of
# odd-index curves. The two limits point in different directions.

# %%
from nuetrack.ergodicity import (
    Parity,
    asymmetry_product,
    cone_interval_distance,
    measure_pair,
    projective_distinctness,
)
from nuetrack.traintrack import GapSequence

seq = GapSequence.default()
pair = measure_pair(8, seq)
for name, res in (("even", pair.even), ("odd", pair.odd)):
    print(name, [float(x.value) for x in res.vector])
    print("  stage residuals", [float(r.value) for r in res.residuals])

# %%
cert = projective_distinctness(pair)
print("angle", cert.angle, cert.verdict)

# %%
# Pairing a curve with the limit of the same parity gives exactly 1. Across
# parities the pairing is a golden monomial that shrinks with the index.

for i in range(4, 9):
    same = asymmetry_product(Parity.EVEN, Parity.EVEN, i, seq)
    cross = asymmetry_product(Parity.EVEN, Parity.ODD, i, seq)
    print(i, same, cross)

# %%
# The image of the positive orthant collapses onto the segment between the
# two directions.

for i in range(2, 7):
    print(i, float(cone_interval_distance(i, seq).distance))
