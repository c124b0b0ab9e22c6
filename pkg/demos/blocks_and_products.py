# From integer blocks to a rank-one limit
#
# P(a, a') = A^a M A^a' M is an integer matrix. Dividing by the larger block
# constant gives R_i, and R_i tends to a fixed rank-one matrix L as the gaps
# grow.

# %%
from nuetrack.asymptotics import epsilon_norm, fit_constants, limit_matrix, matrix_rank, residual_grid, trace
from nuetrack.traintrack import GapSequence, block_P, top_eigenvalue

seq = GapSequence.default()
print("r_n:", seq.r[:8])
print(block_P(1, 3))

# %%
L = limit_matrix()
print("rank", matrix_rank(L), "trace", trace(L))

# %%
# The distance from R_i to L falls like phi^(-2 gap).

for i in range(2, 8):
    rep = epsilon_norm(i, seq)
    print(i, "gap", seq.gap(i), "|R_i - L| =", rep.norm, "ratio to benchmark", float(rep.ratio.value))

# %%
# Products R_i R_(i+2) ... stay close to L, and the two residual bounds hold
# with one constant each over the whole grid.

fit = fit_constants(residual_grid(seq, range(2, 6), range(0, 4)))
print("C =", float(fit.C), "C' =", float(fit.C_prime), "smallest product norm", float(fit.floor))

# %%
# The top eigenvalue of each block is close to twice a Fibonacci number.

lam = top_eigenvalue(block_P(2, 6), 128)
print(lam)
