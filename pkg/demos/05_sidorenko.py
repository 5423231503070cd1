# %% [markdown]
# Local non-Sidorenko certificates
#
# A kernel with negative density on a subgraph, combined with the parity
# kernel, perturbs the constant kernel into a counterexample for small eps.

# %%
from poslab import kernels as K
from poslab import sidorenko as S
from poslab.structures import complete_graph

# %%
res = S.minimize_density(complete_graph(3), 2, restarts=4, steps=200, seed=0)
print("minimum found:", res.value, "success:", res.success)

# %%
h = complete_graph(3)
cert = S.find_epsilon(h, h.edges, res.kernel, K.parity_kernel(2))
print(f"eps = {cert.eps}: lhs {cert.lhs} < rhs {cert.rhs} -> {cert.valid}")
print("replays:", cert.validate())

# %%
# the tight 6-cycle, end to end at n = 12
report = S.cycle_demo(3, 6, n=12, seed=0)
print(S.cycle_summary(report))

# %%
grid = S.grid_demo(3, k=2, seed=0, restarts=2, steps=60)
print({k: grid[k] for k in ("linear", "regular_degree", "only_full_grid_is_one", "witness_search")})
