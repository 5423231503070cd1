# %% [markdown]
# Fourier bounds on H-codes
#
# Graphs on [n] are bit vectors of length C(n, 2).  The Walsh-Hadamard spectrum
# of the copy indicator bounds the density of codes avoiding copies of H.

# %%
from fractions import Fraction

from poslab import graphcodes as G
from poslab.structures import complete_graph, path_graph

# %%
k3 = complete_graph(3)
for n in (4, 5, 6):
    copies, table = G.spectrum(k3, n)
    full = G.GraphVector.complete(n)
    print(f"n={n}: {len(copies)} triangles, coefficient at K_n = {table.exact(full.bits)}")

# %%
for n in (4, 5, 6, 7):
    b = G.code_density_bound(path_graph(3), n)
    print(f"P3, n={n}: bound {b.bound}  (argmin {b.argmin.to_hex()})")

# %%
for n in (3, 4):
    size, code = G.bruteforce_max_code(k3, n)
    print(f"largest triangle code on {n} vertices: {size} = {Fraction(size, 2 ** G.num_pairs(n))} of all graphs")

# %%
# a large negative coefficient refutes positivity through the signed kernel
res = G.positivity_refutation_from_fourier(k3, 55, G.GraphVector.complete(55))
print("n=55 refutation density:", res.density)
