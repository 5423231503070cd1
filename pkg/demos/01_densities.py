# %% [markdown]
# Homomorphism densities in step kernels
#
# Every density in the library is an exact rational.  This script builds a few
# kernels and checks the numbers against plain homomorphism counts.

# %%
from fractions import Fraction

from poslab import kernels as K
from poslab.structures import complete_graph, cycle_graph, hom_count, petersen_graph, tight_cycle

# %%
# a 0/1 kernel of a graph gives hom(H, G) / v(G)^v(H)
g = petersen_graph()
for h in (complete_graph(2), cycle_graph(4), cycle_graph(5)):
    t = K.density(h, K.kernel_of(g))
    print(f"{h.e} edges: t = {t}  hom/v^v = {Fraction(hom_count(h, g), g.v ** h.v)}")

# %%
# a signed kernel: the triangle sees -1 at W = -1, the 4-cycle sees +1
w = K.constant_kernel(2, -1)
print("t(K3, -1) =", K.density(complete_graph(3), w))
print("t(C4, -1) =", K.density(cycle_graph(4), w))

# %%
# the parity kernel counts edge sets in which every degree is even
u = K.parity_kernel(3)
c6 = tight_cycle(3, 6)
print("t(C6^(3), parity) =", K.density(c6, u))
print("t(first edge, parity) =", K.density(c6.with_edges(c6.edges[:1]), u))

# %%
# densities multiply under tensor products, and 1 + eps*W expands over edge subsets
w = K.StepKernel(2, [Fraction(1, 3), Fraction(2, 3)], [[1, -1], [-1, Fraction(1, 2)]])
h = cycle_graph(4)
print(K.density(h, K.tensor(w, u := K.parity_kernel(2))), K.density(h, w) * K.density(h, u))
eps = Fraction(1, 5)
print(K.expansion_density(h, w, eps), K.density(h, K.perturb(w, eps)))
