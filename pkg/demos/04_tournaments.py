# %% [markdown]
# Hypergraphs from random tournaments
#
# Exact copy probabilities come from the rank of a linear system over GF(2);
# Monte Carlo on a sampled tournament should agree.

# %%
from fractions import Fraction

from poslab.quasi import SubsetFamily, build_hq
from poslab.structures import single_edge, tight_cycle
from poslab.tournaments import (
    CSV_HEADER,
    build_g,
    copy_probability_exact,
    copy_system,
    mc_density,
    sample_tournament,
)

# %%
tour = sample_tournament(2, 12, seed=5)
g = build_g(tour)
print(f"G(T_12) has {g.e} directed triangles out of 220 triples")

# %%
for r, length in [(3, 6), (3, 9), (5, 10), (7, 14)]:
    rank, ok = copy_system(tight_cycle(r, length)).eliminate()
    p = copy_probability_exact(tight_cycle(r, length))
    print(f"C_{length}^({r}): rank {rank}, probability {p}, random bound {Fraction(1, 2 ** ((r - 1) * length))}")

# %%
print(CSV_HEADER)
hq = build_hq(3, SubsetFamily(3, [[1, 2], [3]]))
for name, h in [("edge", single_edge(3)), ("H_Q", hq), ("C6", tight_cycle(3, 6))]:
    res = mc_density(h, 200, 50_000, seed=11)
    print(res.csv_row(name, 3), "exact:", float(copy_probability_exact(h)))
