# %% [markdown]
# Subset families, the gadget H_Q and Q-vanishing

# %%
import itertools

from poslab.quasi import SubsetFamily, build_hq, closure, hq_vertex_labels, q_vanishing
from poslab.structures import cycle_graph, graph, tight_cycle

# %%
fam = SubsetFamily(3, [[1, 2], [3]])
print("closure:", sorted(sorted(s) for s in closure(fam)))
hq = build_hq(3, fam)
labels = hq_vertex_labels(3, fam)
for e in hq.edges:
    print([labels[x] for x in e])

# %%
# a pendant edge on a 4-cycle vanishes for Q = {{1}}
pendant = graph(5, cycle_graph(4).edges + ((0, 4),))
cert = q_vanishing(pendant, SubsetFamily(2, [[1]]))
print("pendant C4:", cert.edge, cert.phi)

# %%
# every proper edge subset of the tight 6-cycle vanishes; the full cycle does not
c6 = tight_cycle(3, 6)
found = sum(
    q_vanishing(c6.with_edges(edges), fam) is not None
    for size in range(1, c6.e)
    for edges in itertools.combinations(c6.edges, size)
)
print(f"{found} of 62 proper subsets vanish; full cycle: {q_vanishing(c6, fam)}")
