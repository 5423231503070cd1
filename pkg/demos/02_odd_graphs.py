# %% [markdown]
# Non-positivity of graphs whose degrees are all odd
#
# For such a graph the witness kernel is built from the smallest root of the
# independence polynomial.  The certificate is a single exact rational.

# %%
import json
from fractions import Fraction

from poslab.indpoly import (
    certify_nonpositive_odd,
    independence_polynomial,
    levi_nonpositivity,
    odd_witness_kernel,
    smallest_root_bracket,
)
from poslab.kernels import density
from poslab.structures import complete_graph, petersen_graph, star_graph, tight_cycle

# %%
for name, g in [("K2", complete_graph(2)), ("K1,3", star_graph(3)), ("Petersen", petersen_graph())]:
    p = independence_polynomial(g)
    lo, hi = smallest_root_bracket(p, Fraction(1, 1000))
    cert = certify_nonpositive_odd(g)
    print(f"{name:9s} I = {[str(c) for c in p.coeffs]}")
    print(f"{'':9s} root in ({float(lo):.4f}, {float(hi):.4f}), alpha = {cert.alpha}, t = {cert.density}")

# %%
# any alpha below the root also works; two hand-picked values
print(density(complete_graph(2), odd_witness_kernel(complete_graph(2), Fraction(2, 5))))
print(density(star_graph(3), odd_witness_kernel(star_graph(3), Fraction(1, 4))))

# %%
# hypergraphs whose vertex-edge incidence graph has odd degrees inherit the certificate
cert = levi_nonpositivity(tight_cycle(3, 5))
print("C5^(3) Levi witness:", cert.density, cert.validate())
print(json.dumps(cert.to_dict())[:120], "...")
