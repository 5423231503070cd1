"""Local non-Sidorenko certificates and a witness search for negative densities.

The certificate compares ``t_H(1 + eps * W (x) U)`` with the single-edge
density raised to e(H), both evaluated exactly through the expansion over
edge subsets and the product rule ``t_F(W (x) U) = t_F(W) t_F(U)``.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import kernels as K
from .errors import BudgetExceeded, PreconditionError, UniformityError
from .indpoly import OddCertificate, levi_nonpositivity
from .kernels import StepKernel, density
from .quasi import SubsetFamily, VanishingCertificate, cycle_family, q_vanishing
from .structures import Hypergraph, edge_subgraphs, grid, is_linear_and_regular, single_edge, tight_cycle
from .tournaments import build_g, copy_system, sample_tournament

# ---------------------------------------------------------------------------
# gradients


def symmetry_classes(k: int, r: int) -> tuple[list[tuple[int, ...]], np.ndarray]:
    """Sorted index tuples and the array mapping each ordered tuple to its class."""
    classes = list(itertools.combinations_with_replacement(range(k), r))
    pos = {c: i for i, c in enumerate(classes)}
    index = np.empty((k,) * r, dtype=np.int64)
    for t in itertools.product(range(k), repeat=r):
        index[t] = pos[tuple(sorted(t))]
    return classes, index


def _edge_marginals(h: Hypergraph, values: np.ndarray, weights: np.ndarray, budget: int) -> np.ndarray:
    """Sum over edges e of the contraction of H - e with e's vertices left open."""
    total = None
    for i, e in enumerate(h.edges):
        m = K.contract(h, values, weights, open_=e, skip_edge=i, budget=budget)
        total = m if total is None else total + m
    return total


def gradient(h: Hypergraph, w: StepKernel, budget: int = K.DEFAULT_BUDGET) -> dict[tuple[int, ...], Fraction]:
    """Exact partial derivatives of t_H(W) in the symmetric value parameters.

    The parameter for a class c (a sorted index tuple) sets the kernel value
    on every ordering of c at once; measures are held fixed.
    """
    if h.r != w.r:
        raise UniformityError(f"uniformity mismatch: {h.r} vs {w.r}")
    classes, index = symmetry_classes(w.k, w.r)
    if not h.edges:
        return {c: Fraction(0) for c in classes}
    vals, wts, mden, n_active = K._scaled(h, w)
    marg = _edge_marginals(h, vals, wts, budget)
    scale = mden**n_active * w.den ** (h.e - 1)
    sums = [0] * len(classes)
    for t in itertools.product(range(w.k), repeat=w.r):
        sums[index[t]] += int(marg[t])
    return {c: Fraction(s, scale) for c, s in zip(classes, sums)}


def float_value_and_gradients(h: Hypergraph, values: np.ndarray, weights: np.ndarray, budget: int = K.DEFAULT_BUDGET):
    """Float density, gradient over ordered value tuples, gradient over part weights."""
    t = float(K.contract(h, values, weights, budget=budget))
    g_vals = _edge_marginals(h, values, weights, budget)
    g_w = np.zeros(len(weights))
    for x in h.non_isolated():
        g_w += K.contract(h, values, weights, open_=(x,), skip_weight=x, budget=budget)
    return t, g_vals, g_w


# ---------------------------------------------------------------------------
# optimizer


@dataclass
class MinimizeResult:
    kernel: StepKernel
    value: Fraction
    float_value: float
    success: bool
    exhausted: bool
    restarts: int
    history: list = field(default_factory=list, repr=False)


def _round_kernel(r: int, theta: np.ndarray, z: np.ndarray, classes, index, denom: int) -> StepKernel:
    vals = []
    for x in theta:
        if abs(x - 1) < 1e-3:
            vals.append(Fraction(1))
        elif abs(x + 1) < 1e-3:
            vals.append(Fraction(-1))
        else:
            vals.append(min(max(Fraction(float(x)).limit_denominator(denom), Fraction(-1)), Fraction(1)))
    m = np.exp(z - z.max())
    m /= m.sum()
    ms = [max(Fraction(float(x)).limit_denominator(denom), Fraction(1, denom)) for x in m]
    total = sum(ms)
    ms = [x / total for x in ms]
    full = np.empty(index.shape, dtype=object)
    for t in itertools.product(range(len(ms)), repeat=r):
        full[t] = vals[index[t]]
    return StepKernel(r, ms, full)


def _descend(h, k, rng, steps, classes, index, budget):
    theta = rng.uniform(-1, 1, len(classes))
    z = rng.normal(0, 0.3, k)
    lr = 0.5
    evals = 0

    def evaluate(theta, z):
        m = np.exp(z - z.max())
        m /= m.sum()
        t, gv, gw = float_value_and_gradients(h, theta[index], m, budget)
        g_theta = np.bincount(index.ravel(), weights=gv.ravel(), minlength=len(classes))
        g_z = m * (gw - m @ gw)
        return t, g_theta, g_z

    t, g_theta, g_z = evaluate(theta, z)
    evals += 1
    for _ in range(steps):
        new_theta = np.clip(theta - lr * g_theta, -1, 1)
        new_z = z - lr * g_z
        t_new, g2_theta, g2_z = evaluate(new_theta, new_z)
        evals += 1
        if t_new < t:
            theta, z, t, g_theta, g_z = new_theta, new_z, t_new, g2_theta, g2_z
            lr = min(lr * 1.5, 10.0)
        else:
            lr *= 0.5
            if lr < 1e-9:
                break
    return theta, z, t, evals


def minimize_density(
    h: Hypergraph,
    k: int,
    restarts: int = 8,
    steps: int = 300,
    seed: int = 0,
    max_evals: Optional[int] = None,
    denom: int = 1024,
    workers: Optional[int] = None,
    budget: int = K.DEFAULT_BUDGET,
) -> MinimizeResult:
    """Multi-start projected gradient descent for a step kernel with small t_H.

    Values live in [-1, 1] (clipped after each step); part measures are a
    softmax of free logits.  Each run is rounded to rationals and re-evaluated
    exactly; the best exact value wins.  ``success`` means that value is
    negative.  A heuristic: failure says nothing about positivity.
    """
    classes, index = symmetry_classes(k, h.r)
    seeds = np.random.SeedSequence(seed).spawn(restarts)
    if workers is None:
        workers = int(os.environ.get("POSLAB_THREADS", "1"))
    per_run = steps + 1
    runs = restarts
    exhausted = False
    if max_evals is not None and max_evals < restarts * per_run:
        runs = max(1, max_evals // per_run)
        exhausted = True

    def run(i):
        rng = np.random.Generator(np.random.Philox(seeds[i]))
        theta, z, t, _ = _descend(h, k, rng, steps, classes, index, budget)
        kern = _round_kernel(h.r, theta, z, classes, index, denom)
        return t, kern, density(h, kern, budget)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(runs)))
    else:
        results = [run(i) for i in range(runs)]
    best = min(range(runs), key=lambda i: (results[i][2], i))
    t, kern, value = results[best]
    history = [(float(v), ft) for ft, _, v in results]
    return MinimizeResult(kern, value, t, value < 0, exhausted, runs, history)


# ---------------------------------------------------------------------------
# certificates


def _min_product(w: StepKernel, u: StepKernel) -> Fraction:
    wv = [Fraction(int(w.num.min()), w.den), Fraction(int(w.num.max()), w.den)]
    uv = [Fraction(int(u.num.min()), u.den), Fraction(int(u.num.max()), u.den)]
    return min(a * b for a in wv for b in uv)


@dataclass(frozen=True)
class NonSidorenkoCertificate:
    """Exact comparison of t_H(K) with t_edge(K)^e(H) for K = 1 + eps * W (x) U.

    With ``witness`` None the kernel is ``1 + eps * U`` (the branch where
    t_G(U) itself is negative).
    """

    target: Hypergraph
    subgraph: Hypergraph
    witness: Optional[StepKernel]
    quasi: StepKernel
    eps: Fraction
    lhs: Fraction
    rhs: Fraction
    witness_density: Fraction
    nonnegative: bool

    @property
    def valid(self) -> bool:
        return self.nonnegative and self.lhs < self.rhs

    def kernel(self) -> StepKernel:
        base = self.quasi if self.witness is None else K.tensor(self.witness, self.quasi)
        return K.perturb(base, self.eps)

    def direct_lhs(self, budget: int = K.DEFAULT_BUDGET) -> Fraction:
        return density(self.target, self.kernel(), budget)

    def validate(self) -> bool:
        again = nonsidorenko_certificate(self.target, self.subgraph.edges, self.witness, self.quasi, self.eps)
        return again == self and again.valid

    def to_dict(self) -> dict:
        return {
            "kind": "nonsidorenko",
            "target": self.target.to_text(),
            "subgraph_edges": [list(e) for e in self.subgraph.edges],
            "witness": None if self.witness is None else self.witness.to_dict(),
            "quasi": self.quasi.to_dict(),
            "eps": str(self.eps),
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "witness_density": str(self.witness_density),
            "nonnegative": self.nonnegative,
            "valid": self.valid,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NonSidorenkoCertificate":
        target = Hypergraph.from_text(data["target"])
        return cls(
            target=target,
            subgraph=target.with_edges(tuple(e) for e in data["subgraph_edges"]),
            witness=None if data["witness"] is None else StepKernel.from_dict(data["witness"]),
            quasi=StepKernel.from_dict(data["quasi"]),
            eps=Fraction(data["eps"]),
            lhs=Fraction(data["lhs"]),
            rhs=Fraction(data["rhs"]),
            witness_density=Fraction(data["witness_density"]),
            nonnegative=bool(data["nonnegative"]),
        )


def nonsidorenko_certificate(
    h: Hypergraph,
    subgraph_edges: Sequence,
    w: Optional[StepKernel],
    u: StepKernel,
    eps,
    budget: int = K.DEFAULT_BUDGET,
) -> NonSidorenkoCertificate:
    """Evaluate both sides of the perturbation comparison exactly.

    ``w`` must have t_G(w) < 0 for the subgraph G; with ``w`` None, u itself
    must satisfy t_G(u) < 0.
    """
    eps = Fraction(eps)
    if u.r != h.r or (w is not None and w.r != h.r):
        raise UniformityError("kernels and hypergraph must share the uniformity")
    sub = h.with_edges(subgraph_edges)
    if not set(sub.edges) <= set(h.edges) or not sub.edges:
        raise PreconditionError("subgraph must be a non-empty set of edges of the target")
    edge = single_edge(h.r)
    lhs = Fraction(1)
    if w is not None:
        g_density = density(sub, w, budget)
        if g_density >= 0:
            raise PreconditionError(f"witness must have negative density on the subgraph, got {g_density}")
        for f in edge_subgraphs(h):
            tu = density(f, u, budget)
            if tu:
                lhs += tu * density(f, w, budget) * eps**f.e
        rhs = (1 + eps * density(edge, w) * density(edge, u)) ** h.e
        nonneg = 1 + eps * _min_product(w, u) >= 0
    else:
        g_density = density(sub, u, budget)
        if g_density >= 0:
            raise PreconditionError(f"without a witness, t_G(U) must be negative, got {g_density}")
        lhs = K.expansion_density(h, u, eps, budget)
        rhs = (1 + eps * density(edge, u)) ** h.e
        nonneg = 1 + eps * Fraction(int(u.num.min()), u.den) >= 0
    return NonSidorenkoCertificate(h, sub, w, u, eps, lhs, rhs, g_density, bool(nonneg))


def find_epsilon(
    h: Hypergraph,
    subgraph_edges: Sequence,
    w: Optional[StepKernel],
    u: StepKernel,
    max_power: int = 20,
    budget: int = K.DEFAULT_BUDGET,
) -> Optional[NonSidorenkoCertificate]:
    """First eps in 1/2, 1/4, ..., 2^-max_power giving a valid certificate."""
    for j in range(1, max_power + 1):
        cert = nonsidorenko_certificate(h, subgraph_edges, w, u, Fraction(1, 2**j), budget)
        if cert.valid:
            return cert
    return None


# ---------------------------------------------------------------------------
# demos


def parity_chain(h: Hypergraph) -> list[tuple[tuple, Fraction, bool]]:
    """For every non-empty edge subset F: (edges, t_F(parity kernel), all degrees even)."""
    u = K.parity_kernel(h.r)
    out = []
    for f in edge_subgraphs(h):
        out.append((f.edges, density(f, u), all(d % 2 == 0 for d in f.degrees())))
    return out


def grid_demo(r: int = 3, k: int = 2, seed: int = 0, restarts: int = 8, steps: int = 300) -> dict:
    """Parity-kernel chain for the grid plus an exploratory witness search."""
    h = grid(r)
    linear, regular = is_linear_and_regular(h)
    chain = parity_chain(h)
    agree = all((t == 1) == even and t in (0, 1) for _, t, even in chain)
    ones = [edges for edges, t, _ in chain if t == 1]
    search = minimize_density(h, k, restarts=restarts, steps=steps, seed=seed)
    report = {
        "r": r,
        "linear": linear,
        "regular_degree": regular,
        "subsets": len(chain),
        "parity_matches_even_degrees": agree,
        "subsets_with_parity_density_one": len(ones),
        "only_full_grid_is_one": ones == [h.edges],
        "witness_search": {
            "k": k,
            "seed": seed,
            "best_value": str(search.value),
            "best_float": search.float_value,
            "negative_found": search.success,
        },
        "certificate": None,
    }
    if search.success:
        cert = find_epsilon(h, h.edges, search.kernel, K.parity_kernel(r))
        report["certificate"] = None if cert is None else cert.to_dict()
    return report


def _cycle_edge(r: int, length: int, i: int) -> tuple[int, ...]:
    return tuple(sorted((i + j) % length for j in range(r)))


def _dihedral_canonical(mask: int, r: int, length: int) -> int:
    best = mask
    idx = [i for i in range(length) if mask >> i & 1]
    for shift in range(length):
        rot = sum(1 << ((i + shift) % length) for i in idx)
        ref = sum(1 << ((-i - r + 1 + shift) % length) for i in idx)
        best = min(best, rot, ref)
    return best


def tight_path(r: int, length: int, j: int) -> Hypergraph:
    """The first j consecutive edges of the tight cycle, on all ``length`` vertices."""
    return Hypergraph(r, length, tuple(_cycle_edge(r, length, i) for i in range(j)))


def cycle_demo(
    r: int,
    length: int,
    n: int = 12,
    seed: int = 0,
    trend_ns: Optional[Sequence[int]] = None,
    max_path: Optional[int] = None,
) -> dict:
    """Evidence bundle for the tight cycle C_length^(r), r odd.

    1. exact negative witness density for the Levi graph;
    2. Q-vanishing certificates for every proper non-empty edge subset
       (one per orbit under rotations and reflections of the cycle);
    3. the full cycle is not Q-vanishing;
    4. exact labelled-copy probability against the random bound;
    5. exact |t_F(U_n)| for tight paths F at finite n, U_n = G(T_n) - p_n.
    """
    if r % 2 == 0 or r not in (3, 5):
        raise PreconditionError("cycle demo supports r in {3, 5}")
    if length > 15 or length <= r:
        raise PreconditionError("need r < length <= 15")
    if n > 16:
        raise BudgetExceeded("exact finite-n kernels need n <= 16")
    c = tight_cycle(r, length)
    family = cycle_family(r)

    levi_cert = levi_nonpositivity(c)

    orbits = sorted({_dihedral_canonical(m, r, length) for m in range(1, (1 << length) - 1)})
    vanishing = {}
    for m in orbits:
        sub = c.with_edges(_cycle_edge(r, length, i) for i in range(length) if m >> i & 1)
        vanishing[m] = q_vanishing(sub, family)
    full = q_vanishing(c, family)

    system = copy_system(c)
    rank, consistent = system.eliminate()
    prob = system.probability()
    bound = Fraction(1, 2 ** ((r - 1) * length))

    if trend_ns is None:
        trend_ns = sorted({max(r + 2, n // 2), max(r + 3, 3 * n // 4), n})
    if max_path is None:
        max_path = min(length - 1, 4)
    paths = list(range(2, max_path + 1))
    seeds = np.random.SeedSequence(seed).spawn(len(trend_ns))
    trend = []
    for nn, ss in zip(trend_ns, seeds):
        tour = sample_tournament(r - 1, nn, int(ss.generate_state(1)[0]))
        g_kernel = K.kernel_of(build_g(tour))
        p = g_kernel.mean()
        u = K.center(g_kernel, p)
        row = {"n": nn, "edge_density": str(p)}
        for j in paths:
            row[f"path{j}"] = float(abs(density(tight_path(r, length, j), u)))
        trend.append(row)
    decay = {
        f"path{j}": trend[-1][f"path{j}"] < trend[0][f"path{j}"] for j in paths
    }

    return {
        "r": r,
        "length": length,
        "levi": {
            "vertices": levi_cert.graph.v,
            "alpha": str(levi_cert.alpha),
            "density": str(levi_cert.density),
            "negative": levi_cert.density < 0,
        },
        "q_vanishing": {
            "family": [sorted(m) for m in family.members],
            "proper_subsets": (1 << length) - 2,
            "orbits": len(orbits),
            "certified_orbits": sum(v is not None for v in vanishing.values()),
            "full_cycle_vanishing": full is not None,
        },
        "copy_probability": {
            "rank": rank,
            "consistent": consistent,
            "probability": str(prob),
            "random_bound": str(bound),
            "ratio": str(prob / bound) if bound else None,
            "log2_probability": -rank if consistent else None,
        },
        "finite_n": {"seed": seed, "rows": trend, "decreasing": decay},
    }


def cycle_summary(report: dict) -> str:
    q = report["q_vanishing"]
    cp = report["copy_probability"]
    lines = [
        f"tight cycle r={report['r']} length={report['length']}",
        f"  Levi graph on {report['levi']['vertices']} vertices: alpha={report['levi']['alpha']}"
        f" density={report['levi']['density']}",
        f"  Q-vanishing: {q['certified_orbits']}/{q['orbits']} subset orbits certified;"
        f" full cycle vanishing: {q['full_cycle_vanishing']}",
        f"  copy probability {cp['probability']} vs random bound {cp['random_bound']} (ratio {cp['ratio']})",
    ]
    for row in report["finite_n"]["rows"]:
        vals = ", ".join(f"{k}={v:.3e}" for k, v in row.items() if k.startswith("path"))
        lines.append(f"  n={row['n']}: {vals}")
    return "\n".join(lines)
