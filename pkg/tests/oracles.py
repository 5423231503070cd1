"""Slow, literal reference implementations used only by the tests."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


def density_bruteforce(r, v, edges, measures, value) -> Fraction:
    """Sum over all maps [v] -> [k]; ``value`` takes a tuple of part indices."""
    k = len(measures)
    total = Fraction(0)
    for phi in itertools.product(range(k), repeat=v):
        term = Fraction(1)
        for x in phi:
            term *= measures[x]
        for e in edges:
            term *= value(tuple(phi[x] for x in e))
            if term == 0:
                break
        total += term
    return total


def independent_set_counts(v, edges) -> list[int]:
    counts = [0] * (v + 1)
    for mask in range(1 << v):
        if all(not (mask >> a & 1 and mask >> b & 1) for a, b in edges):
            counts[bin(mask).count("1")] += 1
    while len(counts) > 1 and counts[-1] == 0:
        counts.pop()
    return counts


def perm_sign(seq) -> int:
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


def arrangement_sign(sigma: dict, arrangement) -> int:
    """Sign of an arbitrary arrangement of an s-set from the sorted-arrangement sign."""
    base = sigma[tuple(sorted(arrangement))]
    # parity of the permutation taking the sorted tuple to ``arrangement``
    order = sorted(arrangement)
    return base * perm_sign([order.index(x) for x in arrangement])


def is_edge_literal(sigma: dict, big_r) -> bool:
    r = len(big_r)
    for s_set in itertools.combinations(sorted(big_r), r - 2):
        weight = 0
        for x in big_r:
            if x in s_set:
                continue
            weight += arrangement_sign(sigma, tuple(s_set) + (x,))
        if weight != 0:
            return False
    return True


def copy_probability_literal(r, edges) -> Fraction:
    sets = sorted({t for e in edges for t in itertools.combinations(sorted(e), r - 1)})
    good = 0
    for bits in itertools.product((1, -1), repeat=len(sets)):
        sigma = dict(zip(sets, bits))
        if all(is_edge_literal(sigma, e) for e in edges):
            good += 1
    return Fraction(good, 2 ** len(sets))


def wht_direct(f) -> np.ndarray:
    size = len(f)
    out = np.zeros(size)
    for x in range(size):
        out[x] = sum((-1) ** bin(x & y).count("1") * f[y] for y in range(size))
    return out / size


def max_independent_set_milp(adj: list[set[int]]) -> int:
    from scipy.optimize import Bounds, LinearConstraint, milp

    n = len(adj)
    rows = [(a, b) for a in range(n) for b in adj[a] if a < b]
    A = np.zeros((len(rows), n))
    for i, (a, b) in enumerate(rows):
        A[i, a] = A[i, b] = 1
    res = milp(
        c=-np.ones(n),
        constraints=LinearConstraint(A, -np.inf, 1),
        integrality=np.ones(n),
        bounds=Bounds(0, 1),
    )
    return int(round(-res.fun))


def falling(n: int, k: int) -> int:
    return math.perm(n, k)
