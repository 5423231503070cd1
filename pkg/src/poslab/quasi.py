"""Subset families of [r], closures, Q-vanishing search and the H_Q gadget.

Families use 1-based coordinates, as in ``[[1, 2], [3]]``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import BudgetExceeded, PreconditionError, UniformityError
from .structures import Hypergraph


@dataclass(frozen=True)
class SubsetFamily:
    """Ordered family Q_1..Q_q of non-empty proper subsets of {1..r}."""

    r: int
    members: tuple[frozenset[int], ...]

    def __init__(self, r: int, members: Iterable[Iterable[int]]):
        ms = tuple(frozenset(m) for m in members)
        full = frozenset(range(1, r + 1))
        for m in ms:
            if not m or not m < full:
                raise PreconditionError(f"{sorted(m)} is not a non-empty proper subset of [{r}]")
        if len(set(ms)) != len(ms):
            raise PreconditionError("family members must be distinct")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "members", ms)

    @property
    def q(self) -> int:
        return len(self.members)

    def degree(self, i: int) -> int:
        return sum(i in m for m in self.members)

    def to_json(self) -> str:
        return json.dumps([sorted(m) for m in self.members])

    @classmethod
    def from_json(cls, r: int, text: str) -> "SubsetFamily":
        return cls(r, json.loads(text))


def closure(family: SubsetFamily) -> frozenset[frozenset[int]]:
    """All non-empty subsets of members of the family."""
    out = set()
    for m in family.members:
        items = sorted(m)
        for size in range(1, len(items) + 1):
            out.update(frozenset(c) for c in itertools.combinations(items, size))
    return frozenset(out)


def cycle_family(r: int) -> SubsetFamily:
    """{[r-1]} together with every (r-2)-subset of [r]."""
    members = [tuple(range(1, r))] + list(itertools.combinations(range(1, r + 1), r - 2))
    return SubsetFamily(r, members)


# ---------------------------------------------------------------------------
# Q-vanishing


@dataclass(frozen=True)
class VanishingCertificate:
    edge: tuple[int, ...]
    phi: dict  # vertex of ``edge`` -> coordinate in 1..r
    covers: tuple[tuple[tuple[int, ...], frozenset[int]], ...]  # (other edge, covering member)

    def validate(self, h: Hypergraph, family: SubsetFamily) -> bool:
        if self.edge not in h.edge_set():
            return False
        if sorted(self.phi) != list(self.edge) or sorted(self.phi.values()) != list(range(1, h.r + 1)):
            return False
        covered = {e: m for e, m in self.covers}
        for e in h.edges:
            if e == self.edge:
                continue
            inter = set(e) & set(self.edge)
            if not inter:
                continue
            m = covered.get(e)
            if m is None or m not in family.members:
                return False
            if not {self.phi[x] for x in inter} <= m:
                return False
        return True

    def to_dict(self) -> dict:
        return {
            "edge": list(self.edge),
            "phi": {str(k): v for k, v in self.phi.items()},
            "covers": [[list(e), sorted(m)] for e, m in self.covers],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "VanishingCertificate":
        return cls(
            tuple(data["edge"]),
            {int(k): int(v) for k, v in data["phi"].items()},
            tuple((tuple(e), frozenset(m)) for e, m in data["covers"]),
        )


def q_vanishing(
    h: Hypergraph, family: SubsetFamily, max_r: int = 7, max_edges: int = 20
) -> Optional[VanishingCertificate]:
    """Exhaustive search for a distinguished edge and bijection witnessing Q-vanishing.

    Only edges other than the distinguished one with a non-empty
    intersection constrain the search, so ``None`` proves non-vanishing.
    """
    if h.r != family.r:
        raise UniformityError(f"uniformity mismatch: {h.r} vs {family.r}")
    if h.r > max_r or h.e > max_edges:
        raise BudgetExceeded(f"q_vanishing budget is r <= {max_r}, e <= {max_edges}")
    r = h.r
    # closure membership as bitmasks over coordinates 0..r-1
    closed = {sum(1 << (i - 1) for i in f) for f in closure(family)}
    member_masks = [(sum(1 << (i - 1) for i in m), m) for m in family.members]
    perms = list(itertools.permutations(range(r)))
    for star in h.edges:
        pos = {x: i for i, x in enumerate(star)}
        others = []
        for e in h.edges:
            if e == star:
                continue
            inter = [pos[x] for x in e if x in pos]
            if inter:
                others.append((e, inter))
        patterns = sorted({tuple(sorted(p)) for _, p in others}, key=len, reverse=True)
        for perm in perms:
            if all(sum(1 << perm[i] for i in p) in closed for p in patterns):
                covers = []
                for e, inter in others:
                    mask = sum(1 << perm[i] for i in inter)
                    member = next(m for mm, m in member_masks if mask & ~mm == 0)
                    covers.append((e, member))
                phi = {x: perm[i] + 1 for x, i in pos.items()}
                return VanishingCertificate(star, phi, tuple(covers))
    return None


# ---------------------------------------------------------------------------
# H_Q


def hq_vertex_labels(r: int, family: SubsetFamily) -> list[tuple[int, tuple[int, ...]]]:
    """Vertex labels ``(i, signs)`` of H_Q in index order.

    ``signs`` lists the +-1 entries of the vector on the coordinates j with
    i not in Q_j (the non-zero coordinates), in increasing j.
    """
    labels = []
    for i in range(1, r + 1):
        free = [j for j, m in enumerate(family.members) if i not in m]
        labels += [(i, s) for s in itertools.product((1, -1), repeat=len(free))]
    return labels


def build_hq(r: int, family: SubsetFamily, max_r: int = 6, max_q: int = 5) -> Hypergraph:
    """The r-partite r-graph H_Q with one edge per sign vector in {+1,-1}^q."""
    if family.r != r:
        raise UniformityError(f"family lives on [{family.r}], not [{r}]")
    if r > max_r or family.q > max_q:
        raise BudgetExceeded(f"build_hq budget is r <= {max_r}, q <= {max_q}")
    labels = hq_vertex_labels(r, family)
    index = {lab: n for n, lab in enumerate(labels)}
    free = {i: [j for j, m in enumerate(family.members) if i not in m] for i in range(1, r + 1)}
    edges = []
    for v in itertools.product((1, -1), repeat=family.q):
        edges.append(tuple(index[(i, tuple(v[j] for j in free[i]))] for i in range(1, r + 1)))
    return Hypergraph(r, len(labels), tuple(edges))


def hq_pair_intersection_check(h: Hypergraph) -> bool:
    """Is there an edge order where each edge meets the earlier ones in at most one (r-1)-set?

    Counts distinct (r-1)-sets among the intersections with earlier edges.
    Depth-first search over orders; failed sets of placed edges are memoised.
    """
    r = h.r
    m = h.e
    shared: list[list[tuple[int, frozenset]]] = [[] for _ in range(m)]
    for a, b in itertools.combinations(range(m), 2):
        inter = frozenset(h.edges[a]) & frozenset(h.edges[b])
        if len(inter) == r - 1:
            shared[a].append((b, inter))
            shared[b].append((a, inter))
    full = (1 << m) - 1
    failed: set[int] = set()

    def ok(i: int, placed: int) -> bool:
        sets = {s for j, s in shared[i] if placed >> j & 1}
        return len(sets) <= 1

    def rec(placed: int) -> bool:
        if placed == full:
            return True
        if placed in failed:
            return False
        # edges with fewer earlier (r-1)-intersections first
        cands = [i for i in range(m) if not placed >> i & 1 and ok(i, placed)]
        cands.sort(key=lambda i: len(shared[i]))
        for i in cands:
            if rec(placed | 1 << i):
                return True
        failed.add(placed)
        return False

    return rec(0)
