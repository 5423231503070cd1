"""Uniform hypergraphs and the named constructions built on them.

Vertices are the integers ``0..v-1``; an edge is stored as a sorted tuple.
``r = 2`` is an ordinary simple graph.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .errors import BudgetExceeded, PreconditionError, UniformityError

Edge = tuple[int, ...]


@dataclass(frozen=True)
class Hypergraph:
    r: int
    v: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        if self.r < 2:
            raise PreconditionError(f"uniformity must be at least 2, got {self.r}")
        if self.v < 0:
            raise PreconditionError("vertex count must be non-negative")
        seen = set()
        normalized = []
        for e in self.edges:
            t = tuple(sorted(int(x) for x in e))
            if len(t) != self.r or len(set(t)) != self.r:
                raise PreconditionError(f"edge {e} does not have {self.r} distinct vertices")
            if t[0] < 0 or t[-1] >= self.v:
                raise PreconditionError(f"edge {e} has a vertex outside 0..{self.v - 1}")
            if t not in seen:
                seen.add(t)
                normalized.append(t)
        object.__setattr__(self, "edges", tuple(sorted(normalized)))

    @property
    def e(self) -> int:
        return len(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.v
        for e in self.edges:
            for x in e:
                deg[x] += 1
        return deg

    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    def with_edges(self, edges: Iterable[Iterable[int]]) -> "Hypergraph":
        """Same vertex set, different edges."""
        return Hypergraph(self.r, self.v, tuple(tuple(e) for e in edges))

    def non_isolated(self) -> list[int]:
        return [x for x, d in enumerate(self.degrees()) if d > 0]

    def to_text(self) -> str:
        lines = [f"{self.r} {self.v} {self.e}"]
        lines += [" ".join(str(x) for x in e) for e in self.edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Hypergraph":
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not rows or len(rows[0]) != 3:
            raise ValueError("header line must be 'r v m'")
        r, v, m = (int(t) for t in rows[0])
        body = rows[1:]
        if len(body) != m:
            raise ValueError(f"expected {m} edge lines, found {len(body)}")
        return cls(r, v, tuple(tuple(int(t) for t in row) for row in body))


def graph(v: int, edges: Iterable[Iterable[int]]) -> Hypergraph:
    return Hypergraph(2, v, tuple(tuple(e) for e in edges))


def complete_graph(n: int) -> Hypergraph:
    return graph(n, itertools.combinations(range(n), 2))


def path_graph(n: int) -> Hypergraph:
    return graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Hypergraph:
    return graph(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> Hypergraph:
    """K_{1,leaves} with centre 0."""
    return graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def petersen_graph() -> Hypergraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return graph(10, outer + spokes + inner)


def single_edge(r: int) -> Hypergraph:
    return Hypergraph(r, r, (tuple(range(r)),))


def tight_cycle(r: int, length: int) -> Hypergraph:
    """The r-uniform tight cycle on ``length`` cyclically ordered vertices."""
    if r < 3:
        raise PreconditionError("tight cycles need r >= 3")
    if length <= r:
        raise PreconditionError(f"tight cycle needs length > r, got length={length}, r={r}")
    edges = [tuple((i + j) % length for j in range(r)) for i in range(length)]
    return Hypergraph(r, length, tuple(edges))


def grid(r: int) -> Hypergraph:
    """Grid r-graph on [r]^2; vertex (i, j) is ``i*r + j``. Rows come first."""
    if r < 2:
        raise PreconditionError("grid needs r >= 2")
    rows = [tuple(i * r + j for j in range(r)) for i in range(r)]
    cols = [tuple(i * r + j for i in range(r)) for j in range(r)]
    return Hypergraph(r, r * r, tuple(rows + cols))


def levi(h: Hypergraph) -> Hypergraph:
    """Bipartite vertex-edge incidence graph.

    Original vertices keep their labels; the i-th edge of ``h`` (in stored
    order) becomes vertex ``h.v + i``.
    """
    edges = [(x, h.v + i) for i, e in enumerate(h.edges) for x in e]
    return graph(h.v + h.e, edges)


def degree_sequence(h: Hypergraph) -> tuple[list[int], bool]:
    deg = h.degrees()
    return deg, all(d % 2 == 1 for d in deg)


def edge_subgraphs(h: Hypergraph, max_edges: int = 25) -> Iterator[Hypergraph]:
    """Every non-empty edge subset of ``h``, each keeping all of V(h)."""
    if h.e > max_edges:
        raise BudgetExceeded(f"{h.e} edges exceeds the subset enumeration budget {max_edges}")
    for mask in range(1, 1 << h.e):
        yield h.with_edges(e for i, e in enumerate(h.edges) if mask >> i & 1)


def is_linear_and_regular(h: Hypergraph) -> tuple[bool, Optional[int]]:
    linear = all(len(set(a) & set(b)) <= 1 for a, b in itertools.combinations(h.edges, 2))
    deg = h.degrees()
    regular = deg[0] if deg and all(d == deg[0] for d in deg) else None
    return linear, regular


def disjoint_union(a: Hypergraph, b: Hypergraph) -> Hypergraph:
    if a.r != b.r:
        raise UniformityError("disjoint union needs equal uniformity")
    shifted = [tuple(x + a.v for x in e) for e in b.edges]
    return Hypergraph(a.r, a.v + b.v, a.edges + tuple(shifted))


def relabel(h: Hypergraph, perm: list[int]) -> Hypergraph:
    """Image of ``h`` under the vertex map ``x -> perm[x]``."""
    return Hypergraph(h.r, h.v, tuple(tuple(perm[x] for x in e) for e in h.edges))


def induced_subgraph(h: Hypergraph, vertices: Iterable[int]) -> Hypergraph:
    """Subhypergraph induced on ``vertices``, relabelled to 0..k-1 in sorted order."""
    keep = sorted(set(vertices))
    index = {x: i for i, x in enumerate(keep)}
    edges = [tuple(index[x] for x in e) for e in h.edges if all(x in index for x in e)]
    return Hypergraph(h.r, len(keep), tuple(edges))


def is_connected(h: Hypergraph) -> bool:
    """Connectivity of the vertex set through edges (isolated vertices count)."""
    if h.v == 0:
        return True
    parent = list(range(h.v))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in h.edges:
        root = find(e[0])
        for x in e[1:]:
            parent[find(x)] = root
    return len({find(x) for x in range(h.v)}) == 1


def neighbours(g: Hypergraph) -> list[set[int]]:
    nb: list[set[int]] = [set() for _ in range(g.v)]
    for e in g.edges:
        for x in e:
            nb[x].update(y for y in e if y != x)
    return nb


# ---------------------------------------------------------------------------
# homomorphism counting


def hom_count(h: Hypergraph, g: Hypergraph) -> int:
    """Number of maps V(h) -> V(g) sending every edge of h onto an edge of g."""
    if h.r != g.r:
        raise UniformityError(f"uniformity mismatch: {h.r} vs {g.r}")
    active = h.non_isolated()
    isolated = h.v - len(active)
    if not h.edges:
        return g.v ** h.v
    targets = g.edge_set()
    pos = {x: i for i, x in enumerate(active)}
    # check each edge as soon as its last vertex (in ``active`` order) is placed
    checks: list[list[Edge]] = [[] for _ in active]
    for e in h.edges:
        checks[max(pos[x] for x in e)].append(e)
    image: dict[int, int] = {}
    count = 0

    def extend(i: int) -> None:
        nonlocal count
        if i == len(active):
            count += 1
            return
        x = active[i]
        for y in range(g.v):
            image[x] = y
            for e in checks[i]:
                t = tuple(sorted(image[z] for z in e))
                if t not in targets:
                    break
            else:
                extend(i + 1)
        del image[x]

    extend(0)
    return count * g.v ** isolated


# ---------------------------------------------------------------------------
# stable involutions


@dataclass(frozen=True)
class StableInvolutionCertificate:
    left: frozenset[int]
    right: frozenset[int]
    fixed: frozenset[int]
    phi: tuple[int, ...] = field(repr=False)

    def validate(self, g: Hypergraph) -> bool:
        phi = self.phi
        verts = set(range(g.v))
        if len(phi) != g.v or sorted(phi) != list(range(g.v)):
            return False
        if self.left | self.right | self.fixed != verts:
            return False
        if self.left & self.right or self.left & self.fixed or self.right & self.fixed:
            return False
        if any(phi[phi[x]] != x for x in verts):
            return False
        if {phi[x] for x in self.left} != set(self.right):
            return False
        if any(phi[x] != x for x in self.fixed):
            return False
        edges = g.edge_set()
        if {tuple(sorted(phi[x] for x in e)) for e in edges} != edges:
            return False
        for e in g.edges:
            if any(x in self.left for x in e) and any(x in self.right for x in e):
                return False
            if all(x in self.fixed for x in e):
                return False
        return True


def _involutions(v: int, deg: list[int]) -> Iterator[list[int]]:
    """Involutions of range(v) that preserve degrees, identity first."""
    phi = [-1] * v

    def rec(i: int) -> Iterator[list[int]]:
        while i < v and phi[i] != -1:
            i += 1
        if i == v:
            yield list(phi)
            return
        phi[i] = i
        yield from rec(i + 1)
        for j in range(i + 1, v):
            if phi[j] == -1 and deg[j] == deg[i]:
                phi[i], phi[j] = j, i
                yield from rec(i + 1)
                phi[j] = -1
        phi[i] = -1

    yield from rec(0)


def detect_stable_involution(g: Hypergraph, max_vertices: int = 10) -> Optional[StableInvolutionCertificate]:
    """Exhaustive search for a stable involution of a graph.

    For an involution, L and R must cover exactly the moved vertices and F
    the fixed ones; the remaining freedom is which element of each 2-cycle
    goes to L, and that is searched exhaustively.
    """
    if g.r != 2:
        raise UniformityError("stable involutions are defined for graphs")
    if g.v > max_vertices:
        raise BudgetExceeded(f"v={g.v} exceeds the brute-force budget {max_vertices}")
    edges = g.edge_set()
    deg = g.degrees()
    for phi in _involutions(g.v, deg):
        fixed = [x for x in range(g.v) if phi[x] == x]
        fixed_set = set(fixed)
        if any(a in fixed_set and b in fixed_set for a, b in edges):
            continue
        if any(tuple(sorted((phi[a], phi[b]))) not in edges for a, b in edges):
            continue
        pairs = [(x, phi[x]) for x in range(g.v) if phi[x] > x]
        for choice in range(1 << len(pairs)):
            left = {p[(choice >> i) & 1] for i, p in enumerate(pairs)}
            right = {phi[x] for x in left}
            if any((a in left and b in right) or (a in right and b in left) for a, b in edges):
                continue
            return StableInvolutionCertificate(
                frozenset(left), frozenset(right), frozenset(fixed), tuple(phi)
            )
    return None
