"""Fourier analysis over the space of graphs on [n] and H-codes.

A graph on [n] is a bit vector of length C(n, 2); the pair (i, j), i < j,
sits at bit ``j*(j-1)/2 + i`` (colex order), stored in a Python int.  The
transform is normalized as ``f^(x) = 2^-N sum_y (-1)^(x.y) f(y)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import BudgetExceeded, PreconditionError, UniformityError
from .kernels import StepKernel, density, uniform_measures
from .structures import Hypergraph

MAX_DENSE_BITS = 22
MAX_INJECTIONS = 2 * 10**6


def pair_index(i: int, j: int) -> int:
    if i == j:
        raise PreconditionError("loops are not graph edges")
    if i > j:
        i, j = j, i
    return j * (j - 1) // 2 + i


def num_pairs(n: int) -> int:
    return n * (n - 1) // 2


@dataclass(frozen=True)
class GraphVector:
    n: int
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> num_pairs(self.n):
            raise PreconditionError(f"bit vector does not fit C({self.n},2) positions")

    @classmethod
    def from_edges(cls, n: int, edges) -> "GraphVector":
        bits = 0
        for i, j in edges:
            if not (0 <= i < n and 0 <= j < n):
                raise PreconditionError(f"edge {(i, j)} outside [{n}]")
            bits |= 1 << pair_index(i, j)
        return cls(n, bits)

    @classmethod
    def complete(cls, n: int) -> "GraphVector":
        return cls(n, (1 << num_pairs(n)) - 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for j in range(self.n) for i in range(j) if self.bits >> pair_index(i, j) & 1]

    def to_hex(self) -> str:
        # bit b of the vector is bit b of the integer
        width = max(1, -(-num_pairs(self.n) // 4))
        return f"n={self.n}:{self.bits:0{width}x}"

    @classmethod
    def from_hex(cls, text: str) -> "GraphVector":
        try:
            head, body = text.strip().split(":")
            if not head.startswith("n="):
                raise ValueError
            return cls(int(head[2:]), int(body, 16))
        except ValueError as exc:
            raise ValueError(f"malformed graph vector {text!r}") from exc


# ---------------------------------------------------------------------------
# copies


def _require_graph(h: Hypergraph) -> None:
    if h.r != 2:
        raise UniformityError("graph codes are defined for graphs (r = 2)")


def enumerate_copies(h: Hypergraph, n: int) -> list[int]:
    """Sorted bitmasks of all edge sets in K_n isomorphic to ``h``."""
    _require_graph(h)
    if h.v > n:
        raise PreconditionError(f"v(H)={h.v} exceeds n={n}")
    if math.perm(n, h.v) > MAX_INJECTIONS:
        raise BudgetExceeded(f"{math.perm(n, h.v)} injections exceed the budget {MAX_INJECTIONS}")
    out = set()
    for phi in itertools.permutations(range(n), h.v):
        mask = 0
        for a, b in h.edges:
            mask |= 1 << pair_index(phi[a], phi[b])
        out.add(mask)
    return sorted(out)


def automorphism_count(h: Hypergraph) -> int:
    if h.v > 8:
        raise BudgetExceeded("automorphism count by brute force needs v(H) <= 8")
    edges = h.edge_set()
    return sum(
        all(tuple(sorted(p[x] for x in e)) in edges for e in h.edges)
        for p in itertools.permutations(range(h.v))
    )


def indicator(copies: Sequence[int], n: int) -> np.ndarray:
    nbits = num_pairs(n)
    if nbits > MAX_DENSE_BITS:
        raise BudgetExceeded(f"dense table of 2^{nbits} entries exceeds 2^{MAX_DENSE_BITS}")
    f = np.zeros(1 << nbits, dtype=np.int64)
    f[list(copies)] = 1
    return f


# ---------------------------------------------------------------------------
# transform


def wht_unnormalized(f: np.ndarray) -> np.ndarray:
    """Butterfly for ``sum_y (-1)^(x.y) f(y)``; integer input stays integer."""
    a = np.array(f, copy=True)
    size = a.shape[0]
    if size & (size - 1):
        raise PreconditionError("table length must be a power of two")
    if size > 1 << MAX_DENSE_BITS:
        raise BudgetExceeded(f"table of {size} entries exceeds 2^{MAX_DENSE_BITS}")
    h = 1
    while h < size:
        view = a.reshape(-1, 2, h)
        lo = view[:, 0, :].copy()
        view[:, 0, :] += view[:, 1, :]
        view[:, 1, :] = lo - view[:, 1, :]
        h *= 2
    return a


@dataclass
class FourierTable:
    n: int
    raw: np.ndarray  # unnormalized sums

    @property
    def values(self) -> np.ndarray:
        return self.raw / float(len(self.raw))

    def exact(self, x: int) -> Fraction:
        """Exact coefficient; requires an integer table."""
        if self.raw.dtype.kind not in "iu":
            raise PreconditionError("exact coefficients need an integer input table")
        return Fraction(int(self.raw[x]), len(self.raw))

    def __getitem__(self, x: int) -> float:
        return float(self.raw[x]) / len(self.raw)


def wht(f: np.ndarray, n: Optional[int] = None) -> FourierTable:
    size = len(f)
    if n is None:
        nbits = size.bit_length() - 1
        n = next((m for m in range(2, 64) if num_pairs(m) == nbits), 0)
        if n == 0 and nbits != 0:
            raise PreconditionError(f"table length 2^{nbits} is not 2^C(n,2) for any n")
    elif size != 1 << num_pairs(n):
        raise PreconditionError(f"table length {size} does not match n={n}")
    f = np.asarray(f)
    if f.dtype.kind in "iub":
        f = f.astype(np.int64)
    return FourierTable(n, wht_unnormalized(f))


def convolve(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """``(f*g)(x) = 2^-N sum_y f(y) g(x+y)`` by direct summation."""
    size = len(f)
    idx = np.arange(size)
    out = np.zeros(size, dtype=float)
    for y in range(size):
        out += f[y] * g[idx ^ y]
    return out / size


def fourier_coefficient_exact(copies: Sequence[int], n: int, x: int) -> Fraction:
    """``1_B^(x)`` by direct summation over the copies."""
    total = sum(-1 if (x & y).bit_count() & 1 else 1 for y in copies)
    return Fraction(total, 2 ** num_pairs(n))


# ---------------------------------------------------------------------------
# code bounds and positivity


@dataclass(frozen=True)
class CodeBound:
    n: int
    copies: int
    beta: Fraction
    gamma: Fraction
    argmin: GraphVector
    bound: Fraction

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "beta": str(self.beta),
            "gamma": str(self.gamma),
            "argmin": self.argmin.to_hex(),
            "bound": str(self.bound),
        }


def spectrum(h: Hypergraph, n: int) -> tuple[list[int], FourierTable]:
    copies = enumerate_copies(h, n)
    return copies, wht(indicator(copies, n), n)


def code_density_bound(h: Hypergraph, n: int) -> CodeBound:
    """Minimum Fourier coefficient gamma of the copy indicator and the bound -gamma/beta.

    The bound may exceed 1 for small n, where it says nothing.
    """
    copies, table = spectrum(h, n)
    if not copies:
        raise PreconditionError("H has no copies in K_n")
    x = int(np.argmin(table.raw))
    beta = table.exact(0)
    gamma = table.exact(x)
    return CodeBound(n, len(copies), beta, gamma, GraphVector(n, x), -gamma / beta)


def signed_kernel(x: GraphVector) -> StepKernel:
    """n equal parts; -1 on pairs that are edges of x, +1 on other pairs, 0 on the diagonal."""
    n = x.n
    num = np.ones((n, n), dtype=np.int64)
    for i, j in x.edges():
        num[i, j] = num[j, i] = -1
    np.fill_diagonal(num, 0)
    return StepKernel.from_integers(2, uniform_measures(n), num, 1, check=False)


@dataclass(frozen=True)
class FourierRefutation:
    kernel: StepKernel
    density: Fraction
    coefficient: Fraction
    threshold: Fraction


def positivity_refutation_from_fourier(h: Hypergraph, n: int, x: GraphVector) -> Optional[FourierRefutation]:
    """Signed kernel of x with its exact H-density, if 1_B^(x) < -2 v^v beta / n.

    The coefficient is recomputed exactly over the copies; ``None`` when the
    strict threshold is not met.
    """
    _require_graph(h)
    if x.n != n:
        raise PreconditionError(f"graph vector lives on {x.n} vertices, not {n}")
    copies = enumerate_copies(h, n)
    beta = Fraction(len(copies), 2 ** num_pairs(n))
    coeff = fourier_coefficient_exact(copies, n, x.bits)
    threshold = -2 * Fraction(h.v**h.v) * beta / n
    if not coeff < threshold:
        return None
    w = signed_kernel(x)
    return FourierRefutation(w, density(h, w), coeff, threshold)


def expected_fourier_from_kernel(h: Hypergraph, w, k: int) -> tuple[Fraction, Fraction]:
    """Expected ``1_B^(x)`` on the k-fold blow-up of the weighted graph w.

    Vertex u of [k*m] lies over vertex u // k of w, and pair uv is an edge of
    the random x with probability (1 - w)/2.  Returns (expectation, beta).
    """
    _require_graph(h)
    wf = [[Fraction(v) for v in row] for row in w]
    m = len(wf)
    if any(len(row) != m for row in wf) or any(wf[i][j] != wf[j][i] for i in range(m) for j in range(m)):
        raise PreconditionError("w must be a symmetric square matrix")
    if any(wf[i][i] != 0 for i in range(m)):
        raise PreconditionError("w must have a zero diagonal")
    n = k * m
    copies = enumerate_copies(h, n)
    pairs = [(i, j) for j in range(n) for i in range(j)]
    total = Fraction(0)
    for y in copies:
        prod = Fraction(1)
        bits = y
        while bits:
            b = (bits & -bits).bit_length() - 1
            bits &= bits - 1
            i, j = pairs[b]
            prod *= wf[i // k][j // k]
            if not prod:
                break
        total += prod
    beta = Fraction(len(copies), 2 ** num_pairs(n))
    return beta * total / len(copies), beta


# ---------------------------------------------------------------------------
# maximum codes


def verify_code(code: Sequence[int], copies: Sequence[int]) -> bool:
    bad = set(copies)
    return all(a ^ b not in bad for a, b in itertools.combinations(code, 2))


def _span(vectors: Sequence[int]) -> tuple[list[int], list[int]]:
    """Reduced basis of the F_2 span and the list of all span elements."""
    basis: list[int] = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    elements = [0]
    for b in basis:
        elements += [x ^ b for x in elements]
    return basis, elements


def _coset_representatives(basis: Sequence[int], nbits: int) -> list[int]:
    pivots = {}
    for b in basis:
        reduced = b
        for p, v in pivots.items():
            if reduced >> p & 1:
                reduced ^= v
        if reduced:
            top = reduced.bit_length() - 1
            for p in list(pivots):
                if pivots[p] >> top & 1:
                    pivots[p] ^= reduced
            pivots[top] = reduced
    free = [i for i in range(nbits) if i not in pivots]
    reps = [0]
    for i in free:
        reps += [x | 1 << i for x in reps]
    return reps


def _max_independent_set(adj: list[int], max_nodes: int) -> list[int]:
    """Branch and bound with a matching bound; vertex 0 is fixed in the set."""
    best: list[int] = []
    nodes = 0

    def matching_bound(p: int) -> int:
        count = 0
        rest = p
        while rest:
            v = (rest & -rest).bit_length() - 1
            rest &= ~(1 << v)
            nb = adj[v] & rest
            if nb:
                rest &= ~(nb & -nb)
                count += 1
        return p.bit_count() - count

    def rec(p: int, chosen: list[int]) -> None:
        nonlocal best, nodes
        nodes += 1
        if nodes > max_nodes:
            raise BudgetExceeded(f"branch and bound exceeded {max_nodes} nodes")
        # vertices with at most one neighbour left can be taken greedily
        forced = []
        changed = True
        while changed:
            changed = False
            rest = p
            while rest:
                v = (rest & -rest).bit_length() - 1
                rest &= rest - 1
                if (adj[v] & p).bit_count() <= 1:
                    forced.append(v)
                    p &= ~(adj[v] | 1 << v)
                    rest &= p
                    changed = True
        chosen = chosen + forced
        if not p:
            if len(chosen) > len(best):
                best = chosen
            return
        if len(chosen) + matching_bound(p) <= len(best):
            return
        rest = p
        v, deg = -1, -1
        while rest:
            u = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            d = (adj[u] & p).bit_count()
            if d > deg:
                v, deg = u, d
        rec(p & ~(adj[v] | 1 << v), chosen + [v])
        rec(p & ~(1 << v), chosen)

    rec(((1 << len(adj)) - 1) & ~(adj[0] | 1), [0])
    return best


def bruteforce_max_code(h: Hypergraph, n: int, max_nodes: int = 5 * 10**5) -> tuple[int, list[int]]:
    """Largest family of graphs on [n] with no two members differing by a copy of H.

    A maximum independent set in the Cayley graph on F_2^C(n,2) generated by
    the copies.  The components of that graph are the cosets of the span of
    the copies and are all isomorphic, so the search runs on the span alone
    and the answer is translated to every coset.
    """
    _require_graph(h)
    nbits = num_pairs(n)
    if nbits > 10:
        raise BudgetExceeded(f"exact search needs C(n,2) <= 10, got {nbits}")
    copies = enumerate_copies(h, n)
    basis, elements = _span(copies)
    pos = {x: i for i, x in enumerate(elements)}
    adj = [0] * len(elements)
    for i, x in enumerate(elements):
        for y in copies:
            adj[i] |= 1 << pos[x ^ y]
    local = [elements[i] for i in _max_independent_set(adj, max_nodes)]
    code = sorted(c ^ x for c in _coset_representatives(basis, nbits) for x in local)
    return len(code), code
