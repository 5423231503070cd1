"""Higher-order tournaments and the r-graph G(T) they induce.

An (r-1)-tournament on [n] stores one sign per (r-1)-subset T, the sign of
the increasing arrangement of T; the sign of any other arrangement is that
value times the parity of the arrangement.  Signs live in a flat array
indexed by the colex rank of the sorted subset.

The labelled-copy probability of a hypergraph H in G(T) for a uniform
random tournament is computed exactly as ``2^-rank`` of an affine system
over F_2 (or 0 when the system is inconsistent).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import BudgetExceeded, PreconditionError
from .structures import Hypergraph

MAX_MATERIALIZED = 5 * 10**7


def colex_rank(t: Sequence[int]) -> int:
    """Rank of a sorted tuple among all subsets of its size in colex order."""
    return sum(math.comb(x, i + 1) for i, x in enumerate(t))


def _binom_table(n: int, s: int) -> np.ndarray:
    table = np.zeros((n + 1, s + 1), dtype=np.int64)
    for x in range(n + 1):
        for i in range(s + 1):
            table[x, i] = math.comb(x, i)
    return table


class Tournament:
    """Orientation of every s-subset of [n] (s = r - 1)."""

    def __init__(self, n: int, s: int, signs: np.ndarray):
        signs = np.asarray(signs, dtype=np.int8)
        if signs.shape != (math.comb(n, s),):
            raise PreconditionError(f"need {math.comb(n, s)} signs, got {signs.shape}")
        if not np.all(np.abs(signs) == 1):
            raise PreconditionError("signs must be +1 or -1")
        signs.setflags(write=False)
        self.n = n
        self.s = s
        self.signs = signs
        self._binom = None

    @property
    def r(self) -> int:
        return self.s + 1

    @classmethod
    def from_mapping(cls, n: int, s: int, mapping: dict, default: int = 1) -> "Tournament":
        signs = np.full(math.comb(n, s), default, dtype=np.int8)
        for t, sign in mapping.items():
            signs[colex_rank(tuple(sorted(t)))] = sign
        return cls(n, s, signs)

    def sigma(self, t: Iterable[int]) -> int:
        """Sign of the increasing arrangement of the s-set ``t``."""
        t = tuple(sorted(t))
        if len(t) != self.s or len(set(t)) != self.s or t[-1] >= self.n or t[0] < 0:
            raise PreconditionError(f"{t} is not an {self.s}-subset of [{self.n}]")
        return int(self.signs[colex_rank(t)])

    def flipped(self) -> "Tournament":
        return Tournament(self.n, self.s, -self.signs)

    def binom(self) -> np.ndarray:
        if self._binom is None:
            self._binom = _binom_table(self.n, self.s)
        return self._binom


def sample_tournament(s: int, n: int, seed: int) -> Tournament:
    """Uniform random s-tournament on [n] from a Philox stream keyed by ``seed``."""
    size = math.comb(n, s)
    if size > MAX_MATERIALIZED:
        raise BudgetExceeded(f"C({n},{s}) = {size} signs exceed the budget {MAX_MATERIALIZED}")
    rng = np.random.Generator(np.random.Philox(seed))
    bits = rng.integers(0, 2, size=size, dtype=np.int8)
    return Tournament(n, s, 1 - 2 * bits)


# ---------------------------------------------------------------------------
# signs and weights


def _greater_count(t: Sequence[int], x: int) -> int:
    return sum(1 for y in t if y > x)


def t_sign(tour: Tournament, t: Iterable[int], s_set: Iterable[int]) -> int:
    """Sign of the arrangement (S increasing, then the vertex of T not in S)."""
    t = tuple(sorted(t))
    s_set = set(s_set)
    rest = [x for x in t if x not in s_set]
    if len(s_set) != tour.s - 1 or len(rest) != 1 or not s_set <= set(t):
        raise PreconditionError(f"{sorted(s_set)} is not an (s-1)-subset of {t}")
    # moving the removed vertex to the end passes every larger element of T
    return tour.sigma(t) * (-1) ** _greater_count(t, rest[0])


def r_weight(tour: Tournament, big_r: Iterable[int], s_set: Iterable[int]) -> int:
    """Sum of the T-signs of S over the two (r-1)-sets T with S < T < R."""
    big_r = set(big_r)
    s_set = set(s_set)
    if len(big_r) != tour.r or len(s_set) != tour.r - 2 or not s_set <= big_r:
        raise PreconditionError(f"{sorted(s_set)} is not an (r-2)-subset of {sorted(big_r)}")
    return sum(t_sign(tour, s_set | {x}, s_set) for x in big_r - s_set)


def is_edge(tour: Tournament, big_r: Iterable[int]) -> bool:
    big_r = tuple(sorted(big_r))
    return all(r_weight(tour, big_r, s) == 0 for s in itertools.combinations(big_r, tour.r - 2))


def _edges_batch(tour: Tournament, rows: np.ndarray) -> np.ndarray:
    """Vectorized edge test for an (N, r) array of distinct vertices per row.

    With R sorted, every R-weight vanishes iff sigma(R minus R[i]) * (-1)^i is
    the same for all i; this is the F_2 form of the weight condition.
    """
    r = tour.r
    srt = np.sort(rows, axis=1)
    binom = tour.binom()
    vals = []
    for i in range(r):
        face = np.delete(srt, i, axis=1)
        rank = np.zeros(len(rows), dtype=np.int64)
        for j in range(r - 1):
            rank += binom[face[:, j], j + 1]
        vals.append(tour.signs[rank] * (-1) ** i)
    vals = np.stack(vals, axis=1)
    return np.all(vals == vals[:, :1], axis=1)


def build_g(tour: Tournament, max_n: int = 60) -> Hypergraph:
    """Materialize G(T_n)."""
    if tour.n > max_n:
        raise BudgetExceeded(f"n={tour.n} exceeds the materialization budget {max_n}")
    edges = []
    combos = itertools.combinations(range(tour.n), tour.r)
    while True:
        chunk = np.array(list(itertools.islice(combos, 200_000)), dtype=np.int64)
        if len(chunk) == 0:
            break
        edges += [tuple(int(x) for x in row) for row in chunk[_edges_batch(tour, chunk)]]
    return Hypergraph(tour.r, tour.n, tuple(edges))


# ---------------------------------------------------------------------------
# exact copy probability


@dataclass(frozen=True)
class Gf2System:
    """Affine F_2 constraints on the orientation bits of the relevant s-sets.

    Bit b_T encodes sigma(T) = (-1)^b_T.  Each row is a (coefficient mask,
    right-hand side) pair; the mask has exactly two bits set.
    """

    variables: tuple[tuple[int, ...], ...]
    rows: tuple[tuple[int, int], ...]

    def eliminate(self) -> tuple[int, bool]:
        """(rank, consistent) by Gaussian elimination on int bitsets."""
        nv = len(self.variables)
        pivots: dict[int, int] = {}  # pivot column -> augmented row
        consistent = True
        for mask, rhs in self.rows:
            row = mask | (rhs << nv)
            while row & ((1 << nv) - 1):
                col = (row & -row).bit_length() - 1
                if col not in pivots:
                    pivots[col] = row
                    break
                row ^= pivots[col]
            else:
                if row:
                    consistent = False
        return len(pivots), consistent

    def probability(self) -> Fraction:
        rank, consistent = self.eliminate()
        return Fraction(1, 2**rank) if consistent else Fraction(0)


def copy_system(h: Hypergraph, max_vars: int = 10**4) -> Gf2System:
    """Constraints saying every edge of ``h`` (as a labelled vertex set) lies in G(T)."""
    r = h.r
    if r < 3:
        raise PreconditionError("tournament hypergraphs need r >= 3")
    variables = sorted({t for e in h.edges for t in itertools.combinations(e, r - 1)})
    if len(variables) > max_vars:
        raise BudgetExceeded(f"{len(variables)} variables exceed the budget {max_vars}")
    index = {t: i for i, t in enumerate(variables)}
    rows = []
    for e in h.edges:
        for s_set in itertools.combinations(e, r - 2):
            x, y = (z for z in e if z not in s_set)
            t1 = tuple(sorted(s_set + (x,)))
            t2 = tuple(sorted(s_set + (y,)))
            # T-signs of S in t1 and t2 must be opposite
            rhs = (1 + _greater_count(t1, x) + _greater_count(t2, y)) % 2
            rows.append(((1 << index[t1]) | (1 << index[t2]), rhs))
    return Gf2System(tuple(variables), tuple(rows))


def copy_probability_exact(h: Hypergraph, max_vars: int = 10**4) -> Fraction:
    """Probability that a uniform random tournament makes every edge of ``h`` an edge of G(T)."""
    return copy_system(h, max_vars).probability()


def copy_probability_enumerate(h: Hypergraph, max_vars: int = 14) -> Fraction:
    """Same probability by trying every orientation of the relevant s-sets."""
    variables = sorted({t for e in h.edges for t in itertools.combinations(e, h.r - 1)})
    if len(variables) > max_vars:
        raise BudgetExceeded(f"{len(variables)} variables exceed the enumeration budget {max_vars}")
    good = 0
    for bits in itertools.product((1, -1), repeat=len(variables)):
        tour = Tournament.from_mapping(h.v, h.r - 1, dict(zip(variables, bits)))
        if all(is_edge(tour, e) for e in h.edges):
            good += 1
    return Fraction(good, 2 ** len(variables))


def count_valid_orientations(h: Hypergraph, max_vars: int = 14) -> tuple[int, int]:
    """(valid orientations, number of relevant s-sets)."""
    p = copy_probability_enumerate(h, max_vars)
    nv = len({t for e in h.edges for t in itertools.combinations(e, h.r - 1)})
    return int(p * 2**nv), nv


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass(frozen=True)
class MCResult:
    estimate: float
    stderr: float
    low: float
    high: float
    hits: int
    samples: int
    n: int
    seed: int

    def csv_row(self, name: str, r: int) -> str:
        return f"{name},{r},{self.n},{self.samples},{self.estimate!r},{self.stderr!r},{self.seed}"


CSV_HEADER = "H-name,r,n,samples,estimate,stderr,seed"


def _injective_maps(rng: np.random.Generator, count: int, v: int, n: int) -> np.ndarray:
    maps = rng.integers(0, n, size=(count, v))
    while True:
        srt = np.sort(maps, axis=1)
        bad = np.any(srt[:, 1:] == srt[:, :-1], axis=1) if v > 1 else np.zeros(count, bool)
        nbad = int(bad.sum())
        if nbad == 0:
            return maps
        maps[bad] = rng.integers(0, n, size=(nbad, v))


def mc_density(
    h: Hypergraph,
    n: int,
    samples: int,
    seed: int,
    tournament: Optional[Tournament] = None,
    batch: int = 20_000,
) -> MCResult:
    """Labelled-copy density of ``h`` in G(T_n), estimated from random injective maps.

    One tournament is drawn from the first sub-stream of ``seed`` (unless
    given); vertex maps come from the second.  The interval is the 95%
    normal approximation.
    """
    if n < h.v:
        raise PreconditionError(f"n={n} is smaller than v(H)={h.v}")
    if samples < 1:
        raise PreconditionError("need at least one sample")
    tour_seq, map_seq = np.random.SeedSequence(seed).spawn(2)
    if tournament is None:
        tournament = sample_tournament(h.r - 1, n, int(tour_seq.generate_state(1)[0]))
    elif tournament.n != n or tournament.r != h.r:
        raise PreconditionError("tournament does not match n and r")
    rng = np.random.Generator(np.random.Philox(map_seq))
    edges = np.array(h.edges, dtype=np.int64).reshape(h.e, h.r)
    hits = 0
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        maps = _injective_maps(rng, m, h.v, n)
        ok = np.ones(m, dtype=bool)
        for e in edges:
            ok &= _edges_batch(tournament, maps[:, e])
        hits += int(ok.sum())
        done += m
    p = hits / samples
    se = math.sqrt(p * (1 - p) / samples)
    return MCResult(p, se, p - 1.96 * se, p + 1.96 * se, hits, samples, n, seed)
