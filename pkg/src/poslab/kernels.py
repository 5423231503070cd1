"""Exact homomorphism densities in step kernels.

A step kernel splits [0,1] into ``k`` parts of rational measure and is
constant on every product of parts.  Values are kept as an integer array
over a common denominator, so densities are computed in integer arithmetic
and returned as :class:`fractions.Fraction`.

Densities are evaluated as a tensor contraction (one factor per edge and
one measure vector per vertex) along a greedy elimination order.  The
integer dtype is ``int64`` whenever a worst-case bound on every partial sum
fits, and Python integers otherwise, so results are exact either way.
"""

from __future__ import annotations

import functools
import itertools
import json
import math
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import BudgetExceeded, PreconditionError, UniformityError
from .structures import Hypergraph, edge_subgraphs

DEFAULT_BUDGET = 10**9
MAX_INTERMEDIATE = 1 << 26
_INT64_SAFE = 1 << 62


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted where an exact value is required; pass a Fraction or string")
    return Fraction(x)


def _as_int_array(values) -> np.ndarray:
    """Integer numpy array, int64 when every entry fits, object otherwise."""
    arr = np.asarray(values, dtype=object)
    flat = [int(x) for x in arr.ravel()]
    big = max((abs(x) for x in flat), default=0)
    dtype = np.int64 if big < _INT64_SAFE else object
    out = np.empty(len(flat), dtype=dtype)
    out[:] = flat
    return out.reshape(arr.shape)


class StepKernel:
    """Symmetric r-dimensional step function with exact rational data.

    ``values`` is anything numpy can shape into ``(k,)*r`` (nested lists,
    arrays) holding ints, Fractions or ``"p/q"`` strings; it must be
    invariant under every permutation of the axes.
    """

    __slots__ = ("r", "measures", "num", "den", "_values")

    def __init__(self, r: int, measures: Sequence, values, *, check: bool = True):
        measures = tuple(_frac(m) for m in measures)
        k = len(measures)
        arr = np.asarray(values, dtype=object)
        if arr.size == k**r and arr.shape != (k,) * r:
            arr = arr.reshape((k,) * r)
        fr = [_frac(x) for x in arr.ravel()]
        den = math.lcm(*(f.denominator for f in fr)) if fr else 1
        num = _as_int_array([f.numerator * (den // f.denominator) for f in fr]).reshape(arr.shape)
        self._init(r, measures, num, den, check)

    @classmethod
    def from_integers(cls, r: int, measures: Sequence, num, den: int = 1, *, check: bool = True) -> "StepKernel":
        """Build from integer numerators over a common denominator ``den``."""
        self = object.__new__(cls)
        num = np.asarray(num)
        if num.dtype != object and not np.issubdtype(num.dtype, np.integer):
            raise TypeError("numerators must be integers")
        if num.dtype != object:
            num = num.astype(np.int64)
            if num.size and int(np.abs(num).max()) >= _INT64_SAFE:
                num = num.astype(object)
        self._init(r, tuple(_frac(m) for m in measures), num, int(den), check)
        return self

    def _init(self, r, measures, num, den, check):
        k = len(measures)
        if r < 2:
            raise PreconditionError("kernel uniformity must be at least 2")
        if k < 1:
            raise PreconditionError("kernel needs at least one part")
        if num.shape != (k,) * r:
            raise PreconditionError(f"values must have shape {(k,) * r}, got {num.shape}")
        if den <= 0:
            raise PreconditionError("denominator must be positive")
        if check:
            if any(m <= 0 for m in measures):
                raise PreconditionError("part measures must be positive")
            if sum(measures) != 1:
                raise PreconditionError(f"part measures sum to {sum(measures)}, not 1")
            # adjacent transpositions generate the symmetric group
            for i in range(r - 1):
                axes = list(range(r))
                axes[i], axes[i + 1] = axes[i + 1], axes[i]
                if not np.array_equal(num, num.transpose(axes)):
                    raise PreconditionError("kernel values are not symmetric")
        num.setflags(write=False)
        self.r = r
        self.measures = measures
        self.num = num
        self.den = den
        self._values = None

    @property
    def k(self) -> int:
        return len(self.measures)

    @property
    def values(self) -> np.ndarray:
        """Object array of Fractions with shape ``(k,)*r``."""
        if self._values is None:
            flat = [Fraction(int(x), self.den) for x in self.num.ravel()]
            vals = np.empty(len(flat), dtype=object)
            vals[:] = flat
            self._values = vals.reshape(self.num.shape)
        return self._values

    def value(self, idx: Sequence[int]) -> Fraction:
        return Fraction(int(self.num[tuple(idx)]), self.den)

    def float_values(self) -> np.ndarray:
        return self.num.astype(float) / self.den

    def is_graphon(self) -> bool:
        return bool(np.all(self.num >= 0) and np.all(self.num <= self.den))

    def is_nonnegative(self) -> bool:
        return bool(np.all(self.num >= 0))

    def mean(self) -> Fraction:
        """Integral of the kernel, i.e. the density of a single edge."""
        return density(Hypergraph(self.r, self.r, (tuple(range(self.r)),)), self)

    def __eq__(self, other):
        if not isinstance(other, StepKernel):
            return NotImplemented
        return (
            self.r == other.r
            and self.measures == other.measures
            and np.array_equal(self.num * other.den, other.num * self.den)
        )

    def __repr__(self):
        return f"StepKernel(r={self.r}, k={self.k})"

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "parts": [str(m) for m in self.measures],
            "values": [str(x) for x in self.values.ravel()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "StepKernel":
        r = int(data["r"])
        parts = [Fraction(p) for p in data["parts"]]
        values = [Fraction(x) for x in data["values"]]
        if len(values) != len(parts) ** r:
            raise PreconditionError(f"expected {len(parts) ** r} values, got {len(values)}")
        return cls(r, parts, np.array(values, dtype=object).reshape((len(parts),) * r))

    @classmethod
    def from_json(cls, text: str) -> "StepKernel":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# constructors


def uniform_measures(k: int) -> tuple[Fraction, ...]:
    return (Fraction(1, k),) * k


def constant_kernel(r: int, value, k: int = 1) -> StepKernel:
    value = _frac(value)
    num = np.full((k,) * r, value.numerator, dtype=np.int64)
    return StepKernel.from_integers(r, uniform_measures(k), num, value.denominator)


def kernel_from_function(r: int, measures: Sequence, f) -> StepKernel:
    """Evaluate ``f`` on sorted index tuples and spread it symmetrically."""
    k = len(measures)
    vals = np.empty((k,) * r, dtype=object)
    for idx in itertools.product(range(k), repeat=r):
        vals[idx] = _frac(f(tuple(sorted(idx))))
    return StepKernel(r, measures, vals)


def kernel_of(g: Hypergraph) -> StepKernel:
    """0/1 step kernel of ``g``: v(g) equal parts, value 1 exactly on edges."""
    if g.v == 0:
        raise PreconditionError("kernel of an empty vertex set is undefined")
    num = np.zeros((g.v,) * g.r, dtype=np.int64)
    for e in g.edges:
        for p in itertools.permutations(e):
            num[p] = 1
    return StepKernel.from_integers(g.r, uniform_measures(g.v), num, 1, check=False)


def center(w: StepKernel, p) -> StepKernel:
    """Subtract the constant ``p`` from every value."""
    p = _frac(p)
    den = math.lcm(w.den, p.denominator)
    num = w.num * (den // w.den) - p.numerator * (den // p.denominator)
    return StepKernel.from_integers(w.r, w.measures, num, den, check=False)


def perturb(w: StepKernel, eps) -> StepKernel:
    """The kernel ``1 + eps * w`` on the same parts."""
    eps = _frac(eps)
    den = w.den * eps.denominator
    num = w.num * eps.numerator + den
    return StepKernel.from_integers(w.r, w.measures, num, den, check=False)


def tensor(w: StepKernel, u: StepKernel) -> StepKernel:
    """Tensor product; part ``(a, b)`` becomes index ``a * u.k + b``."""
    if w.r != u.r:
        raise UniformityError(f"uniformity mismatch: {w.r} vs {u.r}")
    r = w.r
    big = int(np.abs(w.num).max()) * int(np.abs(u.num).max())
    dtype = np.int64 if big < _INT64_SAFE and w.num.dtype != object and u.num.dtype != object else object
    outer = np.multiply.outer(w.num.astype(dtype), u.num.astype(dtype))
    axes = [ax for i in range(r) for ax in (i, r + i)]
    num = outer.transpose(axes).reshape((w.k * u.k,) * r)
    measures = [a * b for a in w.measures for b in u.measures]
    return StepKernel.from_integers(r, measures, num, w.den * u.den, check=False)


def parity_kernel(r: int) -> StepKernel:
    """Two parts of measure 1/2 labelled +1 and -1; value is the product of labels."""
    if r < 2:
        raise PreconditionError("parity kernel needs r >= 2")
    labels = np.array([1, -1], dtype=np.int64)
    num = labels
    for _ in range(r - 1):
        num = np.multiply.outer(num, labels)
    return StepKernel.from_integers(r, uniform_measures(2), num, 1, check=False)


def permute_parts(w: StepKernel, perm: Sequence[int]) -> StepKernel:
    """Relabel parts so that new part ``i`` is old part ``perm[i]``."""
    idx = np.ix_(*([list(perm)] * w.r))
    return StepKernel.from_integers(w.r, [w.measures[i] for i in perm], w.num[idx], w.den, check=False)


# ---------------------------------------------------------------------------
# contraction engine


def _plan_cost(sublists: list[list[int]], out: list[int], path: list, k: int) -> tuple[int, int]:
    ops = [set(s) for s in sublists]
    cost = 0
    largest = max((k ** len(s) for s in ops), default=1)
    for step in path[1:]:
        taken = [ops[i] for i in step]
        for i in sorted(step, reverse=True):
            del ops[i]
        union = set().union(*taken)
        cost += k ** len(union) * max(len(taken) - 1, 1)
        remaining = set(out).union(*ops) if ops else set(out)
        new = union & remaining
        largest = max(largest, k ** len(new))
        ops.append(new)
    return cost, largest


@functools.lru_cache(maxsize=4096)
def _plan(structure: tuple, k: int):
    """Greedy contraction path for a fixed operand structure."""
    sublists, out = structure
    dummies = []
    for s in sublists:
        dummies += [np.empty((k,) * len(s), dtype=np.int8), list(s)]
    path, _ = np.einsum_path(*dummies, list(out), optimize="greedy")
    cost, largest = _plan_cost([list(s) for s in sublists], list(out), path, k)
    return path, cost, largest


def _structure(h: Hypergraph, open_: Sequence[int], skip_edge: Optional[int], skip_weight: Optional[int]):
    verts = sorted({x for e in h.edges for x in e} | set(open_))
    if len(verts) > 52:
        raise BudgetExceeded(f"{len(verts)} active vertices exceed the 52-index contraction limit")
    lab = {x: i for i, x in enumerate(verts)}
    subs = []
    edge_ops = []
    for i, e in enumerate(h.edges):
        if i != skip_edge:
            subs.append(tuple(lab[x] for x in e))
            edge_ops.append(i)
    weight_ops = [x for x in verts if x != skip_weight]
    subs += [(lab[x],) for x in weight_ops]
    out = tuple(lab[x] for x in open_)
    return (tuple(subs), out), len(edge_ops), len(weight_ops)


def contract(
    h: Hypergraph,
    values: np.ndarray,
    weights: np.ndarray,
    open_: Sequence[int] = (),
    skip_edge: Optional[int] = None,
    skip_weight: Optional[int] = None,
    budget: int = DEFAULT_BUDGET,
):
    """Sum over assignments of non-open vertices of the product of factors.

    ``values`` is the ``(k,)*r`` edge tensor and ``weights`` the part
    weight vector, in any numpy dtype.  Edge ``skip_edge`` and the weight of
    vertex ``skip_weight`` are left out (used for partial derivatives).
    Returns a scalar or an array indexed by ``open_``.
    """
    k = len(weights)
    structure, n_edges, n_weights = _structure(h, open_, skip_edge, skip_weight)
    subs, out = structure
    if not subs:
        return values.dtype.type(1) if values.dtype != object else 1
    path, cost, largest = _plan(structure, k)
    if cost > budget:
        raise BudgetExceeded(f"contraction needs ~{cost:.3g} term evaluations, budget {budget:.3g}")
    if largest > MAX_INTERMEDIATE:
        raise BudgetExceeded(f"contraction needs an intermediate of {largest} entries")
    operands = []
    for s in subs[:n_edges]:
        operands += [values, list(s)]
    for s in subs[n_edges:]:
        operands += [weights, list(s)]
    return np.einsum(*operands, list(out), optimize=path)


def _scaled(h: Hypergraph, w: StepKernel):
    """Integer weights/values and the denominator of the contraction result."""
    mden = math.lcm(*(m.denominator for m in w.measures))
    mnum = [int(m * mden) for m in w.measures]
    n_active = len(h.non_isolated())
    bound = (
        w.k**n_active
        * max(mnum) ** n_active
        * max(int(np.abs(w.num).max()), 1) ** h.e
    )
    if bound < _INT64_SAFE and w.num.dtype != object:
        vals, wts = w.num, np.array(mnum, dtype=np.int64)
    else:
        vals = w.num.astype(object)
        wts = np.empty(w.k, dtype=object)
        wts[:] = mnum
    return vals, wts, mden, n_active


def density(h: Hypergraph, w: StepKernel, budget: int = DEFAULT_BUDGET) -> Fraction:
    """Exact homomorphism density of ``h`` in the step kernel ``w``."""
    if h.r != w.r:
        raise UniformityError(f"uniformity mismatch: hypergraph r={h.r}, kernel r={w.r}")
    if not h.edges:
        return Fraction(1)
    vals, wts, mden, n_active = _scaled(h, w)
    total = contract(h, vals, wts, budget=budget)
    return Fraction(int(total), mden**n_active * w.den**h.e)


def float_density(h: Hypergraph, values: np.ndarray, weights: np.ndarray, budget: int = DEFAULT_BUDGET) -> float:
    """Floating-point density for a float value tensor and weight vector."""
    if not h.edges:
        return 1.0
    return float(contract(h, values, weights, budget=budget))


def expansion_density(h: Hypergraph, w: StepKernel, eps, budget: int = DEFAULT_BUDGET) -> Fraction:
    """Density in ``1 + eps*w`` as ``1 + sum_F t_F(w) eps^e(F)`` over non-empty edge subsets."""
    eps = _frac(eps)
    total = Fraction(1)
    for f in edge_subgraphs(h):
        total += density(f, w, budget) * eps**f.e
    return total


def edge_density(w: StepKernel) -> Fraction:
    return w.mean()
