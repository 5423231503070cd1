"""Independence polynomials and the odd-degree non-positivity witness.

For a graph G, ``I_G(x) = sum_k i_k(G) (-x)^k`` where ``i_k`` counts the
independent sets of size k.  When every vertex of G has odd degree, the
two-part kernel with values 0 / -1 / +1 (parts of measure alpha, 1-alpha)
has density ``(1-alpha)^v I_G(alpha/(1-alpha))``, which turns negative just
past the smallest root of ``I_G``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .errors import BudgetExceeded, PreconditionError, UniformityError
from .kernels import StepKernel, density
from .structures import Hypergraph, degree_sequence, is_connected, levi, neighbours

DEFAULT_TOL = Fraction(1, 2**20)


@dataclass(frozen=True)
class Polynomial:
    """Exact univariate polynomial; ``coeffs[i]`` multiplies ``x**i``."""

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Sequence):
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Polynomial([x + y for x, y in zip(a, b)])

    def __neg__(self) -> "Polynomial":
        return Polynomial([-c for c in self.coeffs])

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def shift(self) -> "Polynomial":
        """Multiply by x."""
        return Polynomial((Fraction(0),) + self.coeffs) if self.coeffs else self

    def derivative(self) -> "Polynomial":
        return Polynomial([i * c for i, c in enumerate(self.coeffs)][1:])

    def sign_at(self, x: Fraction) -> int:
        """Sign of P(x), computed in integer arithmetic."""
        x = Fraction(x)
        p, q = x.numerator, x.denominator
        scale = math.lcm(*(c.denominator for c in self.coeffs)) if self.coeffs else 1
        d = self.degree
        total = sum(int(c * scale) * p**i * q ** (d - i) for i, c in enumerate(self.coeffs))
        return (total > 0) - (total < 0)

    def to_strings(self) -> list[str]:
        return [str(c) for c in self.coeffs]


# ---------------------------------------------------------------------------
# independence polynomial


def _check_graph(g: Hypergraph) -> None:
    if g.r != 2:
        raise UniformityError("independence polynomials are defined for graphs (r = 2)")


def _by_enumeration(g: Hypergraph) -> list[int]:
    nb = neighbours(g)
    counts = [0] * (g.v + 1)

    def rec(i: int, blocked: int, size: int) -> None:
        if i == g.v:
            counts[size] += 1
            return
        rec(i + 1, blocked, size)
        if not blocked >> i & 1:
            mask = blocked | (1 << i)
            for y in nb[i]:
                mask |= 1 << y
            rec(i + 1, mask, size + 1)

    rec(0, 0, 0)
    return counts


def _by_recursion(g: Hypergraph) -> list[int]:
    """Deletion recursion I_G = I_{G-v} - x I_{G-N[v]}, memoised on the vertex mask."""
    closed = [1 << x for x in range(g.v)]
    for a, b in g.edges:
        closed[a] |= 1 << b
        closed[b] |= 1 << a

    @lru_cache(maxsize=None)
    def rec(mask: int) -> tuple[int, ...]:
        if mask == 0:
            return (1,)
        x = (mask & -mask).bit_length() - 1
        without = rec(mask & ~(1 << x))
        with_x = rec(mask & ~closed[x])
        out = list(without) + [0] * (len(with_x) + 1 - len(without))
        for i, c in enumerate(with_x):
            out[i + 1] += c
        return tuple(out)

    counts = list(rec((1 << g.v) - 1))
    rec.cache_clear()
    return counts


def independence_counts(g: Hypergraph, method: str = "auto") -> list[int]:
    """``i_k(g)`` for k = 0..alpha(g)."""
    _check_graph(g)
    if method == "auto":
        method = "enumerate" if g.v <= 24 else "recursion"
    if method == "enumerate":
        if g.v > 24:
            raise BudgetExceeded(f"v={g.v} exceeds the enumeration budget 24")
        counts = _by_enumeration(g)
    elif method == "recursion":
        if g.v > 40:
            raise BudgetExceeded(f"v={g.v} exceeds the recursion budget 40")
        counts = _by_recursion(g)
    else:
        raise ValueError(f"unknown method {method!r}")
    while len(counts) > 1 and counts[-1] == 0:
        counts.pop()
    return counts


def independence_polynomial(g: Hypergraph, method: str = "auto") -> Polynomial:
    counts = independence_counts(g, method)
    return Polynomial([c * (-1) ** k for k, c in enumerate(counts)])


# ---------------------------------------------------------------------------
# root isolation


def smallest_root_bracket(p: Polynomial, tol=DEFAULT_TOL) -> tuple[Fraction, Fraction]:
    """Rational ``(lo, hi)`` in (0,1) with P(lo) > 0 > P(hi) and hi - lo <= tol.

    The first sign change is located on successively finer uniform grids,
    then narrowed by exact bisection.
    """
    tol = Fraction(tol)
    if tol <= 0:
        raise PreconditionError("tolerance must be positive")
    if p.sign_at(Fraction(0)) <= 0:
        raise PreconditionError("expected P(0) > 0")
    for n in (16, 256, 4096, 65536):
        hi = None
        lo = Fraction(0)
        for i in range(1, n):
            x = Fraction(i, n)
            s = p.sign_at(x)
            if s < 0:
                hi = x
                break
            if s > 0:
                lo = x
        if hi is not None:
            break
    else:
        raise PreconditionError("no sign change of the polynomial in (0, 1)")

    while hi - lo > tol or lo == 0:
        mid = (lo + hi) / 2
        s = p.sign_at(mid)
        if s > 0:
            lo = mid
        elif s < 0:
            hi = mid
        else:
            # exact root at mid; step off it on both sides
            delta = min(tol, hi - lo) / 4
            for _ in range(400):
                if p.sign_at(mid - delta) > 0 and p.sign_at(mid + delta) < 0:
                    return mid - delta, mid + delta
                delta /= 2
            raise PreconditionError("root is not simple; cannot bracket by sign change")
    return lo, hi


# ---------------------------------------------------------------------------
# witness kernel


def odd_witness_kernel(g: Hypergraph, alpha) -> StepKernel:
    """Parts of measure (alpha, 1-alpha); value 0 inside the first, +1 inside the second, -1 across.

    The kernel does not depend on ``g``; it is taken so the call reads as
    "the witness for g" and to reject hypergraphs.
    """
    _check_graph(g)
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise PreconditionError(f"alpha must lie in (0, 1), got {alpha}")
    return StepKernel(2, (alpha, 1 - alpha), [[0, -1], [-1, 1]])


def _require_all_odd(g: Hypergraph) -> None:
    _check_graph(g)
    _, all_odd = degree_sequence(g)
    if not all_odd:
        raise PreconditionError("every vertex must have odd degree")


def verify_witness_identity(g: Hypergraph, alpha) -> tuple[Fraction, Fraction, bool]:
    """Compare the kernel density with (1-alpha)^v I_G(alpha/(1-alpha))."""
    _require_all_odd(g)
    alpha = Fraction(alpha)
    lhs = density(g, odd_witness_kernel(g, alpha))
    rhs = (1 - alpha) ** g.v * independence_polynomial(g)(alpha / (1 - alpha))
    return lhs, rhs, lhs == rhs


@dataclass(frozen=True)
class OddCertificate:
    """An exact negative density of ``graph`` in the two-part witness kernel."""

    graph: Hypergraph
    alpha: Fraction
    density: Fraction
    polynomial: Polynomial
    bracket: tuple[Fraction, Fraction]
    source: Optional[Hypergraph] = None

    @property
    def kernel(self) -> StepKernel:
        return odd_witness_kernel(self.graph, self.alpha)

    def validate(self) -> bool:
        return self.density < 0 and density(self.graph, self.kernel) == self.density

    def to_dict(self) -> dict:
        out = {
            "kind": "odd-witness" if self.source is None else "levi-witness",
            "alpha": str(self.alpha),
            "density": str(self.density),
            "polynomial": self.polynomial.to_strings(),
            "bracket": [str(self.bracket[0]), str(self.bracket[1])],
            "graph": self.graph.to_text(),
        }
        if self.source is not None:
            out["hypergraph"] = self.source.to_text()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "OddCertificate":
        src = data.get("hypergraph")
        return cls(
            graph=Hypergraph.from_text(data["graph"]),
            alpha=Fraction(data["alpha"]),
            density=Fraction(data["density"]),
            polynomial=Polynomial(data["polynomial"]),
            bracket=(Fraction(data["bracket"][0]), Fraction(data["bracket"][1])),
            source=Hypergraph.from_text(src) if src else None,
        )


def certify_nonpositive_odd(g: Hypergraph, tol=DEFAULT_TOL, max_refinements: int = 200) -> OddCertificate:
    """Find alpha with an exactly negative witness density for a connected all-odd graph.

    Candidates are the dyadics ``ceil(a * 2^j) / 2^j`` approaching, from above,
    the alpha that corresponds to the upper end of the root bracket; the first
    candidate with a negative exact density is returned.
    """
    _require_all_odd(g)
    if not g.edges:
        raise PreconditionError("graph must have at least one edge")
    if not is_connected(g):
        raise PreconditionError("graph must be connected")
    poly = independence_polynomial(g)
    lo, hi = smallest_root_bracket(poly, tol)
    target = hi / (1 + hi)
    for j in range(1, max_refinements):
        scale = 2**j
        alpha = Fraction(-((-target.numerator * scale) // target.denominator), scale)
        if not 0 < alpha < 1:
            continue
        if poly.sign_at(alpha / (1 - alpha)) >= 0:
            continue
        value = density(g, odd_witness_kernel(g, alpha))
        if value < 0:
            return OddCertificate(g, alpha, value, poly, (lo, hi))
    raise PreconditionError("no negative witness found; check the root bracket")


def levi_nonpositivity(h: Hypergraph, tol=DEFAULT_TOL) -> OddCertificate:
    """Negative witness density for the Levi graph of an odd-uniform, all-odd-degree hypergraph."""
    if h.r % 2 == 0:
        raise PreconditionError("uniformity must be odd")
    _, all_odd = degree_sequence(h)
    if not all_odd:
        raise PreconditionError("every vertex of the hypergraph must have odd degree")
    if not is_connected(h):
        raise PreconditionError("hypergraph must be connected")
    cert = certify_nonpositive_odd(levi(h), tol)
    return OddCertificate(cert.graph, cert.alpha, cert.density, cert.polynomial, cert.bracket, source=h)
