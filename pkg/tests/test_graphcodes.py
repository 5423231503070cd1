import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from oracles import falling, max_independent_set_milp, wht_direct
from poslab import graphcodes as G
from poslab.errors import BudgetExceeded, PreconditionError, UniformityError
from poslab.kernels import density
from poslab.structures import complete_graph, cycle_graph, graph, path_graph, single_edge, star_graph

K2, K3, P3 = complete_graph(2), complete_graph(3), path_graph(3)


def test_pair_index_colex():
    order = [(i, j) for j in range(5) for i in range(j)]
    assert [G.pair_index(i, j) for i, j in order] == list(range(10))
    assert G.pair_index(3, 1) == G.pair_index(1, 3)
    with pytest.raises(PreconditionError):
        G.pair_index(2, 2)


def test_graph_vector_hex_round_trip():
    x = G.GraphVector.from_edges(5, [(0, 1), (2, 4), (3, 4)])
    assert x.bits == (1 << 0) | (1 << 8) | (1 << 9)
    assert x.to_hex() == "n=5:301"
    assert G.GraphVector.from_hex(x.to_hex()) == x
    assert G.GraphVector.complete(4).to_hex() == "n=4:3f"
    assert sorted(x.edges()) == [(0, 1), (2, 4), (3, 4)]
    with pytest.raises(PreconditionError):
        G.GraphVector(3, 8)
    with pytest.raises(ValueError):
        G.GraphVector.from_hex("5:301")


def test_prefix_stability():
    # a graph on [n] keeps its bits when viewed on [n+1]
    x = G.GraphVector.from_edges(4, [(0, 3), (1, 2)])
    y = G.GraphVector.from_edges(5, [(0, 3), (1, 2)])
    assert x.bits == y.bits


@pytest.mark.parametrize("h,n,count", [(K3, 4, 4), (P3, 4, 12), (K2, 3, 3), (K3, 6, 20)])
def test_enumerate_copies(h, n, count):
    copies = G.enumerate_copies(h, n)
    assert len(copies) == count == len(set(copies))
    assert count == falling(n, h.v) // G.automorphism_count(h)


def test_enumerate_copies_errors():
    with pytest.raises(UniformityError):
        G.enumerate_copies(single_edge(3), 4)
    with pytest.raises(PreconditionError):
        G.enumerate_copies(K3, 2)
    with pytest.raises(BudgetExceeded):
        G.enumerate_copies(path_graph(8), 40)


def test_wht_matches_direct():
    rng = np.random.default_rng(0)
    for n in (2, 3, 4):
        f = rng.normal(size=2 ** G.num_pairs(n))
        table = G.wht(f, n)
        assert np.allclose(table.values, wht_direct(f))
        g = rng.integers(-3, 4, size=len(f))
        assert np.allclose(G.wht(g, n).values, wht_direct(g))


def test_parseval_convolution_inversion():
    rng = np.random.default_rng(1)
    for _ in range(20):
        n = int(rng.integers(2, 5))
        size = 2 ** G.num_pairs(n)
        f, g = rng.normal(size=size), rng.normal(size=size)
        ff, gg = G.wht(f, n).values, G.wht(g, n).values
        assert np.sum(ff**2) == pytest.approx(np.mean(f**2))
        assert np.allclose(G.wht(G.convolve(f, g), n).values, ff * gg)
        twice = G.wht_unnormalized(G.wht_unnormalized(f))
        assert np.allclose(twice, size * f)
        ints = rng.integers(-5, 6, size=size)
        assert np.array_equal(G.wht_unnormalized(G.wht_unnormalized(ints)), size * ints)


def test_wht_errors():
    with pytest.raises(PreconditionError):
        G.wht_unnormalized(np.zeros(6))
    with pytest.raises(PreconditionError):
        G.wht(np.zeros(16))
    with pytest.raises(PreconditionError):
        G.wht(np.zeros(8), 4)


def test_indicator_spectrum_basics():
    for h, n in ((K3, 4), (P3, 4), (K3, 5), (star_graph(3), 5)):
        copies, table = G.spectrum(h, n)
        beta = Fraction(len(copies), 2 ** G.num_pairs(n))
        assert table.exact(0) == beta
        assert np.min(table.raw) >= -len(copies)
        for x in range(0, len(table.raw), 7):
            assert table.exact(x) == G.fourier_coefficient_exact(copies, n, x)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_triangle_coefficient_at_complete_graph(n):
    copies, table = G.spectrum(K3, n)
    full = (1 << G.num_pairs(n)) - 1
    expected = Fraction(-math.comb(n, 3), 2 ** G.num_pairs(n))
    assert table.exact(full) == expected == G.fourier_coefficient_exact(copies, n, full)


def test_code_density_bound_k3_n4():
    b = G.code_density_bound(K3, 4)
    assert b.gamma <= Fraction(-1, 16)
    assert b.bound * b.beta == -b.gamma and b.gamma <= 0
    assert b.to_dict()["argmin"].startswith("n=4:")


def test_code_density_bound_p3_trend():
    bounds = [G.code_density_bound(P3, n).bound for n in (4, 5, 6, 7)]
    assert bounds == [Fraction(1, 3), Fraction(1, 3), Fraction(1, 5), Fraction(19, 105)]
    assert all(a >= b for a, b in zip(bounds[1:], bounds[2:]))


def test_signed_kernel_density_for_triangle():
    for n in (4, 5, 8):
        w = G.signed_kernel(G.GraphVector.complete(n))
        t = density(K3, w)
        assert t == Fraction(-n * (n - 1) * (n - 2), n**3) and t < 0


def test_refutation_threshold():
    # the coefficient at K_n is -beta, and the threshold is -54 beta / n
    assert G.positivity_refutation_from_fourier(K3, 54, G.GraphVector.complete(54)) is None
    res = G.positivity_refutation_from_fourier(K3, 55, G.GraphVector.complete(55))
    assert res is not None and res.density < 0 and res.coefficient < res.threshold
    assert G.positivity_refutation_from_fourier(K3, 6, G.GraphVector.complete(6)) is None
    with pytest.raises(PreconditionError):
        G.positivity_refutation_from_fourier(K3, 6, G.GraphVector.complete(5))


def test_refutation_never_for_p3():
    for n in (4, 5, 6):
        copies, table = G.spectrum(P3, n)
        beta = table.exact(0)
        threshold = -2 * 27 * beta / n
        assert min(table.exact(x) for x in range(len(table.raw))) >= threshold
        x = int(np.argmin(table.raw))
        assert G.positivity_refutation_from_fourier(P3, n, G.GraphVector(n, x)) is None


def test_expected_fourier_examples():
    minus = [[0, -1, -1], [-1, 0, -1], [-1, -1, 0]]
    e1, beta1 = G.expected_fourier_from_kernel(K3, minus, 1)
    assert e1 == -beta1
    zero = [[0] * 3 for _ in range(3)]
    assert G.expected_fourier_from_kernel(K3, zero, 2)[0] == 0
    ratios = [e / b for e, b in (G.expected_fourier_from_kernel(K3, minus, k) for k in (1, 2, 3))]
    assert ratios == [-1, Fraction(-2, 5), Fraction(-9, 28)]
    target = Fraction(-2, 9)
    assert all(abs(a - target) > abs(b - target) for a, b in zip(ratios, ratios[1:]))


def test_expected_fourier_matches_copy_sum():
    rng = np.random.default_rng(2)
    m, k = 3, 2
    w = [[Fraction(0)] * m for _ in range(m)]
    for i, j in itertools.combinations(range(m), 2):
        w[i][j] = w[j][i] = Fraction(int(rng.integers(-4, 5)), 4)
    e, beta = G.expected_fourier_from_kernel(P3, w, k)
    n = m * k
    copies = G.enumerate_copies(P3, n)
    pairs = [(i, j) for j in range(n) for i in range(j)]
    total = Fraction(0)
    for y in copies:
        prod = Fraction(1)
        for b in range(len(pairs)):
            if y >> b & 1:
                i, j = pairs[b]
                prod *= w[i // k][j // k]
        total += prod
    assert e == beta * total / len(copies)


def test_expected_fourier_errors():
    with pytest.raises(PreconditionError):
        G.expected_fourier_from_kernel(K3, [[1, 0], [0, 0]], 1)
    with pytest.raises(PreconditionError):
        G.expected_fourier_from_kernel(K3, [[0, 1], [0, 0]], 1)


def conflict_graph(h, n):
    copies = set(G.enumerate_copies(h, n))
    size = 2 ** G.num_pairs(n)
    return [{x ^ y for y in copies} for x in range(size)]


@pytest.mark.parametrize("h,n,expected", [(K2, 2, 1), (K3, 3, 4), (K3, 4, 32), (K3, 5, 512), (P3, 4, 16), (cycle_graph(4), 5, 192)])
def test_max_code(h, n, expected):
    size, code = G.bruteforce_max_code(h, n)
    assert size == expected == len(set(code))
    assert G.verify_code(code, G.enumerate_copies(h, n))


@pytest.mark.parametrize("h,n", [(K3, 3), (K3, 4), (P3, 4), (cycle_graph(4), 4), (graph(4, [(0, 1), (2, 3)]), 4)])
def test_max_code_matches_milp(h, n):
    assert G.bruteforce_max_code(h, n)[0] == max_independent_set_milp(conflict_graph(h, n))


def test_max_code_below_bound():
    for h, n in ((K3, 4), (K3, 5), (P3, 4), (cycle_graph(4), 5)):
        size, _ = G.bruteforce_max_code(h, n)
        b = G.code_density_bound(h, n)
        if b.bound < 1:
            assert Fraction(size, 2 ** G.num_pairs(n)) < b.bound


def test_max_code_budget():
    with pytest.raises(BudgetExceeded):
        G.bruteforce_max_code(K3, 6)
    with pytest.raises(BudgetExceeded):
        G.bruteforce_max_code(P3, 5, max_nodes=1000)
