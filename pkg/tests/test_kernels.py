import itertools
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import hypergraphs, random_hypergraph, random_kernel, step_kernels
from oracles import density_bruteforce
from poslab import kernels as K
from poslab.errors import BudgetExceeded, PreconditionError, UniformityError
from poslab.indpoly import odd_witness_kernel
from poslab.structures import (
    Hypergraph,
    complete_graph,
    disjoint_union,
    edge_subgraphs,
    grid,
    hom_count,
    relabel,
    single_edge,
    star_graph,
    tight_cycle,
)


def brute(h, w):
    return density_bruteforce(h.r, h.v, h.edges, w.measures, w.value)


def test_constructor_validation():
    with pytest.raises(PreconditionError):
        K.StepKernel(2, (Fraction(1, 2), Fraction(1, 3)), [[0, 0], [0, 0]])
    with pytest.raises(PreconditionError):
        K.StepKernel(2, (Fraction(1, 2), Fraction(1, 2)), [[0, 1], [0, 0]])
    with pytest.raises(PreconditionError):
        K.StepKernel(2, (1, 0), [[0, 0], [0, 0]])
    with pytest.raises((TypeError, PreconditionError)):
        K.StepKernel(2, (1,), [[0.5]])


def test_graphon_predicate():
    assert K.constant_kernel(2, Fraction(1, 2)).is_graphon()
    assert not K.constant_kernel(2, -1).is_graphon()
    assert not K.constant_kernel(2, 2).is_graphon()


def test_json_round_trip():
    w = odd_witness_kernel(complete_graph(2), Fraction(2, 5))
    data = json.loads(w.to_json())
    assert data["parts"] == ["2/5", "3/5"]
    assert data["values"] == ["0", "-1", "-1", "1"]
    assert K.StepKernel.from_json(w.to_json()) == w


def test_json_rejects_asymmetric():
    text = json.dumps({"r": 2, "parts": ["1/2", "1/2"], "values": ["0", "1", "0", "0"]})
    with pytest.raises(PreconditionError):
        K.StepKernel.from_json(text)


def test_density_examples():
    assert K.density(complete_graph(2), K.constant_kernel(2, Fraction(1, 2))) == Fraction(1, 2)
    assert K.density(complete_graph(3), K.constant_kernel(2, -1)) == -1
    w = odd_witness_kernel(complete_graph(2), Fraction(2, 5))
    assert K.density(complete_graph(2), w) == Fraction(-3, 25)


def test_density_uniformity_mismatch():
    with pytest.raises(UniformityError):
        K.density(single_edge(3), K.constant_kernel(2, 1))


def test_density_budget():
    h = complete_graph(8)
    w = random_kernel(np.random.default_rng(0), 2, 40)
    with pytest.raises(BudgetExceeded):
        K.density(h, w, budget=10**5)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_density_matches_bruteforce(data):
    h = data.draw(hypergraphs(max_v=5, max_e=5))
    w = data.draw(step_kernels(h.r, max_k=3))
    assert K.density(h, w) == brute(h, w)


def test_density_object_path_for_large_numbers():
    # large numerators force the arbitrary-precision branch
    w = K.StepKernel(2, (Fraction(1, 3), Fraction(2, 3)), [[Fraction(10**12, 7), 3], [3, -(10**11)]])
    h = tight_cycle(3, 5)
    assert K.density(complete_graph(4), w) == brute(complete_graph(4), w)
    with pytest.raises(UniformityError):
        K.density(h, w)


def test_kernel_of_matches_hom_count():
    rng = np.random.default_rng(1)
    for _ in range(40):
        r = int(rng.integers(2, 4))
        h = random_hypergraph(rng, r, int(rng.integers(r, 5)), int(rng.integers(0, 4)))
        g = random_hypergraph(rng, r, int(rng.integers(r, 7)), int(rng.integers(0, 8)))
        assert K.density(h, K.kernel_of(g)) == Fraction(hom_count(h, g), g.v**h.v)


def test_center():
    assert K.center(K.constant_kernel(2, Fraction(1, 3)), Fraction(1, 3)) == K.constant_kernel(2, 0)
    g = tight_cycle(3, 7)
    w = K.kernel_of(g)
    assert K.density(single_edge(3), K.center(w, K.edge_density(w))) == 0


def test_perturb():
    w = random_kernel(np.random.default_rng(2), 2, 3)
    assert K.perturb(w, 0) == K.StepKernel(2, w.measures, np.full((3, 3), Fraction(1), dtype=object))
    assert K.perturb(K.constant_kernel(2, -1), 1) == K.constant_kernel(2, 0)
    eps = Fraction(2, 7)
    assert K.density(complete_graph(2), K.perturb(w, eps)) == 1 + eps * K.density(complete_graph(2), w)


def test_tensor_examples():
    a, b = K.constant_kernel(3, Fraction(2, 3)), K.constant_kernel(3, -2)
    t = K.tensor(a, b)
    assert t.k == 1 and t.value((0, 0, 0)) == Fraction(-4, 3)
    w = random_kernel(np.random.default_rng(3), 2, 3)
    assert K.tensor(w, K.constant_kernel(2, 1)) == w
    with pytest.raises(UniformityError):
        K.tensor(w, K.constant_kernel(3, 1))


def test_tensor_part_order():
    w = K.StepKernel(2, (Fraction(1, 4), Fraction(3, 4)), [[1, 2], [2, 3]])
    u = K.StepKernel(2, (Fraction(1, 2), Fraction(1, 2)), [[5, 7], [7, 11]])
    t = K.tensor(w, u)
    for a, b, c, d in itertools.product(range(2), repeat=4):
        assert t.value((a * 2 + b, c * 2 + d)) == w.value((a, c)) * u.value((b, d))
    assert t.measures[1] == Fraction(1, 8)


def test_expansion_examples():
    w = random_kernel(np.random.default_rng(4), 2, 2)
    eps = Fraction(1, 5)
    assert K.expansion_density(complete_graph(2), w, eps) == 1 + eps * K.density(complete_graph(2), w)
    assert K.expansion_density(complete_graph(3), K.constant_kernel(2, -1), 1) == 0
    assert K.density(complete_graph(3), K.constant_kernel(2, 0)) == 0


def test_parity_kernel_examples():
    u = K.parity_kernel(3)
    g = grid(3)
    assert K.density(g, u) == 1
    for f in edge_subgraphs(g):
        if f.e < g.e:
            assert K.density(f, u) == 0
    assert K.density(tight_cycle(3, 6), u) == 0
    with pytest.raises(PreconditionError):
        K.parity_kernel(1)


def test_parity_kernel_random_3graphs():
    rng = np.random.default_rng(6)
    u = K.parity_kernel(3)
    for _ in range(20):
        h = random_hypergraph(rng, 3, int(rng.integers(3, 7)), int(rng.integers(1, 7)))
        even = all(d % 2 == 0 for d in h.degrees())
        assert K.density(h, u) == (1 if even else 0)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_multiplicativity(data):
    h1 = data.draw(hypergraphs(r=2, max_v=4, max_e=3))
    h2 = data.draw(hypergraphs(r=2, max_v=4, max_e=3))
    w = data.draw(step_kernels(2))
    assert K.density(disjoint_union(h1, h2), w) == K.density(h1, w) * K.density(h2, w)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_relabeling_invariance(data):
    h = data.draw(hypergraphs(max_v=5, max_e=4))
    w = data.draw(step_kernels(h.r))
    vperm = data.draw(st.permutations(range(h.v)))
    pperm = data.draw(st.permutations(range(w.k)))
    assert K.density(relabel(h, list(vperm)), K.permute_parts(w, list(pperm))) == K.density(h, w)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_expansion_equals_direct(data):
    h = data.draw(hypergraphs(max_v=5, max_e=5))
    w = data.draw(step_kernels(h.r))
    eps = data.draw(st.fractions(min_value=-1, max_value=1, max_denominator=5))
    assert K.expansion_density(h, w, eps) == K.density(h, K.perturb(w, eps))


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_tensor_identity(data):
    h = data.draw(hypergraphs(max_v=5, max_e=5))
    w = data.draw(step_kernels(h.r, max_k=2))
    u = data.draw(step_kernels(h.r, max_k=2))
    assert K.density(h, K.tensor(w, u)) == K.density(h, w) * K.density(h, u)


def test_float_density_agrees():
    rng = np.random.default_rng(7)
    for _ in range(10):
        h = random_hypergraph(rng, 3, 5, 4)
        w = random_kernel(rng, 3, 3)
        exact = K.density(h, w)
        approx = K.float_density(h, w.float_values(), np.array([float(m) for m in w.measures]))
        assert approx == pytest.approx(float(exact), abs=1e-12)


def test_isolated_vertices_ignored():
    h = Hypergraph(2, 6, ((0, 1),))
    w = random_kernel(np.random.default_rng(8), 2, 3)
    assert K.density(h, w) == K.density(complete_graph(2), w)
    assert K.density(Hypergraph(2, 4), w) == 1
    assert K.density(star_graph(3), w) == brute(star_graph(3), w)
