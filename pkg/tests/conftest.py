import itertools
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from poslab.kernels import StepKernel  # noqa: E402
from poslab.structures import Hypergraph  # noqa: E402

rationals = st.fractions(min_value=-2, max_value=2, max_denominator=7)


@st.composite
def hypergraphs(draw, r=None, max_v=5, max_e=5, min_e=0):
    r = draw(st.sampled_from([2, 3])) if r is None else r
    v = draw(st.integers(r, max_v))
    pool = list(itertools.combinations(range(v), r))
    edges = draw(st.lists(st.sampled_from(pool), min_size=min_e, max_size=max_e, unique=True))
    return Hypergraph(r, v, tuple(edges))


@st.composite
def step_kernels(draw, r, max_k=3):
    k = draw(st.integers(1, max_k))
    raw = draw(st.lists(st.integers(1, 5), min_size=k, max_size=k))
    measures = [Fraction(x, sum(raw)) for x in raw]
    classes = {}
    for c in itertools.combinations_with_replacement(range(k), r):
        classes[c] = draw(rationals)
    vals = np.empty((k,) * r, dtype=object)
    for t in itertools.product(range(k), repeat=r):
        vals[t] = classes[tuple(sorted(t))]
    return StepKernel(r, measures, vals)


def random_kernel(rng, r, k, lo=-1, hi=1, den=6):
    raw = rng.integers(1, 5, size=k)
    measures = [Fraction(int(x), int(raw.sum())) for x in raw]
    vals = np.empty((k,) * r, dtype=object)
    classes = {}
    for t in itertools.product(range(k), repeat=r):
        c = tuple(sorted(t))
        if c not in classes:
            classes[c] = Fraction(int(rng.integers(lo * den, hi * den + 1)), den)
        vals[t] = classes[c]
    return StepKernel(r, measures, vals)


def random_hypergraph(rng, r, v, e):
    pool = list(itertools.combinations(range(v), r))
    e = min(e, len(pool))
    idx = rng.choice(len(pool), size=e, replace=False)
    return Hypergraph(r, v, tuple(pool[i] for i in idx))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
