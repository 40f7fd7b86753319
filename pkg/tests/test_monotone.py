from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ergodic_gc.admissible import get_spec
from ergodic_gc.field import Configuration, bernoulli, marginal_pmf_bruteforce, product_model
from ergodic_gc.lattice import Box
from ergodic_gc.monotone import (discrete_graph_mass, in_cone, is_monotone_graph,
                                 is_strictly_monotone_graph, sign_vector)

points = st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)),
                  min_size=1, max_size=8)
signs = st.lists(st.sampled_from([-1, 1]), min_size=3, max_size=3)


def test_cone_examples():
    assert in_cone((0, 0), (0, 0), (1, 1))
    assert in_cone((1, 2), (0, 0), (1, 1))
    assert not in_cone((1, -1), (0, 0), (1, 1))
    assert in_cone((-1, -2), (0, 0), (-1, -1))
    with pytest.raises(ValueError):
        in_cone((0, 0), (0,), (1, 1))
    with pytest.raises(ValueError):
        sign_vector([1, 0])


def test_graph_examples():
    s = (1, 1)
    assert is_strictly_monotone_graph([(5, 5)], s)
    assert is_strictly_monotone_graph([(0, 0), (1, -1)], s)
    assert not is_strictly_monotone_graph([(0, 0), (1, 1)], s)
    assert is_monotone_graph([(0, 0), (0, 1)], s)
    assert not is_monotone_graph([(0, 0), (1, 1)], s)


def test_mass_examples():
    assert discrete_graph_mass({(0, 0): Fraction(1)}, [(0, 0)], (1, 1)) == 1
    pmf = marginal_pmf_bruteforce(product_model(2, bernoulli("1/2")), Box(2, 1).vertex_set().union(
        Box(2, 1, (0, 1)).vertex_set()))
    assert discrete_graph_mass(pmf, [(0, 1), (1, 0)], (1, 1)) == Fraction(1, 2)
    assert discrete_graph_mass(pmf, [(5, -5)], (1, 1)) == 0
    with pytest.raises(ValueError):
        discrete_graph_mass(pmf, [(0, 0), (1, 1)], (1, 1))


@settings(max_examples=300, deadline=None)
@given(points, signs)
def test_strict_implies_monotone(pts, s):
    if is_strictly_monotone_graph(pts, s):
        assert is_monotone_graph(pts, s)


@settings(max_examples=300, deadline=None)
@given(st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)),
       st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)), signs)
def test_cone_duality(x, y, s):
    assert in_cone(y, x, s) == in_cone(x, y, [-v for v in s])


def test_antitone_spec_orders_outputs():
    spec = get_spec("anderson")
    rng = np.random.default_rng(0)
    box = Box(1, 4)
    for _ in range(100):
        lo = rng.uniform(0, 1, 4)
        hi = lo + rng.uniform(0, 1, 4)  # hi ∈ C_(+1,…)(lo)
        f_lo = spec(box, Configuration(box, lo))
        f_hi = spec(box, Configuration(box, hi))
        x = np.union1d(f_lo.locations, f_hi.locations)
        assert np.all(f_hi(x) <= f_lo(x))
