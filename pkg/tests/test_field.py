from fractions import Fraction

import numpy as np
import pytest

from ergodic_gc.errors import ConfigError
from ergodic_gc.field import (BaseLaw, Configuration, FieldModel, bernoulli, independence_check,
                              marginal_pmf_bruteforce, marginalize, product_model, sample_many,
                              sample_window)
from ergodic_gc.lattice import Box, VertexSet
from ergodic_gc.rng import derive_seeds

HALF = {"name": "bernoulli", "p": "1/2"}


def conv(c=1, weights=None, beta=0, law=HALF, d=1):
    return FieldModel.from_dict({"dim": d, "kind": "finite_range_convolution", "c": c,
                                 "base_law": law, "weights": weights, "beta": beta})


def test_correlation_length():
    assert product_model(2, bernoulli("1/3")).r == 0
    assert conv(c=2).r == 4
    assert FieldModel.from_dict({"dim": 1, "kind": "invertible_moving_average", "c": 1,
                                 "base_law": {"name": "uniform"}}).r == 2


def test_degenerate_samples():
    cfg = sample_window(product_model(2, bernoulli(1)), Box(2, 4), 3)
    assert np.all(cfg.colors == 1)
    zero = {"name": "discrete", "values": [0], "probs": [1]}
    cfg = sample_window(conv(c=0, weights=[1], beta=5, law=zero), Box(1, 6), 9)
    assert np.all(cfg.colors == 5)


def test_overlap_consistency():
    m = conv(c=1)
    a = sample_window(m, Box(1, 10), 42)
    b = sample_window(m, Box(1, 10, (4,)), 42)
    assert np.array_equal(a.colors[4:], b.colors[:6])
    g = product_model(2, BaseLaw("normal"))
    x = sample_window(g, Box(2, 4), 1)
    y = sample_window(g, Box(2, 4, (2, 2)), 1)
    assert np.array_equal(x.grid()[2:, 2:], y.grid()[:2, :2])


def test_stationarity_single_site_pmf():
    m = conv(c=1)
    seeds = derive_seeds(5, "stat", 10_000)
    a = sample_many(m, VertexSet([(0,)]), seeds)[:, 0]
    b = sample_many(m, VertexSet([(17,)]), seeds)[:, 0]
    for v in (0, 1, 2, 3):
        pa, pb = np.mean(a == v), np.mean(b == v)
        se = np.sqrt(2 * max(pa * (1 - pa), 1e-4) / len(a))
        assert abs(pa - pb) <= 4 * se


def test_bruteforce_examples():
    assert marginal_pmf_bruteforce(product_model(1, bernoulli("1/3")), VertexSet([(0,)])) == {
        (0,): Fraction(2, 3), (1,): Fraction(1, 3)}
    pmf = marginal_pmf_bruteforce(conv(c=1), VertexSet([(0,)]))
    assert pmf == {(0,): Fraction(1, 8), (1,): Fraction(3, 8), (2,): Fraction(3, 8),
                   (3,): Fraction(1, 8)}
    joint = marginal_pmf_bruteforce(conv(c=1), VertexSet([(0,), (1,)]))
    assert sum(joint.values()) == 1
    m0, m1 = marginalize(joint, [0]), marginalize(joint, [1])
    factorizes = all(joint.get((a[0], b[0]), 0) == p * q for a, p in m0.items() for b, q in m1.items())
    assert not factorizes
    far = marginal_pmf_bruteforce(conv(c=1), VertexSet([(0,), (3,)]))
    f0, f1 = marginalize(far, [0]), marginalize(far, [1])
    assert all(far.get((a[0], b[0]), 0) == p * q for a, p in f0.items() for b, q in f1.items())


def test_bruteforce_matches_sampling():
    m = conv(c=1, weights=["1", "2", "1"], beta="1/2",
             law={"name": "discrete", "values": [0, 1, 3], "probs": ["1/2", "1/4", "1/4"]})
    pmf = marginalize(marginal_pmf_bruteforce(m, VertexSet([(0,), (1,)])), [0])
    assert sum(pmf.values()) == 1
    x = sample_many(m, VertexSet([(0,)]), derive_seeds(1, "bf", 20_000))[:, 0]
    for (v,), q in pmf.items():
        p = float(q)
        assert abs(np.mean(x == float(v)) - p) <= 4 * np.sqrt(p * (1 - p) / len(x)) + 1e-12


def test_independence_check():
    assert independence_check(product_model(1, bernoulli("1/2")), 1, 20_000).independent
    assert independence_check(conv(c=1), 3, 20_000, master_seed=1).independent
    assert not independence_check(conv(c=1), 1, 20_000, master_seed=2).independent


def test_covariance_at_distance():
    seeds = derive_seeds(3, "cov", 100_000)
    x = sample_many(conv(c=1), Box(1, 4), seeds)
    for dist, dependent in ((1, True), (3, False)):
        a, b = x[:, 0], x[:, dist]
        prod = (a - a.mean()) * (b - b.mean())
        se = prod.std() / np.sqrt(len(prod))
        assert (abs(prod.mean()) > 3 * se) == dependent


def test_moving_average_models_sample():
    g = FieldModel.from_dict({"dim": 2, "kind": "gaussian_moving_average", "c": 1,
                              "base_law": {"name": "normal"}, "weights": [1, 1, 1, 1, 1]})
    x = sample_many(g, VertexSet([(0, 0)]), derive_seeds(0, "g", 20_000))[:, 0]
    assert abs(x.var() - 5) < 0.3
    ima = FieldModel.from_dict({"dim": 1, "kind": "invertible_moving_average", "c": 1,
                                "base_law": {"name": "uniform"}})
    y = sample_many(ima, VertexSet([(0,)]), derive_seeds(0, "i", 20_000))[:, 0]
    assert abs(y.mean() - 0.5) < 0.01 and y.min() >= 0 and y.max() < 1


@pytest.mark.parametrize("bad", [
    {"dim": 1, "kind": "nope", "base_law": HALF},
    {"dim": 1, "kind": "product", "base_law": {"name": "bernoulli", "p": 2}},
    {"dim": 1, "kind": "product", "base_law": HALF, "c": 1},
    {"dim": 1, "kind": "finite_range_convolution", "c": 1, "base_law": {"name": "normal"}},
    {"dim": 1, "kind": "finite_range_convolution", "c": 1, "base_law": HALF, "weights": [1, 2]},
    {"dim": 1, "kind": "product", "base_law": HALF, "extra": 1},
    {"kind": "product", "base_law": HALF},
])
def test_invalid_models(bad):
    with pytest.raises(ConfigError):
        FieldModel.from_dict(bad)


def test_model_round_trip():
    m = conv(c=1, weights=["1/2", 1, "3"], beta="1/3")
    assert FieldModel.from_dict(m.to_dict()) == m


def test_configuration_views():
    cfg = Configuration(Box(2, 3), np.arange(9.0))
    sub = cfg.restrict(Box(2, 2, (1, 1)))
    assert sub.colors.tolist() == [4.0, 5.0, 7.0, 8.0]
    sh = cfg.shifted((1, 0), VertexSet([(0, 0)]))
    assert sh.colors.tolist() == [3.0]
    assert cfg.with_color((0, 0), 9.0).colors[0] == 9.0
    with pytest.raises(KeyError):
        cfg.colors_at(np.array([[5, 5]]))
