from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

from ergodic_gc.errors import PreconditionError
from ergodic_gc.field import Configuration, bernoulli, product_model, sample_window
from ergodic_gc.lattice import Box
from ergodic_gc.percolation import (cluster_counting_function, cluster_histograms, clusters,
                                    limit_estimates)
from ergodic_gc.rng import derive_seed


def nx_sizes(cfg: Configuration) -> list:
    """Oracle: connected components of the open-site graph plus closed singletons."""
    verts = [tuple(v) for v in cfg.window.vertices]
    g = nx.Graph()
    g.add_nodes_from(verts)
    is_open = dict(zip(verts, cfg.colors == 1))
    for v in verts:
        for k in range(len(v)):
            w = tuple(v[j] + (j == k) for j in range(len(v)))
            if w in is_open and is_open[v] and is_open[w]:
                g.add_edge(v, w)
    return sorted(len(c) for c in nx.connected_components(g))


def test_examples():
    closed = Configuration(Box(2, 2), [0, 0, 0, 0])
    assert clusters(closed).count == 4
    assert cluster_counting_function(closed).jumps() == [(1.0, 4.0)]
    full = Configuration(Box(2, 2), [1, 1, 1, 1])
    assert clusters(full).cluster_size.tolist() == [4]
    assert cluster_counting_function(full).jumps() == [(4.0, 1.0)]
    line = Configuration(Box(1, 4), [1, 1, 0, 1])
    dec = clusters(line)
    assert dec.cluster_id.tolist() == [0, 0, 1, 2] and dec.count == 3
    assert cluster_counting_function(line).jumps() == [(1.0, 2.0), (2.0, 3.0)]
    a, b, c = cluster_histograms(line)
    assert a == {1: Fraction(2, 4), 2: Fraction(1, 4)}
    assert c == {1: Fraction(2, 4), 2: Fraction(2, 4)}
    assert b == {1: Fraction(2, 3), 2: Fraction(1, 3)}
    assert cluster_histograms(closed) == ({1: 1}, {1: 1}, {1: 1})


@pytest.mark.parametrize("d,side", [(1, 40), (2, 9), (3, 4)])
def test_against_networkx(d, side):
    for t in range(15):
        cfg = sample_window(product_model(d, bernoulli("0.55")), Box(d, side), derive_seed(t, "nx"))
        dec = clusters(cfg)
        assert sorted(dec.cluster_size.tolist()) == nx_sizes(cfg)
        assert dec.cluster_size.sum() == len(cfg)


def test_ids_follow_lexicographic_minimum():
    cfg = sample_window(product_model(2, bernoulli("0.6")), Box(2, 8), 3)
    dec = clusters(cfg)
    firsts = [int(np.flatnonzero(dec.cluster_id == k)[0]) for k in range(dec.count)]
    assert firsts == sorted(firsts)
    assert dec.size_of((0, 0)) == dec.cluster_size[dec.cluster_id[0]]


def test_rejects_non_binary():
    with pytest.raises(ValueError):
        clusters(Configuration(Box(1, 3), [0, 0.5, 1]))


def test_flipping_open_never_increases_count():
    rng = np.random.default_rng(0)
    for t in range(1000):
        side = int(rng.integers(2, 7))
        cfg = sample_window(product_model(2, bernoulli("1/2")), Box(2, side), derive_seed(t, "flip"))
        shut = np.flatnonzero(cfg.colors == 0)
        if not len(shut):
            continue
        i = shut[rng.integers(len(shut))]
        f0 = cluster_counting_function(cfg)
        f1 = cluster_counting_function(cfg.with_color(cfg.window.vertices[i], 1.0))
        x = np.union1d(f0.locations, f1.locations)
        assert np.all(f1(x) <= f0(x))


def test_limit_estimates_p_zero():
    est = limit_estimates(product_model(2, bernoulli(0)), 3, 7, 10, 0)
    assert est.pmf.tolist() == [1.0, 0.0, 0.0] and est.kappa == 1.0
    assert est.theta.jumps() == [(1.0, 1.0)] == est.psi.jumps()


def test_limit_estimates_closed_forms():
    p = 0.3
    est = limit_estimates(product_model(2, bernoulli("0.3")), 4, 9, 20_000, 1)
    single = (1 - p) + p * (1 - p) ** 4
    se = np.sqrt(single * (1 - single) / 20_000)
    assert abs(est.pmf[0] - single) <= 4 * se
    est1 = limit_estimates(product_model(1, bernoulli("1/2")), 4, 9, 20_000, 2)
    assert abs(est1.pmf[1] - 0.125) <= 4 * np.sqrt(0.125 * 0.875 / 20_000)
    assert est1.phi(1.0) == pytest.approx(est1.theta(1.0) / est1.kappa)


def test_limit_estimates_box_checks():
    m = product_model(2, bernoulli("1/2"))
    with pytest.raises(PreconditionError):
        limit_estimates(m, 5, 8, 10, 0)
    with pytest.raises(PreconditionError):
        limit_estimates(m, 5, 7, 10, 0)


def test_limit_estimates_worker_independent():
    m = product_model(2, bernoulli("0.4"))
    a = limit_estimates(m, 3, 9, 64, 5, workers=1)
    b = limit_estimates(m, 3, 9, 64, 5, workers=3)
    assert a.theta == b.theta and a.kappa == b.kappa and a.ci == b.ci
