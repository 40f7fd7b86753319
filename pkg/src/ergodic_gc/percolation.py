"""Site percolation: clusters, the cluster counting function and cluster statistics.

A site with color 1 is open. Two adjacent sites are joined when both are
open, so every closed site is its own singleton cluster. Clusters of a window
only use edges inside the window.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numba
import numpy as np

from .admissible import AdmissibleSpec
from .errors import PreconditionError
from .field import Configuration, FieldModel, sample_many
from .lattice import Box, Window, adjacency_pairs, boundary_size
from .parallel import chunked_map
from .rng import derive_seeds
from .stepfn import StepFunction, counting_function


@numba.njit(cache=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@numba.njit(cache=True)
def _union_find(n, ii, jj, is_open):
    parent = np.arange(n)
    size = np.ones(n, dtype=np.int64)
    for k in range(len(ii)):
        a, b = ii[k], jj[k]
        if not (is_open[a] and is_open[b]):
            continue
        ra, rb = _find(parent, a), _find(parent, b)
        if ra == rb:
            continue
        if size[ra] < size[rb]:
            ra, rb = rb, ra
        parent[rb] = ra
        size[ra] += size[rb]
    roots = np.empty(n, dtype=np.int64)
    for x in range(n):
        roots[x] = _find(parent, x)
    return roots


@dataclass
class ClusterDecomposition:
    """``cluster_id[i]`` is the cluster of the i-th vertex (lexicographic order);
    ids are numbered by the lexicographically smallest vertex of each cluster."""

    window: Window
    cluster_id: np.ndarray
    cluster_size: np.ndarray

    @property
    def count(self) -> int:
        return len(self.cluster_size)

    def members(self, k: int) -> np.ndarray:
        return self.window.vertices[self.cluster_id == k]

    def size_of(self, point) -> int:
        i = self.window.lookup(np.asarray(point).reshape(1, -1))[0]
        if i < 0:
            raise KeyError(f"{point} is not in the window")
        return int(self.cluster_size[self.cluster_id[i]])


def _binary(config: Configuration) -> np.ndarray:
    c = config.colors
    if not np.all((c == 0.0) | (c == 1.0)):
        raise ValueError("percolation needs colors in {0, 1}")
    return c == 1.0


def clusters(config: Configuration) -> ClusterDecomposition:
    is_open = _binary(config)
    n = len(config)
    if n == 0:
        return ClusterDecomposition(config.window, np.zeros(0, dtype=np.int64),
                                    np.zeros(0, dtype=np.int64))
    ii, jj = adjacency_pairs(config.window)
    roots = _union_find(n, ii, jj, is_open)
    # smallest vertex index of each root's cluster, which is its lexicographic minimum
    first = np.full(n, n, dtype=np.int64)
    np.minimum.at(first, roots, np.arange(n))
    leaders, ids = np.unique(first[roots], return_inverse=True)
    sizes = np.bincount(ids, minlength=len(leaders))
    return ClusterDecomposition(config.window, ids.astype(np.int64), sizes.astype(np.int64))


def cluster_counting_function(config: Configuration) -> StepFunction:
    """λ ↦ number of clusters of size ≤ λ (each cluster counted once)."""
    return counting_function(clusters(config).cluster_size.astype(np.float64))


def cluster_histograms(config: Configuration) -> tuple:
    """Exact (a, b, c) as {m: Fraction}: clusters of size m per site, per
    cluster, and sites in size-m clusters per site."""
    sizes = clusters(config).cluster_size
    n, k = len(config), len(sizes)
    hist = Counter(int(s) for s in sizes)
    a = {m: Fraction(cnt, n) for m, cnt in sorted(hist.items())}
    b = {m: Fraction(cnt, k) for m, cnt in sorted(hist.items())}
    c = {m: Fraction(m * cnt, n) for m, cnt in sorted(hist.items())}
    return a, b, c


def _center_samples(model: FieldModel, box: Box, center: int, seeds) -> list:
    """(|C_0|, touches the outer layer) per seed."""
    colors = sample_many(model, box, seeds)
    lo = np.asarray(box.offset)
    hi = lo + box.side - 1
    on_edge = np.any((box.vertices == lo) | (box.vertices == hi), axis=1)
    out = []
    for row in colors:
        dec = clusters(Configuration(box, row))
        k = dec.cluster_id[center]
        out.append((int(dec.cluster_size[k]), bool(np.any(on_edge[dec.cluster_id == k]))))
    return out


@dataclass
class LimitEstimates:
    theta: StepFunction
    phi: StepFunction
    psi: StepFunction
    kappa: float
    ci: float
    pmf: np.ndarray  # pmf[j-1] ≈ P(|C_0| = j), j = 1..m_max
    tail: float  # estimate of P(|C_0| > m_max)
    touch_rate: float
    samples: int

    @property
    def truncation_allowance(self) -> float:
        """Bound on the part of Θ beyond m_max that the estimate omits."""
        return self.tail / len(self.pmf)


def limit_estimates(model: FieldModel, m_max: int, box_side: int, samples: int,
                    master_seed: int, workers: int = 1) -> LimitEstimates:
    """Monte Carlo estimates of Θ, Φ = Θ/κ and Ψ from the cluster of the origin.

    The origin sits at the center of a box of odd side ``box_side``. A cluster
    reaching the outer layer is censored and counted only in the tail beyond
    ``m_max``; a half-side of at least ``m_max`` makes censoring impossible
    for smaller clusters.
    """
    if m_max < 1 or samples < 2:
        raise PreconditionError("m_max >= 1 and samples >= 2 required")
    half = box_side // 2
    if box_side % 2 == 0 or half < m_max:
        raise PreconditionError(
            f"box_side must be odd with half-side >= m_max (box_side={box_side}, m_max={m_max})")
    d = model.dim
    box = Box(d, box_side, (-half,) * d)
    center = int(box.lookup(np.zeros((1, d), dtype=np.int64))[0])
    seeds = derive_seeds(master_seed, "percolation-limit", samples)
    res = chunked_map(_center_samples, seeds, workers, model, box, center)
    sizes = np.array([s for s, _ in res], dtype=np.int64)
    touched = np.array([t for _, t in res], dtype=bool)
    early = np.mean(touched & (sizes <= m_max))
    if early > 0.01:
        raise PreconditionError(
            f"censoring rate {early:.3%} for sizes <= {m_max} exceeds 1%; enlarge the box")
    js = np.arange(1, m_max + 1)
    good = ~touched
    counts = np.array([np.sum(good & (sizes == j)) for j in js])
    pmf = counts / samples
    tail = 1.0 - pmf.sum()
    theta = StepFunction(js.astype(float), np.cumsum(pmf / js))
    psi = StepFunction(js.astype(float), np.cumsum(pmf))
    # a censored cluster has at least its observed size, so 1/size is an upper estimate
    kappa = float(np.mean(1.0 / sizes))
    phi = theta / kappa
    ci = 0.0
    for m in js:
        g = np.where(good & (sizes <= m), 1.0 / sizes, 0.0)
        ci = max(ci, 1.96 * math.sqrt(g.var(ddof=1) / samples))
    return LimitEstimates(theta, phi, psi, kappa, ci, pmf, float(tail),
                          float(touched.mean()), samples)


def _boundary_term(window: Window) -> float:
    return 2.0 * boundary_size(window, 1)


def percolation_spec() -> AdmissibleSpec:
    return AdmissibleSpec(
        name="percolation",
        evaluate=cluster_counting_function,
        boundary_coeff=2.0,
        boundary_term=_boundary_term,
        K=3.0, D=2.0, D_prime=2.0, r_prime=1,
        sign=-1,
        single_site_bound=1.0,
        binary_colors=True,
        default_model={"kind": "product", "base_law": {"name": "bernoulli", "p": "1/2"}},
    )
