"""Tile averages, Monte Carlo expectations and the error decomposition.

``<f_m^r, L_{m,n}^{r,ω}>`` is computed exactly as the average of f over the
r-interiors of the m-tiles of Λ_n. ``<f_m^r, P_m^r>`` has no closed form and
is estimated from independent samples with a normal confidence radius.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .admissible import AdmissibleSpec
from .bounds import BoundInputs, cauchy_term, empmeasure_terms, geometric_bound
from .errors import ConfigError, PreconditionError
from .field import Configuration, FieldModel, sample_many, sample_window
from .lattice import Box, tiling_grid
from .parallel import chunked_map
from .rng import derive_seed, derive_seeds
from .stepfn import (StepFunction, linear_combine, normal_ci_radius, sup_distance,
                     sup_distance_to_cdf)

DECOMPOSE_COLUMNS = ("spec", "model", "d", "m", "n", "r", "seed", "lhs", "geom_bound",
                     "gc_stat", "ci", "pass")


def tile(m: int, r: int, d: int) -> Box:
    """Λ_m^r, the r-interior of the m-cube."""
    return Box(d, max(m - 2 * r, 0), (r,) * d)


def _check_triple(m: int, n: int, r: int):
    if not n > 2 * m > 4 * r:
        raise PreconditionError(f"need n > 2m > 4r (got n={n}, m={m}, r={r})")


def _sum(fs: list) -> StepFunction:
    # unit coefficients keep integer-valued sums exact; normalize afterwards
    return linear_combine([1.0] * len(fs), fs) if fs else StepFunction()


@dataclass
class EmpiricalPairing:
    m: int
    n: int
    r: int
    tile_count: int
    value: StepFunction


def _eval_tiles(spec: AdmissibleSpec, config: Configuration, base: Box, offsets) -> list:
    return [spec(base.translate(t), config) for t in offsets]


def empirical_pairing(spec: AdmissibleSpec, config: Configuration, m: int, r: int,
                      workers: int = 1) -> EmpiricalPairing:
    """(1/|T_{m,n}|) Σ_t f(Λ_m^r + t, ω) for a configuration on Λ_n."""
    win = config.window
    if not isinstance(win, Box) or any(win.offset):
        raise ValueError("empirical_pairing needs a configuration on Λ_n = [0, n)^d")
    n, d = win.side, win.dim
    if m > n:
        raise PreconditionError(f"tile side m={m} exceeds n={n}")
    grid = tiling_grid(m, n, d)
    fs = chunked_map(_eval_tiles, grid, workers, spec, config, tile(m, r, d))
    return EmpiricalPairing(m, n, r, len(grid), _sum(fs) / len(grid))


@dataclass
class ExpectationEstimate:
    m: int
    r: int
    samples: int
    value: StepFunction
    ci_radius: float


def _eval_samples(spec: AdmissibleSpec, model: FieldModel, window: Box, seeds) -> list:
    colors = sample_many(model, window, seeds)
    out = []
    for row in colors:
        f = spec(window, Configuration(window, row))
        out.append((f, f.map_values(np.square)))
    return out


def expectation_estimate(spec: AdmissibleSpec, model: FieldModel, m: int, r: int, samples: int,
                         master_seed: int, workers: int = 1) -> ExpectationEstimate:
    """Monte Carlo mean of f(Λ_m^r, ω) over ``samples`` independent fields."""
    if samples < 2:
        raise PreconditionError("at least two samples are needed for a confidence radius")
    window = tile(m, r, model.dim)
    seeds = derive_seeds(master_seed, "expectation", samples)
    pairs = chunked_map(_eval_samples, seeds, workers, spec, model, window)
    mean_f = _sum([p[0] for p in pairs]) / samples
    mean_sq = _sum([p[1] for p in pairs]) / samples
    return ExpectationEstimate(m, r, samples, mean_f, normal_ci_radius(mean_f, mean_sq, samples))


def field_seed(master_seed: int) -> int:
    return derive_seed(master_seed, "field", 0)


@dataclass
class GCStatistic:
    stat: float
    ci: float
    pairing: EmpiricalPairing
    expectation: ExpectationEstimate


def gc_sup_statistic(spec: AdmissibleSpec, model: FieldModel, m: int, r: int, n: int,
                     master_seed: int, samples: int, workers: int = 1,
                     config: Configuration | None = None) -> GCStatistic:
    """||<f_m^r, L_{m,n}^{r,ω}> − <f_m^r, P_m^r>|| / m^d with ω sampled on Λ_n."""
    _check_triple(m, n, r)
    if config is None:
        config = sample_window(model, Box(model.dim, n), field_seed(master_seed))
    pairing = empirical_pairing(spec, config, m, r, workers)
    exp = expectation_estimate(spec, model, m, r, samples, master_seed, workers)
    vol = m ** model.dim
    return GCStatistic(sup_distance(pairing.value, exp.value) / vol, exp.ci_radius / vol,
                       pairing, exp)


def cauchy_in_m_diagnostic(spec: AdmissibleSpec, model: FieldModel, r: int, m_list,
                           samples: int, master_seed: int, workers: int = 1) -> list:
    """One row per consecutive pair m < M: δ(m, M) against the two distance-to-limit bounds."""
    m_list = list(m_list)
    if any(b <= a for a, b in zip(m_list, m_list[1:])):
        raise PreconditionError("m_list must be strictly increasing")
    if any(m <= 2 * r for m in m_list):
        raise PreconditionError(f"every m must exceed 2r = {2 * r}")
    d = model.dim
    est = {}
    for i, m in enumerate(m_list):
        e = expectation_estimate(spec, model, m, r, samples, derive_seed(master_seed, "cauchy", i),
                                 workers)
        est[m] = (e.value / m ** d, e.ci_radius / m ** d)
    rows = []
    for m, M in zip(m_list, m_list[1:]):
        delta = sup_distance(est[m][0], est[M][0])
        bound = cauchy_term(spec, d, m, r) + cauchy_term(spec, d, M, r)
        slack = 2.0 * (est[m][1] + est[M][1])
        rows.append({"m": m, "M": M, "delta": delta, "bound": bound, "slack": slack,
                     "pass": delta <= bound + slack})
    return rows


@dataclass
class Reference:
    """A limit f* to compare against: either an exact continuous CDF or an estimated step function."""

    label: str
    step: StepFunction | None = None
    cdf: Callable | None = None
    ci: float = 0.0
    allowance: float = 0.0

    def distance(self, g: StepFunction) -> float:
        if self.cdf is not None:
            return sup_distance_to_cdf(g, self.cdf, 0.0, 1.0)
        return sup_distance(g, self.step)


def uniform_cdf_reference(model: FieldModel) -> Reference:
    law = model.base_law
    if model.kind != "product" or law.name != "uniform":
        raise ConfigError("the exact classical reference needs a product uniform field")
    a, b = law.a, law.b
    return Reference("exact-uniform-cdf", cdf=lambda x: np.clip((x - a) / (b - a), 0.0, 1.0))


def default_reference(spec: AdmissibleSpec, model: FieldModel, master_seed: int,
                      workers: int = 1, R: int = 500, ref_samples: int = 200,
                      m_max: int = 20, box_side: int = 41) -> Reference:
    if spec.name == "classical-cdf":
        return uniform_cdf_reference(model)
    if spec.name == "anderson":
        from .anderson import pastur_shubin_estimate
        est = pastur_shubin_estimate(model, R, ref_samples, derive_seed(master_seed, "reference"),
                                     workers)
        return Reference("pastur-shubin", step=est.value, ci=est.ci_radius)
    if spec.name == "percolation":
        from .percolation import limit_estimates
        est = limit_estimates(model, m_max, box_side, ref_samples,
                              derive_seed(master_seed, "reference"), workers)
        return Reference("theta-hat", step=est.theta, ci=est.ci,
                         allowance=est.truncation_allowance)
    raise ConfigError(f"no reference limit known for {spec.name!r}")


@dataclass
class DecompositionReport:
    spec: str
    model: str
    d: int
    m: int
    n: int
    r: int
    seed: int
    lhs: float
    geom_bound: float
    gc_stat: float
    ci: float
    reference_ci: float
    allowance: float
    empmeasure_lhs: float
    empmeasure_terms: tuple = field(default_factory=tuple)

    @property
    def slack(self) -> float:
        return 3.0 * (self.ci + self.reference_ci) + self.allowance

    @property
    def passed(self) -> bool:
        return bool(self.lhs <= self.geom_bound + self.gc_stat + self.slack)

    @property
    def empmeasure_passed(self) -> bool:
        return bool(self.empmeasure_lhs <= sum(self.empmeasure_terms))

    def row(self) -> tuple:
        return (self.spec, self.model, self.d, self.m, self.n, self.r, self.seed, self.lhs,
                self.geom_bound, self.gc_stat, self.ci, self.passed)


def empmeasure_lhs(spec: AdmissibleSpec, config: Configuration, m: int, r: int,
                   workers: int = 1) -> float:
    """||f(Λ_n, ω)/n^d − <f_m^r, L_{m,n}^{r,ω}>/m^d|| for one configuration."""
    n, d = config.window.side, config.dim
    whole = spec(config.window, config) / n ** d
    return sup_distance(whole, empirical_pairing(spec, config, m, r, workers).value / m ** d)


def full_error_decomposition(spec: AdmissibleSpec, model: FieldModel, m: int, r: int, n: int,
                             master_seed: int, samples: int, reference: Reference | None = None,
                             workers: int = 1) -> DecompositionReport:
    """Checks ||f(Λ_n,ω)/n^d − f*|| <= G(m,n) + GC statistic + slack for one ω,
    where slack = 3·(sum of CI radii) + the reference's truncation allowance."""
    _check_triple(m, n, r)
    d = model.dim
    if reference is None:
        reference = default_reference(spec, model, master_seed, workers)
    config = sample_window(model, Box(d, n), field_seed(master_seed))
    gc = gc_sup_statistic(spec, model, m, r, n, master_seed, samples, workers, config=config)
    whole = spec(config.window, config) / n ** d
    lhs = reference.distance(whole)
    geom = geometric_bound(BoundInputs(spec.K, spec.D, spec.D_prime, spec.r_prime, r, d, m, n))
    emp_lhs = sup_distance(whole, gc.pairing.value / m ** d)
    return DecompositionReport(spec.name, model.label(), d, m, n, r, master_seed, lhs, geom,
                               gc.stat, gc.ci, reference.ci, reference.allowance, emp_lhs,
                               empmeasure_terms(spec, d, m, n, r))
