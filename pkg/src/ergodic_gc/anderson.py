"""Finite-volume Anderson Hamiltonians and their eigenvalue counting functions.

``H = -Δ + V`` restricted to a window keeps the full-lattice diagonal ``2d``
(restriction acts on rows and columns only), so the matrix has diagonal
``2d + ω_z`` and ``-1`` between l1-adjacent sites of the window.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .admissible import AdmissibleSpec
from .errors import ResourceCapError
from .field import Configuration, FieldModel, sample_many
from .lattice import Box, Window, adjacency_pairs, boundary_size
from .parallel import chunked_map
from .rng import derive_seeds
from .stepfn import StepFunction, linear_combine, normal_ci_radius, sup_distance

DENSE_CAP = 4096
TRIDIAGONAL_CAP = 100_000
# eigenvalues are snapped to a grid of this relative spacing before counting
MERGE_RELATIVE = 2.0 ** -27


@dataclass
class Hamiltonian:
    window: Window
    dim: int
    matrix: np.ndarray


def assemble(config: Configuration, d: int | None = None) -> Hamiltonian:
    window = config.window
    d = window.dim if d is None else d
    if d != window.dim:
        raise ValueError(f"dimension mismatch: d={d}, window has dim {window.dim}")
    n = len(window)
    if n > DENSE_CAP:
        raise ResourceCapError(f"dense assembly capped at {DENSE_CAP} sites (got {n})")
    h = np.diag(2.0 * d + config.colors)
    i, j = adjacency_pairs(window)
    h[i, j] = -1.0
    h[j, i] = -1.0
    return Hamiltonian(window, d, h)


def norm_bound(config: Configuration) -> float:
    """Gershgorin bound 4d + max|ω| on the operator norm."""
    cmax = float(np.abs(config.colors).max()) if len(config) else 0.0
    return 4.0 * config.dim + cmax


def merge_quantum(config: Configuration) -> float:
    """Grid spacing for eigenvalue snapping: 2^-27 times a power-of-two norm bound."""
    bound = max(norm_bound(config), 1.0)
    return 2.0 ** math.ceil(math.log2(bound)) * MERGE_RELATIVE


def spectral_tolerance(config: Configuration) -> float:
    return 1e-7 * norm_bound(config)


def _snap(ev: np.ndarray, q: float) -> np.ndarray:
    return np.round(ev / q) * q


def _tridiagonal(config: Configuration):
    d = config.dim
    return 2.0 * d + config.colors, -np.ones(len(config) - 1)


def eigenvalues(config: Configuration) -> np.ndarray:
    """Sorted eigenvalues of H restricted to the configuration's window."""
    n = len(config)
    if n == 0:
        return np.zeros(0)
    if config.window.is_interval():
        if n > TRIDIAGONAL_CAP:
            raise ResourceCapError(f"tridiagonal path capped at {TRIDIAGONAL_CAP} sites (got {n})")
        if n == 1:
            return np.array([2.0 * config.dim + config.colors[0]])
        diag, off = _tridiagonal(config)
        return linalg.eigvalsh_tridiagonal(diag, off)
    if n > DENSE_CAP:
        raise ResourceCapError(f"dense eigensolver capped at {DENSE_CAP} sites (got {n})")
    return linalg.eigvalsh(assemble(config).matrix)


def eigenvalue_counting(config: Configuration) -> StepFunction:
    """x ↦ #{eigenvalues ≤ x}, with near-degenerate eigenvalues merged into one jump."""
    ev = eigenvalues(config)
    if not len(ev):
        return StepFunction()
    return StepFunction.from_atoms(_snap(ev, merge_quantum(config)))


def rank_estimate_check(config_a: Configuration, sub: Window) -> tuple:
    """(distance, bound) for ||f(Λ) - f(Λ')|| <= 4|Λ \\ Λ'| with Λ' = ``sub`` ⊆ Λ."""
    inside = config_a.window.contains(sub.vertices)
    if not np.all(inside):
        raise ValueError("sub-window must be contained in the configuration window")
    dist = sup_distance(eigenvalue_counting(config_a),
                        eigenvalue_counting(config_a.restrict(sub)))
    return dist, 4 * (len(config_a.window) - len(sub))


def _local_dos_sample(model: FieldModel, box: Box, center: int, seeds) -> list:
    out = []
    colors = sample_many(model, box, seeds)
    for row in colors:
        cfg = Configuration(box, row)
        if box.is_interval():
            diag, off = _tridiagonal(cfg)
            if len(diag) == 1:
                ev, vec = diag.copy(), np.ones((1, 1))
            else:
                ev, vec = linalg.eigh_tridiagonal(diag, off)
        else:
            ev, vec = linalg.eigh(assemble(cfg).matrix)
        weights = vec[center, :] ** 2
        f = StepFunction.from_atoms(_snap(ev, merge_quantum(cfg)), weights)
        out.append((f, f.map_values(np.square)))
    return out


@dataclass
class DensityOfStatesEstimate:
    value: StepFunction
    ci_radius: float
    samples: int
    radius: int


def pastur_shubin_estimate(model: FieldModel, radius: int, samples: int, master_seed: int,
                           workers: int = 1) -> DensityOfStatesEstimate:
    """Monte Carlo estimate of x ↦ E <δ_0, 1_{(-inf,x]}(H) δ_0>.

    Uses the cube of side 2R+1 centred at the origin, no boundary correction.
    The confidence radius is the largest 95% normal half-width over the jump
    points of the estimate.
    """
    d = model.dim
    if radius < 0 or samples < 1:
        raise ValueError("radius >= 0 and samples >= 1 required")
    side = 2 * radius + 1
    n = side ** d
    cap = TRIDIAGONAL_CAP if d == 1 else DENSE_CAP
    if n > cap:
        raise ResourceCapError(f"(2R+1)^d = {n} exceeds the cap {cap}")
    box = Box(d, side, (-radius,) * d)
    center = int(box.lookup(np.zeros((1, d), dtype=np.int64))[0])
    seeds = derive_seeds(master_seed, "pastur-shubin", samples)
    pairs = chunked_map(_local_dos_sample, seeds, workers, model, box, center)
    fs = [p[0] for p in pairs]
    sq = [p[1] for p in pairs]
    w = [1.0 / samples] * samples
    mean_f = linear_combine(w, fs)
    mean_sq = linear_combine(w, sq)
    value = mean_f.map_values(lambda v: np.clip(v, 0.0, 1.0))
    ci = normal_ci_radius(mean_f, mean_sq, samples)
    return DensityOfStatesEstimate(value, ci, samples, radius)


def _boundary_term(window: Window) -> float:
    return 8.0 * boundary_size(window, 1)


def anderson_spec() -> AdmissibleSpec:
    return AdmissibleSpec(
        name="anderson",
        evaluate=eigenvalue_counting,
        boundary_coeff=8.0,
        boundary_term=_boundary_term,
        K=9.0, D=8.0, D_prime=8.0, r_prime=1,
        sign=-1,
        single_site_bound=1.0,
        tolerance=spectral_tolerance,
        default_model={"kind": "product", "base_law": {"name": "bernoulli", "p": "1/2"}},
    )
