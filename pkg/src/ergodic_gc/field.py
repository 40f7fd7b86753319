"""Stationary random fields on Z^d with a finite correlation length.

Four constructions are supported:

* ``product`` -- i.i.d. colors from a base law (correlation length 0);
* ``finite_range_convolution`` -- ``β + Σ_k α_k ω_{z-k}`` over an integer-valued
  i.i.d. base field, offsets ``k`` in the l1 ball of radius ``c``;
* ``gaussian_moving_average`` -- the same map over a standard normal base field;
* ``invertible_moving_average`` -- the mean of the base field over the l1
  ball of radius ``c`` around ``z``.

The three moving-average kinds have correlation length ``2c``: two sites at
l1 distance greater than ``2c`` read disjoint parts of the base field.
Sampling is counter-based (see :mod:`ergodic_gc.rng`), so each base value is
a function of (seed, absolute coordinate) only.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .lattice import Box, VertexSet, Window, as_vertex_set
from .rng import derive_seeds, uniforms

KINDS = ("product", "finite_range_convolution", "gaussian_moving_average",
         "invertible_moving_average")
LAWS = ("bernoulli", "discrete", "uniform", "normal")

MAX_BRUTEFORCE_SITES = 20


def _fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    # decimal literal rather than binary expansion: 0.3 -> 3/10
    return Fraction(repr(float(x))) if isinstance(x, float) else Fraction(x)


@dataclass(frozen=True)
class BaseLaw:
    name: str
    p: Fraction = None
    values: tuple = ()
    probs: tuple = ()
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if self.name not in LAWS:
            raise ConfigError(f"unknown base law {self.name!r}; expected one of {LAWS}")
        if self.name == "bernoulli":
            if self.p is None:
                raise ConfigError("bernoulli law needs 'p'")
            p = _fraction(self.p)
            if not 0 <= p <= 1:
                raise ConfigError(f"bernoulli p must lie in [0, 1], got {self.p}")
            object.__setattr__(self, "p", p)
        elif self.name == "discrete":
            if not self.values or len(self.values) != len(self.probs):
                raise ConfigError("discrete law needs equally long 'values' and 'probs'")
            probs = tuple(_fraction(q) for q in self.probs)
            if any(q < 0 for q in probs):
                raise ConfigError("discrete probabilities must be non-negative")
            total = sum(probs)
            if abs(float(total) - 1.0) > 1e-9:
                raise ConfigError(f"discrete probabilities sum to {float(total)}, not 1")
            probs = tuple(q / total for q in probs)
            if len(set(self.values)) != len(self.values):
                raise ConfigError("discrete values must be distinct")
            object.__setattr__(self, "values", tuple(_fraction(v) for v in self.values))
            object.__setattr__(self, "probs", probs)
        elif self.name == "uniform":
            if not self.a < self.b:
                raise ConfigError("uniform law needs a < b")

    @property
    def is_discrete(self) -> bool:
        return self.name in ("bernoulli", "discrete")

    def support(self) -> list:
        """(value, probability) pairs with exact probabilities; discrete laws only."""
        if self.name == "bernoulli":
            return [(Fraction(0), 1 - self.p), (Fraction(1), self.p)]
        if self.name == "discrete":
            return list(zip(self.values, self.probs))
        raise ConfigError(f"{self.name} law has no finite support")

    def draw(self, seeds, coords: np.ndarray) -> np.ndarray:
        u = uniforms(seeds, coords, stream=0)
        if self.name == "bernoulli":
            return (u < float(self.p)).astype(np.float64)
        if self.name == "discrete":
            cum = np.cumsum([float(q) for q in self.probs])
            idx = np.minimum(np.searchsorted(cum, u, side="right"), len(cum) - 1)
            return np.asarray([float(v) for v in self.values])[idx]
        if self.name == "uniform":
            return self.a + (self.b - self.a) * u
        u2 = uniforms(seeds, coords, stream=1)
        return np.sqrt(-2.0 * np.log1p(-u)) * np.cos(2.0 * np.pi * u2)

    def to_dict(self) -> dict:
        if self.name == "bernoulli":
            return {"name": "bernoulli", "p": str(self.p)}
        if self.name == "discrete":
            return {"name": "discrete", "values": [str(v) for v in self.values],
                    "probs": [str(q) for q in self.probs]}
        if self.name == "uniform":
            return {"name": "uniform", "a": self.a, "b": self.b}
        return {"name": "normal"}

    @classmethod
    def from_dict(cls, d: dict) -> "BaseLaw":
        if not isinstance(d, dict) or "name" not in d:
            raise ConfigError("base_law must be an object with a 'name'")
        unknown = set(d) - {"name", "p", "values", "probs", "a", "b"}
        if unknown:
            raise ConfigError(f"unknown base_law keys: {sorted(unknown)}")
        return cls(name=d["name"], p=d.get("p"), values=tuple(d.get("values", ())),
                   probs=tuple(d.get("probs", ())), a=float(d.get("a", 0.0)),
                   b=float(d.get("b", 1.0)))


def l1_ball_offsets(c: int, d: int) -> np.ndarray:
    """Offsets k with |k|_1 <= c, lexicographic."""
    rng = range(-c, c + 1)
    pts = [k for k in product(rng, repeat=d) if sum(abs(x) for x in k) <= c]
    return np.asarray(pts, dtype=np.int64).reshape(-1, d)


@dataclass(frozen=True)
class FieldModel:
    dim: int
    kind: str
    base_law: BaseLaw
    c: int = 0
    weights: tuple = None
    beta: float = 0.0

    def __post_init__(self):
        if self.dim < 1:
            raise ConfigError("dim must be positive")
        if self.kind not in KINDS:
            raise ConfigError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.c < 0:
            raise ConfigError("window radius c must be non-negative")
        if self.kind == "product":
            if self.c != 0 or self.weights is not None or self.beta != 0:
                raise ConfigError("product kind takes no c/weights/beta")
            return
        if self.kind == "finite_range_convolution" and not self.base_law.is_discrete:
            raise ConfigError("finite_range_convolution needs a discrete base law")
        if self.kind == "gaussian_moving_average" and self.base_law.name != "normal":
            raise ConfigError("gaussian_moving_average needs the normal base law")
        n_off = len(l1_ball_offsets(self.c, self.dim))
        if self.kind == "invertible_moving_average":
            if self.weights is not None or self.beta != 0:
                raise ConfigError("invertible_moving_average uses the fixed mean window")
            return
        w = (1,) * n_off if self.weights is None else tuple(self.weights)
        if len(w) != n_off:
            raise ConfigError(f"expected {n_off} weights for c={self.c}, d={self.dim}, got {len(w)}")
        if self.kind == "finite_range_convolution":
            w = tuple(_fraction(x) for x in w)
            object.__setattr__(self, "beta", _fraction(self.beta))
        object.__setattr__(self, "weights", w)

    @property
    def correlation_length(self) -> int:
        return 0 if self.kind == "product" else 2 * self.c

    r = correlation_length

    def offsets(self) -> np.ndarray:
        return l1_ball_offsets(self.c, self.dim)

    def coefficients(self) -> np.ndarray:
        if self.kind == "product":
            return np.ones(1)
        if self.kind == "invertible_moving_average":
            k = len(self.offsets())
            return np.full(k, 1.0 / k)
        return np.asarray([float(x) for x in self.weights])

    def to_dict(self) -> dict:
        out = {"dim": self.dim, "kind": self.kind, "base_law": self.base_law.to_dict()}
        if self.kind != "product":
            out["c"] = self.c
        if self.kind in ("finite_range_convolution", "gaussian_moving_average"):
            out["weights"] = [str(x) if isinstance(x, Fraction) else x for x in self.weights]
            out["beta"] = str(self.beta) if isinstance(self.beta, Fraction) else self.beta
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "FieldModel":
        if not isinstance(d, dict):
            raise ConfigError("model config must be a JSON object")
        unknown = set(d) - {"dim", "kind", "base_law", "weights", "beta", "c"}
        if unknown:
            raise ConfigError(f"unknown model keys: {sorted(unknown)}")
        for key in ("dim", "kind", "base_law"):
            if key not in d:
                raise ConfigError(f"model config is missing {key!r}")
        try:
            dim = int(d["dim"])
            c = int(d.get("c", 0))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"dim and c must be integers: {exc}") from None
        beta = d.get("beta", 0)
        if d["kind"] == "gaussian_moving_average":
            beta = float(beta)
        return cls(dim=dim, kind=d["kind"], base_law=BaseLaw.from_dict(d["base_law"]), c=c,
                   weights=tuple(d["weights"]) if d.get("weights") is not None else None,
                   beta=beta)

    @classmethod
    def from_json(cls, text: str) -> "FieldModel":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None

    def label(self) -> str:
        law = self.base_law
        tag = {"bernoulli": f"bernoulli({law.p})", "discrete": "discrete",
               "uniform": f"uniform({law.a:g},{law.b:g})", "normal": "normal"}[law.name]
        return f"{self.kind}[{tag},c={self.c}]" if self.kind != "product" else f"product[{tag}]"


def product_model(dim: int, law: BaseLaw) -> FieldModel:
    return FieldModel(dim=dim, kind="product", base_law=law)


def bernoulli(p) -> BaseLaw:
    return BaseLaw("bernoulli", p=p)


def uniform(a: float = 0.0, b: float = 1.0) -> BaseLaw:
    return BaseLaw("uniform", a=a, b=b)


class Configuration:
    """Colors on a finite window, aligned with the window's lexicographic vertex order."""

    __slots__ = ("window", "colors")

    def __init__(self, window: Window, colors):
        colors = np.asarray(colors, dtype=np.float64).reshape(-1)
        if len(colors) != len(window):
            raise ValueError(f"{len(colors)} colors for a window of {len(window)} sites")
        self.window = window
        self.colors = colors

    @property
    def dim(self) -> int:
        return self.window.dim

    def __len__(self) -> int:
        return len(self.colors)

    def __repr__(self) -> str:
        return f"Configuration({self.window!r})"

    def grid(self) -> np.ndarray:
        if not isinstance(self.window, Box):
            raise TypeError("grid view needs a Box window")
        return self.colors.reshape(self.window.shape)

    def colors_at(self, points: np.ndarray) -> np.ndarray:
        idx = self.window.lookup(points)
        if np.any(idx < 0):
            raise KeyError("requested sites outside the configuration window")
        return self.colors[idx]

    def restrict(self, sub: Window) -> "Configuration":
        if isinstance(sub, Box) and isinstance(self.window, Box) and self.window.contains_box(sub):
            lo = [o2 - o1 for o1, o2 in zip(self.window.offset, sub.offset)]
            sl = tuple(slice(l, l + sub.side) for l in lo)
            return Configuration(sub, self.grid()[sl].ravel())
        return Configuration(sub, self.colors_at(sub.vertices))

    def shifted(self, z: Sequence[int], window: Window) -> "Configuration":
        """The configuration τ_z ω restricted to ``window``: colors read at ``window + z``."""
        z = np.asarray(z, dtype=np.int64)
        return Configuration(window, self.colors_at(window.vertices + z))

    def with_color(self, point: Sequence[int], value: float) -> "Configuration":
        idx = self.window.lookup(np.asarray(point).reshape(1, -1))[0]
        if idx < 0:
            raise KeyError(f"{point} is not in the window")
        colors = self.colors.copy()
        colors[idx] = value
        return Configuration(self.window, colors)


def _padded_sites(model: FieldModel, vertices: np.ndarray) -> VertexSet:
    offs = model.offsets()
    return VertexSet(np.vstack([vertices - k for k in offs]), dim=model.dim)


def sample_many(model: FieldModel, window: Window, seeds) -> np.ndarray:
    """Colors for each seed, shape (len(seeds), |window|)."""
    if window.dim != model.dim:
        raise ValueError(f"window dimension {window.dim} != model dimension {model.dim}")
    verts = window.vertices
    seeds = np.atleast_1d(seeds)
    if model.kind == "product":
        return model.base_law.draw(seeds, verts)
    padded = _padded_sites(model, verts)
    base = model.base_law.draw(seeds, padded.vertices)
    coeffs = model.coefficients()
    out = np.zeros((len(seeds), len(verts)))
    for alpha, k in zip(coeffs, model.offsets()):
        out += alpha * base[:, padded.lookup(verts - k)]
    if model.kind in ("finite_range_convolution", "gaussian_moving_average"):
        out += float(model.beta)
    return out


def sample_window(model: FieldModel, window: Window, master_seed: int) -> Configuration:
    return Configuration(window, sample_many(model, window, [master_seed])[0])


def marginal_pmf_bruteforce(model: FieldModel, window: Window) -> dict:
    """Exact joint law of the colors on ``window`` as {color tuple: Fraction}.

    Enumerates every base configuration on the padded window; keys are tuples
    of Fractions in the window's vertex order.
    """
    law = model.base_law
    if not law.is_discrete:
        raise ConfigError("exact marginals need a discrete base law")
    verts = window.vertices
    if model.kind == "product":
        padded = as_vertex_set(window)
        offs, coeffs, beta = np.zeros((1, model.dim), dtype=np.int64), [Fraction(1)], Fraction(0)
    else:
        padded = _padded_sites(model, verts)
        offs = model.offsets()
        if model.kind == "invertible_moving_average":
            coeffs = [Fraction(1, len(offs))] * len(offs)
            beta = Fraction(0)
        else:
            coeffs, beta = list(model.weights), _fraction(model.beta)
    if len(padded) > MAX_BRUTEFORCE_SITES:
        raise ConfigError(f"padded window has {len(padded)} sites; "
                          f"enumeration is capped at {MAX_BRUTEFORCE_SITES}")
    reads = [padded.lookup(verts - k) for k in offs]
    support = law.support()
    pmf: dict = {}
    for states in product(support, repeat=len(padded)):
        prob = Fraction(1)
        for _, q in states:
            prob *= q
        if prob == 0:
            continue
        base = [v for v, _ in states]
        colors = tuple(beta + sum(a * base[idx[i]] for a, idx in zip(coeffs, reads))
                       for i in range(len(verts)))
        pmf[colors] = pmf.get(colors, Fraction(0)) + prob
    return pmf


def marginalize(pmf: dict, keep: Sequence[int]) -> dict:
    out: dict = {}
    for key, q in pmf.items():
        sub = tuple(key[i] for i in keep)
        out[sub] = out.get(sub, Fraction(0)) + q
    return out


@dataclass
class IndependenceReport:
    separation: int
    trials: int
    covariance: float
    covariance_stderr: float
    max_z: float
    independent: bool
    details: dict = field(default_factory=dict)


def independence_check(model: FieldModel, separation: int, trials: int,
                       master_seed: int = 0, z_threshold: float = 4.0) -> IndependenceReport:
    """Monte Carlo test of factorization for two sites at l1 distance ``separation``.

    Compares the empirical covariance (and, for discrete colors, the joint pmf
    against the product of marginals) with its standard error. ``independent``
    is False as soon as any z-score exceeds ``z_threshold``.
    """
    if separation < 1 or trials < 2:
        raise ValueError("separation >= 1 and trials >= 2 required")
    pts = np.zeros((2, model.dim), dtype=np.int64)
    pts[1, 0] = separation
    window = VertexSet(pts, dim=model.dim)
    seeds = derive_seeds(master_seed, "independence", trials)
    x = sample_many(model, window, seeds)
    a, b = x[:, 0], x[:, 1]
    prod = (a - a.mean()) * (b - b.mean())
    cov = float(prod.mean())
    se = float(prod.std(ddof=1) / np.sqrt(trials))
    zs = [abs(cov) / se if se > 0 else 0.0]
    details = {}
    if model.base_law.is_discrete:
        for va in np.unique(a):
            for vb in np.unique(b):
                pa, pb = float(np.mean(a == va)), float(np.mean(b == vb))
                pj = float(np.mean((a == va) & (b == vb)))
                target = pa * pb
                sej = np.sqrt(max(target * (1 - target), 1e-300) / trials)
                z = abs(pj - target) / sej if target > 0 else 0.0
                details[(float(va), float(vb))] = (pj, target, z)
                zs.append(z)
    max_z = float(max(zs))
    return IndependenceReport(separation, trials, cov, se, max_z, max_z <= z_threshold, details)
