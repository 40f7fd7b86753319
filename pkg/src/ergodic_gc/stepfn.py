"""Finite step functions: the concrete elements of the space of bounded
right-continuous functions used as values of every counting function.

A ``StepFunction`` is stored as strictly increasing jump locations, the value
taken from each location onwards, and the value at -inf. Sup-norms are exact:
for two such functions the supremum of |f - g| is a maximum over the union of
their jump locations plus the common region below all jumps.
"""
from __future__ import annotations

import csv
import io
import math
from typing import Callable, Iterable, Sequence

import numpy as np

# above this many (function x point) evaluations, sums go through jump deltas
_DIRECT_EVAL_LIMIT = 4_000_000


class StepFunction:
    __slots__ = ("locations", "values", "base")

    def __init__(self, locations=(), values=(), base: float = 0.0, *, normalize: bool = True):
        loc = np.asarray(locations, dtype=np.float64).reshape(-1)
        val = np.asarray(values, dtype=np.float64).reshape(-1)
        if loc.shape != val.shape:
            raise ValueError("locations and values must have equal length")
        if not np.all(np.isfinite(loc)) or not np.all(np.isfinite(val)) or not math.isfinite(base):
            raise ValueError("step functions are bounded with finite jump locations")
        if len(loc) > 1 and not np.all(np.diff(loc) > 0):
            raise ValueError("jump locations must be strictly increasing")
        base = float(base)
        if normalize and len(loc):
            prev = np.concatenate(([base], val[:-1]))
            keep = val != prev
            loc, val = loc[keep], val[keep]
        self.locations = loc
        self.values = val
        self.base = base
        self.locations.setflags(write=False)
        self.values.setflags(write=False)

    # construction ---------------------------------------------------------

    @classmethod
    def _trusted(cls, loc: np.ndarray, val: np.ndarray, base: float) -> "StepFunction":
        # caller guarantees sorted finite locations and no redundant jumps
        f = object.__new__(cls)
        f.locations, f.values, f.base = loc, val, float(base)
        loc.setflags(write=False)
        val.setflags(write=False)
        return f

    @classmethod
    def zero(cls) -> "StepFunction":
        return cls()

    @classmethod
    def from_atoms(cls, points, masses=None, base: float = 0.0) -> "StepFunction":
        """x ↦ base + Σ_{p ≤ x} mass(p); repeated points accumulate."""
        pts = np.asarray(points, dtype=np.float64).reshape(-1)
        if masses is None:
            masses = np.ones_like(pts)
        masses = np.asarray(masses, dtype=np.float64).reshape(-1)
        if not len(pts):
            return cls(base=base)
        uniq, inv = np.unique(pts, return_inverse=True)
        heights = np.zeros(len(uniq))
        np.add.at(heights, inv, masses)
        return cls(uniq, base + np.cumsum(heights), base)

    # evaluation -----------------------------------------------------------

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        idx = np.searchsorted(self.locations, x, side="right")
        table = np.concatenate(([self.base], self.values))
        out = table[idx]
        return float(out) if out.ndim == 0 else out

    def left_limits(self) -> np.ndarray:
        """f(x-) at each jump location."""
        return np.concatenate(([self.base], self.values[:-1])) if len(self.values) else self.values

    @property
    def final(self) -> float:
        """Value at +inf."""
        return float(self.values[-1]) if len(self.values) else self.base

    def sup_norm(self) -> float:
        return float(max(abs(self.base), np.abs(self.values).max(initial=0.0)))

    def is_isotone(self) -> bool:
        vals = np.concatenate(([self.base], self.values))
        return bool(np.all(np.diff(vals) >= 0))

    def jumps(self) -> list:
        return list(zip(self.locations.tolist(), self.values.tolist()))

    def __len__(self) -> int:
        return len(self.locations)

    def __repr__(self) -> str:
        return f"StepFunction(base={self.base!r}, jumps={self.jumps()!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return (self.base == other.base and np.array_equal(self.locations, other.locations)
                and np.array_equal(self.values, other.values))

    __hash__ = None

    # arithmetic -----------------------------------------------------------

    def __add__(self, other: "StepFunction") -> "StepFunction":
        return linear_combine([1.0, 1.0], [self, other])

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        return linear_combine([1.0, -1.0], [self, other])

    def __mul__(self, c: float) -> "StepFunction":
        return StepFunction(self.locations, self.values * c, self.base * c)

    __rmul__ = __mul__

    def __truediv__(self, c: float) -> "StepFunction":
        return StepFunction(self.locations, self.values / c, self.base / c)

    def __neg__(self) -> "StepFunction":
        return self * -1.0

    def map_values(self, fn: Callable[[np.ndarray], np.ndarray]) -> "StepFunction":
        return StepFunction(self.locations, fn(self.values), float(fn(np.array([self.base]))[0]))

    # serialization --------------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["-inf", repr(self.base)])
        for x, v in zip(self.locations.tolist(), self.values.tolist()):
            w.writerow([repr(x), repr(v)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "StepFunction":
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        if not rows or rows[0][0] != "-inf":
            raise ValueError("first row must be '-inf,<value>'")
        base = float(rows[0][1])
        loc = [float(r[0]) for r in rows[1:]]
        val = [float(r[1]) for r in rows[1:]]
        return cls(loc, val, base, normalize=False)


def evaluate(f: StepFunction, x):
    return f(x)


def counting_function(points: Iterable[float], normalizer: float = 1.0) -> StepFunction:
    """x ↦ #{p ∈ points : p ≤ x} / normalizer (points counted with multiplicity)."""
    if normalizer <= 0:
        raise ValueError("normalizer must be positive")
    pts = np.asarray(list(points) if not isinstance(points, np.ndarray) else points,
                     dtype=np.float64).reshape(-1)
    if not len(pts):
        return StepFunction()
    if len(pts) == 1 and math.isfinite(pts[0]):
        return StepFunction._trusted(pts.copy(), np.array([1.0 / normalizer]), 0.0)
    uniq, counts = np.unique(pts, return_counts=True)
    # cumulative integer counts first, then a single division: exact counts
    return StepFunction(uniq, np.cumsum(counts) / normalizer)


def linear_combine(coeffs: Sequence[float], fs: Sequence[StepFunction]) -> StepFunction:
    """Pointwise Σ c_i f_i.

    Small inputs are summed by evaluating every f_i on the union of jump
    locations (values are then exactly Σ c_i f_i(x) in floating point); large
    inputs accumulate jump deltas in a fixed order, which is deterministic but
    rounds differently.
    """
    coeffs = [float(c) for c in coeffs]
    fs = list(fs)
    if len(coeffs) != len(fs):
        raise ValueError(f"length mismatch: {len(coeffs)} coefficients, {len(fs)} functions")
    if not fs:
        raise ValueError("need at least one function")
    base = math.fsum(c * f.base for c, f in zip(coeffs, fs))
    nonempty = [f.locations for f in fs if len(f.locations)]
    if not nonempty:
        return StepFunction(base=base)
    all_loc = np.concatenate(nonempty)
    union = np.unique(all_loc)
    if len(fs) * len(union) <= _DIRECT_EVAL_LIMIT:
        vals = np.zeros(len(union))
        for c, f in zip(coeffs, fs):
            if c != 0.0:
                vals += c * f(union)
        return StepFunction(union, vals, base)
    deltas = np.concatenate([c * (f.values - f.left_limits()) for c, f in zip(coeffs, fs)
                             if len(f.locations)])
    # stable sort keeps input order among equal locations
    order = np.argsort(all_loc, kind="stable")
    pos = np.searchsorted(union, all_loc[order])
    summed = np.zeros(len(union))
    np.add.at(summed, pos, deltas[order])
    return StepFunction(union, base + np.cumsum(summed), base)


def mean(fs: Sequence[StepFunction]) -> StepFunction:
    fs = list(fs)
    return linear_combine([1.0 / len(fs)] * len(fs), fs)


def _eval_points(f: StepFunction, g: StepFunction) -> np.ndarray:
    return np.union1d(f.locations, g.locations)


def sup_distance(f: StepFunction, g: StepFunction) -> float:
    """sup_x |f(x) - g(x)|, exact."""
    pts = _eval_points(f, g)
    below = abs(f.base - g.base)
    if not len(pts):
        return float(below)
    return float(max(below, np.abs(f(pts) - g(pts)).max()))


def sup_positive_part(f: StepFunction, g: StepFunction) -> float:
    """max(0, sup_x (f(x) - g(x))), exact."""
    pts = _eval_points(f, g)
    best = f.base - g.base
    if len(pts):
        best = max(best, float((f(pts) - g(pts)).max()))
    return float(max(best, 0.0))


def sup_distance_to_cdf(f: StepFunction, cdf: Callable[[np.ndarray], np.ndarray],
                        lower: float = 0.0, upper: float = 1.0) -> float:
    """sup_x |f(x) - F(x)| for a continuous non-decreasing F with limits
    ``lower`` at -inf and ``upper`` at +inf.

    Between jumps f is constant and F monotone, so the supremum is reached
    at a jump location (from either side) or in one of the two tails.
    """
    cand = [abs(f.base - lower), abs(f.final - upper)]
    if len(f.locations):
        F = np.asarray(cdf(f.locations), dtype=np.float64)
        cand.append(float(np.abs(f.values - F).max()))
        cand.append(float(np.abs(f.left_limits() - F).max()))
    return float(max(cand))


def normal_ci_radius(mean_f: StepFunction, mean_sq: StepFunction, samples: int) -> float:
    """Largest 95% normal half-width over jump points, from the sample mean of
    f and of f^2 (unbiased variance)."""
    if samples < 2:
        return math.inf
    pts = np.union1d(mean_f.locations, mean_sq.locations)
    m = np.append(mean_f(pts), mean_f.base)
    sq = np.append(mean_sq(pts), mean_sq.base)
    var = np.maximum(sq - m * m, 0.0) * samples / (samples - 1)
    return float(1.96 * np.sqrt(var.max() / samples))
