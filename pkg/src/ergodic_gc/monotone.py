"""Sign cones and (strictly) monotone graphs on finite point sets.

For a sign vector s ∈ {−1, +1}^k the cone at x is
C_s(x) = {y : s_j (y_j − x_j) >= 0 for all j}. A set Γ is a monotone graph if
every point of Γ inside another point's cone lies on that cone's boundary,
and strictly monotone if the cone at x meets Γ only in x.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np


def sign_vector(entries: Sequence[int]) -> np.ndarray:
    s = np.asarray(entries, dtype=np.int64).reshape(-1)
    if not np.all(np.abs(s) == 1):
        raise ValueError(f"sign vector entries must be ±1, got {list(entries)}")
    return s


def in_cone(x, apex, s) -> bool:
    x, apex, s = list(x), list(apex), sign_vector(s)
    if not len(x) == len(apex) == len(s):
        raise ValueError(f"dimension mismatch: {len(x)}, {len(apex)}, {len(s)}")
    return all((xi - ai) * si >= 0 for xi, ai, si in zip(x, apex, s))


def _as_points(points) -> list:
    # tuples keep Fractions exact; duplicates collapse since Γ is a set
    return list(dict.fromkeys(tuple(p) for p in points))


def _pairs_in_cone(points: list, s):
    for i, x in enumerate(points):
        for j, y in enumerate(points):
            if i != j and in_cone(y, x, s):
                yield x, y


def is_strictly_monotone_graph(points, s) -> bool:
    pts = _as_points(points)
    return next(_pairs_in_cone(pts, s), None) is None


def is_monotone_graph(points, s) -> bool:
    pts = _as_points(points)
    return all(any(yj == xj for xj, yj in zip(x, y)) for x, y in _pairs_in_cone(pts, s))


def discrete_graph_mass(measure: Mapping, points, s) -> Fraction:
    """μ(Γ) for a purely atomic μ: the sum of atom masses on Γ."""
    pts = _as_points(points)
    if not is_strictly_monotone_graph(pts, s):
        raise ValueError("points do not form a strictly monotone graph for this sign vector")
    atoms = {tuple(k): v for k, v in measure.items()}
    return sum((atoms.get(p, 0) for p in pts), Fraction(0))
