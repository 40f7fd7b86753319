"""Geometry of Z^d: cubes, finite vertex sets, r-boundaries and tilings.

Distances are l1 (graph distance of the nearest-neighbour lattice).
Vertex order is lexicographic everywhere, which is what numpy's C-order
gives for a grid indexed ``(x_0, ..., x_{d-1})``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence, Union

import numpy as np


def l1_distance(a: Sequence[int], b: Sequence[int]) -> int:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return int(np.abs(a - b).sum())


def _encode(points: np.ndarray, lo: np.ndarray, span: np.ndarray) -> np.ndarray:
    """Injective int64 keys for points inside the bounding box [lo, lo+span)."""
    return np.ravel_multi_index(tuple((points - lo).T), tuple(span))


class VertexSet:
    """A finite subset of Z^d stored as a lexicographically sorted (N, d) array."""

    __slots__ = ("dim", "vertices", "_keys", "_lo", "_span")

    def __init__(self, vertices: Union[np.ndarray, Iterable[Sequence[int]]], dim: int | None = None):
        arr = np.asarray(list(vertices) if not isinstance(vertices, np.ndarray) else vertices,
                         dtype=np.int64)
        if arr.size == 0:
            if dim is None:
                raise ValueError("dim is required for an empty vertex set")
            arr = arr.reshape(0, dim)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if dim is not None and arr.shape[1] != dim:
            raise ValueError(f"vertices have dimension {arr.shape[1]}, expected {dim}")
        # np.unique on rows sorts lexicographically and drops duplicates
        arr = np.unique(arr, axis=0) if len(arr) else arr
        self.dim = int(arr.shape[1])
        self.vertices = arr
        self.vertices.setflags(write=False)
        self._keys = None
        self._lo = None
        self._span = None

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return (tuple(int(c) for c in v) for v in self.vertices)

    def __contains__(self, point) -> bool:
        return bool(self.contains(np.asarray(point, dtype=np.int64).reshape(1, -1))[0])

    def __eq__(self, other) -> bool:
        if isinstance(other, Box):
            other = other.vertex_set()
        if not isinstance(other, VertexSet):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self.vertices, other.vertices)

    def __hash__(self):
        return hash((self.dim, self.vertices.tobytes()))

    def __repr__(self) -> str:
        return f"VertexSet(dim={self.dim}, size={len(self)})"

    def vertex_set(self) -> "VertexSet":
        return self

    def _index(self):
        if self._keys is None:
            if len(self):
                self._lo = self.vertices.min(axis=0)
                self._span = self.vertices.max(axis=0) - self._lo + 1
                self._keys = _encode(self.vertices, self._lo, self._span)
            else:
                self._lo = np.zeros(self.dim, dtype=np.int64)
                self._span = np.ones(self.dim, dtype=np.int64)
                self._keys = np.zeros(0, dtype=np.int64)
        return self._keys, self._lo, self._span

    def lookup(self, points: np.ndarray) -> np.ndarray:
        """Row index of each point in ``vertices``, or -1 when absent."""
        points = np.asarray(points, dtype=np.int64).reshape(-1, self.dim)
        keys, lo, span = self._index()
        out = np.full(len(points), -1, dtype=np.int64)
        if not len(self) or not len(points):
            return out
        inside = np.all((points >= lo) & (points < lo + span), axis=1)
        if inside.any():
            k = _encode(points[inside], lo, span)
            # keys are sorted because vertices are lexicographic and encoding is C-order
            pos = np.searchsorted(keys, k)
            pos = np.minimum(pos, len(keys) - 1)
            hit = keys[pos] == k
            idx = np.where(hit, pos, -1)
            out[np.flatnonzero(inside)] = idx
        return out

    def contains(self, points: np.ndarray) -> np.ndarray:
        return self.lookup(points) >= 0

    def translate(self, z: Sequence[int]) -> "VertexSet":
        return VertexSet(self.vertices + np.asarray(z, dtype=np.int64), dim=self.dim)

    def union(self, other) -> "VertexSet":
        other = as_vertex_set(other)
        return VertexSet(np.vstack([self.vertices, other.vertices]), dim=self.dim)

    def intersection(self, other) -> "VertexSet":
        other = as_vertex_set(other)
        return VertexSet(self.vertices[other.contains(self.vertices)], dim=self.dim)

    def difference(self, other) -> "VertexSet":
        other = as_vertex_set(other)
        return VertexSet(self.vertices[~other.contains(self.vertices)], dim=self.dim)

    def is_interval(self) -> bool:
        """True for a non-empty set of consecutive integers in d=1."""
        if self.dim != 1 or not len(self):
            return False
        v = self.vertices[:, 0]
        return int(v[-1] - v[0]) == len(v) - 1


@dataclass(frozen=True)
class Box:
    """The cube ([0, side) ∩ Z)^dim + offset."""

    dim: int
    side: int
    offset: tuple = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.side < 0:
            raise ValueError("side must be non-negative")
        off = (0,) * self.dim if self.offset is None else tuple(int(o) for o in self.offset)
        if len(off) != self.dim:
            raise ValueError("offset length must equal dim")
        object.__setattr__(self, "offset", off)

    def __len__(self) -> int:
        return self.side ** self.dim

    @property
    def shape(self) -> tuple:
        return (self.side,) * self.dim

    @property
    def vertices(self) -> np.ndarray:
        if self.side == 0:
            return np.zeros((0, self.dim), dtype=np.int64)
        grid = np.indices(self.shape, dtype=np.int64).reshape(self.dim, -1).T
        return grid + np.asarray(self.offset, dtype=np.int64)

    def vertex_set(self) -> VertexSet:
        return VertexSet(self.vertices, dim=self.dim)

    def translate(self, z: Sequence[int]) -> "Box":
        return Box(self.dim, self.side, tuple(o + int(t) for o, t in zip(self.offset, z)))

    def contains_box(self, other: "Box") -> bool:
        return all(o1 <= o2 and o2 + other.side <= o1 + self.side
                   for o1, o2 in zip(self.offset, other.offset))

    def lookup(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.int64).reshape(-1, self.dim)
        rel = points - np.asarray(self.offset, dtype=np.int64)
        inside = np.all((rel >= 0) & (rel < self.side), axis=1)
        out = np.full(len(points), -1, dtype=np.int64)
        if inside.any() and self.side:
            out[inside] = np.ravel_multi_index(tuple(rel[inside].T), self.shape)
        return out

    def contains(self, points: np.ndarray) -> np.ndarray:
        return self.lookup(points) >= 0

    def is_interval(self) -> bool:
        return self.dim == 1 and self.side > 0


Window = Union[Box, VertexSet]


def as_vertex_set(s: Window) -> VertexSet:
    return s if isinstance(s, VertexSet) else s.vertex_set()


def cube(n: int, d: int) -> Box:
    """Λ_n = ([0, n) ∩ Z)^d."""
    return Box(d, n)


def unit_vectors(d: int) -> np.ndarray:
    return np.eye(d, dtype=np.int64)


def _dilate(s: VertexSet) -> VertexSet:
    e = unit_vectors(s.dim)
    parts = [s.vertices] + [s.vertices + sign * e[k] for k in range(s.dim) for sign in (1, -1)]
    return VertexSet(np.vstack(parts), dim=s.dim)


def _erode(s: VertexSet) -> VertexSet:
    if not len(s):
        return s
    keep = np.ones(len(s), dtype=bool)
    e = unit_vectors(s.dim)
    for k in range(s.dim):
        for sign in (1, -1):
            keep &= s.contains(s.vertices + sign * e[k])
    return VertexSet(s.vertices[keep], dim=s.dim)


def interior(s: Window, r: int) -> Window:
    """Λ^r = {x ∈ Λ : d(x, Z^d \\ Λ) > r}.

    For a Box the result is again a Box (side n - 2r, shifted by r); an empty
    Box of side 0 is returned once 2r >= n.
    """
    if r < 0:
        raise ValueError("r must be non-negative")
    if isinstance(s, Box):
        side = max(s.side - 2 * r, 0)
        return Box(s.dim, side, tuple(o + r for o in s.offset))
    out = s
    # r unit erosions keep exactly the points whose whole r-ball lies in Λ
    for _ in range(r):
        out = _erode(out)
    return out


def r_boundary(s: Window, r: int) -> VertexSet:
    """Two-sided r-boundary: inner points within distance r of the complement
    together with outer points within distance r of the set."""
    if r < 0:
        raise ValueError("r must be non-negative")
    vs = as_vertex_set(s)
    if not len(vs) or r == 0:
        return VertexSet(np.zeros((0, vs.dim), dtype=np.int64), dim=vs.dim)
    inner = vs.difference(interior(vs, r))
    grown = vs
    for _ in range(r):
        grown = _dilate(grown)
    outer = grown.difference(vs)
    return inner.union(outer)


def _l1_ball_shell_weights(n: int, d: int, r: int) -> int:
    """|{x : d(x, Λ_n) <= r}| for the cube Λ_n, via a per-axis generating count.

    Along one axis a point at distance k from [0, n) has n placements for
    k = 0 and 2 for k >= 1; distances add across axes.
    """
    poly = [0] * (r + 1)
    poly[0] = 1
    axis = [n] + [2] * r
    for _ in range(d):
        nxt = [0] * (r + 1)
        for i, a in enumerate(poly):
            if a:
                for k in range(r + 1 - i):
                    nxt[i + k] += a * axis[k]
        poly = nxt
    return sum(poly)


def boundary_size(s: Window, r: int) -> int:
    """|∂^r(Λ)|, closed form for cubes, enumeration otherwise."""
    if r < 0:
        raise ValueError("r must be non-negative")
    if isinstance(s, Box):
        n, d = s.side, s.dim
        if n == 0 or r == 0:
            return 0
        inner = n ** d - max(n - 2 * r, 0) ** d
        outer = _l1_ball_shell_weights(n, d, r) - n ** d
        return inner + outer
    return len(r_boundary(s, r))


def adjacency_pairs(window: Window) -> tuple:
    """Index pairs (i, j), i < j, of l1-adjacent sites inside ``window``."""
    verts = window.vertices
    rows, cols = [], []
    for k in range(window.dim):
        shift = np.zeros(window.dim, dtype=np.int64)
        shift[k] = 1
        j = window.lookup(verts + shift)
        ok = j >= 0
        rows.append(np.flatnonzero(ok))
        cols.append(j[ok])
    return np.concatenate(rows), np.concatenate(cols)


def cube_boundary_bound(n: int, r: int, d: int) -> int:
    """(n+2r)^d - (n-2r)^d, the cube boundary count used by the error bounds.

    Equals |∂^r(Λ_n)| in d = 1 and dominates it for d >= 2 (it counts the
    l∞ shell, which contains the l1 shell). For 2r > n the interior term is 0.
    """
    if r == 0 or n == 0:
        return 0
    return (n + 2 * r) ** d - max(n - 2 * r, 0) ** d


def tiling_grid(m: int, n: int, d: int) -> np.ndarray:
    """T_{m,n}: offsets t ∈ (mZ)^d with Λ_m + t ⊆ Λ_n, lexicographic, shape (⌊n/m⌋^d, d)."""
    if m < 1 or n < 1 or d < 1:
        raise ValueError("m, n, d must be positive")
    if m > n:
        raise ValueError(f"tiling requires m <= n (got m={m}, n={n})")
    k = n // m
    steps = np.arange(k, dtype=np.int64) * m
    return np.array(list(product(steps, repeat=d)), dtype=np.int64).reshape(k ** d, d)
