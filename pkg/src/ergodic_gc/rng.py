"""Counter-based randomness keyed by (seed, purpose, lattice coordinates).

Every random number is a pure function of its key, so a vertex gets the same
color no matter which window it is sampled in or which worker samples it.
The mixing function is the SplitMix64 finalizer applied in numpy uint64
arithmetic (wrap-around multiplication is intended).
"""
from __future__ import annotations

import zlib

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1


def _mix(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x = x + _GOLDEN
        x = (x ^ (x >> np.uint64(30))) * _M1
        x = (x ^ (x >> np.uint64(27))) * _M2
        x = x ^ (x >> np.uint64(31))
    return x


def _tag(purpose: str) -> int:
    return zlib.crc32(purpose.encode("utf-8"))


def derive_seed(master_seed: int, purpose: str, index: int = 0) -> int:
    """Child seed for ``(master_seed, purpose, index)``; the only seed fan-out used."""
    x = _mix(np.uint64(int(master_seed) & _MASK))
    x = _mix(x ^ np.uint64(_tag(purpose)))
    x = _mix(x ^ np.uint64(int(index) & _MASK))
    return int(x)


def derive_seeds(master_seed: int, purpose: str, count: int) -> np.ndarray:
    """Vectorized ``derive_seed`` for indices 0..count-1 (uint64 array)."""
    x = _mix(np.uint64(int(master_seed) & _MASK))
    x = _mix(x ^ np.uint64(_tag(purpose)))
    return _mix(x ^ np.arange(count, dtype=np.uint64))


def coordinate_keys(coords: np.ndarray) -> np.ndarray:
    """One 64-bit hash per lattice point (rows of ``coords``)."""
    coords = np.asarray(coords, dtype=np.int64)
    h = np.full(len(coords), 0x243F6A8885A308D3, dtype=np.uint64)
    for k in range(coords.shape[1]):
        h = _mix(h ^ coords[:, k].view(np.uint64))
    return h


def uniforms(seeds, coords: np.ndarray, stream: int = 0) -> np.ndarray:
    """U[0,1) draws of shape (len(seeds), len(coords)).

    ``seeds`` may be a scalar or a 1-d sequence of 64-bit seeds; the same
    (seed, coordinate, stream) always yields the same value.
    """
    seeds = np.atleast_1d(seeds)
    if seeds.dtype != np.uint64:
        seeds = np.asarray([int(s) & _MASK for s in seeds], dtype=np.uint64)
    ck = coordinate_keys(coords)
    sk = _mix(_mix(seeds) ^ np.uint64(stream & _MASK))
    bits = _mix(sk[:, None] ^ ck[None, :])
    return (bits >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
