"""Closed-form error bounds for uniform ergodic averages.

All evaluators are plain arithmetic on the inputs and raise
:class:`PreconditionError` naming the violated inequality instead of
returning nonsense outside their range of validity. Cube boundary counts use
``(n+2r)^d - (n-2r)^d``, which dominates the l1 count.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import PreconditionError
from .lattice import cube_boundary_bound


@dataclass(frozen=True)
class BoundInputs:
    K: float
    D: float
    D_prime: float
    r_prime: int
    r: int
    d: int
    m: int
    n: int

    def __post_init__(self):
        if self.d < 1 or self.m < 1 or self.n < 1:
            raise PreconditionError("d, m, n must be positive integers")
        if self.r < 0 or self.r_prime < 0:
            raise PreconditionError("r and r' must be non-negative")
        if self.K < 0 or self.D < 0 or self.D_prime < 0:
            raise PreconditionError("K, D, D' must be non-negative")


def _require(cond: bool, what: str, **vals):
    if not cond:
        shown = ", ".join(f"{k}={v}" for k, v in vals.items())
        raise PreconditionError(f"precondition {what} violated ({shown})")


def geometric_terms(b: BoundInputs) -> tuple:
    """The two summands of the geometric bound, each including the 2^{2d+1} factor."""
    _require(b.n > 2 * b.m, "n > 2m", n=b.n, m=b.m)
    _require(b.m > 2 * b.r, "m > 2r", m=b.m, r=b.r)
    scale = 2.0 ** (2 * b.d + 1)
    rp = b.D_prime * b.r_prime ** b.d
    first = ((2 * b.K + b.D) * b.m ** b.d + rp) / (b.n - 2 * b.m)
    second = (2 * (b.K + b.D) * b.r ** b.d + 3 * rp) / (b.m - 2 * b.r)
    return scale * first, scale * second


def geometric_bound(b: BoundInputs) -> float:
    first, second = geometric_terms(b)
    return first + second


def _specialized(d: int, r: int, m: int, n: int, cm: float, c0: float, cr: float, c1: float) -> float:
    _require(n > m, "n > m", n=n, m=m)
    _require(m > r, "m > r", m=m, r=r)
    _require(d >= 1 and r >= 0, "d >= 1, r >= 0", d=d, r=r)
    return 2.0 ** (d + 1) * ((cm * m ** d + c0) / (n - m) + (cr * r ** d + c1) / (m - r))


def anderson_bound(d: int, r: int, m: int, n: int) -> float:
    """2^{d+1}((26m^d+8)/(n−m) + (34r^d+24)/(m−r))."""
    return _specialized(d, r, m, n, 26, 8, 34, 24)


def percolation_bound(d: int, r: int, m: int, n: int) -> float:
    """2^{d+1}((8m^d+2)/(n−m) + (10r^d+6)/(m−r))."""
    return _specialized(d, r, m, n, 8, 2, 10, 6)


def empmeasure_terms(spec, d: int, m: int, n: int, r: int) -> tuple:
    """The four summands bounding ||f(Λ_n)/n^d − <f_m^r, L_{m,n}^r>/m^d||:
    tiled-box boundary, leftover strip, tile boundary, r-interior trimming."""
    _require(n > 2 * m, "n > 2m", n=n, m=m)
    _require(m > 2 * r, "m > 2r", m=m, r=r)
    K, D = spec.K, spec.D
    tiled = (n // m) * m
    inner = n - 2 * m  # side of Λ_n^m
    t1 = spec.b_cube(tiled, d) / tiled ** d
    t2 = (2 * K + D) * cube_boundary_bound(inner, m, d) / inner ** d
    t3 = spec.b_cube(m, d) / m ** d
    t4 = (spec.b_cube(m - 2 * r, d) + (K + D) * cube_boundary_bound(m, r, d)) / m ** d
    return t1, t2, t3, t4


def empmeasure_bound(spec, d: int, m: int, n: int, r: int) -> float:
    return sum(empmeasure_terms(spec, d, m, n, r))


def cauchy_term(spec, d: int, m: int, r: int) -> float:
    """b(Λ_m^r)/m^d + (K+D)|∂^r(Λ_m)|/m^d, the distance of <f_m^r, P_m^r>/m^d to the limit."""
    _require(m > 2 * r, "m > 2r", m=m, r=r)
    return (spec.b_cube(m - 2 * r, d) + (spec.K + spec.D) * cube_boundary_bound(m, r, d)) / m ** d


FORMULAS = ("geometric", "anderson", "percolation", "empmeasure")
