"""Data-point distributions on [-1,1]^m and the benchmark test functions.

Grids (equispaced, tensorial Gauss-Legendre), seeded uniform random clouds,
and the Halton / Sobol low-discrepancy sequences.  All generators are
deterministic: random sampling uses the counter-based Philox generator with
an explicit seed, and the quasi-random sequences are computed from embedded
tables, so regenerating with the same arguments is bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "PointSet",
    "TestFunction",
    "equispaced_grid",
    "legendre_nodes_1d",
    "legendre_grid",
    "random_uniform",
    "halton",
    "sobol",
    "test_function",
]

_HALTON_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53)

# Sobol direction-number parameters (s, a, m_i) from the Joe & Kuo (2008)
# table "new-joe-kuo-6.21201", dimensions 2..8; dimension 1 is the van der
# Corput sequence in base 2.  Enough for the experiments here (m <= 3) with
# headroom to m = 8.
_SOBOL_PARAMS = {
    2: (1, 0, (1,)),
    3: (2, 1, (1, 3)),
    4: (3, 1, (1, 3, 1)),
    5: (3, 2, (1, 1, 1)),
    6: (4, 1, (1, 1, 3, 3)),
    7: (4, 4, (1, 3, 5, 13)),
    8: (5, 2, (1, 1, 5, 5, 17)),
}
_SOBOL_BITS = 31


@dataclass(frozen=True)
class PointSet:
    """Points in [-1,1]^m plus provenance (distribution tag, seed/size)."""

    m: int
    points: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[1] != self.m:
            raise ValueError(f"points must have shape (*, {self.m})")
        if pts.size and (pts.min() < -1.0 or pts.max() > 1.0):
            raise ValueError("all coordinates must lie in [-1, 1]")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.shape[0]


@dataclass(frozen=True)
class TestFunction:
    """A named benchmark function on [-1,1]^m with a vectorised evaluator."""

    name: str
    m: int
    evaluator: Callable[[np.ndarray], np.ndarray]

    def __call__(self, points):
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        if pts.shape[1] != self.m:
            raise ValueError(f"{self.name} expects {self.m}-vectors")
        vals = np.asarray(self.evaluator(pts), dtype=float)
        return float(vals[0]) if single else vals


def _tensor(m, axis_points):
    grids = np.meshgrid(*([axis_points] * m), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def equispaced_grid(m, k_per_dim):
    """Full tensor grid of k equidistant values per dimension, endpoints included."""
    k = int(k_per_dim)
    if k < 2:
        raise ValueError("need at least 2 points per dimension")
    axis = np.linspace(-1.0, 1.0, k)
    return PointSet(m, _tensor(m, axis),
                    {"distribution": "equispaced", "k_per_dim": k})


def legendre_nodes_1d(k):
    """Roots of the Legendre polynomial P_k by Newton iteration.

    The three-term recurrence supplies values and derivatives; iteration
    stops once every root moves by less than 1e-14.  Roots are returned in
    ascending order and symmetrised about 0.
    """
    k = int(k)
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return np.array([0.0])
    i = np.arange(k)
    x = np.cos(np.pi * (4 * i + 3) / (4 * k + 2))
    for _ in range(100):
        prev, cur = np.ones_like(x), x.copy()
        for j in range(2, k + 1):
            prev, cur = cur, ((2 * j - 1) * x * cur - (j - 1) * prev) / j
        deriv = k * (x * cur - prev) / (x * x - 1.0)
        dx = cur / deriv
        x -= dx
        if np.max(np.abs(dx)) < 1e-14:
            break
    x = np.sort(x)
    return (x - x[::-1]) / 2.0


def legendre_grid(m, k_per_dim):
    """Tensor grid of Gauss-Legendre nodes, k per dimension."""
    k = int(k_per_dim)
    if k < 1:
        raise ValueError("k must be >= 1")
    return PointSet(m, _tensor(m, legendre_nodes_1d(k)),
                    {"distribution": "legendre", "k_per_dim": k})


def random_uniform(m, count, seed):
    """i.i.d. uniform points from the counter-based Philox generator.

    The same (m, count, seed) triple always reproduces the identical set.
    """
    count = int(count)
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.Generator(np.random.Philox(seed))
    pts = rng.uniform(-1.0, 1.0, size=(count, m))
    return PointSet(m, pts,
                    {"distribution": "random", "count": count,
                     "seed": int(seed), "generator": "philox"})


def _radical_inverse(i, base):
    f = 1.0
    r = 0.0
    while i > 0:
        f /= base
        r += f * (i % base)
        i //= base
    return r


def halton(m, count):
    """First ``count`` Halton points (bases = first m primes), mapped to [-1,1]^m.

    The sequence starts at index 1, so dimension one begins 1/2, 1/4, 3/4.
    """
    count = int(count)
    if count < 1:
        raise ValueError("count must be >= 1")
    if m > len(_HALTON_PRIMES):
        raise ValueError(f"halton supports m <= {len(_HALTON_PRIMES)}")
    unit = np.empty((count, m))
    for d in range(m):
        base = _HALTON_PRIMES[d]
        unit[:, d] = [_radical_inverse(i, base) for i in range(1, count + 1)]
    return PointSet(m, 2.0 * unit - 1.0,
                    {"distribution": "halton", "count": count})


def _sobol_direction_numbers(dim, nbits):
    """v_1..v_nbits for one Sobol dimension (1-based), as nbits-bit integers."""
    if dim == 1:
        return [1 << (nbits - i) for i in range(1, nbits + 1)]
    s, a, m_init = _SOBOL_PARAMS[dim]
    v = [0] * (nbits + 1)
    for i in range(1, min(s, nbits) + 1):
        v[i] = m_init[i - 1] << (nbits - i)
    for i in range(s + 1, nbits + 1):
        acc = v[i - s] ^ (v[i - s] >> s)
        for k in range(1, s):
            if (a >> (s - 1 - k)) & 1:
                acc ^= v[i - k]
        v[i] = acc
    return v[1:]


def sobol(m, count):
    """First ``count`` Sobol points via Gray-code updates, mapped to [-1,1]^m.

    Index 0 (the all-zeros point) is skipped: regression wants affinely
    spread samples, and the classic first terms 1/2, 3/4, 1/4 result.
    """
    count = int(count)
    if count < 1:
        raise ValueError("count must be >= 1")
    if m > len(_SOBOL_PARAMS) + 1:
        raise ValueError(f"sobol direction numbers available for m <= {len(_SOBOL_PARAMS) + 1}")
    if count >= 1 << _SOBOL_BITS:
        raise ValueError("count exceeds the 31-bit Sobol index range")
    v = [_sobol_direction_numbers(d + 1, _SOBOL_BITS) for d in range(m)]
    unit = np.empty((count, m))
    state = [0] * m
    for i in range(1, count + 1):
        low = (i & -i).bit_length() - 1  # index of lowest set bit of i
        for d in range(m):
            state[d] ^= v[d][low]
            unit[i - 1, d] = state[d] / (1 << _SOBOL_BITS)
    return PointSet(m, 2.0 * unit - 1.0,
                    {"distribution": "sobol", "count": count})


def _runge(r):
    def f(x):
        return 1.0 / (1.0 + r * np.sum(x * x, axis=1))
    return f


def _combined_runge(x):
    c1 = np.array([-0.65, -0.5])
    c2 = np.array([0.5, 0.65])
    d1 = np.sum((x - c1) ** 2, axis=1)
    d2 = np.sum((x - c2) ** 2, axis=1)
    return 1.0 / (1.0 + 50.0 * d1) - 1.0 / (1.0 + 5.0 * d2)


def _gaussian_sine(x):
    c = np.array([-0.45, 0.65])
    eta = np.array([0.10, 0.70])
    k = 25
    phase = np.pi * k * (x @ eta)
    return np.exp(-np.sum((x - c) ** 2, axis=1)) * (np.cos(phase) + np.sin(phase))


def _piecewise_poly(x):
    inside = np.all(x >= 0.0, axis=1)
    return np.where(inside, x[:, 0] * x[:, 1] ** 2 * x[:, 2] ** 3, 0.0)


def test_function(tag, m=None, r=1.0):
    """Benchmark functions by tag.

    ``runge``          1/(1 + r*||x||^2), any dimension (pass m; default r=1)
    ``combined_runge`` difference of two Runge bumps, m=2 (alias F1)
    ``gaussian_sine``  Gaussian envelope times an oscillation, m=2 (alias F2)
    ``piecewise_poly`` x1*x2^2*x3^3 on the positive octant, else 0, m=3 (alias F3)
    """
    tag = str(tag).lower()
    if tag in ("runge",):
        if m is None:
            raise ValueError("runge requires the dimension m")
        return TestFunction(f"runge(r={r:g})", int(m), _runge(float(r)))
    if tag in ("combined_runge", "f1"):
        return TestFunction("combined_runge", 2, _combined_runge)
    if tag in ("gaussian_sine", "f2"):
        return TestFunction("gaussian_sine", 2, _gaussian_sine)
    if tag in ("piecewise_poly", "f3"):
        return TestFunction("piecewise_poly", 3, _piecewise_poly)
    raise ValueError(f"unknown test function tag: {tag}")
