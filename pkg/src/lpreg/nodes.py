"""Chebyshev-Lobatto points, Leja ordering, and unisolvent node grids.

The interpolation nodes used throughout are built per dimension from the
Chebyshev-Lobatto family ``cos(k*pi/n)`` reordered greedily a la Leja, and
then combined non-tensorially: each multi-index ``alpha`` selects the point
``(p_{alpha_1,1}, ..., p_{alpha_m,m})``.  For a downward-closed index set
this grid is unisolvent, which shows up operationally as a triangular
Newton evaluation matrix (see :mod:`lpreg.basis`).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .multiindex import MultiIndexSet, is_downward_closed

__all__ = [
    "cheb_lobatto",
    "leja_order",
    "leja_cheb",
    "GeneratingPoints",
    "UnisolventNodes",
    "unisolvent_nodes",
    "rescale_to_box",
]


def _readonly(arr):
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def cheb_lobatto(n):
    """The n+1 Chebyshev-Lobatto points cos(k*pi/n), k = 0..n, descending.

    Endpoints are pinned to exactly +-1 and, for even n, the middle value to
    exactly 0, so that the kill-the-noise snapping never depends on the libm
    in use.  n = 0 returns the single point 1.
    """
    n = int(n)
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return _readonly(np.array([1.0]))
    vals = np.cos(np.arange(n + 1) * np.pi / n)
    vals[0] = 1.0
    vals[-1] = -1.0
    if n % 2 == 0:
        vals[n // 2] = 0.0
    return _readonly(vals)


def leja_order(points):
    """Greedy Leja permutation of a set of distinct reals.

    The first point maximises ``|p|``; each later point maximises the
    product of distances to all points already chosen.  Products are
    accumulated as sums of ``log|.|`` to avoid under/overflow at large n,
    and ties are broken toward the numerically larger value (so Chebyshev
    families start ``1, -1, ...``).
    """
    pts = np.array(points, dtype=float).ravel()
    if pts.size == 0:
        raise ValueError("cannot Leja-order an empty set")
    if np.unique(pts).size != pts.size:
        raise ValueError("points must be distinct")
    count = pts.size
    order = np.empty(count, dtype=int)
    active = np.ones(count, dtype=bool)

    candidates = np.nonzero(active)[0]
    best = max(candidates, key=lambda i: (abs(pts[i]), pts[i]))
    order[0] = best
    active[best] = False

    logprod = np.zeros(count)
    for j in range(1, count):
        logprod[active] += np.log(np.abs(pts[active] - pts[order[j - 1]]))
        candidates = np.nonzero(active)[0]
        best = max(candidates, key=lambda i: (logprod[i], pts[i]))
        order[j] = best
        active[best] = False
    return _readonly(pts[order])


@lru_cache(maxsize=None)
def leja_cheb(n):
    """Leja-ordered Chebyshev-Lobatto points of degree n (cached)."""
    return _readonly(leja_order(cheb_lobatto(n)))


class GeneratingPoints:
    """Per-dimension 1D point sequences generating a node grid.

    ``per_dimension[i]`` holds the ordered points of dimension i; entry k of
    a multi-index picks position k of that sequence.
    """

    def __init__(self, per_dimension):
        seqs = []
        for seq in per_dimension:
            arr = _readonly(np.asarray(seq, dtype=float).ravel())
            if arr.size == 0:
                raise ValueError("generating sequences must be non-empty")
            if np.unique(arr).size != arr.size:
                raise ValueError("generating points must be distinct per dimension")
            seqs.append(arr)
        self.per_dimension = tuple(seqs)

    @classmethod
    def for_index_set(cls, index_set):
        """Leja-ordered Chebyshev-Lobatto sequences sized to the index set.

        Dimensions sharing the same maximal exponent share the identical
        (cached) sequence.
        """
        return cls([leja_cheb(ni) for ni in index_set.max_exponents()])

    @property
    def m(self):
        return len(self.per_dimension)

    def degrees(self):
        """Highest usable exponent per dimension (sequence length - 1)."""
        return tuple(seq.size - 1 for seq in self.per_dimension)

    def __repr__(self):
        return f"GeneratingPoints(m={self.m}, degrees={self.degrees()})"


class UnisolventNodes:
    """The non-tensorial grid pairing one node with each multi-index.

    ``points[j]`` corresponds to ``index_set.indices[j]``; its i-th
    coordinate is the generating sequence of dimension i evaluated at the
    i-th entry of the multi-index.
    """

    def __init__(self, index_set, gen, points):
        self.index_set = index_set
        self.gen = gen
        self.points = _readonly(points)
        if self.points.shape != (len(index_set), index_set.m):
            raise ValueError("points shape does not match the index set")

    def __len__(self):
        return self.points.shape[0]

    def __repr__(self):
        return f"UnisolventNodes({self.index_set!r})"


def unisolvent_nodes(index_set, gen=None):
    """Assemble the node grid for a downward-closed multi-index set.

    When ``gen`` is omitted the Leja-ordered Chebyshev-Lobatto sequences are
    used, which is the configuration all stability statements refer to.
    """
    if not isinstance(index_set, MultiIndexSet):
        raise TypeError("index_set must be a MultiIndexSet")
    if not is_downward_closed(index_set):
        raise ValueError("index set must be downward closed")
    if gen is None:
        gen = GeneratingPoints.for_index_set(index_set)
    if gen.m != index_set.m:
        raise ValueError("generating points dimension mismatch")
    for i, (need, have) in enumerate(zip(index_set.max_exponents(), gen.degrees())):
        if need > have:
            raise ValueError(f"dimension {i} needs {need + 1} generating points, "
                             f"got {have + 1}")
    pts = np.empty((len(index_set), index_set.m))
    for i in range(index_set.m):
        pts[:, i] = gen.per_dimension[i][index_set.indices[:, i]]
    return UnisolventNodes(index_set, gen, pts)


def rescale_to_box(nodes, lo, hi):
    """Map nodes affinely from [-1,1]^m onto the box [lo, hi] per dimension.

    Endpoints map to endpoints exactly; the box must have positive side
    lengths.  Returns a new UnisolventNodes over the rescaled generating
    sequences.
    """
    lo = np.asarray(lo, dtype=float).ravel()
    hi = np.asarray(hi, dtype=float).ravel()
    m = nodes.index_set.m
    if lo.size != m or hi.size != m:
        raise ValueError("box endpoints must be m-vectors")
    if not np.all(hi > lo):
        raise ValueError("degenerate box: need lo < hi in every dimension")
    seqs = [lo[i] + (seq + 1.0) * 0.5 * (hi[i] - lo[i])
            for i, seq in enumerate(nodes.gen.per_dimension)]
    gen = GeneratingPoints(seqs)
    pts = np.empty_like(np.asarray(nodes.points))
    for i in range(m):
        pts[:, i] = gen.per_dimension[i][nodes.index_set.indices[:, i]]
    return UnisolventNodes(nodes.index_set, gen, pts)
