"""Downward-closed multi-index sets for general lp-degree polynomial spaces.

A multi-index set ``A`` collects exponent tuples ``alpha`` with
``||alpha||_p <= n``.  The three workhorse choices are total degree
(``p = 1``), Euclidean degree (``p = 2``) and maximum degree
(``p = inf``); any positive ``p`` is accepted.  Sets are kept in
lexicographic order with the *last* entry most significant, e.g. in three
variables ``(5,3,1) < (1,0,3) < (1,1,3)``.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

__all__ = [
    "MultiIndexSet",
    "generate",
    "cardinality",
    "compare_lex",
    "is_downward_closed",
]

# slack used only for non-integral exponents p, where the membership test
# k_1**p + ... + k_m**p <= n**p cannot be carried out in integer arithmetic
FLOAT_NORM_TOL = 1e-12


def _normalize_p(p):
    p = float(p)
    if not p > 0.0 or math.isnan(p):
        raise ValueError(f"degree exponent p must be positive, got {p}")
    return p


class MultiIndexSet:
    """An ordered, downward-closed set of exponent tuples.

    Attributes
    ----------
    m : int
        Number of variables (tuple length).
    n : int
        Degree bound.
    p : float
        Degree exponent; ``math.inf`` selects maximum degree.
    indices : (len, m) read-only integer array
        Exponent tuples, one per row, in lexicographic order (last entry
        most significant).
    """

    def __init__(self, m, n, p, indices):
        m = int(m)
        if m < 1:
            raise ValueError("dimension m must be >= 1")
        n = int(n)
        if n < 0:
            raise ValueError("degree n must be >= 0")
        arr = np.ascontiguousarray(np.asarray(indices, dtype=np.int64))
        if arr.ndim != 2 or arr.shape[1] != m:
            raise ValueError(f"indices must have shape (*, {m})")
        if arr.size and arr.min() < 0:
            raise ValueError("exponents must be non-negative")
        arr.setflags(write=False)
        self.m = m
        self.n = n
        self.p = _normalize_p(p)
        self.indices = arr
        self._positions = None

    @classmethod
    def from_indices(cls, indices, m=None):
        """Wrap an explicit downward-closed collection of exponent tuples.

        The tuples are sorted into lexicographic order; ``n`` is set to the
        largest single exponent and ``p`` to ``inf`` (every downward-closed
        set sits inside that maximum-degree ball).
        """
        rows = sorted({tuple(int(a) for a in alpha) for alpha in indices},
                      key=lambda t: t[::-1])
        if not rows:
            raise ValueError("empty index set")
        if m is None:
            m = len(rows[0])
        if not is_downward_closed(rows):
            raise ValueError("index set is not downward closed")
        n = max(max(r) for r in rows)
        return cls(m, n, math.inf, np.array(rows, dtype=np.int64))

    def __len__(self):
        return self.indices.shape[0]

    def __iter__(self):
        for row in self.indices:
            yield tuple(int(a) for a in row)

    def __repr__(self):
        p = "inf" if math.isinf(self.p) else f"{self.p:g}"
        return f"MultiIndexSet(m={self.m}, n={self.n}, p={p}, size={len(self)})"

    @property
    def positions(self):
        """dict mapping exponent tuple -> row number (built lazily)."""
        if self._positions is None:
            self._positions = {tuple(map(int, row)): i
                               for i, row in enumerate(self.indices)}
        return self._positions

    def __contains__(self, alpha):
        return tuple(int(a) for a in alpha) in self.positions

    def max_exponents(self):
        """Componentwise maximum over all indices, as an m-tuple."""
        if len(self) == 0:
            raise ValueError("max_exponents of an empty set")
        return tuple(int(a) for a in self.indices.max(axis=0))

    def to_dict(self):
        p = "inf" if math.isinf(self.p) else self.p
        return {"m": self.m, "n": self.n, "p": p,
                "indices": self.indices.tolist()}

    @classmethod
    def from_dict(cls, data):
        p = math.inf if data["p"] == "inf" else data["p"]
        return cls(data["m"], data["n"], p, np.array(data["indices"], dtype=np.int64))


def _power_fn(p):
    """Return (pow, budget_of_n) implementing the membership test
    pow(k_1) + ... + pow(k_m) <= budget_of_n(n)."""
    if math.isinf(p):
        raise ValueError("no power function for p = inf")
    if p.is_integer():
        q = int(p)
        return (lambda k: k ** q), (lambda n: n ** q)
    return (lambda k: float(k) ** p), (lambda n: float(n) ** p + FLOAT_NORM_TOL)


def generate(m, n, p):
    """Build the complete set ``{alpha : ||alpha||_p <= n}`` in m variables.

    Enumeration runs odometer-style directly in lexicographic order (last
    entry most significant), so no sorting pass is needed.  For integral p
    the membership test uses exact integer arithmetic (for instance
    ``sum(a_i**2) <= n**2`` for Euclidean degree); for fractional p a float
    test with tolerance ``FLOAT_NORM_TOL`` is used.
    """
    m = int(m)
    if m < 1:
        raise ValueError("dimension m must be >= 1")
    n = int(n)
    if n < 0:
        raise ValueError("degree n must be >= 0")
    p = _normalize_p(p)

    if math.isinf(p):
        # product(...) varies the last factor fastest; reversing each tuple
        # makes the first entry fastest, i.e. the last most significant
        rows = [rev[::-1] for rev in itertools.product(range(n + 1), repeat=m)]
        return MultiIndexSet(m, n, p, np.array(rows, dtype=np.int64))

    powf, budgetf = _power_fn(p)

    def rec(dims, budget):
        if dims == 0:
            yield ()
            return
        k = 0
        while powf(k) <= budget:
            for rest in rec(dims - 1, budget - powf(k)):
                yield rest + (k,)
            k += 1

    rows = list(rec(m, budgetf(n)))
    return MultiIndexSet(m, n, p, np.array(rows, dtype=np.int64))


def cardinality(m, n, p):
    """Size of the lp-ball index set without materialising it.

    Total and maximum degree use the closed forms binom(m+n, n) and
    (n+1)**m; other exponents are counted recursively.
    """
    m = int(m)
    n = int(n)
    if m < 1 or n < 0:
        raise ValueError("need m >= 1 and n >= 0")
    p = _normalize_p(p)
    if p == 1.0:
        return math.comb(m + n, n)
    if math.isinf(p):
        return (n + 1) ** m
    powf, budgetf = _power_fn(p)
    memo = {}

    def count(dims, budget):
        if dims == 0:
            return 1
        key = (dims, budget)
        if key in memo:
            return memo[key]
        total = 0
        k = 0
        while powf(k) <= budget:
            total += count(dims - 1, budget - powf(k))
            k += 1
        memo[key] = total
        return total

    return count(m, budgetf(n))


def compare_lex(alpha, beta):
    """Lexicographic comparison with the last entry most significant.

    Returns -1, 0 or +1.  Example: (5,3,1) < (1,0,3) because the last
    entries already decide.
    """
    a = tuple(alpha)
    b = tuple(beta)
    if len(a) != len(b):
        raise ValueError(f"tuple lengths differ: {len(a)} vs {len(b)}")
    for x, y in zip(reversed(a), reversed(b)):
        if x != y:
            return -1 if x < y else 1
    return 0


def is_downward_closed(indices):
    """True iff every componentwise-dominated index of each member is present.

    Accepts a MultiIndexSet or any iterable of equal-length exponent tuples.
    """
    if isinstance(indices, MultiIndexSet):
        members = set(indices.positions)
    else:
        members = {tuple(int(a) for a in alpha) for alpha in indices}
    for alpha in members:
        for i, a in enumerate(alpha):
            if a > 0:
                below = alpha[:i] + (a - 1,) + alpha[i + 1:]
                if below not in members:
                    return False
    return True
