"""Newton-form interpolation, Lagrange coefficient matrices, Chebyshev basis.

The Newton basis attached to generating points is

    N_alpha(x) = prod_i prod_{j < alpha_i} (x_i - p_{j,i}),

evaluated from per-dimension cumulative products so each linear factor is
formed once per evaluation point.  On the unisolvent nodes the evaluation
matrix ``N_alpha(p_beta)`` is lower triangular with nonzero diagonal in
lexicographic order, so interpolation amounts to one triangular transform:
here a dimension-wise divided-difference pass that runs in O(n * len(A))
vector operations and O(len(A)) extra memory.

Lagrange polynomials are represented by their Newton coefficient vectors;
``lagrange_matrix`` collects them column by column (divided differences of
Kronecker data), and ``eval_lagrange_basis`` produces the cardinal-basis
value matrix used as regression matrix downstream.
"""

from __future__ import annotations

import numpy as np

from .nodes import GeneratingPoints, unisolvent_nodes

__all__ = [
    "PolynomialNewton",
    "LagrangeCoeffMatrix",
    "newton_basis_matrix",
    "newton_eval",
    "newton_coeffs",
    "newton_transform",
    "lagrange_matrix",
    "eval_lagrange_basis",
    "eval_chebyshev_basis",
]

# cap on entries of intermediate (points x basis) blocks; evaluations over
# more points are processed in row chunks of this size
_CHUNK_ENTRIES = 8_000_000


class PolynomialNewton:
    """A polynomial in Newton form: index set, generating points, coefficients."""

    def __init__(self, index_set, gen, coeffs):
        coeffs = np.ascontiguousarray(np.asarray(coeffs, dtype=float).ravel())
        if coeffs.size != len(index_set):
            raise ValueError("coefficient length must equal the index set size")
        coeffs.setflags(write=False)
        self.index_set = index_set
        self.gen = gen
        self.coeffs = coeffs

    def __call__(self, x):
        return newton_eval(self.index_set, self.gen, self.coeffs, x)

    def __repr__(self):
        return f"PolynomialNewton({self.index_set!r})"

    def to_dict(self):
        return {
            "index_set": self.index_set.to_dict(),
            "generating_points": [seq.tolist() for seq in self.gen.per_dimension],
            "coeffs": self.coeffs.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        from .multiindex import MultiIndexSet
        index_set = MultiIndexSet.from_dict(data["index_set"])
        gen = GeneratingPoints(data["generating_points"])
        return cls(index_set, gen, np.array(data["coeffs"], dtype=float))


class LagrangeCoeffMatrix:
    """Newton coefficients of all Lagrange polynomials, one per column."""

    def __init__(self, index_set, gen, matrix):
        self.index_set = index_set
        self.gen = gen
        self.matrix = matrix

    def column(self, j):
        return PolynomialNewton(self.index_set, self.gen, self.matrix[:, j])


def _as_batch(x, m):
    """Normalise input points to a (npts, m) float array; note if scalar-like."""
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != m:
        raise ValueError(f"evaluation points must be m-vectors with m={m}")
    return np.ascontiguousarray(arr), single


def newton_basis_matrix(index_set, gen, points):
    """Evaluate every Newton basis polynomial at every point.

    Returns the (npts, len(A)) matrix with entry (i, j) = N_{alpha_j}(x_i).
    """
    pts, _ = _as_batch(points, index_set.m)
    idx = index_set.indices
    out = None
    for i in range(index_set.m):
        nmax = int(idx[:, i].max()) if idx.size else 0
        seq = gen.per_dimension[i]
        cum = np.ones((pts.shape[0], nmax + 1))
        if nmax > 0:
            np.cumprod(pts[:, i:i + 1] - seq[None, :nmax], axis=1, out=cum[:, 1:])
        cols = cum[:, idx[:, i]]
        out = cols if out is None else out * cols
    return out


def newton_eval(index_set, gen, coeffs, points):
    """Evaluate sum_alpha c_alpha N_alpha at one point or a batch of points."""
    coeffs = np.asarray(coeffs, dtype=float).ravel()
    if coeffs.size != len(index_set):
        raise ValueError("coefficient length must equal the index set size")
    pts, single = _as_batch(points, index_set.m)
    out = np.empty(pts.shape[0])
    step = max(1, _CHUNK_ENTRIES // max(1, len(index_set)))
    for s in range(0, pts.shape[0], step):
        block = pts[s:s + step]
        out[s:s + step] = newton_basis_matrix(index_set, gen, block) @ coeffs
    return float(out[0]) if single else out


def _dds_plan(index_set):
    """Per-dimension update schedule for the divided-difference transform.

    For each dimension: a list over exponent value a >= 1 holding the rows
    carrying that exponent and, aligned with them, the rows of the same
    index with the exponent decremented (present by downward closure).
    Cached on the index set, which is immutable.
    """
    plan = getattr(index_set, "_dds_plan", None)
    if plan is not None:
        return plan
    idx = index_set.indices
    pos = index_set.positions
    plan = []
    for dim in range(index_set.m):
        exps = idx[:, dim]
        nmax = int(exps.max()) if exps.size else 0
        per_a = []
        for a in range(1, nmax + 1):
            rows = np.nonzero(exps == a)[0]
            dec = idx[rows].copy()
            dec[:, dim] -= 1
            partner = np.array([pos[tuple(map(int, r))] for r in dec], dtype=int)
            per_a.append((rows, partner))
        plan.append(per_a)
    index_set._dds_plan = plan
    return plan


def newton_transform(index_set, gen, values):
    """Divided-difference transform: node values -> Newton coefficients.

    ``values`` may be a vector over the nodes or a matrix whose columns are
    transformed simultaneously.  The classic 1D in-place table update is
    applied along each dimension in turn; rows sharing all other exponents
    form the 1D lines, and downward closure guarantees the decremented
    partner row exists.  Equivalent to forward substitution against the
    lower-triangular Newton evaluation matrix.
    """
    vals = np.array(values, dtype=float, copy=True)
    if vals.shape[0] != len(index_set):
        raise ValueError("values must be indexed like the multi-index set")
    plan = _dds_plan(index_set)
    for dim in range(index_set.m):
        seq = gen.per_dimension[dim]
        per_a = plan[dim]
        nmax = len(per_a)
        for j in range(1, nmax + 1):
            for a in range(nmax, j - 1, -1):
                rows, partner = per_a[a - 1]
                vals[rows] = (vals[rows] - vals[partner]) / (seq[a] - seq[a - j])
    return vals


def newton_coeffs(index_set, gen, values):
    """Interpolate node values: the unique member of the space with
    Q(p_alpha) = values[alpha], returned in Newton form."""
    vals = np.asarray(values, dtype=float).ravel()
    if vals.size != len(index_set):
        raise ValueError("one value per multi-index required")
    return PolynomialNewton(index_set, gen, newton_transform(index_set, gen, vals))


def lagrange_matrix(index_set, gen=None):
    """Newton coefficients of the full Lagrange basis.

    Column alpha interpolates the Kronecker data delta_{., alpha}; the
    columns are obtained in one divided-difference pass over the identity
    matrix rather than by explicit inversion.
    """
    if gen is None:
        gen = GeneratingPoints.for_index_set(index_set)
    mat = newton_transform(index_set, gen, np.eye(len(index_set)))
    return LagrangeCoeffMatrix(index_set, gen, mat)


def eval_lagrange_basis(index_set, gen=None, points=None, lagrange=None):
    """Cardinal-basis value matrix: entry (i, alpha) = L_alpha(x_i).

    Computed as (Newton basis rows at x) @ (Lagrange coefficient matrix).
    Points that coincide bitwise with an interpolation node are emitted as
    exact unit rows -- the cardinal property is definitional there, and it
    keeps node-aligned regression matrices exactly equal to the identity.
    Points outside [-1,1]^m are allowed (no clamping).

    Pass a precomputed ``lagrange`` matrix to amortise repeated calls.
    """
    if lagrange is not None:
        index_set, gen = lagrange.index_set, lagrange.gen
    elif gen is None:
        gen = GeneratingPoints.for_index_set(index_set)
    if points is None:
        raise ValueError("points are required")
    if lagrange is None:
        lagrange = lagrange_matrix(index_set, gen)
    pts, single = _as_batch(points, index_set.m)

    node_pts = unisolvent_nodes(index_set, gen).points
    node_pos = {node_pts[i].tobytes(): i for i in range(node_pts.shape[0])}

    out = np.empty((pts.shape[0], len(index_set)))
    step = max(1, _CHUNK_ENTRIES // max(1, len(index_set)))
    for s in range(0, pts.shape[0], step):
        block = pts[s:s + step]
        out[s:s + step] = newton_basis_matrix(index_set, gen, block) @ lagrange.matrix
        for r in range(block.shape[0]):
            hit = node_pos.get(block[r].tobytes())
            if hit is not None:
                out[s + r] = 0.0
                out[s + r, hit] = 1.0
    return out[0] if single else out


def _chebyshev_table(x, nmax):
    """Chebyshev values T_0..T_nmax at the 1D points x, by the three-term
    recurrence T_{j+1} = 2 x T_j - T_{j-1}."""
    table = np.empty((x.size, nmax + 1))
    table[:, 0] = 1.0
    if nmax >= 1:
        table[:, 1] = x
    for j in range(2, nmax + 1):
        table[:, j] = 2.0 * x * table[:, j - 1] - table[:, j - 2]
    return table


def eval_chebyshev_basis(index_set, points):
    """Tensor Chebyshev basis matrix: entry (i, alpha) = prod_k T_{alpha_k}(x_k).

    This is the classic baseline basis used for crosschecking the
    Newton-Lagrange regression path; the recurrence is evaluated as-is for
    points outside [-1,1]^m as well.
    """
    pts, single = _as_batch(points, index_set.m)
    idx = index_set.indices
    out = None
    for i in range(index_set.m):
        nmax = int(idx[:, i].max()) if idx.size else 0
        cols = _chebyshev_table(pts[:, i], nmax)[:, idx[:, i]]
        out = cols if out is None else out * cols
    return out[0] if single else out
