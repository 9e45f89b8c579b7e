"""Stability diagnostics: Lebesgue constants, conditioning, pseudo-inverse norms.

The quantity that controls how data perturbations propagate into the fitted
polynomial is the product of the node set's Lebesgue constant and the
infinity norm of the pseudo-left-inverse of the regression matrix.  Both
factors are function-independent, so they can be tabulated per (m, n, p,
data distribution) cell and compared across degree notions.

The Lebesgue constant is reported as a sampled lower bound (max over a
sample cloud of the absolute Lagrange row sums), never as the true sup;
sample count and seed belong to the report.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import eval_lagrange_basis, lagrange_matrix
from .sampling import PointSet

__all__ = [
    "StabilityReport",
    "lebesgue_estimate",
    "condition_number",
    "pseudo_inverse_inf_norm",
    "approximation_factor",
    "cheb_lobatto_lebesgue_asymptotic",
    "lebesgue_1d_dense",
]


@dataclass(frozen=True)
class StabilityReport:
    """One diagnostics row: Lebesgue estimate, cond, ||S||_inf and their product."""

    lebesgue: float
    cond: float
    s_inf_norm: float
    approx_factor: float
    sample_count: int
    seed: object = None

    def as_row(self, m=None, n=None, p=None, distribution=None, num_points=None):
        return {
            "m": m, "n": n, "p": p, "distribution": distribution,
            "num_points": num_points, "lebesgue": self.lebesgue,
            "cond": self.cond, "s_inf_norm": self.s_inf_norm,
            "approx_factor": self.approx_factor, "seed": self.seed,
        }


def _sample_array(samples, m):
    if isinstance(samples, PointSet):
        if samples.m != m:
            raise ValueError("sample dimension mismatch")
        return samples.points
    pts = np.asarray(samples, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != m:
        raise ValueError(f"samples must have shape (*, {m})")
    return pts


def lebesgue_estimate(index_set, gen=None, samples=None, lagrange=None):
    """Sampled Lebesgue constant: max over samples of sum_alpha |L_alpha(x)|.

    A lower bound on the true sup over [-1,1]^m that tightens with the
    sample count.  Evaluation is chunked so large sample clouds never
    materialise a full (samples x basis) block beyond a few million entries.
    """
    if lagrange is None:
        lagrange = lagrange_matrix(index_set, gen)
    pts = _sample_array(samples, lagrange.index_set.m)
    if pts.shape[0] == 0:
        raise ValueError("empty sample set")
    best = 0.0
    step = max(1, 4_000_000 // max(1, len(lagrange.index_set)))
    for s in range(0, pts.shape[0], step):
        rows = eval_lagrange_basis(points=pts[s:s + step], lagrange=lagrange)
        best = max(best, float(np.abs(rows).sum(axis=1).max()))
    return best


def condition_number(matrix):
    """Spectral condition number sigma_max / sigma_min.

    Returns inf when the numerical rank (cutoff sigma_max * max(shape) * eps)
    falls short of min(shape).  A zero matrix is rejected.
    """
    matrix = np.asarray(matrix, dtype=float)
    sing = np.linalg.svd(matrix, compute_uv=False)
    if sing.size == 0 or sing[0] == 0.0:
        raise ValueError("condition number of a zero matrix")
    cutoff = sing[0] * max(matrix.shape) * np.finfo(float).eps
    if sing[-1] <= cutoff:
        return float("inf")
    return float(sing[0] / sing[-1])


def pseudo_inverse_inf_norm(matrix):
    """||S||_inf for the Moore-Penrose pseudo-left-inverse S of the matrix.

    S is materialised explicitly from the SVD (fine at desk scale); the
    norm is the maximum absolute row sum.  Rank-deficient input raises with
    the deficient numerical rank named.
    """
    matrix = np.asarray(matrix, dtype=float)
    u, sing, vt = np.linalg.svd(matrix, full_matrices=False)
    if sing.size == 0 or sing[0] == 0.0:
        raise ValueError("pseudo-inverse of a zero matrix")
    cutoff = sing[0] * max(matrix.shape) * np.finfo(float).eps
    rank = int(np.sum(sing > cutoff))
    if rank < min(matrix.shape):
        raise ValueError(f"matrix is rank deficient: numerical rank {rank} "
                         f"< {min(matrix.shape)}")
    pinv = (vt.T / sing) @ u.T
    return float(np.abs(pinv).sum(axis=1).max())


def approximation_factor(index_set, gen, data_points, samples, seed=None,
                         lagrange=None):
    """Assemble the full stability report for one regression configuration.

    The factor is the sampled Lebesgue estimate times ||S||_inf of the
    regression matrix built on ``data_points``; all components are recorded.
    """
    if lagrange is None:
        lagrange = lagrange_matrix(index_set, gen)
    data = _sample_array(data_points, index_set.m)
    if data.shape[0] < len(index_set):
        raise ValueError("need at least as many data points as basis functions")
    matrix = eval_lagrange_basis(points=data, lagrange=lagrange)
    leb = lebesgue_estimate(index_set, samples=samples, lagrange=lagrange)
    cond = condition_number(matrix)
    s_inf = pseudo_inverse_inf_norm(matrix)
    sample_count = len(samples) if hasattr(samples, "__len__") else int(samples.shape[0])
    return StabilityReport(lebesgue=leb, cond=cond, s_inf_norm=s_inf,
                           approx_factor=leb * s_inf,
                           sample_count=sample_count, seed=seed)


def cheb_lobatto_lebesgue_asymptotic(n):
    """The logarithmic law (2/pi)(log(n+1) + gamma + log(8/pi)) for the
    Chebyshev-Lobatto Lebesgue constant at degree n."""
    n = int(n)
    if n < 0:
        raise ValueError("n must be >= 0")
    return (2.0 / np.pi) * (np.log(n + 1) + np.euler_gamma + np.log(8.0 / np.pi))


def lebesgue_1d_dense(n, resolution=100_001):
    """Near-exact 1D Chebyshev-Lobatto Lebesgue constant by dense maximisation.

    Evaluates the Lebesgue function on ``resolution`` equispaced abscissae
    via the barycentric form; independent of the Newton/Lagrange machinery.
    """
    from .nodes import cheb_lobatto

    nodes = cheb_lobatto(n)
    if nodes.size == 1:
        return 1.0
    x = np.linspace(-1.0, 1.0, resolution)
    diff = np.subtract.outer(nodes, nodes)
    np.fill_diagonal(diff, 1.0)
    weights = 1.0 / np.prod(diff, axis=1)
    gaps = np.subtract.outer(x, nodes)
    exact = gaps == 0.0
    gaps[exact] = 1.0
    terms = weights[None, :] / gaps
    leb = np.abs(terms).sum(axis=1) / np.abs(terms.sum(axis=1))
    leb[exact.any(axis=1)] = 1.0
    return float(leb.max())
