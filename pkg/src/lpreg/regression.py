"""Least-squares polynomial regression over the Lagrange or Chebyshev basis.

The regression matrix holds the basis functions evaluated at the data
points, rows indexed by points and columns by multi-indices in
lexicographic order.  Solving is delegated to the SVD-backed minimum-norm
least-squares routine (backward stable, deterministic for fixed inputs);
the numerical rank uses the cutoff sigma_max * max(|P|, |A|) * eps.
Rank-deficient systems are flagged, not rejected: equispaced data at high
degree does cross into numerical rank loss and the minimum-norm fit is
still the meaningful answer to return.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import (eval_chebyshev_basis, eval_lagrange_basis, newton_coeffs,
                    newton_eval)
from .sampling import PointSet

__all__ = [
    "RegressionFit",
    "build_regression_matrix",
    "least_squares_fit",
    "evaluate_regressor",
    "max_residual",
    "BASIS_LAGRANGE_NEWTON",
    "BASIS_CHEBYSHEV",
]

BASIS_LAGRANGE_NEWTON = "lagrange-newton"
BASIS_CHEBYSHEV = "chebyshev"


def _points_array(points, m):
    if isinstance(points, PointSet):
        if points.m != m:
            raise ValueError("point set dimension mismatch")
        return points.points
    pts = np.ascontiguousarray(np.asarray(points, dtype=float))
    if pts.ndim != 2 or pts.shape[1] != m:
        raise ValueError(f"points must have shape (*, {m})")
    return pts


@dataclass
class RegressionFit:
    """Result of one least-squares fit.

    ``coeffs`` are coefficients over the chosen basis (for the
    Lagrange-Newton basis they equal the regressor's values at the
    unisolvent nodes); ``mu`` is the max-norm residual at the data points,
    recomputed from the solution.  Treat instances as immutable.
    """

    index_set: object
    gen: object
    coeffs: np.ndarray
    mu: float
    rank: int
    basis: str
    singular_values: np.ndarray
    num_points: int
    _newton_form: object = field(default=None, repr=False, compare=False)

    @property
    def cond(self):
        """Spectral condition number of the regression matrix."""
        s = self.singular_values
        if s.size == 0 or self.rank < min(self.num_points, len(self.index_set)):
            return float("inf")
        return float(s[0] / s[-1])

    @property
    def rank_deficient(self):
        return self.rank < len(self.index_set)

    def newton_form(self):
        """The regressor converted to Newton form (Lagrange basis only)."""
        if self.basis != BASIS_LAGRANGE_NEWTON:
            raise ValueError("newton_form applies to the lagrange-newton basis")
        if self._newton_form is None:
            self._newton_form = newton_coeffs(self.index_set, self.gen, self.coeffs)
        return self._newton_form


def build_regression_matrix(index_set, gen, points, basis=BASIS_LAGRANGE_NEWTON,
                            lagrange=None):
    """Basis values at the data points; requires |P| >= |A|.

    Under-determined layouts are rejected outright -- constrained or
    regularised fitting is out of scope here.
    """
    pts = _points_array(points, index_set.m)
    if pts.shape[0] < len(index_set):
        raise ValueError(f"need at least {len(index_set)} data points, "
                         f"got {pts.shape[0]}")
    if basis == BASIS_LAGRANGE_NEWTON:
        return eval_lagrange_basis(index_set, gen, pts, lagrange=lagrange)
    if basis == BASIS_CHEBYSHEV:
        return eval_chebyshev_basis(index_set, pts)
    raise ValueError(f"unknown basis tag: {basis}")


def least_squares_fit(index_set, gen, points, values, basis=BASIS_LAGRANGE_NEWTON,
                      lagrange=None):
    """Minimum-norm least-squares fit of the sampled values.

    Returns a RegressionFit carrying the coefficient vector, the max-norm
    data residual mu, the numerical rank and the singular values of the
    regression matrix.
    """
    pts = _points_array(points, index_set.m)
    vals = np.asarray(values, dtype=float).ravel()
    if vals.size == 0:
        raise ValueError("empty data")
    if vals.size != pts.shape[0]:
        raise ValueError("values length must match the number of points")
    matrix = build_regression_matrix(index_set, gen, pts, basis, lagrange=lagrange)
    coeffs, _, rank, sing = np.linalg.lstsq(matrix, vals, rcond=None)
    mu = float(np.max(np.abs(matrix @ coeffs - vals)))
    return RegressionFit(index_set=index_set, gen=gen, coeffs=coeffs, mu=mu,
                         rank=int(rank), basis=basis, singular_values=sing,
                         num_points=pts.shape[0])


def evaluate_regressor(fit, points):
    """Evaluate the fitted polynomial at one point or a batch of points."""
    if fit.basis == BASIS_CHEBYSHEV:
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        out = eval_chebyshev_basis(fit.index_set, pts) @ fit.coeffs
        return float(out) if single else out
    poly = fit.newton_form()
    return newton_eval(fit.index_set, fit.gen, poly.coeffs, points)


def max_residual(fit, points, f):
    """max |f(x) - Q(x)| over the given points; f may be a callable or values."""
    pts = _points_array(np.atleast_2d(np.asarray(points, dtype=float)), fit.index_set.m)
    target = np.asarray(f(pts) if callable(f) else f, dtype=float).ravel()
    if target.size != pts.shape[0]:
        raise ValueError("value count must match the probe points")
    return float(np.max(np.abs(target - evaluate_regressor(fit, pts))))
