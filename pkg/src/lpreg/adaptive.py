"""Oracle-driven adaptive domain decomposition with global polynomial merging.

The driver recursively halves the domain.  On each subdomain, fits at a
short schedule of probe degrees yield max-norm residuals; a log-linear
decay model ``mu(k) ~ c * rho**(-k)`` fitted through them predicts the
degree needed to reach the target tolerance.  The oracle then compares
coefficient counts: a node is split exactly when its own predicted space is
larger than the sum of its children's predicted spaces.  Frozen leaves are
fitted on their own rescaled unisolvent-node basis; leaves that miss the
tolerance are split again (or flagged once the depth budget is exhausted).

Merging turns the piecewise regressors back into one globally smooth
polynomial: every global unisolvent node is assigned to the unique leaf
owning it (boxes are closed below and open above, with faces on the outer
boundary closed outward), the leaf regressors are evaluated there, and the
values are interpolated on the global node grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .basis import newton_coeffs, newton_eval
from .multiindex import cardinality, generate
from .nodes import GeneratingPoints
from .regression import least_squares_fit, evaluate_regressor
from .basis import lagrange_matrix

__all__ = [
    "Box",
    "halve",
    "DecayFit",
    "fit_decay",
    "predict_degree",
    "oracle_decide",
    "AdaptiveConfig",
    "DecompositionNode",
    "DecompositionTree",
    "adaptive_regression",
    "MergedPolynomial",
    "merge_global",
]

STATUS_ACTIVE = "active"
STATUS_SUBDIVIDED = "subdivided"
STATUS_LEAF = "leaf-fitted"
STATUS_STARVED = "data-starved"


@dataclass(frozen=True)
class Box:
    """Axis-aligned box with lo < hi in every dimension."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float).ravel()
        hi = np.asarray(self.hi, dtype=float).ravel()
        if lo.size != hi.size or lo.size == 0:
            raise ValueError("lo and hi must be equal-length vectors")
        if not np.all(hi > lo):
            raise ValueError("degenerate box: need lo < hi in every dimension")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def m(self):
        return self.lo.size

    def midpoint(self):
        return (self.lo + self.hi) / 2.0

    def to_reference(self, points):
        """Map points from the box onto [-1,1]^m (identity if already there)."""
        pts = np.asarray(points, dtype=float)
        if np.all(self.lo == -1.0) and np.all(self.hi == 1.0):
            return pts
        return 2.0 * (pts - self.lo) / (self.hi - self.lo) - 1.0


def halve(box):
    """Split a box at the midpoint of every coordinate into 2^m children.

    Child k takes the upper half in dimension i exactly when bit i of k is
    set; interiors are pairwise disjoint and the union is the parent.
    """
    mid = box.midpoint()
    if not (np.all(mid > box.lo) and np.all(mid < box.hi)):
        raise ValueError("box too small to halve in floating point")
    children = []
    for k in range(1 << box.m):
        lo = box.lo.copy()
        hi = box.hi.copy()
        for i in range(box.m):
            if (k >> i) & 1:
                lo[i] = mid[i]
            else:
                hi[i] = mid[i]
        children.append(Box(lo, hi))
    return children


@dataclass(frozen=True)
class DecayFit:
    """Exponential residual model mu(k) ~ c * rho**(-k), rho > 1."""

    c: float
    rho: float
    degrees: tuple
    residuals: tuple

    def __call__(self, k):
        return self.c * self.rho ** (-k)


def fit_decay(probes, clamp=1e-16, min_rho_margin=1e-6):
    """Least-squares line through (degree, log residual).

    Residuals at or below ``clamp`` are clamped before taking logs.  Returns
    None (the no-decay signal) when the fitted ratio rho does not exceed
    1 + ``min_rho_margin``; fewer than two probes is an error.
    """
    probes = [(int(k), float(mu)) for k, mu in probes]
    if len(probes) < 2:
        raise ValueError("need at least two probes to fit a decay model")
    ks = np.array([k for k, _ in probes], dtype=float)
    mus = np.array([max(mu, clamp) for _, mu in probes])
    slope, intercept = np.polyfit(ks, np.log(mus), 1)
    rho = math.exp(-slope)
    if rho <= 1.0 + min_rho_margin:
        return None
    return DecayFit(c=math.exp(intercept), rho=rho,
                    degrees=tuple(int(k) for k, _ in probes),
                    residuals=tuple(mu for _, mu in probes))


def predict_degree(fit, eps):
    """Smallest integer degree k >= 1 with c * rho**(-k) < eps (strictly).

    ``fit`` may be None (no decay), in which case the required degree is
    unreachable and None is returned.
    """
    eps = float(eps)
    if eps <= 0.0:
        raise ValueError("tolerance eps must be positive")
    if fit is None:
        return None
    k = max(1, math.floor(math.log(fit.c / eps) / math.log(fit.rho)) + 1)
    while k > 1 and fit(k - 1) < eps:
        k -= 1
    while fit(k) >= eps:
        k += 1
    return k


def oracle_decide(parent_degree, child_degrees, m, p):
    """Subdivision decision: 1 to split, 0 to keep the parent.

    Splits exactly when the parent's coefficient count strictly exceeds the
    children's total.  An unreachable (None) parent degree forces a split;
    an unreachable child while the parent is reachable defers (children
    cannot certify the tolerance, so the parent keeps the cell for now).
    """
    if parent_degree is None:
        return 1
    if any(d is None for d in child_degrees):
        return 0
    parent_cost = cardinality(m, parent_degree, p)
    children_cost = sum(cardinality(m, d, p) for d in child_degrees)
    return 1 if parent_cost > children_cost else 0


@dataclass(frozen=True)
class AdaptiveConfig:
    """Tunables of the decomposition driver.

    probe_degrees   fit degrees used for the decay probes, truncated per
                    subdomain to those with enough data points
    clamp           residual floor; a probe at or below it short-circuits
                    the prediction to that probe's degree
    degree_limit    predictions beyond this count as unreachable (guards the
                    cardinality bookkeeping against rho -> 1 blowups)
    """

    probe_degrees: tuple = (2, 4, 6, 8)
    clamp: float = 1e-16
    degree_limit: int = 4096


@dataclass
class DecompositionNode:
    box: Box
    depth: int
    predicted_degree: object = None
    probes: tuple = ()
    status: str = STATUS_ACTIVE
    fit: object = None
    tolerance_violated: bool = False
    children: list = field(default_factory=list)
    num_points: int = 0

    def is_leaf(self):
        return self.status in (STATUS_LEAF, STATUS_STARVED)


class DecompositionTree:
    """The frozen result of an adaptive run: boxes, degrees, leaf regressors."""

    def __init__(self, root, m, p, eps, max_depth, config, num_data):
        self.root = root
        self.m = m
        self.p = p
        self.eps = eps
        self.max_depth = max_depth
        self.config = config
        self.num_data = num_data

    def walk(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def leaves(self):
        return [n for n in self.walk() if n.is_leaf()]

    def fitted_leaves(self):
        return [n for n in self.walk() if n.status == STATUS_LEAF]

    def starved_leaves(self):
        return [n for n in self.walk() if n.status == STATUS_STARVED]

    def violated_leaves(self):
        return [n for n in self.walk() if n.tolerance_violated]

    def coefficient_total(self):
        """Total number of stored coefficients across fitted leaves."""
        return sum(len(n.fit.index_set) for n in self.fitted_leaves())

    def compression_factor(self):
        """Dataset size divided by the stored coefficient total."""
        total = self.coefficient_total()
        return float(self.num_data) / total if total else float("nan")

    def locate(self, x):
        """The leaf owning x: boxes closed below, open above, outer boundary
        closed outward.  Realised by midpoint descent (x_i >= mid goes up)."""
        node = self.root
        while node.status == STATUS_SUBDIVIDED:
            mid = node.box.midpoint()
            k = 0
            for i in range(self.m):
                if x[i] >= mid[i]:
                    k |= 1 << i
            node = node.children[k]
        return node

    def evaluate(self, points):
        """Piecewise evaluation by the owning leaf's regressor."""
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        groups = {}
        for r in range(pts.shape[0]):
            leaf = self.locate(pts[r])
            groups.setdefault(id(leaf), (leaf, []))[1].append(r)
        out = np.empty(pts.shape[0])
        for leaf, rows in groups.values():
            if leaf.status != STATUS_LEAF:
                raise ValueError("point owned by an unfitted (data-starved) leaf "
                                 f"with box lo={leaf.box.lo.tolist()} "
                                 f"hi={leaf.box.hi.tolist()}")
            rows = np.array(rows, dtype=int)
            ref = leaf.box.to_reference(pts[rows])
            out[rows] = evaluate_regressor(leaf.fit, ref)
        return float(out[0]) if single else out

    def to_dict(self):
        def node_dict(node):
            data = {
                "box": {"lo": node.box.lo.tolist(), "hi": node.box.hi.tolist()},
                "depth": node.depth,
                "status": node.status,
                "predicted_degree": node.predicted_degree,
                "probes": [[k, mu] for k, mu in node.probes],
                "num_points": node.num_points,
            }
            if node.status == STATUS_LEAF:
                data["tolerance_violated"] = node.tolerance_violated
                data["model"] = {
                    "degree": node.fit.index_set.n,
                    "num_coeffs": len(node.fit.index_set),
                    "mu": node.fit.mu,
                    "index_set": node.fit.index_set.to_dict(),
                    "coeffs": node.fit.coeffs.tolist(),
                }
            if node.children:
                data["children"] = [node_dict(c) for c in node.children]
            return data

        p = "inf" if math.isinf(float(self.p)) else self.p
        return {
            "format": "lpreg-tree",
            "m": self.m, "p": p, "eps": self.eps,
            "max_depth": self.max_depth,
            "probe_degrees": list(self.config.probe_degrees),
            "num_data": self.num_data,
            "leaves": len(self.leaves()),
            "coefficient_total": self.coefficient_total(),
            "root": node_dict(self.root),
        }


class _SpaceCache:
    """Per-run cache of (index set, generating points, Lagrange matrix)."""

    def __init__(self, m, p):
        self.m = m
        self.p = p
        self._spaces = {}

    def __call__(self, degree):
        entry = self._spaces.get(degree)
        if entry is None:
            index_set = generate(self.m, degree, self.p)
            gen = GeneratingPoints.for_index_set(index_set)
            entry = (index_set, gen, lagrange_matrix(index_set, gen))
            self._spaces[degree] = entry
        return entry


def _support_cap(m, p, num_points, limit):
    """Largest degree (capped at ``limit``) whose space fits the data count."""
    k = 0
    while k < limit and cardinality(m, k + 1, p) <= num_points:
        k += 1
    return k


def _fit_at_degree(spaces, box, pts, vals, degree):
    index_set, gen, lag = spaces(degree)
    return least_squares_fit(index_set, gen, box.to_reference(pts), vals,
                             lagrange=lag)


def _probe_box(spaces, box, pts, vals, eps, config):
    """Probe residual decay inside one box.

    Returns (predicted_degree_or_None, probes, starved).  A probe residual
    at or below the clamp short-circuits the prediction to that degree.
    """
    m = spaces.m
    usable = [k for k in config.probe_degrees
              if cardinality(m, k, spaces.p) <= pts.shape[0]]
    if not usable:
        return None, (), True
    probes = []
    for k in usable:
        fit = _fit_at_degree(spaces, box, pts, vals, k)
        probes.append((k, fit.mu))
        if fit.mu <= config.clamp:
            return k, tuple(probes), False
    if len(probes) < 2:
        return None, tuple(probes), False
    decay = fit_decay(probes, clamp=config.clamp)
    degree = predict_degree(decay, eps)
    if degree is not None and degree > config.degree_limit:
        degree = None
    return degree, tuple(probes), False


def _half_open_masks(pts, parent_mask_idx, box, children):
    """Assign the parent's data rows to the 2^m children.

    Lower children take [lo, mid), upper children [mid, hi]; points on the
    outer domain boundary stay inside because the parent already owns them.
    """
    mid = box.midpoint()
    sub = pts[parent_mask_idx]
    upper = sub >= mid  # per dimension
    child_rows = []
    for k in range(len(children)):
        mask = np.ones(sub.shape[0], dtype=bool)
        for i in range(box.m):
            want_upper = bool((k >> i) & 1)
            mask &= upper[:, i] == want_upper
        child_rows.append(parent_mask_idx[mask])
    return child_rows


def adaptive_regression(points, values, eps, max_depth, p, config=None):
    """Run the adaptive decomposition on a sampled dataset covering [-1,1]^m.

    ``points`` may be a PointSet or an (N, m) array; ``values`` the sampled
    function values.  Returns the DecompositionTree; leaves violating the
    tolerance at the depth limit are flagged rather than silently accepted,
    and subdomains too thin to support even the smallest probe degree are
    flagged data-starved.
    """
    pts = np.ascontiguousarray(getattr(points, "points", points), dtype=float)
    vals = np.asarray(values, dtype=float).ravel()
    if pts.ndim != 2:
        raise ValueError("points must be an (N, m) array")
    if vals.size != pts.shape[0]:
        raise ValueError("values length must match the number of points")
    eps = float(eps)
    if eps <= 0.0:
        raise ValueError("tolerance eps must be positive")
    max_depth = int(max_depth)
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    m = pts.shape[1]
    config = config or AdaptiveConfig()
    spaces = _SpaceCache(m, p)
    domain = Box(np.full(m, -1.0), np.full(m, 1.0))

    all_rows = np.arange(pts.shape[0])
    degree, probes, starved = _probe_box(spaces, domain, pts, vals, eps, config)
    root = DecompositionNode(box=domain, depth=0, predicted_degree=degree,
                             probes=probes, num_points=pts.shape[0])
    tree = DecompositionTree(root, m, p, eps, max_depth, config, pts.shape[0])
    if starved:
        root.status = STATUS_STARVED
        return tree

    def freeze(node, rows):
        cap = _support_cap(m, p, rows.size, config.degree_limit)
        degree = cap if node.predicted_degree is None \
            else min(node.predicted_degree, cap)
        node.fit = _fit_at_degree(spaces, node.box, pts[rows], vals[rows], degree)
        node.status = STATUS_LEAF
        node.tolerance_violated = node.fit.mu > eps
        return node.tolerance_violated

    def make_children(node, rows):
        boxes = halve(node.box)
        child_rows = _half_open_masks(pts, rows, node.box, boxes)
        out = []
        for cbox, crows in zip(boxes, child_rows):
            cdeg, cprobes, cstarved = _probe_box(spaces, cbox, pts[crows],
                                                 vals[crows], eps, config)
            child = DecompositionNode(box=cbox, depth=node.depth + 1,
                                      predicted_degree=cdeg, probes=cprobes,
                                      num_points=crows.size)
            if cstarved:
                child.status = STATUS_STARVED
            out.append((child, crows))
        return out

    active = [(root, all_rows)]
    while active:
        upcoming = []
        for node, rows in active:
            if node.status == STATUS_STARVED:
                continue
            if node.depth >= max_depth:
                freeze(node, rows)
                continue
            pending = make_children(node, rows)
            decision = oracle_decide(node.predicted_degree,
                                     [c.predicted_degree for c, _ in pending],
                                     m, p)
            subdivide = decision == 1
            if not subdivide:
                # the oracle kept the parent; the tolerance check may still
                # overrule and push the decomposition one level deeper
                subdivide = freeze(node, rows)
            if subdivide:
                node.status = STATUS_SUBDIVIDED
                node.fit = None
                node.tolerance_violated = False
                node.children = [c for c, _ in pending]
                upcoming.extend((c, r) for c, r in pending
                                if c.status != STATUS_STARVED)
        active = upcoming
    return tree


class MergedPolynomial:
    """A single global polynomial interpolating the piecewise leaf regressors."""

    def __init__(self, index_set, gen, coeffs, tree=None):
        coeffs = np.ascontiguousarray(np.asarray(coeffs, dtype=float).ravel())
        coeffs.setflags(write=False)
        self.index_set = index_set
        self.gen = gen
        self.coeffs = coeffs
        self.tree = tree

    def __call__(self, points):
        return newton_eval(self.index_set, self.gen, self.coeffs, points)

    def to_dict(self):
        return {
            "index_set": self.index_set.to_dict(),
            "generating_points": [seq.tolist() for seq in self.gen.per_dimension],
            "coeffs": self.coeffs.tolist(),
        }


def merge_global(tree, index_set, gen=None):
    """Interpolate the piecewise regressors at the global unisolvent nodes.

    Every node is evaluated by the unique leaf owning it under the half-open
    rule, and the resulting values are interpolated on the global grid; the
    outcome is one smooth polynomial on the whole domain.  A data-starved
    leaf intersecting the node set is an error.
    """
    from .nodes import unisolvent_nodes

    if gen is None:
        gen = GeneratingPoints.for_index_set(index_set)
    grid = unisolvent_nodes(index_set, gen)
    values = tree.evaluate(grid.points)
    poly = newton_coeffs(index_set, gen, values)
    return MergedPolynomial(index_set, gen, poly.coeffs, tree=tree)
