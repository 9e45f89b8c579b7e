"""File formats: model JSON, point-set / node / result-table CSV.

CSV dialect everywhere: comma separated, '.' decimal point, one header row,
numerics unquoted.  Floats are written with Python's shortest round-trip
repr, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math

import numpy as np

from .adaptive import MergedPolynomial
from .basis import PolynomialNewton
from .multiindex import MultiIndexSet
from .nodes import GeneratingPoints
from .regression import BASIS_CHEBYSHEV, BASIS_LAGRANGE_NEWTON, RegressionFit
from .sampling import PointSet

__all__ = [
    "model_dict",
    "write_model",
    "read_model",
    "LoadedModel",
    "write_pointset_csv",
    "read_points_csv",
    "write_nodes_csv",
    "write_rows_csv",
    "read_rows_csv",
    "write_tree_json",
]

MODEL_FORMAT = "lpreg-model"


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (np.floating,)):
        return repr(float(value))
    if value is None:
        return ""
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return str(value)


def model_dict(obj, extra=None):
    """Serialise a fit / Newton polynomial / merged polynomial to the shared
    on-disk model layout."""
    if isinstance(obj, RegressionFit):
        data = {
            "format": MODEL_FORMAT,
            "basis": obj.basis,
            "index_set": obj.index_set.to_dict(),
            "generating_points": None if obj.gen is None else
                [seq.tolist() for seq in obj.gen.per_dimension],
            "coeffs": np.asarray(obj.coeffs).tolist(),
            "diagnostics": {
                "mu": obj.mu,
                "rank": obj.rank,
                "cond": None if math.isinf(obj.cond) else obj.cond,
                "rank_deficient": obj.rank_deficient,
                "num_points": obj.num_points,
            },
        }
    elif isinstance(obj, (PolynomialNewton, MergedPolynomial)):
        data = {"format": MODEL_FORMAT, "basis": BASIS_LAGRANGE_NEWTON}
        data.update(obj.to_dict())
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__} as a model")
    if extra:
        data.update(extra)
    return data


class LoadedModel:
    """A deserialised model ready for evaluation."""

    def __init__(self, basis, index_set, gen, coeffs, diagnostics=None):
        self.basis = basis
        self.index_set = index_set
        self.gen = gen
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.diagnostics = diagnostics or {}

    @property
    def m(self):
        return self.index_set.m

    def evaluate(self, points):
        if self.basis == BASIS_CHEBYSHEV:
            from .basis import eval_chebyshev_basis
            return eval_chebyshev_basis(self.index_set, points) @ self.coeffs
        from .basis import newton_coeffs, newton_eval
        poly = newton_coeffs(self.index_set, self.gen, self.coeffs)
        return newton_eval(self.index_set, self.gen, poly.coeffs, points)


def write_model(path, obj, extra=None):
    with open(path, "w") as fh:
        json.dump(model_dict(obj, extra), fh, indent=1)
        fh.write("\n")


def read_model(path):
    with open(path) as fh:
        data = json.load(fh)
    if data.get("format") != MODEL_FORMAT:
        raise ValueError(f"{path}: not a model file")
    index_set = MultiIndexSet.from_dict(data["index_set"])
    gen = None
    if data.get("generating_points") is not None:
        gen = GeneratingPoints(data["generating_points"])
    basis = data.get("basis", BASIS_LAGRANGE_NEWTON)
    # merged/interpolant models store Newton coefficients directly; fits over
    # the lagrange-newton basis store node values -- both evaluate the same
    # way only for fits, so keep the distinction via the 'coeff_space' key
    coeff_space = data.get("coeff_space", "basis")
    model = LoadedModel(basis, index_set, gen, data["coeffs"],
                        data.get("diagnostics"))
    model.coeff_space = coeff_space
    return model


def write_pointset_csv(path, points, values=None):
    """Write a point set (optionally with a value column f) as x1..xm[,f]."""
    pts = points.points if isinstance(points, PointSet) else np.asarray(points, dtype=float)
    m = pts.shape[1]
    header = [f"x{i + 1}" for i in range(m)] + (["f"] if values is not None else [])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        if values is None:
            for row in pts:
                writer.writerow([_fmt(float(v)) for v in row])
        else:
            vals = np.asarray(values, dtype=float).ravel()
            for row, val in zip(pts, vals):
                writer.writerow([_fmt(float(v)) for v in row] + [_fmt(float(val))])


class CsvFormatError(ValueError):
    """Malformed CSV input; the message carries the offending line number."""


def read_points_csv(path, require_values=False):
    """Read x1..xm[,f] rows; returns (points array, values array or None)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: empty file, expected a header row")
        header = [h.strip() for h in header]
        coord_cols = []
        for i, name in enumerate(header):
            if name == f"x{len(coord_cols) + 1}":
                coord_cols.append(i)
        if not coord_cols:
            raise CsvFormatError(f"{path}:1: header must start with x1, x2, ...")
        value_col = header.index("f") if "f" in header else None
        if require_values and value_col is None:
            raise CsvFormatError(f"{path}:1: missing value column 'f'")
        pts, vals = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                pts.append([float(row[c]) for c in coord_cols])
                if value_col is not None:
                    vals.append(float(row[value_col]))
            except (ValueError, IndexError) as exc:
                raise CsvFormatError(f"{path}:{lineno}: {exc}") from None
    points = np.array(pts, dtype=float).reshape(-1, len(coord_cols))
    values = np.array(vals, dtype=float) if value_col is not None else None
    return points, values


def write_nodes_csv(path, nodes):
    """One row per multi-index: the index tuple, then the node coordinates."""
    m = nodes.index_set.m
    header = [f"alpha{i + 1}" for i in range(m)] + [f"x{i + 1}" for i in range(m)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for idx, pt in zip(nodes.index_set.indices, nodes.points):
            writer.writerow([str(int(a)) for a in idx] + [_fmt(float(v)) for v in pt])


def write_rows_csv(path, fieldnames, rows, meta=None):
    """Result table with an optional '# ...' metadata comment line on top."""
    with open(path, "w", newline="") as fh:
        if meta is not None:
            fh.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        writer = csv.writer(fh)
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([_fmt(row.get(k)) for k in fieldnames])


def read_rows_csv(path):
    """Read a result table back (comment lines skipped); values stay strings."""
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    return list(reader)


def write_tree_json(path, tree, meta=None):
    data = tree.to_dict()
    if meta:
        data["meta"] = meta
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")
