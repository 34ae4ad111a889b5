"""
JSON and CSV codecs for functions, operators and reports.

Function specs:
    {"type": "rational", "num": [...], "den": [...]}
    {"type": "taylor", "coeffs": [...]}
    {"type": "grid", "samples": [...]}
Pair specs:
    {"type": "pair", "phi1": <function>, "phi2": <function>}
Operator specs (entries row-major, dim_out rows of dim_in columns):
    {"dim_in": n, "dim_out": m, "entries": [[re, im], ...],
     "labels": {"domain": "H", "codomain": "H",
                "interior": {"dim_in": k, "dim_out": n, "entries": [...]}}}
    The older nested form {"type": "operator", "entries": [[...], ...]} is
    still read.

A complex number is written as [re, im]; plain numbers are read as reals.
"""

import csv
import json
import os

import numpy as np

from core.hardy import BoundaryGrid, RationalFunction, TaylorCoeffs
from core.operators import OperatorMatrix
from utils.logging import get_logger

logger = get_logger(__name__)


def decode_complex(value):
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, dict):
        return complex(value.get("re", 0.0), value.get("im", 0.0))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ValueError(f"cannot read {value!r} as a complex number")


def encode_complex(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def decode_vector(values):
    return np.array([decode_complex(v) for v in values], dtype=complex)


def encode_vector(values):
    return [encode_complex(z) for z in np.asarray(values).reshape(-1)]


def decode_matrix(rows):
    return np.array([[decode_complex(v) for v in row] for row in rows], dtype=complex)


def function_from_dict(spec):
    """
    Build a RationalFunction, TaylorCoeffs or BoundaryGrid from its JSON spec.

    Raises:
        ValueError: for unknown types or missing fields
    """
    kind = spec.get("type")
    try:
        if kind == "rational":
            return RationalFunction(decode_vector(spec["num"]), decode_vector(spec.get("den", [1.0])))
        if kind == "taylor":
            return TaylorCoeffs(decode_vector(spec["coeffs"]))
        if kind == "grid":
            return BoundaryGrid(decode_vector(spec["samples"]))
    except KeyError as e:
        raise ValueError(f"function spec of type {kind!r} is missing {e}")
    raise ValueError(f"unknown function type {kind!r}")


def function_to_dict(f):
    if isinstance(f, RationalFunction):
        return {"type": "rational", "num": encode_vector(f.num), "den": encode_vector(f.den)}
    if isinstance(f, TaylorCoeffs):
        return {"type": "taylor", "coeffs": encode_vector(f.coeffs)}
    if isinstance(f, BoundaryGrid):
        return {"type": "grid", "samples": encode_vector(f.samples)}
    raise TypeError(f"cannot serialize {type(f).__name__}")


def pair_from_dict(spec):
    if spec.get("type") != "pair":
        raise ValueError(f"expected a pair spec, got type {spec.get('type')!r}")
    phi1 = function_from_dict(spec["phi1"])
    phi2 = function_from_dict(spec["phi2"])
    if not (isinstance(phi1, RationalFunction) and isinstance(phi2, RationalFunction)):
        raise ValueError("pair entries must be rational functions")
    return phi1, phi2


def pair_to_dict(phi1, phi2):
    return {"type": "pair", "phi1": function_to_dict(phi1), "phi2": function_to_dict(phi2)}


OPERATOR_KEYS = ("dim_in", "dim_out", "entries")


def is_operator_spec(spec):
    return spec.get("type") == "operator" or all(key in spec for key in OPERATOR_KEYS)


def decode_row_major(spec):
    """dim_out x dim_in matrix from a flat row-major list of complex entries."""
    try:
        dim_in, dim_out = int(spec["dim_in"]), int(spec["dim_out"])
        values = decode_vector(spec["entries"])
    except KeyError as e:
        raise ValueError(f"operator spec is missing {e}")
    if dim_in < 1 or dim_out < 1 or values.size != dim_in * dim_out:
        raise ValueError(
            f"operator spec has {values.size} entries, expected {dim_out} x {dim_in}"
        )
    return values.reshape(dim_out, dim_in)


def encode_row_major(matrix):
    matrix = np.atleast_2d(matrix)
    return {
        "dim_in": int(matrix.shape[1]),
        "dim_out": int(matrix.shape[0]),
        "entries": encode_vector(matrix.reshape(-1)),
    }


def operator_from_dict(spec):
    """
    Build an OperatorMatrix from its JSON spec.

    ``labels`` may name the domain and codomain and carry the interior basis
    (columns spanning the part of the domain away from the truncation edge).

    Raises:
        ValueError: for malformed entries or labels
    """
    if not is_operator_spec(spec):
        raise ValueError(f"expected an operator spec, got type {spec.get('type')!r}")
    labels = spec.get("labels") or {}
    if not isinstance(labels, dict):
        raise ValueError(f"operator labels must be an object, got {type(labels).__name__}")

    if "dim_in" in spec or "dim_out" in spec:
        entries = decode_row_major(spec)
    else:
        entries = decode_matrix(spec["entries"])

    interior = labels.get("interior", spec.get("interior"))
    if isinstance(interior, dict):
        interior = decode_row_major(interior)
    elif interior is not None:
        interior = decode_matrix(interior)

    return OperatorMatrix(
        entries,
        labels.get("domain", spec.get("domain", "H")),
        labels.get("codomain", spec.get("codomain", "H")),
        contraction=bool(spec.get("contraction", False)),
        interior=interior,
    )


def operator_to_dict(T):
    spec = encode_row_major(T.entries)
    labels = {"domain": T.domain_label, "codomain": T.codomain_label}
    if T.interior is not None:
        labels["interior"] = encode_row_major(T.interior)
    spec["labels"] = labels
    if T.contraction:
        spec["contraction"] = True
    return spec


def spec_from_dict(spec):
    """Decode any supported spec (function, pair or operator)."""
    if not isinstance(spec, dict):
        raise ValueError(f"a spec must be a JSON object, got {type(spec).__name__}")
    if spec.get("type") == "pair":
        return pair_from_dict(spec)
    if is_operator_spec(spec):
        return operator_from_dict(spec)
    return function_from_dict(spec)


def load_spec(path):
    """
    Load a JSON spec from a file.

    Raises:
        ValueError: when the file is not valid JSON or the spec is malformed
    """
    try:
        with open(path, 'r') as f:
            spec = json.load(f)
    except json.JSONDecodeError as e:
        logger.error(f"Invalid JSON in {path}: {e}")
        raise ValueError(f"invalid JSON in {path}: {e}")
    decoded = spec_from_dict(spec)
    logger.debug(f"Loaded {type(decoded).__name__} spec from {path}")
    return decoded


def dump_report(report):
    """Deterministic JSON text (sorted keys)."""
    return json.dumps(report, indent=2, sort_keys=True, default=_json_default)


def _json_default(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (complex, np.complexfloating)):
        return encode_complex(value)
    if isinstance(value, np.ndarray):
        return value.tolist() if not np.iscomplexobj(value) else encode_vector(value)
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def save_report(report, path):
    """Write a JSON report; the directory is created when missing."""
    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'w') as f:
            f.write(dump_report(report))
            f.write("\n")
        logger.debug(f"Report saved to {path}")
    except OSError as e:
        logger.error(f"Error saving report to {path}: {e}")
        raise


def write_csv_table(header, rows, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])


def _csv_cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def save_csv_table(header, rows, path):
    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'w', newline='') as f:
            write_csv_table(header, rows, f)
        logger.debug(f"CSV table saved to {path}")
    except OSError as e:
        logger.error(f"Error saving CSV table to {path}: {e}")
        raise


def samples_table(samples):
    """CSV rows for char-fn samples: the point, then re and im of every matrix entry."""
    rows_out, cols = samples.shape
    header = ["point_re", "point_im"]
    for i in range(rows_out):
        for j in range(cols):
            header += [f"theta_{i}{j}_re", f"theta_{i}{j}_im"]
    rows = []
    for lam, value in zip(samples.points, samples.values):
        row = [lam.real, lam.imag]
        for z in value.reshape(-1):
            row += [complex(z).real, complex(z).imag]
        rows.append(row)
    return header, rows


def grid_table(values, size=None):
    """CSV rows (t, re, im, abs) for a function sampled on the circle."""
    values = np.asarray(values, dtype=complex).reshape(-1)
    n = values.size if size is None else size
    header = ["t", "re", "im", "abs"]
    rows = [[2 * np.pi * k / n, z.real, z.imag, abs(z)] for k, z in enumerate(values)]
    return header, rows
