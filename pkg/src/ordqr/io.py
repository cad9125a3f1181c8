"""Delimited data ingestion, draw dumps, summary JSON and SVG trace plots."""

import csv
import hashlib
import json
import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .errors import (DatasetError, MissingColumnError, MissingValueError, NonNumericCellError,
                     RankDeficientError, TooFewCategoriesError)
from .model import OrdinalDataset, recode_outcomes

INTERCEPT_NAME = "intercept"


def _read_rows(path):
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"data file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise DatasetError(f"{path}: file is empty (a header row is required)")
    header = [h.strip() for h in rows[0]]
    return header, rows[1:]


def _column_index(header, name, path):
    try:
        return header.index(name)
    except ValueError:
        raise MissingColumnError(f"{path}: column {name!r} not found; header has {header}") from None


def _first_dependent_column(X, names):
    for j in range(1, X.shape[1] + 1):
        if np.linalg.matrix_rank(X[:, :j]) < j:
            return names[j - 1]
    return None


def load_dataset(path, response_col, covariate_cols=None, intercept=True, drop_missing=False):
    """Read a comma-separated file with a header row into an :class:`OrdinalDataset`.

    The response is recoded onto 1..J by its sorted distinct values. A column
    of ones named ``intercept`` is prepended when ``intercept`` is true.
    Rows with empty cells are an error unless ``drop_missing``.
    """
    header, rows = _read_rows(path)
    if covariate_cols is None:
        covariate_cols = [h for h in header if h != response_col]
    covariate_cols = list(covariate_cols)
    wanted = [response_col] + covariate_cols
    idx = [_column_index(header, c, path) for c in wanted]

    values = []
    dropped = 0
    for line_no, row in enumerate(rows, start=2):
        cells = [row[i].strip() if i < len(row) else "" for i in idx]
        empty = [wanted[j] for j, c in enumerate(cells) if c == "" or c.upper() == "NA"]
        if empty:
            if drop_missing:
                dropped += 1
                continue
            raise MissingValueError(f"{path}: row {line_no}, column {empty[0]!r} is empty "
                                    "(use --drop-missing to skip such rows)")
        parsed = []
        for j, c in enumerate(cells):
            try:
                v = float(c)
            except ValueError:
                raise NonNumericCellError(
                    f"{path}: row {line_no}, column {wanted[j]!r}: {c!r} is not numeric") from None
            if not math.isfinite(v):
                raise NonNumericCellError(f"{path}: row {line_no}, column {wanted[j]!r}: {c!r} is not finite")
            parsed.append(v)
        values.append(parsed)
    if not values:
        raise DatasetError(f"{path}: no data rows")

    data = np.array(values, dtype=float)
    codes, levels = recode_outcomes(data[:, 0])
    if levels.shape[0] < 3:
        raise TooFewCategoriesError(
            f"{path}: column {response_col!r} has {levels.shape[0]} distinct values, need at least 3")
    X = data[:, 1:]
    names = list(covariate_cols)
    if intercept:
        X = np.column_stack([np.ones(X.shape[0]), X])
        names = [INTERCEPT_NAME] + names
    if X.shape[1] == 0:
        raise DatasetError("no covariates selected and no intercept requested")
    if np.linalg.matrix_rank(X) < X.shape[1]:
        bad = _first_dependent_column(X, names)
        raise RankDeficientError(f"{path}: design matrix is rank deficient; column {bad!r} "
                                 "is a linear combination of earlier columns")
    meta = {"source": str(path), "response": response_col, "levels": levels.tolist(),
            "dropped_rows": dropped, "intercept": bool(intercept)}
    return OrdinalDataset(codes, X, names, meta)


def write_dataset(dataset, path, response_col="y", drop_intercept=True, provenance=None):
    """Write ``y`` and the covariate columns as CSV, values at full precision.

    ``provenance`` entries go first as ``# key=value`` lines, which
    :func:`load_dataset` skips.
    """
    X = dataset.X
    names = list(dataset.covariate_names)
    if drop_intercept and X.shape[1] and np.all(X[:, 0] == 1.0):
        X = X[:, 1:]
        names = names[1:]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for key in sorted(provenance or {}):
            fh.write(f"# {key}={json.dumps(provenance[key], default=_jsonable)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([response_col] + names)
        for yi, row in zip(dataset.y, X):
            w.writerow([int(yi)] + [repr(float(v)) for v in row])


def config_hash(config):
    """Short SHA-256 of the canonical JSON form of ``config``."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=_jsonable)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def file_digest(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_draws(path, names, draws, provenance):
    """One row per sweep (row 1 = first burn-in sweep), ``%.17g`` values.

    ``provenance`` entries are written first as ``# key=value`` lines.
    """
    draws = np.atleast_2d(np.asarray(draws, dtype=float))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key in sorted(provenance):
            fh.write(f"# {key}={json.dumps(provenance[key], default=_jsonable)}\n")
        fh.write(",".join(names) + "\n")
        for t in range(draws.shape[1]):
            fh.write(",".join(format(v, ".17g") for v in draws[:, t]) + "\n")


def read_draws(path):
    """Inverse of :func:`write_draws`: (names, parameters x iterations matrix, provenance)."""
    provenance = {}
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    body = []
    for line in lines:
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            provenance[key] = json.loads(value)
        elif line:
            body.append(line)
    if not body:
        raise DatasetError(f"{path}: no header row")
    names = body[0].split(",")
    data = np.array([[float(v) for v in row.split(",")] for row in body[1:]], dtype=float)
    return names, data.reshape(-1, len(names)).T, provenance


def write_json(path, document):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(document, fh, indent=2, sort_keys=False, default=_jsonable)
        fh.write("\n")


def emit_trace_svg(series, label, path, width=640, height=240, provenance=None):
    """Standalone SVG line plot of one parameter's draws."""
    y = np.asarray(series, dtype=float).ravel()
    if y.size == 0:
        raise ValueError("cannot plot an empty series")
    left, right, top, bottom = 60, 10, 20, 35
    pw, ph = width - left - right, height - top - bottom
    lo, hi = float(y.min()), float(y.max())
    span = hi - lo if hi > lo else 1.0
    xs = left + pw * (np.arange(y.size) / max(y.size - 1, 1))
    ys = top + ph * (1.0 - (y - lo) / span)
    points = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(xs, ys))
    label = escape(str(label))
    note = ""
    if provenance:
        note = "<!-- " + escape(json.dumps(provenance, sort_keys=True, default=_jsonable)).replace("--", "- -") + " -->\n"
    svg = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        f"{note}"
        f"<title>Trace of {label}</title>\n"
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#888"/>\n'
        f'<polyline fill="none" stroke="#1f4e9c" stroke-width="0.6" points="{points}"/>\n'
        f'<text x="{left + pw / 2:.1f}" y="{height - 8}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">iteration</text>\n'
        f'<text x="14" y="{top + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="12" transform="rotate(-90 14 {top + ph / 2:.1f})">{label}</text>\n'
        f'<text x="{left - 4}" y="{top + 4}" text-anchor="end" font-family="sans-serif" '
        f'font-size="10">{hi:.4g}</text>\n'
        f'<text x="{left - 4}" y="{top + ph}" text-anchor="end" font-family="sans-serif" '
        f'font-size="10">{lo:.4g}</text>\n'
        "</svg>\n"
    )
    Path(path).write_text(svg, encoding="utf-8")
    return Path(path)
