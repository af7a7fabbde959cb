"""CSV and JSON plumbing shared by the solver, the experiment harness and the CLI.

CSV convention: comma-separated, rows are samples, an optional single header
row is auto-detected.  JSON output serializes every float with 17 significant
digits so values round-trip exactly; nonfinite floats become the strings
"inf" / "-inf" / "nan".
"""

import json

import numpy as np

__all__ = [
    "load_matrix",
    "load_vector",
    "load_json",
    "dumps_json",
    "dump_json",
    "write_csv",
]


def _parse_csv(path):
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError(f"{path}: file is empty")
    start = 0
    first = [tok.strip() for tok in lines[0].split(",")]
    try:
        [float(tok) for tok in first]
    except ValueError:
        start = 1  # header row
        if len(lines) == 1:
            raise ValueError(f"{path}: only a header row, no data")
    width = None
    for i, ln in enumerate(lines[start:], start=start + 1):
        toks = [tok.strip() for tok in ln.split(",")]
        try:
            row = [float(tok) for tok in toks]
        except ValueError as exc:
            raise ValueError(f"{path}: line {i}: cannot parse {ln!r} as numbers") from exc
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ValueError(
                f"{path}: line {i}: expected {width} fields, found {len(row)}"
            )
        rows.append(row)
    return np.asarray(rows, dtype=float)


def load_matrix(path):
    """Read a 2-d array from a CSV file (or a JSON list of rows)."""
    if str(path).endswith(".json"):
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        arr = np.asarray(data, dtype=float)
    else:
        arr = _parse_csv(path)
    arr = np.atleast_2d(arr)
    if arr.ndim != 2:
        raise ValueError(f"{path}: expected a matrix, got shape {arr.shape}")
    return arr


def load_vector(path):
    """Read a 1-d array; accepts a single CSV column, a single row, or JSON."""
    arr = load_matrix(path)
    if 1 not in arr.shape and arr.size != max(arr.shape):
        raise ValueError(f"{path}: expected a vector, got shape {arr.shape}")
    return arr.ravel()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _emit(obj, out, indent, level):
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(pad_in + json.dumps(str(k)) + ": ")
            _emit(v, out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad_in)
            _emit(v, out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, float):
        if obj != obj:
            out.append('"nan"')
        elif obj == float("inf"):
            out.append('"inf"')
        elif obj == float("-inf"):
            out.append('"-inf"')
        else:
            out.append(format(obj, ".17g"))
    elif isinstance(obj, int):
        out.append(repr(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} to JSON")


def dumps_json(obj, indent=2):
    """JSON text with floats at 17 significant digits (round-trip exact)."""
    out = []
    _emit(_jsonable(obj), out, indent, 0)
    return "".join(out) + "\n"


def dump_json(obj, path, indent=2):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_json(obj, indent=indent))


def load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def write_csv(path, header, rows):
    """Write rows of numbers (17 significant digits) under a header line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(
                ",".join(
                    format(float(v), ".17g") if isinstance(v, float) or isinstance(v, np.floating)
                    else str(int(v))
                    for v in row
                )
                + "\n"
            )
