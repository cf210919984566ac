"""File output: CSV (17 significant digits, LF), JSON and 16-bit PGM."""
import csv
import json
import math
from pathlib import Path

import numpy as np


def fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path, header, rows):
    path = Path(path)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])
    return path


def write_grid_csv(path, values):
    """A 2-d array as a headered CSV of (row, col, value) triples."""
    v = np.asarray(values)
    i, j = np.indices(v.shape)
    return write_csv(path, ["row", "col", "value"], zip(i.ravel(), j.ravel(), v.ravel()))


def read_csv(path):
    with open(path, newline="") as f:
        r = csv.reader(f)
        header = next(r)
        return header, [row for row in r]


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    return x


def write_json(path, obj):
    path = Path(path)
    with open(path, "w", newline="\n") as f:
        json.dump(_jsonable(obj), f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def write_pgm(path, values):
    """16-bit binary PGM, affinely scaled from [min, max] to [0, 65535]."""
    v = np.asarray(values, dtype=float)
    lo, hi = float(v.min()), float(v.max())
    scaled = np.zeros(v.shape) if hi == lo else (v - lo) / (hi - lo)
    img = np.rint(scaled * 65535).astype(">u2")
    path = Path(path)
    with open(path, "wb") as f:
        f.write(f"P5\n{v.shape[1]} {v.shape[0]}\n65535\n".encode("ascii"))
        f.write(img.tobytes())
    return path


def read_pgm(path):
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    w, h = map(int, parts[1].split())
    return np.frombuffer(parts[3], dtype=">u2").reshape(h, w)
