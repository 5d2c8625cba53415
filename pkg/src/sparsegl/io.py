"""Plain-text file formats used by the command line tools.

* dense matrices (graphs, signals, kernels, dictionaries): whitespace
  separated, one row per line, ``#`` comment lines ignored;
* sparse codes: ``atom_index signal_index value`` triplets with a
  ``# shape <rows> <cols> <t0>`` header;
* traces: ``iteration value`` pairs;
* configs/manifests: ``key = value`` lines.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .graph import Graph, validate_graph
from .kernels import KernelSpec
from .omp import SparseCodeMatrix

FLOAT_FMT = "%.17g"


def _header(comments):
    return "".join(f"# {line}\n" for line in comments or ())


def _write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # newline="\n" keeps the output byte-identical across platforms
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_matrix(path, a, comments=None):
    a = np.atleast_2d(np.asarray(a, dtype=float))
    body = "".join(" ".join(FLOAT_FMT % v for v in row) + "\n" for row in a)
    _write(path, _header(comments) + body)


def read_matrix(path) -> np.ndarray:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                rows.append([float(v) for v in line.split()])
    if not rows:
        raise ValueError(f"{path}: no matrix rows found")
    if len({len(r) for r in rows}) != 1:
        raise ValueError(f"{path}: rows have different lengths")
    return np.array(rows)


def read_graph(path) -> Graph:
    return validate_graph(read_matrix(path))


def write_graph(path, g: Graph, comments=None):
    write_matrix(path, g.weights, comments)


def read_kernels(path) -> KernelSpec:
    return KernelSpec(read_matrix(path))


def write_codes(path, x: SparseCodeMatrix, comments=None):
    codes = np.asarray(x.codes)
    lines = [f"# shape {codes.shape[0]} {codes.shape[1]} {x.t0}\n"]
    # column-major order: all atoms of signal 0, then signal 1, ...
    cols, rows = np.nonzero(codes.T)
    lines += [f"{a} {m} {FLOAT_FMT % codes[a, m]}\n" for m, a in zip(cols, rows)]
    _write(path, _header(comments) + "".join(lines))


def read_codes(path) -> SparseCodeMatrix:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    shape, t0, triplets = None, None, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "#":
                if len(parts) == 5 and parts[1] == "shape":
                    shape = (int(parts[2]), int(parts[3]))
                    t0 = int(parts[4])
                continue
            if parts[0].startswith("#"):
                continue
            triplets.append((int(parts[0]), int(parts[1]), float(parts[2])))
    if shape is None:
        raise ValueError(f"{path}: missing '# shape rows cols t0' header")
    codes = np.zeros(shape)
    for a, m, v in triplets:
        codes[a, m] = v
    return SparseCodeMatrix(codes, t0)


def write_trace(path, values, comments=None):
    body = "".join(f"{i} {FLOAT_FMT % v}\n" for i, v in enumerate(values))
    _write(path, _header(comments) + body)


def read_key_values(path) -> dict[str, str]:
    """Parse ``key = value`` lines (``#`` starts a comment)."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out
