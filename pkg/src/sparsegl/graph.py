"""Weighted undirected graphs, degrees and the normalized Laplacian."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import AsymmetricMatrix, DimensionMismatch, NegativeWeight, NonzeroDiagonal


@dataclass(frozen=True, eq=False)
class Graph:
    """Symmetric, nonnegative, zero-diagonal weight matrix.

    Instances are only created through :func:`validate_graph` (or trusted
    internal code) and the stored array is read-only.
    """

    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def n_edges(self) -> int:
        return int(np.count_nonzero(np.triu(self.weights, 1)))

    def edges(self) -> set[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.weights, 1))
        return set(zip(i.tolist(), j.tolist()))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self.weights, other.weights)

    __hash__ = None


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def validate_graph(weights) -> Graph:
    """Check the graph invariants and wrap ``weights`` in a :class:`Graph`.

    Symmetry, the zero diagonal and nonnegativity are checked exactly.
    The first offending entry is reported through the ``index`` attribute
    of the raised exception.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise DimensionMismatch(f"weight matrix must be square, got shape {w.shape}")
    if w.shape[0] < 2:
        raise DimensionMismatch("a graph needs at least 2 vertices")
    if not np.all(np.isfinite(w)):
        raise ValueError("weight matrix contains non-finite entries")

    diag = np.flatnonzero(np.diag(w))
    if diag.size:
        i = int(diag[0])
        raise NonzeroDiagonal(f"W[{i},{i}] = {w[i, i]!r} is not zero", index=(i, i))
    asym = np.argwhere(w != w.T)
    if asym.size:
        i, j = (int(v) for v in asym[0])
        raise AsymmetricMatrix(
            f"W[{i},{j}] = {w[i, j]!r} differs from W[{j},{i}] = {w[j, i]!r}", index=(i, j)
        )
    neg = np.argwhere(w < 0)
    if neg.size:
        i, j = (int(v) for v in neg[0])
        raise NegativeWeight(f"W[{i},{j}] = {w[i, j]!r} is negative", index=(i, j))
    return Graph(_freeze(w))


def degrees(g: Graph) -> np.ndarray:
    return g.weights.sum(axis=1)


def inv_sqrt_degrees(d: np.ndarray, floor: float | None = None) -> np.ndarray:
    """Entrywise ``d ** -0.5`` with isolated vertices mapped to 0.

    With ``floor`` given, degrees are first clipped from below instead, so
    no entry is zeroed.
    """
    d = np.asarray(d, dtype=float)
    if floor is not None:
        return 1.0 / np.sqrt(np.maximum(d, floor))
    out = np.zeros_like(d)
    pos = d > 0
    out[pos] = 1.0 / np.sqrt(d[pos])
    return out


def normalized_laplacian(g: Graph | np.ndarray, degree_floor: float | None = None) -> np.ndarray:
    """Return ``I - D^-1/2 W D^-1/2``.

    Isolated vertices get ``(D^-1/2)_ii = 0``, so their row and column of
    the scaled adjacency vanish. Their diagonal entry is zeroed as well,
    which makes the empty graph map to the zero matrix.
    """
    w = g.weights if isinstance(g, Graph) else np.asarray(g, dtype=float)
    d = w.sum(axis=1)
    p = inv_sqrt_degrees(d, degree_floor)
    lap = np.diag((d > 0).astype(float) if degree_floor is None else np.ones_like(d))
    lap = lap - p[:, None] * w * p[None, :]
    return (lap + lap.T) / 2


def matrix_powers(lap: np.ndarray, k_max: int) -> list[np.ndarray]:
    """``[L^0, L^1, ..., L^k_max]`` by repeated multiplication."""
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    lap = np.asarray(lap, dtype=float)
    powers = [np.eye(lap.shape[0])]
    for _ in range(k_max):
        powers.append(powers[-1] @ lap)
    return powers
