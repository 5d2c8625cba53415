"""Edge and sparse-code support recovery scores."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

import numpy as np

from .exceptions import DimensionMismatch, EmptyList
from .graph import Graph

CODE_TOL = 1e-10


@dataclass(frozen=True)
class SupportMetrics:
    precision: float
    recall: float
    f_measure: float
    tp: int
    fp: int
    fn: int

    @classmethod
    def from_sets(cls, predicted: set, truth: set):
        tp = len(predicted & truth)
        fp = len(predicted) - tp
        fn = len(truth) - tp
        # empty predictions score 0 precision so F stays defined
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        return cls(precision, recall, f, tp, fp, fn)

    def as_dict(self):
        return asdict(self)


class EdgeMetrics(SupportMetrics):
    pass


class CodeMetrics(SupportMetrics):
    pass


def edge_metrics(learned: Graph, truth: Graph) -> EdgeMetrics:
    """Precision/recall over undirected edges ``i < j`` with nonzero weight."""
    if learned.n != truth.n:
        raise DimensionMismatch(f"learned graph has {learned.n} vertices, truth has {truth.n}")
    return EdgeMetrics.from_sets(learned.edges(), truth.edges())


def code_metrics(learned, truth, tol: float = CODE_TOL) -> CodeMetrics:
    """Precision/recall over ``(atom, signal)`` pairs with ``|value| > tol``."""
    a = np.asarray(getattr(learned, "codes", learned))
    b = np.asarray(getattr(truth, "codes", truth))
    if a.shape != b.shape:
        raise DimensionMismatch(f"code matrices have shapes {a.shape} and {b.shape}")

    def support(x):
        r, c = np.nonzero(np.abs(x) > tol)
        return set(zip(r.tolist(), c.tolist()))

    return CodeMetrics.from_sets(support(a), support(b))


@dataclass(frozen=True)
class Aggregate:
    count: int
    mean: dict
    std: dict


def aggregate(metrics) -> Aggregate:
    """Field-wise mean and sample standard deviation (0 for one item)."""
    metrics = list(metrics)
    if not metrics:
        raise EmptyList("cannot aggregate an empty list of metrics")
    rows = [m.as_dict() if hasattr(m, "as_dict") else dict(m) for m in metrics]
    names = list(rows[0])
    table = np.array([[float(r[k]) for k in names] for r in rows])
    std = table.std(axis=0, ddof=1) if len(rows) > 1 else np.zeros(len(names))
    return Aggregate(
        len(rows),
        dict(zip(names, table.mean(axis=0).tolist())),
        dict(zip(names, std.tolist())),
    )


def format_table(rows: dict[str, Aggregate | SupportMetrics], title: str = "") -> str:
    """Aligned text table: one line per metric, one column per entry of ``rows``."""
    cols = list(rows)
    names = [f.name for f in fields(SupportMetrics)]
    body = []
    for name in names:
        cells = []
        for c in cols:
            item = rows[c]
            if isinstance(item, Aggregate):
                cells.append(f"{item.mean[name]:.4f} +- {item.std[name]:.4f}")
            else:
                value = getattr(item, name)
                cells.append(f"{value:.4f}" if isinstance(value, float) else str(value))
        body.append((name, cells))
    width = max(len(x) for x in cols + [cell for _, cells in body for cell in cells])
    lines = [title] if title else []
    lines.append(f"{'metric':<12}" + "".join(f"{c:>{width + 2}}" for c in cols))
    for name, cells in body:
        lines.append(f"{name:<12}" + "".join(f"{cell:>{width + 2}}" for cell in cells))
    return "\n".join(lines) + "\n"
