"""Alternating sparse coding / projected gradient graph learning.

The objective is ``||Y - D(W) X||_F^2 + beta_w * sum_ij |W_ij|`` where
``D(W)`` is the polynomial dictionary of the normalized Laplacian of ``W``.
Codes are found with OMP on the unit-norm dictionary and mapped back to the
raw atoms, after which ``W`` takes projected (sub)gradient steps.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .dictionary import normalize_atoms, polynomial_blocks, renormalize_codes, Dictionary
from .exceptions import DimensionMismatch, DivergenceDetected, EmptySignalSet
from .graph import Graph, matrix_powers, normalized_laplacian, validate_graph
from .kernels import KernelSpec
from .omp import SparseCodeMatrix, omp_encode_all

logger = logging.getLogger(__name__)

DEGREE_FLOOR = 1e-8
DIVERGENCE_LIMIT = 1e12
MAX_HALVINGS = 20


@dataclass(frozen=True)
class ThresholdPolicy:
    """Either keep the ``arg`` strongest edges (``mode="count"``) or drop
    weights below ``arg`` (``mode="value"``)."""

    mode: str = "value"
    arg: float = 1e-4

    def __post_init__(self):
        if self.mode == "count":
            if self.arg < 0 or int(self.arg) != self.arg:
                raise ValueError(f"edge count must be a nonnegative integer, got {self.arg!r}")
            object.__setattr__(self, "arg", int(self.arg))
        elif self.mode == "value":
            if not self.arg > 0:
                raise ValueError(f"threshold value must be positive, got {self.arg!r}")
        else:
            raise ValueError(f"unknown threshold mode {self.mode!r}")

    @classmethod
    def target_edge_count(cls, count):
        return cls("count", count)

    @classmethod
    def absolute_value(cls, cut=1e-4):
        return cls("value", cut)


@dataclass(frozen=True)
class LearnConfig:
    beta_w: float = 1e-3
    step_size: float = 0.5
    n_outer: int = 50
    n_inner: int = 20
    t0: int = 4
    seed: int = 0
    threshold: ThresholdPolicy = field(default_factory=ThresholdPolicy)
    backtracking: bool = False

    def __post_init__(self):
        if self.beta_w < 0:
            raise ValueError("beta_w must be nonnegative")
        if not self.step_size > 0:
            raise ValueError("step_size must be positive")
        if self.n_outer < 1 or self.n_inner < 1:
            raise ValueError("n_outer and n_inner must be >= 1")
        if self.t0 < 1:
            raise ValueError("t0 must be >= 1")


@dataclass(frozen=True, eq=False)
class LearnResult:
    learned_graph: Graph
    raw_weights: np.ndarray
    codes: SparseCodeMatrix
    objective_trace: np.ndarray
    fidelity_trace: np.ndarray


def _weights(w) -> np.ndarray:
    return w.weights if isinstance(w, Graph) else np.asarray(w, dtype=float)


def _codes(x) -> np.ndarray:
    return np.asarray(getattr(x, "codes", x), dtype=float)


class _Operator:
    """Laplacian, its powers and the raw dictionary of one weight iterate."""

    def __init__(self, w: np.ndarray, spec: KernelSpec):
        self.w = w
        self.deg = np.maximum(w.sum(axis=1), DEGREE_FLOOR)
        self.p = 1.0 / np.sqrt(self.deg)
        self.lap = normalized_laplacian(w, degree_floor=DEGREE_FLOOR)
        self.powers = matrix_powers(self.lap, spec.degree)
        self.blocks = polynomial_blocks(self.powers, spec)
        self.atoms = np.hstack(self.blocks)

    def residual(self, ys, x):
        return ys - self.atoms @ x


def _check_dims(w, spec, ys, x):
    n = w.shape[0]
    if ys.shape[0] != n:
        raise DimensionMismatch(f"signals have {ys.shape[0]} rows, graph has {n} vertices")
    if x.shape != (n * spec.s_count, ys.shape[1]):
        raise DimensionMismatch(
            f"codes have shape {x.shape}, expected {(n * spec.s_count, ys.shape[1])}"
        )


def objective(w, spec: KernelSpec, ys, x, beta_w: float) -> float:
    """Fidelity ``||Y - DX||_F^2`` plus ``beta_w`` times the full-matrix L1 norm."""
    w, ys, x = _weights(w), np.asarray(ys, dtype=float), _codes(x)
    _check_dims(w, spec, ys, x)
    op = _Operator(w, spec)
    return float(np.sum(op.residual(ys, x) ** 2) + beta_w * np.abs(w).sum())


def smooth_gradient(w, spec: KernelSpec, ys, x) -> np.ndarray:
    """Gradient of ``||Y - DX||_F^2`` w.r.t. every entry of ``W``.

    With ``A = D^-1/2 C D^-1/2`` where ``C`` collects the weighted sums
    ``sum_r L^(k-r-1) X_s E^T L^r`` (``E`` the residual), the result is
    ``2 A^T`` minus the row-constant matrix built from the diagonal of
    ``D^-1/2 W A D^-1/2 + A W D^-1``. Degrees are floored at 1e-8.
    """
    w, ys, x = _weights(w), np.asarray(ys, dtype=float), _codes(x)
    _check_dims(w, spec, ys, x)
    op = _Operator(w, spec)
    n = w.shape[0]
    resid_t = op.residual(ys, x).T
    c = np.zeros((n, n))
    for s, alpha in enumerate(spec.coeffs):
        z = x[s * n:(s + 1) * n] @ resid_t
        # acc_k = sum_{r<k} L^(k-1-r) Z L^r, built up as acc_{k+1} = L acc_k + Z L^k
        acc = z
        for k in range(1, spec.degree + 1):
            if alpha[k]:
                c += alpha[k] * acc
            if k < spec.degree:
                acc = op.lap @ acc + z @ op.powers[k]
    a = op.p[:, None] * c * op.p[None, :]
    b = op.p ** 2 * np.einsum("ij,ji->i", w, a) + np.einsum("ij,ji->i", a, w) / op.deg
    return 2.0 * a.T - b[:, None]


def symmetrize_zero_diag(g_raw) -> np.ndarray:
    g = np.asarray(g_raw, dtype=float)
    out = (g + g.T) / 2.0
    np.fill_diagonal(out, 0.0)
    return out


def l1_subgradient(w, beta_w: float) -> np.ndarray:
    w = _weights(w)
    out = np.where(w > 0, float(beta_w), 0.0)
    np.fill_diagonal(out, 0.0)
    return out


def project_nonnegative(w_candidate) -> np.ndarray:
    out = np.maximum(np.asarray(w_candidate, dtype=float), 0.0)
    np.fill_diagonal(out, 0.0)
    return out


def _full_objective(w, spec, ys, x, beta_w):
    op = _Operator(w, spec)
    return float(np.sum(op.residual(ys, x) ** 2) + beta_w * w.sum())


def graph_update_step(w, spec: KernelSpec, ys, x, cfg: LearnConfig) -> Graph:
    """``cfg.n_inner`` projected subgradient steps on ``W`` with codes fixed.

    With ``cfg.backtracking`` a step that does not decrease the objective is
    retried with the step size halved, up to 20 times, and skipped if none
    of the trials helps.
    """
    w = _weights(w).copy()
    ys, x = np.asarray(ys, dtype=float), _codes(x)
    _check_dims(w, spec, ys, x)
    current = _full_objective(w, spec, ys, x, cfg.beta_w) if cfg.backtracking else None
    for it in range(cfg.n_inner):
        direction = symmetrize_zero_diag(smooth_gradient(w, spec, ys, x)) + l1_subgradient(w, cfg.beta_w)
        eta = cfg.step_size
        if not cfg.backtracking:
            w = project_nonnegative(w - eta * direction)
            continue
        for _ in range(MAX_HALVINGS + 1):
            cand = project_nonnegative(w - eta * direction)
            value = _full_objective(cand, spec, ys, x, cfg.beta_w)
            if value <= current:
                w, current = cand, value
                break
            eta /= 2.0
        else:
            logger.debug("inner step %d: no decrease after %d halvings", it, MAX_HALVINGS)
    w = (w + w.T) / 2.0
    value = _full_objective(w, spec, ys, x, cfg.beta_w)
    if not np.isfinite(value) or value > DIVERGENCE_LIMIT:
        raise DivergenceDetected(
            f"objective reached {value:.3e} with step size {cfg.step_size:g}; reduce the step size"
        )
    return validate_graph(w)


def init_weights(n: int, seed) -> Graph:
    """Symmetric ``Uniform[0, 1)`` weights with a zero diagonal (PCG64 stream)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)), 1)
    return validate_graph(upper + upper.T)


def threshold_weights(w_raw, policy: ThresholdPolicy) -> Graph:
    """Sparsify a learned weight matrix.

    In count mode the ``policy.arg`` largest upper-triangle entries survive;
    entries tied with the smallest survivor are kept too, so the result can
    exceed the count only on exact ties.
    """
    w = _weights(w_raw)
    n = w.shape[0]
    iu, ju = np.triu_indices(n, 1)
    vals = w[iu, ju]
    keep = np.zeros_like(vals, dtype=bool)
    if policy.mode == "value":
        keep = vals >= policy.arg
    elif policy.arg > 0:
        # stable sort on -value keeps lexicographic (i, j) order among ties
        order = np.argsort(-vals, kind="stable")
        count = min(policy.arg, vals.size)
        cut = vals[order[count - 1]]
        keep[order[:count]] = True
        keep |= vals == cut
    keep &= vals > 0
    out = np.zeros_like(w)
    out[iu[keep], ju[keep]] = vals[keep]
    return validate_graph(out + out.T)


def sparse_code(w, spec: KernelSpec, ys, t0: int) -> SparseCodeMatrix:
    """OMP on the unit-norm dictionary of ``w``, returned as raw-atom codes."""
    op = _Operator(_weights(w), spec)
    normed = normalize_atoms(Dictionary(op.atoms, spec.s_count))
    codes = omp_encode_all(normed, ys, t0)
    return renormalize_codes(codes, normed.atom_norms)


def learn_graph(ys, spec: KernelSpec, cfg: LearnConfig, *, init=None, callback=None) -> LearnResult:
    """Alternate OMP coding and graph updates ``cfg.n_outer`` times.

    ``callback(iteration, graph, codes)`` is invoked after every graph
    update, if given.
    """
    ys = np.asarray(ys, dtype=float)
    if ys.ndim != 2 or ys.shape[1] == 0:
        raise EmptySignalSet("need at least one signal (a nonempty N x M matrix)")
    if not np.all(np.isfinite(ys)):
        raise ValueError("signals contain non-finite entries")
    n = ys.shape[0]
    g = init_weights(n, cfg.seed) if init is None else validate_graph(_weights(init))
    if g.n != n:
        raise DimensionMismatch(f"initial graph has {g.n} vertices, signals have {n} rows")

    obj_trace, fid_trace = [], []
    codes = None
    for it in range(cfg.n_outer):
        try:
            codes = sparse_code(g, spec, ys, cfg.t0)
            g = graph_update_step(g, spec, ys, codes, cfg)
        except Exception as exc:
            if exc.args and isinstance(exc.args[0], str):
                exc.args = (f"outer iteration {it}: {exc.args[0]}",) + exc.args[1:]
            raise
        op = _Operator(g.weights, spec)
        fid = float(np.sum(op.residual(ys, codes.codes) ** 2))
        fid_trace.append(fid)
        obj_trace.append(fid + cfg.beta_w * g.weights.sum())
        logger.debug("outer %d: objective %.6g", it, obj_trace[-1])
        if callback is not None:
            callback(it, g, codes)

    raw = np.array(g.weights)
    return LearnResult(
        learned_graph=threshold_weights(raw, cfg.threshold),
        raw_weights=raw,
        codes=codes,
        objective_trace=np.array(obj_trace),
        fidelity_trace=np.array(fid_trace),
    )
