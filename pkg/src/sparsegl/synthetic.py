"""Planted instances: random ground-truth graphs and sparse-coded signals.

All randomness comes from ``numpy.random.default_rng(seed)`` (PCG64), so a
given seed reproduces the same instance.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dictionary import build_dictionary
from .exceptions import CalibrationFailed, GenerationFailed
from .graph import Graph, validate_graph
from .kernels import KernelSpec
from .omp import SparseCodeMatrix

MAX_ATTEMPTS = 100
CALIBRATION_TRIALS = 20


@dataclass(frozen=True)
class SyntheticGraphConfig:
    n: int
    model: str = "er"
    p: float | None = None
    sigma: float = 0.5
    kappa: float | None = None
    target_edges: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.model not in ("er", "rbf"):
            raise ValueError(f"unknown graph model {self.model!r}")
        if self.p is not None and not 0 < self.p < 1:
            raise ValueError("edge probability p must lie in (0, 1)")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.kappa is not None and not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if self.target_edges is not None and not 0 < self.target_edges <= self.n * (self.n - 1) // 2:
            raise ValueError("target_edges must lie in [1, N(N-1)/2]")


@dataclass(frozen=True, eq=False)
class PlantedInstance:
    graph: Graph
    signals: np.ndarray
    true_codes: SparseCodeMatrix
    spec: KernelSpec


def _no_isolated(w):
    return bool(np.all(w.sum(axis=1) > 0))


def _er_weights(rng, n, p):
    upper = np.triu(rng.random((n, n)) < p, 1).astype(float)
    return upper + upper.T


def _rbf_distances(rng, n):
    xy = rng.random((n, 2))
    return np.sqrt(((xy[:, None, :] - xy[None, :, :]) ** 2).sum(axis=-1))


def _rbf_weights(dist, sigma, kappa):
    w = np.where(dist <= kappa, np.exp(-dist ** 2 / (2 * sigma ** 2)), 0.0)
    np.fill_diagonal(w, 0.0)
    return w


def _regenerate(draw, what):
    for _ in range(MAX_ATTEMPTS):
        w = draw()
        if _no_isolated(w):
            return validate_graph(w)
    raise GenerationFailed(f"{what}: every one of {MAX_ATTEMPTS} draws had an isolated vertex")


def gen_er(cfg: SyntheticGraphConfig) -> Graph:
    """Binary Erdos-Renyi graph, redrawn until no vertex is isolated."""
    if cfg.p is None:
        cfg = calibrate_density(cfg)
    rng = np.random.default_rng(cfg.seed)
    return _regenerate(lambda: _er_weights(rng, cfg.n, cfg.p), f"ER(n={cfg.n}, p={cfg.p:g})")


def gen_rbf(cfg: SyntheticGraphConfig) -> Graph:
    """Thresholded Gaussian kernel graph on uniform points in the unit square."""
    if cfg.kappa is None:
        cfg = calibrate_density(cfg)
    rng = np.random.default_rng(cfg.seed)
    return _regenerate(
        lambda: _rbf_weights(_rbf_distances(rng, cfg.n), cfg.sigma, cfg.kappa),
        f"RBF(n={cfg.n}, sigma={cfg.sigma:g}, kappa={cfg.kappa:g})",
    )


def gen_graph(cfg: SyntheticGraphConfig) -> Graph:
    return gen_er(cfg) if cfg.model == "er" else gen_rbf(cfg)


def calibrate_density(cfg: SyntheticGraphConfig, tol: float = 0.1) -> SyntheticGraphConfig:
    """Fill in ``p`` (ER) or ``kappa`` (RBF) so graphs have about ``target_edges`` edges.

    ER uses the closed form ``p = 2 E / (N (N - 1))``. RBF bisects on
    ``kappa`` over 20 fixed point sets until the mean edge count is within
    ``tol`` of the target.
    """
    if cfg.target_edges is None:
        raise ValueError("calibration needs target_edges")
    n, target = cfg.n, cfg.target_edges
    if cfg.model == "er":
        p = 2.0 * target / (n * (n - 1))
        if not 0 < p < 1:
            raise CalibrationFailed(f"target of {target} edges gives p = {p:g}")
        return replace(cfg, p=p)

    dists = [
        _rbf_distances(np.random.default_rng([cfg.seed, t]), n)[np.triu_indices(n, 1)]
        for t in range(CALIBRATION_TRIALS)
    ]

    def mean_edges(kappa):
        return float(np.mean([np.count_nonzero(d <= kappa) for d in dists]))

    lo, hi = 0.0, float(np.sqrt(2.0))
    if not mean_edges(lo) < target <= mean_edges(hi):
        raise CalibrationFailed(f"kappa in [0, sqrt(2)] does not bracket {target} edges")
    for _ in range(100):
        mid = (lo + hi) / 2
        count = mean_edges(mid)
        if abs(count - target) <= tol * target:
            return replace(cfg, kappa=mid)
        if count < target:
            lo = mid
        else:
            hi = mid
    raise CalibrationFailed(f"bisection on kappa did not reach {target} +/- {tol:.0%} edges")


def gen_signals(g: Graph, spec: KernelSpec, m: int, t0: int, seed, *, coefficients=None) -> PlantedInstance:
    """``m`` signals, each a combination of ``t0`` distinct random atoms.

    Atoms are drawn uniformly without replacement over all ``N*S`` atoms and
    weighted by standard normal coefficients; ``coefficients`` overrides the
    weights with a constant (used by tests).
    """
    n_atoms = g.n * spec.s_count
    if m < 1:
        raise ValueError("m must be >= 1")
    if not 1 <= t0 <= n_atoms:
        raise ValueError(f"t0 must lie in [1, {n_atoms}], got {t0}")
    rng = np.random.default_rng(seed)
    d = build_dictionary(g, spec)
    x = np.zeros((n_atoms, m))
    for col in range(m):
        idx = rng.choice(n_atoms, size=t0, replace=False)
        vals = rng.standard_normal(t0)
        x[idx, col] = vals if coefficients is None else coefficients
    return PlantedInstance(g, d.atoms @ x, SparseCodeMatrix(x, t0), spec)
