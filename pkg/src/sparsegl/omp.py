"""Orthogonal matching pursuit against a fixed dictionary."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatch, RankDeficientSupport

EARLY_STOP_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SparseCodeMatrix:
    """``(N*S) x M`` code matrix with at most ``t0`` nonzeros per column."""

    codes: np.ndarray
    t0: int

    @property
    def shape(self):
        return self.codes.shape

    def support(self, tol: float = 1e-10) -> set[tuple[int, int]]:
        a, m = np.nonzero(np.abs(self.codes) > tol)
        return set(zip(a.tolist(), m.tolist()))

    def __eq__(self, other):
        if not isinstance(other, SparseCodeMatrix):
            return NotImplemented
        return self.t0 == other.t0 and np.array_equal(self.codes, other.codes)

    __hash__ = None


def _atoms(d):
    return np.asarray(getattr(d, "atoms", d), dtype=float)


def _check(atoms, ys, t0):
    n, n_atoms = atoms.shape
    if ys.shape[0] != n:
        raise DimensionMismatch(f"signals have length {ys.shape[0]}, dictionary has {n} rows")
    if not 1 <= t0 <= n_atoms:
        raise ValueError(f"t0 must lie in [1, {n_atoms}], got {t0}")


def _omp(atoms, ys, t0):
    """Batched OMP; column ``m`` of the result depends only on ``ys[:, m]``."""
    n_atoms, m = atoms.shape[1], ys.shape[1]
    codes = np.zeros((n_atoms, m))
    support = np.zeros((m, 0), dtype=int)
    residual = ys.copy()
    coef = np.zeros((m, 0))
    active = np.arange(m)
    for _ in range(t0):
        live = np.linalg.norm(residual[:, active], axis=0) >= EARLY_STOP_TOL
        if not live.all():
            # columns with a vanished residual keep their current code
            done = active[~live]
            for col, row in zip(done, np.flatnonzero(~live)):
                codes[support[row], col] = coef[row]
            keep = np.flatnonzero(live)
            active, support, coef = active[keep], support[keep], coef[keep]
        if active.size == 0:
            break
        corr = np.abs(atoms.T @ residual[:, active])
        corr[support.T, np.arange(active.size)[None, :]] = -1.0
        picked = np.argmax(corr, axis=0)
        support = np.hstack([support, picked[:, None]])
        sub = np.moveaxis(atoms[:, support], 1, 0)  # (batch, N, t)
        try:
            pinv = np.linalg.pinv(sub)
        except np.linalg.LinAlgError as exc:
            raise RankDeficientSupport(f"least squares failed: {exc}") from exc
        y_act = ys[:, active].T[:, :, None]
        coef = (pinv @ y_act)[:, :, 0]
        residual[:, active] = (y_act - sub @ coef[:, :, None])[:, :, 0].T
    for row, col in enumerate(active):
        codes[support[row], col] = coef[row]
    return codes


def omp_encode_one(d, y, t0: int) -> np.ndarray:
    """Greedy ``t0``-sparse code of the signal ``y``.

    Each iteration picks the unused atom with the largest absolute
    correlation with the residual (lowest index on ties) and refits all
    selected coefficients by minimum-norm least squares. Stops early once
    the residual norm drops below ``1e-10``.
    """
    atoms = _atoms(d)
    y = np.asarray(y, dtype=float).ravel()
    _check(atoms, y, t0)
    return _omp(atoms, y[:, None], t0)[:, 0]


def omp_encode_all(d, ys, t0: int) -> SparseCodeMatrix:
    """:func:`omp_encode_one` applied to every column of ``ys``.

    Columns are coded independently; the loop over signals is vectorized.
    """
    atoms = _atoms(d)
    ys = np.asarray(ys, dtype=float)
    if ys.ndim == 1:
        ys = ys[:, None]
    _check(atoms, ys, t0)
    if not np.all(np.isfinite(ys)):
        bad = int(np.flatnonzero(~np.all(np.isfinite(ys), axis=0))[0])
        raise ValueError(f"signal {bad} has non-finite entries")
    return SparseCodeMatrix(_omp(atoms, ys, t0), t0)
