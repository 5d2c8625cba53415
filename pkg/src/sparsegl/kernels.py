"""Polynomial generating kernels for the graph dictionary.

A kernel is stored as its coefficient vector ``[a_0, ..., a_K]`` in powers
of the Laplacian eigenvalue, so externally computed coefficients (Chebyshev
fits, learned kernels) plug in the same way as the Taylor ones built here.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .exceptions import DimensionMismatch, InvalidTau


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """``S x (K+1)`` coefficient matrix, one row per subdictionary."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float, ndmin=2, copy=True)
        if c.ndim != 2 or c.shape[1] < 2:
            raise DimensionMismatch(
                f"kernel coefficients must be S x (K+1) with K >= 1, got shape {c.shape}"
            )
        if not np.all(np.isfinite(c)):
            raise ValueError("kernel coefficients must be finite")
        null = np.flatnonzero(~np.any(c != 0, axis=1))
        if null.size:
            raise ValueError(f"kernel row {int(null[0])} is identically zero")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def s_count(self) -> int:
        return self.coeffs.shape[0]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    def __eq__(self, other):
        if not isinstance(other, KernelSpec):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None


def _check(tau, degree):
    if not tau > 0:
        raise InvalidTau(f"tau must be positive, got {tau!r}")
    if degree < 1:
        raise ValueError(f"degree must be >= 1, got {degree!r}")


def taylor_heat(tau: float, degree: int) -> np.ndarray:
    """Maclaurin coefficients of ``exp(-tau * lam)`` up to ``lam**degree``."""
    _check(tau, degree)
    return np.array([(-tau) ** k / factorial(k) for k in range(degree + 1)])


def taylor_one_minus_heat(tau: float, degree: int) -> np.ndarray:
    """Maclaurin coefficients of ``1 - exp(-tau * lam)``."""
    c = -taylor_heat(tau, degree)
    c[0] = 0.0
    return c


def paper_kernels_general(degree: int = 15) -> KernelSpec:
    """Low-pass ``exp(-2 lam)`` plus high-pass ``1 - exp(-lam)``."""
    return KernelSpec(np.vstack([taylor_heat(2.0, degree), taylor_one_minus_heat(1.0, degree)]))


def paper_kernels_lowpass(degree: int = 15) -> KernelSpec:
    """Two low-pass heat kernels, ``exp(-2 lam)`` and ``exp(-lam)``."""
    return KernelSpec(np.vstack([taylor_heat(2.0, degree), taylor_heat(1.0, degree)]))


def eval_kernel(coeffs, lam):
    """Evaluate the polynomial with Horner's rule; ``lam`` may be an array."""
    result = np.zeros_like(np.asarray(lam, dtype=float))
    for a in np.asarray(coeffs, dtype=float)[::-1]:
        result = result * lam + a
    return result if np.ndim(result) else float(result)
