"""Input checks shared by the estimators and the command line."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import EmptySignalSet
from .kernels import KernelSpec, paper_kernels_general, paper_kernels_lowpass

KERNEL_PRESETS = {"general": paper_kernels_general, "lowpass": paper_kernels_lowpass}


def resolve_kernels(kernels, degree: int = 15) -> KernelSpec:
    """Turn a preset name, coefficient array or KernelSpec into a KernelSpec."""
    if isinstance(kernels, KernelSpec):
        return kernels
    if isinstance(kernels, str):
        try:
            return KERNEL_PRESETS[kernels](degree)
        except KeyError:
            raise ValueError(
                f"unknown kernel preset {kernels!r}; expected one of {sorted(KERNEL_PRESETS)}"
            ) from None
    return KernelSpec(np.asarray(kernels, dtype=float))


def check_signals(X, n_features=None) -> np.ndarray:
    """Validate a ``(n_signals, n_vertices)`` array and return it as float."""
    if hasattr(X, "shape") and len(X.shape) == 2 and X.shape[0] == 0:
        raise EmptySignalSet("need at least one signal")
    X = check_array(X, dtype=np.float64, ensure_min_samples=1, ensure_min_features=2)
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(f"X has {X.shape[1]} features, but the estimator expects {n_features}")
    return X
