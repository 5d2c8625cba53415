"""Structured dictionary ``[g_1(L), ..., g_S(L)]`` and atom normalization.

Atom ``a = s * N + v`` is column ``v`` of subdictionary ``s``, i.e. the
pattern of kernel ``s`` centred at vertex ``v``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatch, ZeroAtom
from .graph import Graph, matrix_powers, normalized_laplacian
from .kernels import KernelSpec

ZERO_ATOM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Dictionary:
    atoms: np.ndarray
    s_count: int
    atom_norms: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.atoms.shape[0]

    def block(self, s: int) -> np.ndarray:
        n = self.n
        return self.atoms[:, s * n:(s + 1) * n]


def polynomial_blocks(powers, spec: KernelSpec) -> list[np.ndarray]:
    """Each ``sum_k a_sk L^k`` from a cached list of Laplacian powers."""
    if len(powers) < spec.degree + 1:
        raise DimensionMismatch(
            f"need {spec.degree + 1} Laplacian powers, got {len(powers)}"
        )
    stack = np.stack(powers[: spec.degree + 1])
    return [np.tensordot(row, stack, axes=1) for row in spec.coeffs]


def build_dictionary(g: Graph | np.ndarray, spec: KernelSpec, *, lap=None, powers=None) -> Dictionary:
    """Unnormalized dictionary of the graph ``g`` for the kernels ``spec``.

    ``lap`` or ``powers`` may be passed to reuse a Laplacian computed by the
    caller (e.g. with a degree floor).
    """
    if not isinstance(spec, KernelSpec):
        raise DimensionMismatch("spec must be a KernelSpec")
    if powers is None:
        if lap is None:
            lap = normalized_laplacian(g)
        powers = matrix_powers(lap, spec.degree)
    blocks = polynomial_blocks(powers, spec)
    return Dictionary(np.hstack(blocks), spec.s_count)


def normalize_atoms(d: Dictionary) -> Dictionary:
    norms = np.linalg.norm(d.atoms, axis=0)
    bad = np.flatnonzero(norms <= ZERO_ATOM_TOL)
    if bad.size:
        raise ZeroAtom(int(bad[0]))
    return Dictionary(d.atoms / norms, d.s_count, norms)


def renormalize_codes(x, atom_norms):
    """Rescale codes computed on normalized atoms back to the raw atoms.

    Accepts a bare array or a :class:`~sparsegl.omp.SparseCodeMatrix` and
    returns the same kind.
    """
    codes = getattr(x, "codes", x)
    out = np.asarray(codes, dtype=float) / np.asarray(atom_norms, dtype=float)[:, None]
    if hasattr(x, "codes"):
        return type(x)(out, x.t0)
    return out
