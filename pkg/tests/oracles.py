"""Independent reference computations used as test oracles.

None of these reuse the package's power cache, gradient recursion or
batched OMP; they go through eigendecompositions, finite differences and
exhaustive search instead.
"""

import itertools

import numpy as np


def laplacian_naive(w, floor=1e-8):
    w = np.asarray(w, dtype=float)
    d = np.maximum(w.sum(axis=1), floor)
    dm = np.diag(d ** -0.5)
    return np.eye(len(w)) - dm @ w @ dm


def dictionary_eig(w, coeffs):
    """``[g_1(L) ... g_S(L)]`` via ``U g(lambda) U^T``."""
    lam, u = np.linalg.eigh(laplacian_naive(w))
    blocks = []
    for row in np.atleast_2d(coeffs):
        g = np.polynomial.polynomial.polyval(lam, row)
        blocks.append(u @ np.diag(g) @ u.T)
    return np.hstack(blocks)


def fidelity_naive(w, coeffs, ys, x):
    return float(np.sum((ys - dictionary_eig(w, coeffs) @ x) ** 2))


def fd_gradient(w, coeffs, ys, x, h=1e-6):
    """Central differences over the ``N(N-1)/2`` symmetric variables.

    Entry ``(i, j)`` is ``[f(W + h/2 (e_ij + e_ji)) - f(W - h/2 (e_ij + e_ji))] / (2h)``,
    the rate of change when ``W_ij`` and ``W_ji`` each move by half a step.
    """
    w = np.asarray(w, dtype=float)
    n = len(w)
    out = np.zeros((n, n))
    for i, j in itertools.combinations(range(n), 2):
        e = np.zeros((n, n))
        e[i, j] = e[j, i] = h / 2
        out[i, j] = out[j, i] = (
            fidelity_naive(w + e, coeffs, ys, x) - fidelity_naive(w - e, coeffs, ys, x)
        ) / (2 * h)
    return out


def best_subset_error(atoms, y, k):
    """Smallest least-squares residual norm over all ``k``-subsets of atoms."""
    best = np.inf, None
    for idx in itertools.combinations(range(atoms.shape[1]), k):
        sub = atoms[:, idx]
        coef = np.linalg.lstsq(sub, y, rcond=None)[0]
        err = np.linalg.norm(y - sub @ coef)
        if err < best[0]:
            best = err, (idx, coef)
    return best


def omp_reference(atoms, y, t0, tol=1e-10):
    """Textbook per-signal OMP with lstsq refits."""
    x = np.zeros(atoms.shape[1])
    support, r, coef = [], y.copy(), np.zeros(0)
    for _ in range(t0):
        if np.linalg.norm(r) < tol:
            break
        c = np.abs(atoms.T @ r)
        c[support] = -1
        support.append(int(np.argmax(c)))
        coef = np.linalg.lstsq(atoms[:, support], y, rcond=None)[0]
        r = y - atoms[:, support] @ coef
    x[support] = coef
    return x


def random_weights(rng, n, density=1.0):
    w = np.triu(rng.uniform(0.1, 1.0, (n, n)) * (rng.random((n, n)) < density), 1)
    w = w + w.T
    # guarantee no isolated vertex with a ring
    for i in range(n):
        j = (i + 1) % n
        if w[i].sum() == 0 or w[j].sum() == 0:
            w[i, j] = w[j, i] = 0.5
    return w
