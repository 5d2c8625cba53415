"""scikit-learn compatible front ends.

Signals follow the scikit-learn layout: one row per signal, one column per
vertex. The functional API in :mod:`sparsegl.learner` uses the transposed
``N x M`` layout.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_signals, resolve_kernels
from .dictionary import build_dictionary, normalize_atoms, renormalize_codes
from .graph import validate_graph
from .learner import LearnConfig, ThresholdPolicy, learn_graph, objective, sparse_code
from .omp import omp_encode_all


class GraphLearner(TransformerMixin, BaseEstimator):
    """Learn a graph under which the signals are sparse in a polynomial dictionary.

    Parameters
    ----------
    kernels : {"general", "lowpass"}, KernelSpec or array of shape (S, K+1)
        Generating kernels of the subdictionaries.
    degree : int
        Polynomial degree used for the named kernel presets.
    t0 : int
        Number of atoms per signal.
    beta_w : float
        Weight of the L1 penalty on ``W``.
    step_size : float
        Gradient step on ``W``.
    n_outer, n_inner : int
        Alternation rounds, and gradient steps per round.
    threshold_mode : {"value", "count"}
        Drop learned weights below ``threshold_arg``, or keep the
        ``threshold_arg`` largest edges.
    threshold_arg : float or int
    backtracking : bool
        Halve the step whenever it would increase the objective.
    random_state : int or None
        Seed of the random initial weight matrix.

    Attributes
    ----------
    weights_ : ndarray of shape (n_features_in_, n_features_in_)
        Thresholded weight matrix.
    raw_weights_ : ndarray
        Weight matrix before thresholding.
    codes_ : ndarray of shape (n_samples, n_atoms)
        Codes of the training signals from the last alternation round.
    objective_trace_ : ndarray of shape (n_outer,)
    """

    def __init__(
        self,
        kernels="general",
        degree=15,
        t0=4,
        beta_w=1e-3,
        step_size=0.5,
        n_outer=50,
        n_inner=20,
        threshold_mode="value",
        threshold_arg=1e-4,
        backtracking=False,
        random_state=0,
    ):
        self.kernels = kernels
        self.degree = degree
        self.t0 = t0
        self.beta_w = beta_w
        self.step_size = step_size
        self.n_outer = n_outer
        self.n_inner = n_inner
        self.threshold_mode = threshold_mode
        self.threshold_arg = threshold_arg
        self.backtracking = backtracking
        self.random_state = random_state

    def _config(self):
        return LearnConfig(
            beta_w=self.beta_w,
            step_size=self.step_size,
            n_outer=self.n_outer,
            n_inner=self.n_inner,
            t0=self.t0,
            seed=self.random_state,
            threshold=ThresholdPolicy(self.threshold_mode, self.threshold_arg),
            backtracking=self.backtracking,
        )

    def fit(self, X, y=None, init_weights=None):
        X = check_signals(X)
        spec = resolve_kernels(self.kernels, self.degree)
        result = learn_graph(X.T, spec, self._config(), init=init_weights)
        self.kernel_spec_ = spec
        self.n_features_in_ = X.shape[1]
        self.graph_ = result.learned_graph
        self.weights_ = np.array(result.learned_graph.weights)
        self.raw_weights_ = result.raw_weights
        self.codes_ = result.codes.codes.T
        self.objective_trace_ = result.objective_trace
        self.fidelity_trace_ = result.fidelity_trace
        return self

    def transform(self, X):
        """OMP codes of ``X`` on the learned (thresholded) graph, raw-atom scale."""
        check_is_fitted(self, "weights_")
        X = check_signals(X, self.n_features_in_)
        return sparse_code(self.weights_, self.kernel_spec_, X.T, self.t0).codes.T

    def inverse_transform(self, codes):
        check_is_fitted(self, "weights_")
        atoms = build_dictionary(self.graph_, self.kernel_spec_).atoms
        return np.asarray(codes, dtype=float) @ atoms.T

    def score(self, X, y=None):
        """Negative objective of ``X`` coded on the learned graph."""
        check_is_fitted(self, "weights_")
        X = check_signals(X, self.n_features_in_)
        codes = sparse_code(self.weights_, self.kernel_spec_, X.T, self.t0)
        return -objective(self.weights_, self.kernel_spec_, X.T, codes, self.beta_w)


class GraphDictionaryCoder(TransformerMixin, BaseEstimator):
    """Sparse-code signals in the polynomial dictionary of a fixed graph.

    ``fit`` only validates the graph and builds the dictionary; ``transform``
    runs OMP on the unit-norm atoms and returns raw-atom coefficients.
    """

    def __init__(self, weights=None, kernels="general", degree=15, t0=4):
        self.weights = weights
        self.kernels = kernels
        self.degree = degree
        self.t0 = t0

    def fit(self, X=None, y=None):
        if self.weights is None:
            raise ValueError("GraphDictionaryCoder needs a weight matrix")
        self.graph_ = validate_graph(self.weights)
        self.kernel_spec_ = resolve_kernels(self.kernels, self.degree)
        self.dictionary_ = build_dictionary(self.graph_, self.kernel_spec_)
        self.normalized_ = normalize_atoms(self.dictionary_)
        self.n_features_in_ = self.graph_.n
        if X is not None:
            check_signals(X, self.n_features_in_)
        return self

    def transform(self, X):
        check_is_fitted(self, "normalized_")
        X = check_signals(X, self.n_features_in_)
        codes = omp_encode_all(self.normalized_, X.T, self.t0)
        return renormalize_codes(codes, self.normalized_.atom_norms).codes.T

    def inverse_transform(self, codes):
        check_is_fitted(self, "dictionary_")
        return np.asarray(codes, dtype=float) @ self.dictionary_.atoms.T
