"""Graph learning under a sparse polynomial-dictionary signal model."""

from .dictionary import Dictionary, build_dictionary, normalize_atoms, renormalize_codes
from .estimator import GraphDictionaryCoder, GraphLearner
from .graph import Graph, degrees, matrix_powers, normalized_laplacian, validate_graph
from .kernels import (
    KernelSpec,
    eval_kernel,
    paper_kernels_general,
    paper_kernels_lowpass,
    taylor_heat,
    taylor_one_minus_heat,
)
from .learner import LearnConfig, LearnResult, ThresholdPolicy, learn_graph
from .metrics import CodeMetrics, EdgeMetrics, aggregate, code_metrics, edge_metrics, format_table
from .omp import SparseCodeMatrix, omp_encode_all, omp_encode_one
from .synthetic import (
    PlantedInstance,
    SyntheticGraphConfig,
    calibrate_density,
    gen_er,
    gen_graph,
    gen_rbf,
    gen_signals,
)

__version__ = "0.1.0"
