"""Kernel SVM with the exact 0/1 soft-margin loss.

Training minimizes 0.5 alpha' K~ alpha + C |u_+|_0 subject to
u - K~ alpha = e by a working-set proximal ADMM; every returned model
carries a certificate of the stopping residuals, and support vectors are
read off the hard-thresholding interval of the proximal operator.
"""

__version__ = "0.1.0"

from .benchmarks import find_dataset, monks3, xor_dataset
from .data import (Dataset, FoldPlan, NoiseSpec, ScalingMap, apply_scaling,
                   fit_scaling, flip_labels, load_csv, load_features_csv,
                   load_libsvm, stratified_kfold, validate)
from .errors import (IndefiniteOperatorError, ParseError, SolverError,
                     ValidationError, ZokError)
from .eval import (CvReport, GridSpec, compare_linear_nonlinear, cross_validate,
                   grid_search, noise_experiment)
from .kernel import (GramMatrix, KernelSpec, cross_gram, eval_kernel, gram_matrix,
                     gram_matrix_cached, rows_submatrix, sign_gram)
from .linalg import CgConfig, cg_solve, smallest_eigenvalue
from .model import (Metrics, TrainedModel, accuracy, decision_value,
                    decision_values, extract_svs, load_model, predict, save_model)
from .prox import ProxParams, prox_l01_scalar, prox_l01_vector, zero_set
from .solver import (Certificate, SolverConfig, SolverState, check_pstationary,
                     residuals, solve, train, update_alpha, update_lambda,
                     update_u, working_set)

__all__ = [
    "find_dataset", "monks3", "xor_dataset",
    "Dataset", "FoldPlan", "NoiseSpec", "ScalingMap", "apply_scaling",
    "fit_scaling", "flip_labels", "load_csv", "load_features_csv",
    "load_libsvm", "stratified_kfold", "validate", "IndefiniteOperatorError", "ParseError", "SolverError",
    "ValidationError", "ZokError", "CvReport", "GridSpec",
    "compare_linear_nonlinear", "cross_validate", "grid_search",
    "noise_experiment", "GramMatrix", "KernelSpec", "cross_gram", "eval_kernel",
    "gram_matrix", "gram_matrix_cached", "rows_submatrix", "sign_gram",
    "CgConfig", "cg_solve", "smallest_eigenvalue", "Metrics", "TrainedModel",
    "accuracy", "decision_value", "decision_values", "extract_svs", "load_model",
    "predict", "save_model", "ProxParams", "prox_l01_scalar", "prox_l01_vector",
    "zero_set", "Certificate", "SolverConfig", "SolverState",
    "check_pstationary", "residuals", "solve", "train", "update_alpha",
    "update_lambda", "update_u", "working_set", "__version__",
]
