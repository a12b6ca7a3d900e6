"""Group anomaly detection with one-class support measure machines.

Groups of points are embedded as distributions in an RKHS via kernel mean
maps; a one-class large-margin program over those embeddings separates
normal groups from anomalous aggregate behavior that no per-point detector
can see.
"""

from .datagen import LabeledGroupDataset, gen_mixture_groups, gen_noisy_circle, gen_rotated_gaussians
from .density import DensityQuery, kde, smm_density, vkde_sparse
from .errors import NumericalError, SolverStalledError
from .groups import ANOMALOUS, NORMAL, EmpiricalGroup, GaussianGroup, Group, isotropic_gaussian
from .kernels import (
    GramMatrix,
    KernelConfig,
    empirical_mean_kernel,
    gaussian_mean_kernel,
    gram_matrix,
    kernel_column,
    level2_kernel,
    mean_gram,
    mean_kernel,
    median_heuristic,
    rbf,
    spherical_normalize,
)
from .metrics import ScoredLabels, auc, average_precision, roc_curve, scored_labels
from .model import ScoreReport, TrainedModel, anomaly_scores, decision_function, fit, reduce_to_means
from .qp import (
    DualProblem,
    DualSolution,
    SolverSettings,
    brute_force_solve,
    compute_rho,
    kkt_violation,
    project_to_capped_simplex,
    solve_smo,
)

__version__ = "0.1.0"

__all__ = [
    "ANOMALOUS",
    "NORMAL",
    "DensityQuery",
    "DualProblem",
    "DualSolution",
    "EmpiricalGroup",
    "GaussianGroup",
    "GramMatrix",
    "Group",
    "KernelConfig",
    "LabeledGroupDataset",
    "NumericalError",
    "ScoreReport",
    "ScoredLabels",
    "SolverSettings",
    "SolverStalledError",
    "TrainedModel",
    "anomaly_scores",
    "auc",
    "average_precision",
    "brute_force_solve",
    "compute_rho",
    "decision_function",
    "empirical_mean_kernel",
    "fit",
    "gaussian_mean_kernel",
    "gen_mixture_groups",
    "gen_noisy_circle",
    "gen_rotated_gaussians",
    "gram_matrix",
    "isotropic_gaussian",
    "kde",
    "kernel_column",
    "kkt_violation",
    "level2_kernel",
    "mean_gram",
    "mean_kernel",
    "median_heuristic",
    "project_to_capped_simplex",
    "rbf",
    "reduce_to_means",
    "roc_curve",
    "scored_labels",
    "smm_density",
    "solve_smo",
    "spherical_normalize",
]
