"""The one-class support measure machine: fit, score, classify.

Training builds the group-kernel Gram matrix, solves the one-class dual QP
and freezes everything needed to score new groups. A group is anomalous
when its decision value f(P) - rho is negative. The classic one-class SVM
on group means is available as a reduction (:func:`reduce_to_means`).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .groups import ANOMALOUS, NORMAL, EmpiricalGroup, Group, shared_dim
from .kernels import KernelConfig, finish_gram, kernel_column, mean_gram, median_heuristic
from .qp import DualProblem, DualSolution, SolverSettings, solve_smo

log = logging.getLogger(__name__)

# outlier-fraction grid used by the benchmark experiments when no labeled
# validation data exists to pick nu
DEFAULT_NU_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))


@dataclass(frozen=True)
class TrainedModel:
    """Frozen scoring artifact: training groups, kernel config, dual solution.

    train_diag caches the raw mean-kernel self-values K(P_i, P_i) so that
    level-2 and normalization of test kernel columns reproduce the training
    pipeline exactly.
    """

    train_groups: tuple[Group, ...]
    config: KernelConfig
    nu: float
    solution: DualSolution
    train_diag: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "train_groups", tuple(self.train_groups))
        diag = np.asarray(self.train_diag, dtype=float).copy()
        diag.setflags(write=False)
        object.__setattr__(self, "train_diag", diag)
        if len(self.solution.alpha) != len(self.train_groups):
            raise ValueError("alpha length does not match the number of training groups")

    @property
    def alpha(self) -> np.ndarray:
        return self.solution.alpha

    @property
    def rho(self) -> float:
        return self.solution.rho

    @property
    def dim(self) -> int:
        return self.train_groups[0].dim

    def decision_function(self, test: Group) -> float:
        return decision_function(self, test)

    def anomaly_scores(self, tests: Sequence[Group]) -> list["ScoreReport"]:
        return anomaly_scores(self, tests)


@dataclass(frozen=True)
class ScoreReport:
    """Score of one test group: decision = f - rho, score = rho - f."""

    index: int
    decision: float
    score: float
    label: str

    def __post_init__(self):
        if self.label not in (NORMAL, ANOMALOUS):
            raise ValueError(f"unknown label {self.label!r}")


def fit(groups: Sequence[Group], config: KernelConfig = KernelConfig(),
        nu: float = 0.5, settings: SolverSettings = SolverSettings()) -> TrainedModel:
    """Train on a list of groups.

    If config.sigma_sq is unset, the median heuristic over the empirical
    groups supplies it (and is logged). The Gram matrix runs through the
    configured kernel pipeline; the dual QP is solved at the given nu.
    """
    groups = tuple(groups)
    shared_dim(groups)
    if config.sigma_sq is None:
        empirical = [g for g in groups if isinstance(g, EmpiricalGroup)]
        if not empirical:
            raise ValueError("sigma_sq is unset and no empirical groups are available "
                             "for the median heuristic")
        sigma_sq = median_heuristic(empirical)
        log.info("sigma_sq unset; median heuristic gives %r", sigma_sq)
        config = replace(config, sigma_sq=sigma_sq)
    raw = mean_gram(groups, config)
    train_diag = np.diag(raw).copy()
    gram = finish_gram(raw, config)
    solution = solve_smo(DualProblem(gram, nu), settings)
    return TrainedModel(
        train_groups=groups,
        config=config,
        nu=nu,
        solution=solution,
        train_diag=train_diag,
    )


def decision_function(model: TrainedModel, test: Group) -> float:
    """f(P_t) - rho under the training kernel pipeline; negative = anomalous."""
    if test.dim != model.dim:
        raise ValueError(f"dimension mismatch: test {test.dim}, model {model.dim}")
    col = kernel_column(model.train_groups, test, model.config, model.train_diag)
    return float(model.alpha @ col - model.rho)


def anomaly_scores(model: TrainedModel, tests: Sequence[Group]) -> list[ScoreReport]:
    """Score test groups and sort by descending anomaly score (stable ties)."""
    tests = list(tests)
    if not tests:
        raise ValueError("no test groups")
    reports = []
    for i, t in enumerate(tests):
        decision = decision_function(model, t)
        reports.append(ScoreReport(
            index=i,
            decision=decision,
            score=-decision,
            label=ANOMALOUS if decision < 0 else NORMAL,
        ))
    reports.sort(key=lambda r: r.score, reverse=True)
    return reports


def reduce_to_means(groups: Sequence[Group]) -> list[EmpiricalGroup]:
    """Collapse each group to its single mean point.

    Feeding the result to :func:`fit` yields the one-class SVM baseline that
    sees only group locations, not their shapes.
    """
    if len(groups) == 0:
        raise ValueError("no groups")
    out = []
    for g in groups:
        mean = g.mean() if isinstance(g, EmpiricalGroup) else g.mean
        out.append(EmpiricalGroup(np.asarray(mean)[None, :]))
    return out
