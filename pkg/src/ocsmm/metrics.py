"""Ranking metrics over anomaly scores: ROC curve, AUC, average precision."""

from __future__ import annotations

import math

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .groups import ANOMALOUS, NORMAL


@dataclass(frozen=True)
class ScoredLabels:
    """Anomaly scores (higher = more anomalous) paired with true labels."""

    scores: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=float).copy()
        labels = tuple(self.labels)
        if scores.ndim != 1 or scores.shape[0] != len(labels):
            raise ValueError("scores and labels must be 1-d and equally long")
        if not np.all(np.isfinite(scores)):
            raise ValueError("scores must be finite")
        for lab in labels:
            if lab not in (NORMAL, ANOMALOUS):
                raise ValueError(f"unknown label {lab!r}")
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "labels", labels)

    @property
    def anomalous(self) -> np.ndarray:
        return np.array([lab == ANOMALOUS for lab in self.labels])

    def __len__(self) -> int:
        return len(self.labels)


def _require_both_classes(data: ScoredLabels):
    mask = data.anomalous
    if not mask.any() or mask.all():
        raise ValueError("need at least one anomalous and one normal item")


def _grouped_counts(data: ScoredLabels) -> tuple[np.ndarray, np.ndarray, int, int]:
    """Cumulative true/false positive counts at each distinct score level."""
    anom = data.anomalous
    n_pos = int(anom.sum())
    n_neg = len(data) - n_pos
    order = np.argsort(-data.scores, kind="stable")
    sorted_scores = data.scores[order]
    sorted_anom = anom[order]
    # indices where a run of equal scores ends
    boundaries = np.flatnonzero(np.diff(sorted_scores) != 0.0)
    ends = np.concatenate([boundaries, [len(data) - 1]])
    tp = np.concatenate([[0], np.cumsum(sorted_anom)[ends]])
    fp = np.concatenate([[0], np.cumsum(~sorted_anom)[ends]])
    return tp.astype(np.int64), fp.astype(np.int64), n_pos, n_neg


def roc_curve(data: ScoredLabels) -> np.ndarray:
    """ROC points from (0, 0) to (1, 1), sweeping thresholds over the scores.

    Equal scores are grouped into a single step, so ties produce diagonal
    segments rather than an arbitrary staircase. Returns an array of
    (fpr, tpr) rows, monotone nondecreasing in both columns.
    """
    _require_both_classes(data)
    tp, fp, n_pos, n_neg = _grouped_counts(data)
    return np.column_stack([fp / n_neg, tp / n_pos])


def auc(data: ScoredLabels) -> float:
    """Trapezoidal area under the ROC curve.

    Equals the probability that a random anomalous item outscores a random
    normal one, counting ties as 1/2 (the Mann-Whitney statistic). The area
    is accumulated in integers and divided once, so the identity with
    pairwise counting is exact, not approximate.
    """
    _require_both_classes(data)
    tp, fp, n_pos, n_neg = _grouped_counts(data)
    twice_area = int(np.sum((tp[1:] + tp[:-1]) * (fp[1:] - fp[:-1])))
    return twice_area / (2 * n_pos * n_neg)


def average_precision(data: ScoredLabels) -> float:
    """Mean of precision-at-rank over the ranks of the anomalous items.

    Scores are sorted descending; ties keep the input order (stable sort),
    which makes the value deterministic but order-sensitive under ties.
    The precisions are added with exact summation, so the result does not
    depend on reduction order.
    """
    anom = data.anomalous
    if not anom.any():
        raise ValueError("need at least one anomalous item")
    order = np.argsort(-data.scores, kind="stable")
    sorted_anom = anom[order]
    ranks = np.flatnonzero(sorted_anom) + 1
    hits = np.arange(1, len(ranks) + 1)
    return math.fsum(hits / ranks) / len(ranks)


def scored_labels(scores: Sequence[float], labels: Sequence[str]) -> ScoredLabels:
    """Convenience constructor accepting any sequences."""
    return ScoredLabels(np.asarray(list(scores), dtype=float), tuple(labels))
