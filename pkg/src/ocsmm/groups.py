"""Group representations: empirical sample sets and Gaussian summaries.

A "group" is a bag of observations treated as a single unit for anomaly
detection. It can be represented either by the raw sample points
(:class:`EmpiricalGroup`) or by the parameters of a Gaussian
(:class:`GaussianGroup`), e.g. a measurement plus its uncertainty.
Both forms are immutable value objects safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

DEFAULT_JITTER = 1e-10

NORMAL = "normal"
ANOMALOUS = "anomalous"


def _frozen_array(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("entries must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class EmpiricalGroup:
    """A group observed as n >= 1 points in R^d, weighted uniformly (1/n each)."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        pts = _frozen_array(pts, ndim=2)
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("group needs at least one point of dimension >= 1")
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def mean(self) -> np.ndarray:
        return self.points.mean(axis=0)


@dataclass(frozen=True)
class GaussianGroup:
    """A group summarized as N(mean, cov).

    ``cov`` must be symmetric positive semi-definite; the zero matrix is
    allowed and recovers a single point mass at ``mean``.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = _frozen_array(np.atleast_1d(np.asarray(self.mean, dtype=float)), ndim=1)
        cov = np.asarray(self.cov, dtype=float)
        if np.isscalar(self.cov) or cov.ndim == 0:
            cov = cov.reshape(1, 1)
        cov = _frozen_array(cov, ndim=2)
        d = mean.shape[0]
        if cov.shape != (d, d):
            raise ValueError(f"cov must be ({d}, {d}), got {cov.shape}")
        if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-9):
            raise ValueError("cov must be symmetric")
        try:
            np.linalg.cholesky(cov + DEFAULT_JITTER * np.eye(d))
        except np.linalg.LinAlgError as exc:
            raise ValueError("cov must be positive semi-definite") from exc
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


Group = Union[EmpiricalGroup, GaussianGroup]


def isotropic_gaussian(mean, variance: float) -> GaussianGroup:
    """Gaussian group N(mean, variance * I); variance = 0 gives a point mass."""
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    if variance < 0:
        raise ValueError("variance must be nonnegative")
    return GaussianGroup(mean, variance * np.eye(mean.shape[0]))


def shared_dim(groups: Sequence[Group]) -> int:
    """Dimension common to all groups; raises if empty or inconsistent."""
    if len(groups) == 0:
        raise ValueError("need at least one group")
    d = groups[0].dim
    for i, g in enumerate(groups):
        if g.dim != d:
            raise ValueError(f"group {i} has dimension {g.dim}, expected {d}")
    return d
