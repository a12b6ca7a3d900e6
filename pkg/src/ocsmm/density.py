"""Density estimation through the one-class machine.

A model trained at nu = 1 on Gaussian groups N(m_i, s_i^2 I) with the plain
mean kernel evaluates, up to a constant, a variable-bandwidth mixture over
the group centers. Querying with a point mass recovers the
sample-smoothing estimator (per-center bandwidths); homogeneous centers
queried with growing test variance give the balloon estimator
(query-dependent bandwidth). With nu < 1 the fitted sparse coefficients
give a sparse version of the same estimator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import isotropic_gaussian
from .kernels import kernel_column
from .model import TrainedModel


@dataclass(frozen=True)
class DensityQuery:
    """Query location plus the isotropic variance of the test distribution.

    variance = 0 encodes a point query (Dirac test distribution).
    """

    point: np.ndarray
    variance: float = 0.0

    def __post_init__(self):
        point = np.atleast_1d(np.asarray(self.point, dtype=float))
        if not np.all(np.isfinite(point)):
            raise ValueError("query point must be finite")
        if self.variance < 0:
            raise ValueError("query variance must be nonnegative")
        point.setflags(write=False)
        object.__setattr__(self, "point", point)


def kde(points, h: float, query) -> float:
    """Plain kernel density estimate with a Gaussian kernel of bandwidth h.

    (1 / (n h^d)) sum_i phi((q - x_i) / h) with phi the unit-variance
    Gaussian density in d dimensions; integrates to 1.
    """
    if not h > 0:
        raise ValueError("bandwidth h must be positive")
    x = np.atleast_2d(np.asarray(points, dtype=float))
    q = np.atleast_1d(np.asarray(query, dtype=float))
    n, d = x.shape
    if q.shape != (d,):
        raise ValueError(f"query must have dimension {d}")
    u2 = np.sum(((q - x) / h) ** 2, axis=1)
    phi = (2.0 * np.pi) ** (-d / 2.0) * np.exp(-0.5 * u2)
    return float(phi.sum() / (n * h**d))


def _plain_column(model: TrainedModel, query: DensityQuery) -> np.ndarray:
    test = isotropic_gaussian(query.point, query.variance)
    return kernel_column(model.train_groups, test, model.config, model.train_diag)


def _require_plain(model: TrainedModel):
    if model.config.level2_gamma is not None or model.config.spherical_normalize:
        raise ValueError("density evaluation needs the plain mean kernel "
                         "(no level-2, no normalization)")


def smm_density(model: TrainedModel, query: DensityQuery) -> float:
    """Unnormalized density sum_i alpha_i K(P_i, N(q, s_t^2 I)) at nu = 1.

    With nu = 1 the coefficients are uniform, so this is proportional to a
    variable-bandwidth kernel density estimate over the training groups.
    The value is reported without the density normalization constant.
    """
    _require_plain(model)
    if model.nu != 1.0:
        raise ValueError("smm_density needs a model trained with nu = 1")
    return float(model.alpha @ _plain_column(model, query))


def vkde_sparse(model: TrainedModel, query: DensityQuery) -> float:
    """Sparse variable-bandwidth density using the fitted coefficients.

    Identical to :func:`smm_density` at nu = 1; for nu < 1 only the support
    measures contribute.
    """
    _require_plain(model)
    return float(model.alpha @ _plain_column(model, query))
