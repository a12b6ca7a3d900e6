"""Kernels between groups of points.

Groups are compared through the inner product of their kernel mean
embeddings: a Gaussian RBF kernel on points induces a kernel on
distributions, estimated from samples (:func:`empirical_mean_kernel`) or
computed in closed form for Gaussian groups (:func:`gaussian_mean_kernel`).
Two optional transforms sit on top: a "level-2" Gaussian kernel on the
embedding distance, and spherical normalization which rescales every
embedding to unit norm. The pipeline order is fixed:

    mean kernel -> level-2 (if gamma set) -> normalization (if enabled)

All functions here are pure; Gram assembly is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .errors import NumericalError
from .groups import EmpiricalGroup, GaussianGroup, Group, shared_dim

PSD_TOL = 1e-8
SYMMETRY_TOL = 1e-12

# Cap on pairwise-kernel matrix entries held in memory at once; larger
# empirical products are accumulated in row blocks.
_BLOCK_ENTRIES = 5_000_000


@dataclass(frozen=True)
class KernelConfig:
    """Settings of the group-kernel pipeline.

    sigma_sq is the squared bandwidth of the base RBF kernel on points. It
    may be left as None and resolved later via :func:`median_heuristic`
    (model fitting does this automatically). level2_gamma, when set, applies
    exp(-||mu_a - mu_b||^2 / (2 * gamma^2)) on top of the embeddings.
    """

    sigma_sq: float | None = None
    level2_gamma: float | None = None
    spherical_normalize: bool = False
    jitter: float = 1e-10

    def __post_init__(self):
        if self.sigma_sq is not None and not self.sigma_sq > 0:
            raise ValueError(f"sigma_sq must be positive, got {self.sigma_sq!r}")
        if self.level2_gamma is not None and not self.level2_gamma > 0:
            raise ValueError(f"level2_gamma must be positive, got {self.level2_gamma!r}")
        if self.jitter < 0:
            raise ValueError("jitter must be nonnegative")

    def require_sigma_sq(self) -> float:
        if self.sigma_sq is None:
            raise ValueError("sigma_sq is unset; supply it or use the median heuristic")
        return self.sigma_sq


@dataclass(frozen=True)
class GramMatrix:
    """Symmetric PSD matrix of group-kernel values plus the config that built it.

    Construction validates symmetry (to 1e-12), positive semi-definiteness
    (smallest eigenvalue >= -1e-8) and, for normalized configs, the unit
    diagonal.
    """

    entries: np.ndarray
    config: KernelConfig

    def __post_init__(self):
        k = np.asarray(self.entries, dtype=float)
        if k.ndim != 2 or k.shape[0] != k.shape[1]:
            raise ValueError(f"entries must be square, got shape {k.shape}")
        if not np.all(np.isfinite(k)):
            raise ValueError("entries must be finite")
        if np.max(np.abs(k - k.T), initial=0.0) > SYMMETRY_TOL:
            raise ValueError("entries must be symmetric to within 1e-12")
        if self.config.spherical_normalize and not np.all(np.diag(k) == 1.0):
            raise ValueError("normalized Gram must have unit diagonal")
        k = k.copy()
        k.setflags(write=False)
        object.__setattr__(self, "entries", k)
        min_eig = float(np.linalg.eigvalsh(k)[0])
        object.__setattr__(self, "_min_eig", min_eig)
        if min_eig < -PSD_TOL:
            raise NumericalError(f"Gram matrix is not PSD: min eigenvalue {min_eig:g}")

    @property
    def ell(self) -> int:
        return self.entries.shape[0]

    def min_eigenvalue(self) -> float:
        return self._min_eig


def rbf(x, y, sigma_sq: float) -> float:
    """Gaussian RBF on points: exp(-||x - y||^2 / (2 sigma_sq)). In (0, 1]."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    if not sigma_sq > 0:
        raise ValueError("sigma_sq must be positive")
    diff = x - y
    return float(np.exp(-(diff @ diff) / (2.0 * sigma_sq)))


def median_heuristic(groups, max_points: int | None = 20_000) -> float:
    """Median of squared Euclidean distances over all pooled point pairs.

    Self-pairs (identical indices) are excluded. The returned value is used
    directly as sigma_sq. Above ``max_points`` pooled points the pool is
    subsampled deterministically to bound memory; pass None to force the
    exact all-pairs median.
    """
    pooled = []
    for i, g in enumerate(groups):
        if not isinstance(g, EmpiricalGroup):
            raise ValueError(f"median heuristic needs sample points, group {i} has none")
        pooled.append(g.points)
    if not pooled:
        raise ValueError("median heuristic needs at least one group")
    pts = np.vstack(pooled)
    if pts.shape[0] < 2:
        raise ValueError("median heuristic needs at least two points")
    if max_points is not None and pts.shape[0] > max_points:
        idx = np.random.default_rng(0).choice(pts.shape[0], size=max_points, replace=False)
        pts = pts[np.sort(idx)]
    med = float(np.median(pdist(pts, "sqeuclidean")))
    if not med > 0.0:
        raise ValueError("degenerate bandwidth: median pairwise distance is zero")
    return med


def _rbf_block_mean(a: np.ndarray, b: np.ndarray, sigma_sq: float) -> float:
    total = 0.0
    rows = max(1, _BLOCK_ENTRIES // b.shape[0])
    for start in range(0, a.shape[0], rows):
        d2 = cdist(a[start : start + rows], b, "sqeuclidean")
        total += float(np.exp(-d2 / (2.0 * sigma_sq)).sum())
    return total / (a.shape[0] * b.shape[0])


def empirical_mean_kernel(a: EmpiricalGroup, b: EmpiricalGroup, sigma_sq: float) -> float:
    """Sample estimate of the mean-embedding inner product.

    Averages the base RBF kernel over all cross pairs of points:
    (1 / (n_a n_b)) sum_k sum_l k(x_k, y_l).
    """
    if not isinstance(a, EmpiricalGroup) or not isinstance(b, EmpiricalGroup):
        raise ValueError("empirical_mean_kernel needs empirical groups")
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if not sigma_sq > 0:
        raise ValueError("sigma_sq must be positive")
    return _rbf_block_mean(a.points, b.points, sigma_sq)


def _chol_with_jitter(m: np.ndarray, jitter: float) -> np.ndarray:
    try:
        return np.linalg.cholesky(m + jitter * np.eye(m.shape[0]))
    except np.linalg.LinAlgError as exc:
        raise NumericalError("kernel covariance term is not invertible") from exc


def _gaussian_kernel_core(
    delta: np.ndarray, cov_sum: np.ndarray, sigma_sq: float, jitter: float
) -> float:
    """exp(-1/2 delta^T B^-1 delta) / det(cov_sum / s2 + I)^(1/2), B = cov_sum + s2 I.

    delta may be a single vector or a stack of row vectors; the result is
    then the mean over rows. The determinant is evaluated through a
    Cholesky log-determinant, which stays finite for large dimensions.
    """
    d = cov_sum.shape[0]
    m = cov_sum / sigma_sq + np.eye(d)
    chol = _chol_with_jitter(m, jitter)
    logdet = 2.0 * float(np.sum(np.log(np.diag(chol))))
    rows = np.atleast_2d(delta)
    y = np.linalg.solve(chol, rows.T)
    quad = np.sum(y * y, axis=0) / sigma_sq
    vals = np.exp(-0.5 * quad - 0.5 * logdet)
    return float(vals.mean())


def gaussian_mean_kernel(a: GaussianGroup, b: GaussianGroup, sigma_sq: float,
                         jitter: float = 1e-10) -> float:
    """Closed-form mean-embedding inner product of two Gaussian groups.

    For N(m_a, S_a) and N(m_b, S_b) under the RBF base kernel this is
    exp(-1/2 (m_a - m_b)^T B^-1 (m_a - m_b)) / det(S_a/s2 + S_b/s2 + I)^(1/2)
    with B = S_a + S_b + s2 * I.
    """
    if not isinstance(a, GaussianGroup) or not isinstance(b, GaussianGroup):
        raise ValueError("gaussian_mean_kernel needs Gaussian groups")
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if not sigma_sq > 0:
        raise ValueError("sigma_sq must be positive")
    return _gaussian_kernel_core(a.mean - b.mean, a.cov + b.cov, sigma_sq, jitter)


def mean_kernel(a: Group, b: Group, config: KernelConfig) -> float:
    """Mean-embedding inner product, dispatching on the group representations.

    Empirical x Gaussian pairs are exact: each sample point is a
    zero-covariance Gaussian, so the closed form integrates the base kernel
    against the Gaussian side and the result is averaged over the points.
    """
    sigma_sq = config.require_sigma_sq()
    if isinstance(a, EmpiricalGroup) and isinstance(b, EmpiricalGroup):
        return empirical_mean_kernel(a, b, sigma_sq)
    if isinstance(a, GaussianGroup) and isinstance(b, GaussianGroup):
        return gaussian_mean_kernel(a, b, sigma_sq, config.jitter)
    if isinstance(a, GaussianGroup):
        a, b = b, a
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return _gaussian_kernel_core(a.points - b.mean, b.cov, sigma_sq, config.jitter)


def level2_kernel(k_aa: float, k_ab: float, k_bb: float, gamma: float) -> float:
    """Gaussian kernel on the RKHS distance between two mean embeddings.

    ||mu_a - mu_b||^2 = k_aa - 2 k_ab + k_bb must be nonnegative up to
    roundoff; values below -1e-8 indicate non-PSD inputs and raise.
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if not (k_aa > 0 and k_bb > 0):
        raise ValueError("self-kernel values must be positive")
    d2 = k_aa - 2.0 * k_ab + k_bb
    if d2 < -PSD_TOL:
        raise NumericalError(f"negative squared embedding distance {d2:g}")
    return float(np.exp(-max(d2, 0.0) / (2.0 * gamma * gamma)))


def spherical_normalize(gram: GramMatrix) -> GramMatrix:
    """Rescale kernel values so every embedding has unit norm.

    Entry (i, j) becomes K_ij / sqrt(K_ii K_jj); the diagonal is exactly 1.
    """
    diag = np.diag(gram.entries)
    if np.any(diag <= 0):
        raise ValueError("spherical normalization needs positive diagonal entries")
    out = gram.entries / np.sqrt(np.outer(diag, diag))
    np.fill_diagonal(out, 1.0)
    return GramMatrix(out, replace(gram.config, spherical_normalize=True))


def mean_gram(groups, config: KernelConfig) -> np.ndarray:
    """Raw pairwise mean-kernel matrix, before level-2 and normalization."""
    shared_dim(groups)
    ell = len(groups)
    k = np.empty((ell, ell), dtype=float)
    for i in range(ell):
        for j in range(i, ell):
            v = mean_kernel(groups[i], groups[j], config)
            k[i, j] = v
            k[j, i] = v
    return k


def _apply_level2(raw: np.ndarray, diag: np.ndarray, gamma: float) -> np.ndarray:
    d2 = diag[:, None] + diag[None, :] - 2.0 * raw
    if float(d2.min()) < -PSD_TOL:
        raise NumericalError(f"negative squared embedding distance {d2.min():g}")
    out = np.exp(-np.maximum(d2, 0.0) / (2.0 * gamma * gamma))
    np.fill_diagonal(out, 1.0)
    return out


def finish_gram(raw: np.ndarray, config: KernelConfig) -> GramMatrix:
    """Run a raw mean-kernel matrix through level-2 and normalization.

    The :class:`GramMatrix` constructor verifies the result is PSD to
    within -1e-8 on the smallest eigenvalue.
    """
    k = raw
    if config.level2_gamma is not None:
        k = _apply_level2(k, np.diag(k).copy(), config.level2_gamma)
    if config.spherical_normalize:
        diag = np.diag(k)
        if np.any(diag <= 0):
            raise ValueError("spherical normalization needs positive diagonal entries")
        k = k / np.sqrt(np.outer(diag, diag))
        np.fill_diagonal(k, 1.0)
    return GramMatrix(k, config)


def gram_matrix(groups, config: KernelConfig) -> GramMatrix:
    """Assemble the full group-kernel Gram matrix through the pipeline.

    Applies the mean kernel pairwise, then the level-2 kernel if configured,
    then spherical normalization if configured (always in that order).
    """
    return finish_gram(mean_gram(groups, config), config)


def kernel_column(train_groups, test: Group, config: KernelConfig,
                  train_diag: np.ndarray) -> np.ndarray:
    """Pipeline kernel values between each training group and one test group.

    ``train_diag`` holds the raw self-kernels K(P_i, P_i) cached at training
    time; the test self-kernel is computed fresh, so level-2 and
    normalization of the test column match the training Gram exactly.
    """
    raw = np.array([mean_kernel(g, test, config) for g in train_groups])
    if config.level2_gamma is None and not config.spherical_normalize:
        return raw
    k_tt = mean_kernel(test, test, config)
    if config.level2_gamma is not None:
        gamma = config.level2_gamma
        d2 = train_diag + k_tt - 2.0 * raw
        if float(d2.min()) < -PSD_TOL:
            raise NumericalError(f"negative squared embedding distance {d2.min():g}")
        col = np.exp(-np.maximum(d2, 0.0) / (2.0 * gamma * gamma))
        # level-2 self-kernels are exactly 1, so normalization is a no-op
        return col
    return raw / np.sqrt(train_diag * k_tt)
