"""Seeded generators for the synthetic group-anomaly benchmarks.

Every generator is deterministic per seed. Random streams are split per
group (SeedSequence spawning), so changing the group count never reshuffles
the draws of earlier groups.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import ANOMALOUS, NORMAL, EmpiricalGroup, Group

BASE_COV = np.array([[0.01, 0.008], [0.008, 0.01]])

MIXTURE_MEANS = np.array([[-1.0, -1.0], [1.0, -1.0], [0.0, 1.0], [1.0, 1.0]])
MIXTURE_COMPONENT_VAR = 0.15
MIXTURE_NORMAL_PROPS = (
    np.array([0.22, 0.64, 0.03, 0.11]),
    np.array([0.22, 0.03, 0.64, 0.11]),
)
MIXTURE_TYPE_PROBS = (0.48, 0.52)
MIXTURE_ANOMALOUS_PROPS = np.array([0.61, 0.1, 0.06, 0.23])


@dataclass(frozen=True)
class LabeledGroupDataset:
    """Groups plus ground-truth labels and generation provenance."""

    groups: tuple[Group, ...]
    labels: tuple[str, ...]
    seed: int
    descriptor: str

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(self.groups))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.groups) != len(self.labels):
            raise ValueError("groups and labels must have equal length")
        for lab in self.labels:
            if lab not in (NORMAL, ANOMALOUS):
                raise ValueError(f"unknown label {lab!r}")

    @property
    def anomalous_mask(self) -> np.ndarray:
        return np.array([lab == ANOMALOUS for lab in self.labels])


def _rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def _group_rngs(seed: int, count: int) -> list[np.random.Generator]:
    return [np.random.default_rng(c) for c in np.random.SeedSequence(seed).spawn(count)]


def gen_rotated_gaussians(seed: int, n_points: int = 100,
                          mean_box: float = 0.02) -> LabeledGroupDataset:
    """Rotated-covariance benchmark: 22 sampled 2-D Gaussian groups.

    20 groups share the correlated covariance [[0.01, 0.008], [0.008, 0.01]]
    with means drawn uniformly from [0, mean_box]^2; the box is small
    relative to the covariance so the groups differ in shape, not location.
    The last of those 20 is shifted far away (+3 per coordinate) as a
    location anomaly. Two further groups have the covariance rotated by
    +60 and -60 degrees: anomalies invisible to any mean-based detector.
    Labels mark the shifted group and both rotated groups anomalous.
    """
    rngs = _group_rngs(seed, 22)
    rotations = {20: _rotation(np.pi / 3.0), 21: _rotation(-np.pi / 3.0)}
    groups, labels = [], []
    for i in range(22):
        rng = rngs[i]
        mean = rng.uniform(0.0, 1.0, size=2) * mean_box
        if i in rotations:
            r = rotations[i]
            cov = r @ BASE_COV @ r.T
        else:
            cov = BASE_COV
        if i == 19:
            mean = mean + 3.0
        # cholesky sampling: unlike the default svd path, the factor has no
        # sign ambiguity, so draws are identical across BLAS builds
        chol = np.linalg.cholesky(cov)
        points = mean + rng.standard_normal((n_points, 2)) @ chol.T
        groups.append(EmpiricalGroup(points))
        labels.append(ANOMALOUS if i >= 19 else NORMAL)
    return LabeledGroupDataset(
        groups=tuple(groups),
        labels=tuple(labels),
        seed=seed,
        descriptor=f"rotated-gaussians(n_points={n_points}, mean_box={mean_box})",
    )


def gen_mixture_groups(seed: int, n_normal: int = 47,
                       n_anomalous: int = 3) -> LabeledGroupDataset:
    """Mixing-proportion benchmark: 50 groups from a 4-component mixture.

    Each group draws Poisson(300) points from a Gaussian mixture with fixed
    component means and covariance 0.15 * I. Normal groups use one of two
    mixing proportions (chosen with probability 0.48 / 0.52); anomalous
    groups use a third proportion. Every individual point is normal; only
    the aggregate composition differs.
    """
    total = n_normal + n_anomalous
    rngs = _group_rngs(seed, total)
    sd = np.sqrt(MIXTURE_COMPONENT_VAR)
    groups, labels = [], []
    for i in range(total):
        rng = rngs[i]
        if i < n_normal:
            props = MIXTURE_NORMAL_PROPS[0 if rng.random() < MIXTURE_TYPE_PROBS[0] else 1]
            labels.append(NORMAL)
        else:
            props = MIXTURE_ANOMALOUS_PROPS
            labels.append(ANOMALOUS)
        n_i = max(1, int(rng.poisson(300)))
        comps = rng.choice(4, size=n_i, p=props)
        points = MIXTURE_MEANS[comps] + sd * rng.standard_normal((n_i, 2))
        groups.append(EmpiricalGroup(points))
    return LabeledGroupDataset(
        groups=tuple(groups),
        labels=tuple(labels),
        seed=seed,
        descriptor=f"mixture-groups(n_normal={n_normal}, n_anomalous={n_anomalous})",
    )


def gen_noisy_circle(seed: int, shape: str = "circle",
                     n_points: int = 500) -> list[tuple[np.ndarray, float]]:
    """Noisy observations on a circle or a four-petal flower curve.

    circle: x = cos t + e, y = sin t + e with t ~ U(-pi, pi] and e drawn
    from N(0, 0.05) per coordinate (0.05 is a variance). flower: radius
    r = sin(4 t) + 2 with t ~ U(0, 2 pi]. Every point is then corrupted by
    N(0, w_i) with w_i ~ U(0.2, 0.3); w_i is returned next to its point so
    each observation can be wrapped as a Gaussian group N(point, w_i * I).
    """
    if shape not in ("circle", "flower"):
        raise ValueError(f"unknown shape {shape!r}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    if shape == "circle":
        theta = rng.uniform(-np.pi, np.pi, size=n_points)
        base = np.column_stack([np.cos(theta), np.sin(theta)])
        base = base + np.sqrt(0.05) * rng.standard_normal((n_points, 2))
    else:
        theta = rng.uniform(0.0, 2.0 * np.pi, size=n_points)
        r = np.sin(4.0 * theta) + 2.0
        base = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
    omegas = rng.uniform(0.2, 0.3, size=n_points)
    noisy = base + np.sqrt(omegas)[:, None] * rng.standard_normal((n_points, 2))
    return [(noisy[i], float(omegas[i])) for i in range(n_points)]
