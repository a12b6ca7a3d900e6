"""Density bridge tests: plain KDE and the variable-bandwidth estimators."""

import numpy as np
import pytest

from ocsmm.density import DensityQuery, kde, smm_density, vkde_sparse
from ocsmm.groups import isotropic_gaussian
from ocsmm.kernels import KernelConfig, gaussian_mean_kernel
from ocsmm.model import fit
from ocsmm.qp import SolverSettings


def gaussian_center_model(centers, variances, sigma_sq, nu=1.0):
    groups = [isotropic_gaussian(m, v) for m, v in zip(centers, variances)]
    return fit(groups, KernelConfig(sigma_sq=sigma_sq), nu=nu,
               settings=SolverSettings(kkt_tol=1e-10))


class TestKde:
    def test_single_point_at_its_center(self):
        h = 0.4
        assert kde([[2.0]], h, [2.0]) == pytest.approx(1.0 / (h * np.sqrt(2 * np.pi)),
                                                       rel=1e-13)

    def test_symmetric_pair_midpoint(self):
        # both kernel terms are equal at the midpoint
        h = 0.7
        val = kde([[-1.0], [1.0]], h, [0.0])
        single = (2 * np.pi) ** -0.5 * np.exp(-0.5 * (1.0 / h) ** 2) / h
        assert val == pytest.approx(single, rel=1e-13)

    def test_integrates_to_one_1d(self):
        rng = np.random.default_rng(0)
        pts = rng.normal(size=(12, 1))
        h = 0.5
        grid = np.linspace(-10, 10, 4001)
        vals = np.array([kde(pts, h, [x]) for x in grid])
        integral = np.trapezoid(vals, grid)
        assert integral == pytest.approx(1.0, abs=1e-3)

    def test_rejects_bad_bandwidth(self):
        with pytest.raises(ValueError, match="bandwidth"):
            kde([[0.0]], 0.0, [0.0])


class TestSmmDensity:
    def test_homogeneous_matches_kde_up_to_constant(self):
        # equal per-center variances + point query = plain KDE with
        # bandwidth sqrt(sigma_sq + s2), up to one global constant
        rng = np.random.default_rng(1)
        centers = rng.normal(size=(9, 2))
        s2 = 0.3
        sigma_sq = 0.8
        model = gaussian_center_model(centers, [s2] * 9, sigma_sq)
        h = np.sqrt(sigma_sq + s2)
        grid = rng.uniform(-2, 2, size=(100, 2))
        ratios = np.array([
            smm_density(model, DensityQuery(q, 0.0)) / kde(centers, h, q)
            for q in grid
        ])
        # the 1e-10 Cholesky jitter perturbs each kernel value at ~1e-11
        # relative, which bounds how constant the ratio can be
        assert ratios.std() / ratios.mean() <= 1e-10

    def test_heterogeneous_equals_definition(self):
        rng = np.random.default_rng(2)
        centers = rng.normal(size=(5, 2))
        variances = rng.uniform(0.1, 0.5, size=5)
        sigma_sq = 0.6
        model = gaussian_center_model(centers, variances, sigma_sq)
        q = DensityQuery([0.3, -0.2], 0.0)
        direct = np.mean([
            gaussian_mean_kernel(isotropic_gaussian(m, v),
                                 isotropic_gaussian(q.point, 0.0), sigma_sq)
            for m, v in zip(centers, variances)
        ])
        assert smm_density(model, q) == pytest.approx(direct, rel=1e-12)

    def test_combination_case_with_query_variance(self):
        rng = np.random.default_rng(3)
        centers = rng.normal(size=(4, 2))
        variances = rng.uniform(0.1, 0.4, size=4)
        sigma_sq = 0.5
        model = gaussian_center_model(centers, variances, sigma_sq)
        q = DensityQuery([0.1, 0.4], 0.25)
        direct = np.mean([
            gaussian_mean_kernel(isotropic_gaussian(m, v),
                                 isotropic_gaussian(q.point, 0.25), sigma_sq)
            for m, v in zip(centers, variances)
        ])
        assert smm_density(model, q) == pytest.approx(direct, rel=1e-12)

    def test_far_query_vanishes(self):
        model = gaussian_center_model([[0.0, 0.0], [1.0, 0.0]], [0.1, 0.1], 0.5)
        far = DensityQuery([100.0, 100.0], 0.0)
        assert smm_density(model, far) <= 1e-10

    def test_requires_nu_one(self):
        model = gaussian_center_model([[0.0], [1.0], [2.0]], [0.1] * 3, 0.5, nu=0.5)
        with pytest.raises(ValueError, match="nu = 1"):
            smm_density(model, DensityQuery([0.0], 0.0))

    def test_requires_plain_pipeline(self):
        groups = [isotropic_gaussian([0.0], 0.1), isotropic_gaussian([1.0], 0.1)]
        model = fit(groups, KernelConfig(sigma_sq=0.5, spherical_normalize=True), nu=1.0)
        with pytest.raises(ValueError, match="plain"):
            smm_density(model, DensityQuery([0.0], 0.0))

    def test_balloon_smoothing_is_monotone(self):
        # growing query variance can only flatten the density surface
        rng = np.random.default_rng(4)
        centers = rng.normal(size=(6, 1))
        model = gaussian_center_model(centers, [0.2] * 6, 0.4)
        grid = np.linspace(-4, 4, 201)
        peaks = []
        for vt in (0.0, 0.2, 0.8, 2.0):
            vals = [smm_density(model, DensityQuery([x], vt)) for x in grid]
            peaks.append(max(vals))
        assert all(a >= b - 1e-12 for a, b in zip(peaks, peaks[1:]))


class TestVkdeSparse:
    def test_reduces_to_smm_density_at_nu_one(self):
        rng = np.random.default_rng(5)
        centers = rng.normal(size=(7, 2))
        model = gaussian_center_model(centers, [0.2] * 7, 0.5, nu=1.0)
        q = DensityQuery([0.2, 0.1], 0.0)
        assert vkde_sparse(model, q) == smm_density(model, q)

    def test_support_count_bounds(self):
        rng = np.random.default_rng(6)
        centers = rng.normal(size=(20, 2))
        variances = rng.uniform(0.1, 0.3, size=20)
        nu = 0.4
        model = gaussian_center_model(centers, variances, 0.5, nu=nu)
        nonzero = int(np.sum(model.alpha > 1e-9))
        assert nonzero <= 20
        assert nonzero >= nu * 20 - 2

    def test_nonnegative_everywhere(self):
        rng = np.random.default_rng(7)
        centers = rng.normal(size=(10, 2))
        model = gaussian_center_model(centers, [0.15] * 10, 0.5, nu=0.3)
        for q in rng.uniform(-3, 3, size=(50, 2)):
            assert vkde_sparse(model, DensityQuery(q, 0.0)) >= 0.0


class TestDensityQuery:
    def test_validation(self):
        with pytest.raises(ValueError, match="variance"):
            DensityQuery([0.0], -0.1)
        with pytest.raises(ValueError, match="finite"):
            DensityQuery([np.inf], 0.0)
