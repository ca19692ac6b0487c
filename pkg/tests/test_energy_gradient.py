"""Energy assembly and the L2 gradient against finite differences."""

import numpy as np
import pytest

import spslab as sl
from conftest import GAUSS_D, GAUSS_HDOT_SQ, GAUSS_LP_83, GAUSS_WIDTH, relerr
from oracles import directional_derivative_fd, smooth_random_field


@pytest.fixture(scope="module")
def params():
    return sl.Params(alpha=1.0, beta=1.0, p=8.0 / 3.0, rho=0.1)


class TestEnergy:
    def test_zero_field(self, grid32, params):
        eb = sl.energy(sl.zero_field(grid32), params)
        assert eb.total == 0 and eb.kinetic == 0 and eb.hartree == 0 and eb.potential == 0

    def test_gaussian_homogeneous_value(self, gauss64, params):
        eb = sl.energy(gauss64, params, variant="homogeneous")
        expected = 0.5 * GAUSS_HDOT_SQ + GAUSS_D - GAUSS_LP_83
        assert relerr(eb.total, expected) < 1e-3

    def test_total_assembly_exact(self, grid32, params):
        u = smooth_random_field(grid32, 2)
        eb = sl.energy(u, params)
        assert eb.total == eb.kinetic + eb.hartree - eb.potential
        assert eb.hartree == params.alpha * eb.d_value

    def test_variant_changes_only_kinetic(self, grid32, params):
        u = smooth_random_field(grid32, 3)
        inhom = sl.energy(u, params, variant="inhomogeneous")
        hom = sl.energy(u, params, variant="homogeneous")
        assert inhom.hartree == hom.hartree
        assert inhom.potential == hom.potential
        assert inhom.kinetic == 0.5 * inhom.norms.h_half_sq
        assert hom.kinetic == 0.5 * hom.norms.hdot_half_sq

    def test_invalid_variant(self, grid16, params):
        with pytest.raises(sl.ConfigurationError):
            sl.energy(sl.zero_field(grid16), params, variant="mixed")


class TestGradient:
    def test_zero_field(self, grid16, params):
        g = sl.gradient(sl.zero_field(grid16), params)
        assert np.max(np.abs(g.values)) == 0

    def test_linear_regime_is_half_wave(self, grid32):
        free = sl.Params(alpha=0.0, beta=0.0, p=2.5, rho=1.0)
        u = smooth_random_field(grid32, 4)
        g = sl.gradient(u, free)
        hw = sl.apply_half_wave(u)
        assert np.max(np.abs(g.values - hw.values)) < 1e-12 * np.max(np.abs(hw.values))

    @pytest.mark.parametrize("variant", ["inhomogeneous", "homogeneous"])
    def test_finite_difference_gaussian(self, grid64, params, variant):
        u = sl.gaussian_field(grid64, GAUSS_WIDTH)
        g = sl.gradient(u, params, variant=variant)
        rng = np.random.default_rng(0)
        for trial in range(10):
            direction = smooth_random_field(grid64, 1000 + trial)
            fd = directional_derivative_fd(u, direction, params, variant, eps=1e-4)
            analytic = sl.inner(g, direction).real
            assert abs(fd - analytic) / abs(analytic) < 1e-5

    def test_finite_difference_p_52(self, grid32):
        params = sl.Params(alpha=0.7, beta=1.3, p=2.5, rho=0.1)
        u = sl.gaussian_field(grid32, 1.0, amplitude=0.8)
        g = sl.gradient(u, params)
        for trial in range(5):
            direction = smooth_random_field(grid32, 2000 + trial)
            fd = directional_derivative_fd(u, direction, params, eps=1e-4)
            analytic = sl.inner(g, direction).real
            assert abs(fd - analytic) / abs(analytic) < 1e-5

    def test_zero_safe_power(self, grid16):
        # field vanishing on half the box: |u|^{p-2} u must stay finite
        params = sl.Params(alpha=0.0, beta=1.0, p=2.5, rho=1.0)
        values = np.zeros(grid16.shape, dtype=np.complex128)
        values[: grid16.n // 2] = 1.0 + 0.5j
        g = sl.gradient(sl.Field(grid16, values), params)
        assert np.all(np.isfinite(g.values.real))
        assert np.all(np.isfinite(g.values.imag))
