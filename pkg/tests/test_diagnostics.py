import numpy as np
import pytest

from netopinion.diagnostics import (
    compute_moments,
    count_clusters,
    l1_relative_error,
    solve_moment_system,
)
from netopinion.grids import (
    ConnectivityRange,
    ConstantRates,
    DensityField,
    ModelParams,
    OpinionGrid,
    Remark1Rates,
)
from netopinion.network import admissible_dt_rho, step_rho_explicit
from tests.conftest import random_field


class TestMoments:
    def test_symmetric_field_zero_mean(self, grid80):
        crange = ConnectivityRange(20)
        g = np.exp(-grid80.nodes ** 2 / 0.1)
        f = DensityField.from_product(g, np.ones(21), grid80, crange)
        rec = compute_moments(f)
        assert np.abs(rec.m_w).max() < 1e-15
        assert abs(rec.total_mean) < 1e-15

    def test_product_separates(self, grid80):
        crange = ConnectivityRange(15)
        rng = np.random.default_rng(0)
        g = rng.random(81)
        rho = rng.random(16)
        f = DensityField.from_product(g, rho, grid80, crange)
        rec = compute_moments(f)
        gm = grid80.dw * (grid80.nodes @ f.marginal_g()) / f.mass()
        np.testing.assert_allclose(rec.m_w, rec.rho * gm, atol=1e-13)

    def test_second_moment_bounds_first(self, grid80, crange250):
        f = random_field(grid80, crange250, seed=3)
        rec = compute_moments(f)
        live = rec.rho > 1e-12
        assert np.all(rec.e_w[live] >= rec.m_w[live] ** 2 / rec.rho[live] - 1e-14)

    def test_leadership_preset_mean_mix(self, grid80, crange250):
        from netopinion.experiment import build_initial_field, preset_config
        cfg = preset_config("test3")
        f = build_initial_field(cfg, grid80, crange250)
        rec = compute_moments(f)
        rho = f.marginal_rho()
        mix = -0.5 * rho[:31].sum() + 0.75 * rho[31:].sum()
        assert abs(rec.total_mean - mix) < 0.03


class TestMomentSystem:
    def _setup(self):
        grid = OpinionGrid(40)
        crange = ConnectivityRange(40)
        rng = np.random.default_rng(7)
        g = np.exp(-(grid.nodes - 0.3) ** 2 / 0.05) + 0.4 * rng.random(41)
        rho = np.exp(-0.5 * (np.arange(41) - 8.0) ** 2 / 9.0)
        f = DensityField.from_product(g, rho, grid, crange)
        return compute_moments(f)

    def test_total_mean_conserved(self):
        rec = self._setup()
        params = ModelParams(alpha=0.5, eta=0.05, lambda_freq=20.0)
        traj = solve_moment_system(rec.rho, rec.m_w, rec.e_w, params, 3.0)
        drift = abs(traj.m_w[-1].sum() - traj.m_w[0].sum())
        assert drift < 1e-12

    def test_rho_path_matches_explicit_step(self):
        rec = self._setup()
        params = ModelParams(alpha=0.5, eta=0.05, lambda_freq=20.0)
        dt = 0.5 * admissible_dt_rho(rec.rho, params)
        traj = solve_moment_system(rec.rho, rec.m_w, rec.e_w, params, 5 * dt, dt=dt)
        # compare after three full steps (the final step is truncated to
        # land on t_final and may differ by an ulp)
        rho = rec.rho.copy()
        for _ in range(3):
            rho = step_rho_explicit(rho, params, dt)
        np.testing.assert_array_equal(traj.rho[3], rho)

    def test_variance_contracts(self):
        rec = self._setup()
        params = ModelParams(alpha=0.5, eta=0.05, lambda_freq=20.0)
        traj = solve_moment_system(rec.rho, rec.m_w, rec.e_w, params, 2.0)
        var0 = traj.e_w[0].sum() - traj.m_w[0].sum() ** 2
        var1 = traj.e_w[-1].sum() - traj.m_w[-1].sum() ** 2
        rate = 2 * 0.05 * 0.95 * 20.0
        assert var1 < var0 * np.exp(-0.8 * rate * 2.0)
        assert var1 > 0

    def test_variance_matches_mc(self):
        # the closed system against the particle method at matched scaling
        from netopinion.kernels import quadratic_diffusion, unity_kernel
        from netopinion.montecarlo import MCSchedule, run_mc

        grid = OpinionGrid(40)
        crange = ConnectivityRange(40)
        g = np.exp(-(grid.nodes - 0.3) ** 2 / 0.05)
        rho = np.exp(-0.5 * (np.arange(41) - 8.0) ** 2 / 9.0)
        f = DensityField.from_product(g, rho, grid, crange)
        rec = compute_moments(f)
        eps = 0.05
        params = ModelParams(alpha=0.5, sigma2=0.0, epsilon=eps,
                             eta=eps, lambda_freq=1.0 / eps)
        traj = solve_moment_system(rec.rho, rec.m_w, rec.e_w, params, 1.0)
        ode_var = traj.e_w[-1].sum() - traj.m_w[-1].sum() ** 2

        mc_vars = []
        for seed in (1, 2, 3):
            res = run_mc(f, params, unity_kernel(), quadratic_diffusion(),
                         MCSchedule(t_final=1.0, dt=eps, epsilon=eps),
                         40000, seed=seed)
            mc_vars.append(res.ensemble.w.var())
        mc_mean = np.mean(mc_vars)
        spread = max(np.std(mc_vars), 0.02 * ode_var)
        assert abs(mc_mean - ode_var) < max(3 * spread, 0.1 * ode_var)

    def test_nonlinear_rates_rejected(self):
        rec = self._setup()
        params = ModelParams(alpha=0.5, eta=0.05, lambda_freq=20.0,
                             rates=Remark1Rates(1.0, 1.0))
        with pytest.raises(ValueError, match="constant"):
            solve_moment_system(rec.rho, rec.m_w, rec.e_w, params, 1.0)


class TestL1Error:
    def test_identical_zero(self):
        g = np.random.default_rng(0).random(50)
        assert l1_relative_error(g, g) == 0.0

    def test_double_is_one(self):
        g = np.random.default_rng(0).random(50)
        assert l1_relative_error(2 * g, g) == pytest.approx(1.0)

    def test_zero_reference_rejected(self):
        with pytest.raises(ValueError, match="zero"):
            l1_relative_error(np.ones(5), np.zeros(5))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            l1_relative_error(np.ones(5), np.ones(6))


class TestClusterCount:
    def test_unimodal(self):
        w = np.linspace(-1, 1, 81)
        assert count_clusters(np.exp(-w ** 2 / 0.05)) == 1

    def test_two_bumps(self):
        w = np.linspace(-1, 1, 81)
        g = np.exp(-(w - 0.5) ** 2 / 0.01) + np.exp(-(w + 0.5) ** 2 / 0.01)
        assert count_clusters(g) == 2

    def test_threshold_filters_small_bumps(self):
        w = np.linspace(-1, 1, 161)
        g = np.exp(-(w - 0.4) ** 2 / 0.01) + 0.05 * np.exp(-(w + 0.4) ** 2 / 0.01)
        assert count_clusters(g, prominence_threshold=0.1) == 1
        assert count_clusters(g, prominence_threshold=0.01) == 2

    def test_smoothing_removes_alternating_noise(self):
        w = np.linspace(-1, 1, 81)
        g = np.exp(-w ** 2 / 0.1)
        g = g * (1 + 0.05 * np.cos(20 * np.pi * w))
        assert count_clusters(g, smooth=True) == 1
        assert count_clusters(g, smooth=False) > 2

    def test_flat_profile_no_clusters(self):
        assert count_clusters(np.full(50, 0.5)) == 0

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            count_clusters(np.array([0.1, -0.2, 0.3]))
