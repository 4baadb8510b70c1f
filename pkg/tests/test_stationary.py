import numpy as np
import pytest

from netopinion.grids import OpinionGrid
from netopinion.stationary import (
    StationaryDegreeLaw,
    StationaryOpinionProfile,
    f_inf_product,
    g_inf,
    rho_inf,
    rho_inf_poisson,
    rho_inf_powerlaw,
    rho_inf_vector,
)


class TestDegreeLaw:
    def test_value_at_zero(self):
        # (alpha/(alpha+gamma))^alpha evaluated directly
        expected = np.exp(0.1 * np.log(0.1 / 30.1))
        assert abs(rho_inf(0, 30.0, 0.1) - expected) < 1e-15
        assert abs(rho_inf(0, 30.0, 0.1) - 0.5651234780596622) < 1e-12

    def test_level_one_from_boundary_balance(self):
        g, a = 30.0, 0.1
        assert abs(rho_inf(1, g, a) - (g / (g + a)) * a * rho_inf(0, g, a)) < 1e-16

    def test_three_term_recurrence(self):
        g, a = 30.0, 0.1
        r = rho_inf_vector(250, g, a)
        c = np.arange(1, 249)
        lhs = (c + 1) * r[c + 1]
        rhs = ((c * (2 * g + a) + g * a) * r[c] - g * (c - 1 + a) * r[c - 1]) / (g + a)
        assert np.max(np.abs(lhs - rhs) / np.abs(rhs)) < 1e-12

    def test_mean_identity(self):
        # the law mean equals its gamma parameter once truncation is inert
        law = StationaryDegreeLaw(30.0, 10.0, 250)
        assert abs(np.arange(251) @ law.pmf() - 30.0) < 1e-6
        law2 = StationaryDegreeLaw(30.0, 0.1, 6000)
        assert abs(np.arange(6001) @ law2.pmf() - 30.0) < 1e-6

    def test_partial_sums_monotone(self):
        p = rho_inf_vector(500, 30.0, 0.1)
        s = np.cumsum(p)
        assert np.all(np.diff(s) >= 0) and s[-1] <= 1.0 + 1e-12

    def test_truncation_deficit_reported(self):
        # alpha = 10 law is fully contained at c_max = 250; the alpha = 0.1
        # law loses a few percent there (heavy tail), which the oracle
        # reports rather than hides
        assert StationaryDegreeLaw(30.0, 10.0, 250).truncation_deficit() < 1e-8
        d = StationaryDegreeLaw(30.0, 0.1, 250).truncation_deficit()
        assert 0.01 < d < 0.1
        assert StationaryDegreeLaw(30.0, 0.1, 6000).truncation_deficit() < 1e-8

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            rho_inf_vector(10, -1.0, 0.1)
        with pytest.raises(ValueError):
            rho_inf(-1, 30.0, 0.1)


class TestLimits:
    def test_poisson_limit(self):
        # relative deviation from Poisson is O((c - gamma)^2 / alpha); at
        # alpha = 1e6 direct evaluation gives 2.4e-3 at the c = 100 edge,
        # and the deviation shrinks proportionally to 1/alpha
        c = np.arange(101)
        pois = rho_inf_poisson(c, 30.0)
        dev6 = np.max(np.abs(rho_inf(c, 30.0, 1e6) - pois) / pois)
        dev7 = np.max(np.abs(rho_inf(c, 30.0, 1e7) - pois) / pois)
        assert dev6 < 3e-3
        assert dev7 < 1e-3
        assert dev7 < 0.15 * dev6

    def test_poisson_mode(self):
        p = rho_inf_poisson(np.arange(100), 30.0)
        assert np.argmax(p) in (29, 30)

    def test_powerlaw_slope_of_law(self):
        c = np.arange(1, 101)
        r = rho_inf(c, 30.0, 1e-3)
        slope = np.polyfit(np.log(c), np.log(r), 1)[0]
        assert abs(slope + 1.0) < 0.05

    def test_powerlaw_form_matches(self):
        c = np.arange(1, 101)
        approx = rho_inf_powerlaw(c, 30.0, 1e-3)
        exact = rho_inf(c, 30.0, 1e-3)
        assert np.max(np.abs(approx - exact) / exact) < 0.02

    def test_powerlaw_rejects_zero(self):
        with pytest.raises(ValueError):
            rho_inf_powerlaw(0, 30.0, 0.1)
        with pytest.raises(ValueError):
            rho_inf_powerlaw(5, 0.5, 0.1)


class TestOpinionProfiles:
    def test_case1_symmetric_bell(self):
        grid = OpinionGrid(80)
        prof = StationaryOpinionProfile(kappa=1.0, mbar=0.0, sigma2=0.05)
        g = g_inf(prof, grid)
        assert abs(grid.dw * g.sum() - 1.0) < 1e-12
        assert np.max(np.abs(g - g[::-1])) < 1e-12
        assert np.argmax(g) == 40
        assert g[0] == 0.0 and g[-1] == 0.0

    def test_case2_uniform_when_exponents_cancel(self):
        grid = OpinionGrid(80)
        prof = StationaryOpinionProfile(kappa=0.1, mbar=0.0, sigma2=0.05,
                                        variant="case2")
        g = g_inf(prof, grid)
        assert np.max(np.abs(g - g[0])) < 1e-14
        # discrete normalization spreads unit mass over (N+1) dw-cells
        assert abs(g[0] - 0.5) < 1.0 / grid.n

    def test_case2_symmetry(self):
        grid = OpinionGrid(64)
        prof = StationaryOpinionProfile(kappa=1.0, mbar=0.0, sigma2=0.05,
                                        variant="case2")
        g = g_inf(prof, grid)
        assert np.max(np.abs(g - g[::-1])) < 1e-12

    def test_case2_non_normalizable(self):
        with pytest.raises(ValueError, match="normalizable"):
            prof = StationaryOpinionProfile(kappa=0.04, mbar=0.0, sigma2=0.05,
                                            variant="case2")
            g_inf(prof, OpinionGrid(16))

    def test_generic_reproduces_case1(self):
        grid = OpinionGrid(80)
        base = StationaryOpinionProfile(kappa=1.0, mbar=0.1, sigma2=0.05)
        gen = StationaryOpinionProfile(
            kappa=1.0, mbar=0.1, sigma2=0.05, variant="generic",
            hbar=lambda w: np.ones_like(w), d=lambda w: 1.0 - w * w)
        g1 = g_inf(base, grid)
        g2 = g_inf(gen, grid)
        assert np.max(np.abs(g1 - g2)) < 1e-8

    @pytest.mark.parametrize("variant,mbar", [
        ("case1", 0.0), ("case1", 0.2), ("case2", 0.0), ("case2", 0.15),
    ])
    def test_profiles_satisfy_zero_flux_ode(self, variant, mbar):
        # dg/dw = -2 (kappa/sigma2 Hbar (w - mbar)/D^2 + D'/D) g, checked by
        # centered differences; the residual shrinks at second order
        kappa, sigma2 = 1.0, 0.05
        res = []
        for n in (80, 160, 320):
            grid = OpinionGrid(n)
            prof = StationaryOpinionProfile(kappa=kappa, mbar=mbar,
                                            sigma2=sigma2, variant=variant)
            g = g_inf(prof, grid)
            w = grid.nodes
            interior = slice(1, -1)
            wi = w[interior]
            hbar = np.ones_like(wi) if variant == "case1" else 1.0 - wi**2
            d = 1.0 - wi**2
            dp = -2.0 * wi
            rhs = -2.0 * (kappa / sigma2 * hbar * (wi - mbar) / d**2 + dp / d) * g[interior]
            lhs = (g[2:] - g[:-2]) / (2 * grid.dw)
            live = g[interior] > 1e-8 * g.max()
            res.append(np.max(np.abs(lhs - rhs)[live]) / g.max())
        assert res[0] / res[1] > 3.0 and res[1] / res[2] > 3.0

    def test_kappa_unity_for_flat_weight(self):
        law = StationaryDegreeLaw(30.0, 10.0, 250).normalized()
        assert abs(law.sum() - 1.0) < 1e-14


class TestProduct:
    def test_marginals_round_trip(self):
        grid = OpinionGrid(40)
        law = StationaryDegreeLaw(30.0, 10.0, 250)
        prof = StationaryOpinionProfile(kappa=1.0, mbar=0.0, sigma2=0.05)
        f = f_inf_product(law, prof, grid)
        np.testing.assert_allclose(f.marginal_rho(), law.normalized(), atol=1e-12)
        np.testing.assert_allclose(f.marginal_g(), g_inf(prof, grid), atol=1e-10)
        assert abs(f.mass() - 1.0) < 1e-12
