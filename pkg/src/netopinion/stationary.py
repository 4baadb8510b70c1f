"""Closed-form stationary laws: degree distribution and opinion profiles.

The degree law is a negative-binomial-type distribution whose ratio
parameter is the asymptotic mean connectivity; its Poisson and truncated
power-law limits are provided separately.  The opinion profiles solve the
zero-flux ODE

    dg/dw = -2 (kappa/sigma2 * Hbar(w) (w - mbar) / D^2 + D'/D) g,

whose closed forms exist for H == 1 and H = D = 1 - w^2.  All products and
powers in the degree law are computed in log space; c_max in the thousands
is routine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grids import ConnectivityRange, DensityField, OpinionGrid

__all__ = [
    "StationaryDegreeLaw",
    "StationaryOpinionProfile",
    "rho_inf",
    "rho_inf_vector",
    "rho_inf_poisson",
    "rho_inf_powerlaw",
    "g_inf",
    "f_inf_product",
]


def _log_pmf(c_max: int, gamma: float, alpha: float) -> np.ndarray:
    """log of the closed-form degree law on 0..c_max."""
    logp = np.zeros(c_max + 1)
    if c_max >= 1:
        k = np.arange(c_max, dtype=np.float64)
        inc = np.log(gamma / (gamma + alpha)) + np.log(alpha + k) - np.log1p(k)
        logp[1:] = np.cumsum(inc)
    return logp + alpha * np.log(alpha / (alpha + gamma))


def rho_inf_vector(c_max: int, gamma: float, alpha: float) -> np.ndarray:
    """Closed-form stationary degree law on 0..c_max (not renormalized)."""
    if gamma <= 0 or alpha <= 0:
        raise ValueError("gamma and alpha must be positive")
    return np.exp(_log_pmf(c_max, gamma, alpha))


def rho_inf(c, gamma: float, alpha: float):
    """Stationary degree law at integer argument(s) c."""
    c_arr = np.atleast_1d(np.asarray(c, dtype=np.int64))
    if (c_arr < 0).any():
        raise ValueError("c must be nonnegative")
    full = rho_inf_vector(int(c_arr.max()), gamma, alpha)
    out = full[c_arr]
    return float(out[0]) if np.isscalar(c) or np.ndim(c) == 0 else out


def rho_inf_poisson(c, gamma: float):
    """Large-attraction limit of the degree law: Poisson with mean gamma."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    c_arr = np.atleast_1d(np.asarray(c, dtype=np.int64))
    if (c_arr < 0).any():
        raise ValueError("c must be nonnegative")
    n = int(c_arr.max())
    log_fact = np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, n + 1)))]) if n else np.zeros(1)
    out = np.exp(-gamma + c_arr * np.log(gamma) - log_fact[c_arr])
    return float(out[0]) if np.isscalar(c) or np.ndim(c) == 0 else out


def rho_inf_powerlaw(c, gamma: float, alpha: float):
    """Small-attraction approximation (alpha/gamma)^alpha * alpha / c.

    Valid for gamma >= 1 and c >= 1; the form is singular at c = 0.
    """
    if gamma < 1:
        raise ValueError("power-law approximation requires gamma >= 1")
    c_arr = np.atleast_1d(np.asarray(c, dtype=np.float64))
    if (c_arr < 1).any():
        raise ValueError("power-law form is undefined for c < 1")
    out = (alpha / gamma) ** alpha * alpha / c_arr
    return float(out[0]) if np.isscalar(c) or np.ndim(c) == 0 else out


@dataclass(frozen=True)
class StationaryDegreeLaw:
    """Degree-law oracle with explicit truncation accounting."""

    gamma: float
    alpha: float
    c_max: int

    def __post_init__(self):
        if self.gamma <= 0 or self.alpha <= 0:
            raise ValueError("gamma and alpha must be positive")
        if self.c_max < 1:
            raise ValueError("c_max must be >= 1")

    def pmf(self) -> np.ndarray:
        """Raw restriction of the infinite-support law to 0..c_max."""
        return rho_inf_vector(self.c_max, self.gamma, self.alpha)

    def truncation_deficit(self) -> float:
        """Probability mass of the law beyond c_max."""
        return float(1.0 - self.pmf().sum())

    def normalized(self) -> np.ndarray:
        """Truncated law rescaled to unit mass on 0..c_max."""
        p = self.pmf()
        return p / p.sum()


@dataclass(frozen=True)
class StationaryOpinionProfile:
    """Parameters of the stationary opinion profile.

    kappa is the connectivity contraction sum(Kbar(c*) rho_inf(c*)), mbar
    the conserved mean opinion.  For the generic variant supply the
    opinion factor ``hbar`` and diffusion ``d`` as callables of w.
    """

    kappa: float
    mbar: float
    sigma2: float
    variant: str = "case1"
    hbar: Callable[[np.ndarray], np.ndarray] | None = None
    d: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if self.sigma2 <= 0:
            raise ValueError("sigma2 must be positive")
        if self.variant in ("case1", "case2") and not -1.0 < self.mbar < 1.0:
            raise ValueError("mbar must lie in (-1, 1)")
        if self.variant not in ("case1", "case2", "generic"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant == "generic" and (self.hbar is None or self.d is None):
            raise ValueError("generic variant needs hbar and d callables")


def _g_inf_case1(w: np.ndarray, kappa: float, mbar: float, sigma2: float) -> np.ndarray:
    # Zero-flux solution for H == 1, D = 1 - w^2; vanishes at w = +-1
    # through the essential singularity of the exponential factor.
    r = kappa / sigma2
    out = np.zeros_like(w)
    interior = (w > -1.0) & (w < 1.0)
    wi = w[interior]
    ln = (
        (-2.0 + 0.5 * mbar * r) * np.log1p(wi)
        + (-2.0 - 0.5 * mbar * r) * np.log1p(-wi)
        - r * (1.0 - mbar * wi) / (1.0 - wi * wi)
    )
    out[interior] = np.exp(ln)
    return out


def _g_inf_case2(w: np.ndarray, kappa: float, mbar: float, sigma2: float) -> np.ndarray:
    # Zero-flux solution for H = D = 1 - w^2: a Beta-type profile.
    r = kappa / sigma2
    e_minus = -2.0 + (1.0 - mbar) * r  # exponent of (1 - w)
    e_plus = -2.0 + (1.0 + mbar) * r  # exponent of (1 + w)
    if e_minus <= -1.0 or e_plus <= -1.0:
        raise ValueError(
            f"case2 profile is not normalizable (exponents {e_minus:g}, {e_plus:g})"
        )
    out = np.zeros_like(w)
    interior = (w > -1.0) & (w < 1.0)
    wi = w[interior]
    out[interior] = np.exp(e_minus * np.log1p(-wi) + e_plus * np.log1p(wi))
    # Boundary nodes take the limit value: 0 for decaying exponents, the
    # finite formula value when an exponent is exactly 0 (uniform case).
    if e_minus == 0.0:
        out[w == 1.0] = np.exp(e_plus * np.log(2.0))
    if e_plus == 0.0:
        out[w == -1.0] = np.exp(e_minus * np.log(2.0))
    return out


def _g_inf_generic(w_nodes: np.ndarray, profile: StationaryOpinionProfile,
                   sub: int = 64) -> np.ndarray:
    """Quadrature of the exponential-integral form on the grid nodes.

    Cumulative composite Simpson from w = 0 outward with ``sub``
    subintervals per node gap; boundary nodes are assigned the limit 0.
    """
    hbar, dfun = profile.hbar, profile.d
    r = 2.0 * profile.kappa / profile.sigma2

    def integrand(v):
        dv = dfun(v)
        return hbar(v) * (profile.mbar - v) / (dv * dv)

    def cumulative(targets):
        # integral of the drift/diffusion ratio from 0 to each target
        total, out, prev = 0.0, [], 0.0
        for t in targets:
            xs = np.linspace(prev, t, 2 * sub + 1)
            h = (t - prev) / (2 * sub)
            ys = integrand(xs)
            total += h / 3.0 * (ys[0] + ys[-1] + 4 * ys[1::2].sum() + 2 * ys[2:-1:2].sum())
            out.append(total)
            prev = t
        return np.array(out)

    out = np.zeros_like(w_nodes)
    pos = np.where((w_nodes > 0) & (w_nodes < 1.0))[0]
    neg = np.where((w_nodes < 0) & (w_nodes > -1.0))[0][::-1]
    integral = np.zeros_like(w_nodes)
    integral[pos] = cumulative(w_nodes[pos])
    integral[neg] = cumulative(w_nodes[neg])
    interior = (w_nodes > -1.0) & (w_nodes < 1.0)
    wi = w_nodes[interior]
    dv = dfun(wi)
    out[interior] = np.exp(r * integral[interior]) / (dv * dv)
    return out


def g_inf(profile: StationaryOpinionProfile, grid: OpinionGrid) -> np.ndarray:
    """Stationary opinion profile on the grid nodes, discretely normalized."""
    w = grid.nodes
    if profile.variant == "case1":
        raw = _g_inf_case1(w, profile.kappa, profile.mbar, profile.sigma2)
    elif profile.variant == "case2":
        raw = _g_inf_case2(w, profile.kappa, profile.mbar, profile.sigma2)
    else:
        raw = _g_inf_generic(w, profile)
    mass = grid.dw * raw.sum()
    if not np.isfinite(mass) or mass <= 0:
        raise ValueError("stationary profile failed to normalize")
    return raw / mass


def f_inf_product(law: StationaryDegreeLaw, profile: StationaryOpinionProfile,
                  grid: OpinionGrid) -> DensityField:
    """Product stationary state g_inf(w) * rho_inf(c), discretely normalized."""
    crange = ConnectivityRange(law.c_max)
    return DensityField.from_product(g_inf(profile, grid), law.normalized(), grid, crange)
