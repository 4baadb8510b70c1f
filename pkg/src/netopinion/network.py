"""Connectivity-evolution operator and the closed degree-distribution dynamics.

The operator moves density between adjacent connectivity levels through
pairwise link removal and creation.  Density evolves by df/dt + N[f] = 0
(plus the opinion exchange), so the explicit degree step below subtracts
the operator.  Level sums telescope to zero, which is the discrete form of
agent conservation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import (
    DegenerateConnectivityError,
    DensityField,
    ModelParams,
    NEGATIVE_TOL,
    Remark1Rates,
    TimeStepError,
)

__all__ = [
    "RateEvaluation",
    "evaluate_rates",
    "apply_network_operator",
    "apply_degree_operator",
    "admissible_dt_rho",
    "step_rho_explicit",
    "gamma_derivative",
]

# Rows whose opinion marginal falls below this fraction of the peak are
# treated as empty in Remark-1 mode: no agents, no events.
EMPTY_ROW_FRACTION = 1e-14


@dataclass(frozen=True)
class RateEvaluation:
    """Removal/creation intensities per opinion node."""

    vr: np.ndarray
    va: np.ndarray

    def __post_init__(self):
        for name, v in (("vr", self.vr), ("va", self.va)):
            a = np.asarray(v, dtype=np.float64)
            if not np.all(np.isfinite(a)) or (a < 0).any():
                raise ValueError(f"{name} must be finite and nonnegative")


def evaluate_rates(field: DensityField, params: ModelParams) -> RateEvaluation:
    """Evaluate V_r, V_a on the opinion nodes for the given field."""
    n1 = field.grid.n + 1
    if params.constant_rates:
        return RateEvaluation(
            vr=np.full(n1, params.rates.v_r),
            va=np.full(n1, params.rates.v_a),
        )
    rates: Remark1Rates = params.rates
    g = field.marginal_g()
    gamma_f = field.gamma_f()
    gamma = field.gamma()
    floor = EMPTY_ROW_FRACTION * g.max() if g.max() > 0 else 0.0
    den_r = gamma_f + params.beta * g
    den_a = gamma_f + params.alpha * g
    occupied = g > floor
    vr = np.zeros(n1)
    va = np.zeros(n1)
    live_r = occupied & (den_r > 0)
    live_a = occupied & (den_a > 0)
    vr[live_r] = rates.u_r * (gamma + params.beta) / den_r[live_r]
    va[live_a] = rates.u_a * (gamma + params.alpha) / den_a[live_a]
    return RateEvaluation(vr=vr, va=va)


def apply_degree_operator(rows: np.ndarray, coef_r: np.ndarray, coef_a: np.ndarray,
                          alpha: float, beta: float) -> np.ndarray:
    """Operator applied along the last axis of ``rows`` (shape (..., c_max+1)).

    coef_r = 2 V_r / (gamma + beta) and coef_a = 2 V_a / (gamma + alpha),
    broadcastable against the leading axes.  Works on signed inputs, which
    the moment system needs.
    """
    f = np.asarray(rows, dtype=np.float64)
    cmax = f.shape[-1] - 1
    c = np.arange(cmax + 1, dtype=np.float64)
    out = np.zeros_like(f)

    # interior levels 1..c_max-1
    ci = c[1:-1]
    removal = (ci + 1.0 + beta) * f[..., 2:] - (ci + beta) * f[..., 1:-1]
    adding = (ci - 1.0 + alpha) * f[..., :-2] - (ci + alpha) * f[..., 1:-1]
    out[..., 1:-1] = -coef_r[..., None] * removal - coef_a[..., None] * adding

    # boundaries: no removal from level 0, no creation at level c_max
    out[..., 0] = -coef_r * (beta + 1.0) * f[..., 1] + coef_a * alpha * f[..., 0]
    out[..., -1] = (
        coef_r * (cmax + beta) * f[..., -1]
        - coef_a * (cmax - 1.0 + alpha) * f[..., -2]
    )
    return out


def _check_gamma(gamma: float, params: ModelParams) -> None:
    if gamma + params.alpha <= 0 or gamma + params.beta <= 0:
        raise DegenerateConnectivityError(
            f"gamma={gamma:g} with alpha={params.alpha:g}, beta={params.beta:g} "
            "makes the operator prefactors singular"
        )


def apply_network_operator(field: DensityField, rates: RateEvaluation,
                           params: ModelParams) -> np.ndarray:
    """N[f] on the full field, gamma taken from the field itself."""
    gamma = field.gamma()
    _check_gamma(gamma, params)
    coef_r = 2.0 * rates.vr / (gamma + params.beta)
    coef_a = 2.0 * rates.va / (gamma + params.alpha)
    return apply_degree_operator(field.values, coef_r, coef_a, params.alpha, params.beta)


def admissible_dt_rho(rho: np.ndarray, params: ModelParams) -> float:
    """Positivity bound for the explicit degree step.

    The forward-Euler diagonal must stay nonnegative, which requires
    dt * (v_r (c_max + beta) + v_a (c_max + alpha)) <= 1 with the pairwise
    factor 2 inside v_r, v_a.  This is sharper (by at most a factor 2) than
    the bound quoted for the per-agent sampling probabilities, which do not
    carry the factor 2.
    """
    if not params.constant_rates:
        raise ValueError("the closed degree dynamics requires constant rates")
    rho = np.asarray(rho, dtype=np.float64)
    cmax = rho.size - 1
    gamma = float(np.arange(cmax + 1) @ rho)
    _check_gamma(gamma, params)
    vr = 2.0 * params.rates.v_r / (gamma + params.beta)
    va = 2.0 * params.rates.v_a / (gamma + params.alpha)
    drain = vr * (cmax + params.beta) + va * (cmax + params.alpha)
    return float("inf") if drain == 0.0 else 1.0 / drain


def step_rho_explicit(rho: np.ndarray, params: ModelParams, dt: float) -> np.ndarray:
    """One forward-Euler step of the closed degree dynamics.

    gamma is re-evaluated from the current distribution.  Steps above the
    positivity bound are rejected before any work.
    """
    rho = np.asarray(rho, dtype=np.float64)
    dt_max = admissible_dt_rho(rho, params)
    if dt > dt_max:
        raise TimeStepError(dt, dt_max, "degree step")
    cmax = rho.size - 1
    gamma = float(np.arange(cmax + 1) @ rho)
    coef_r = np.float64(2.0 * params.rates.v_r / (gamma + params.beta))
    coef_a = np.float64(2.0 * params.rates.v_a / (gamma + params.alpha))
    out = rho - dt * apply_degree_operator(rho, coef_r, coef_a, params.alpha, params.beta)
    low = out.min()
    if low < 0.0:
        if low < -NEGATIVE_TOL * max(out.max(), 1e-300):
            raise ValueError(
                f"degree step produced material negatives ({low:g}); dt bound violated"
            )
        out = np.where(out < 0.0, 0.0, out)
    return out


def gamma_derivative(field: DensityField, rates: RateEvaluation,
                     params: ModelParams) -> float:
    """Time derivative of the mean connectivity.

    Quadrature of the four-term expression: bulk removal and creation
    exchange, the blocked-removal correction at level 0 and the blocked
    creation at c_max.
    """
    gamma = field.gamma()
    _check_gamma(gamma, params)
    dw = field.grid.dw
    g = field.marginal_g()
    gamma_f = field.gamma_f()
    f0 = field.values[:, 0]
    fmax = field.values[:, -1]
    cmax = field.crange.c_max
    a, b = params.alpha, params.beta

    bulk_r = -2.0 * dw * np.sum(rates.vr * (gamma_f + b * g)) / (gamma + b)
    bulk_a = 2.0 * dw * np.sum(rates.va * (gamma_f + a * g)) / (gamma + a)
    bdry_0 = 2.0 * b / (gamma + b) * dw * np.sum(rates.vr * f0)
    bdry_max = -2.0 * (cmax + a) / (gamma + a) * dw * np.sum(rates.va * fmax)
    return float(bulk_r + bulk_a + bdry_0 + bdry_max)
