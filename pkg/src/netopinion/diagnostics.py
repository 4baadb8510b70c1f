"""Moments, the closed moment ODE system, error norms and cluster counts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import DensityField, ModelParams, TimeStepError
from .network import admissible_dt_rho, apply_degree_operator

__all__ = [
    "MomentRecord",
    "compute_moments",
    "MomentTrajectory",
    "solve_moment_system",
    "l1_relative_error",
    "count_clusters",
]


@dataclass(frozen=True)
class MomentRecord:
    t: float
    rho: np.ndarray
    m_w: np.ndarray
    e_w: np.ndarray
    gamma: float
    total_mean: float
    mass: float


def compute_moments(field: DensityField, t: float = 0.0) -> MomentRecord:
    """Degree marginal plus first and second opinion moments per level."""
    dw = field.grid.dw
    w = field.grid.nodes
    rho = field.marginal_rho()
    m_w = dw * (w @ field.values)
    e_w = dw * ((w * w) @ field.values)
    return MomentRecord(
        t=t,
        rho=rho,
        m_w=m_w,
        e_w=e_w,
        gamma=float(field.crange.values @ rho),
        total_mean=float(m_w.sum()),
        mass=float(rho.sum()),
    )


@dataclass
class MomentTrajectory:
    times: np.ndarray
    rho: np.ndarray  # (steps, c_max+1)
    m_w: np.ndarray
    e_w: np.ndarray


def solve_moment_system(rho0: np.ndarray, m0: np.ndarray, e0: np.ndarray,
                        params: ModelParams, t_final: float,
                        dt: float | None = None) -> MomentTrajectory:
    """Integrate the closed (rho, m, E) system for P == 1 and no noise.

    rho and m relax under the linear connectivity operator alone; the
    second moment additionally feels the binary exchange,

        dE/dt + L[E] = lambda [ -2 eta (E - m mbar)
                                + eta^2 (E - 2 m mbar + rho Ebar) ],

    the exact second-moment balance of the compromise rule (the drift and
    squared-compromise terms), which contracts the total variance at rate
    2 eta (1 - eta) lambda.  Only constant rates are admissible.
    """
    if not params.constant_rates:
        raise ValueError("the closed moment system requires constant rates")
    if params.eta is None or params.lambda_freq is None:
        raise ValueError("the moment system needs eta and lambda_freq")
    eta, lam = params.eta, params.lambda_freq

    rho = np.asarray(rho0, dtype=np.float64).copy()
    m = np.asarray(m0, dtype=np.float64).copy()
    e = np.asarray(e0, dtype=np.float64).copy()
    if not rho.shape == m.shape == e.shape:
        raise ValueError("rho0, m0, e0 must share one shape")

    relax = 2.0 * eta * (1.0 - eta) * lam
    out_t, out_rho, out_m, out_e = [0.0], [rho.copy()], [m.copy()], [e.copy()]
    t = 0.0
    while t < t_final - 1e-12:
        dt_net = admissible_dt_rho(rho, params)
        step = min(dt if dt is not None else np.inf,
                   0.9 * dt_net,
                   0.2 / relax if relax > 0 else np.inf,
                   t_final - t)
        if dt is not None and dt > dt_net:
            raise TimeStepError(dt, dt_net, "moment step")
        cmax = rho.size - 1
        gamma = float(np.arange(cmax + 1) @ rho)
        coef_r = np.float64(2.0 * params.rates.v_r / (gamma + params.beta))
        coef_a = np.float64(2.0 * params.rates.v_a / (gamma + params.alpha))

        def l_op(v):
            return apply_degree_operator(v, coef_r, coef_a, params.alpha, params.beta)

        mbar = m.sum()
        ebar = e.sum()
        exchange = lam * (-2.0 * eta * (e - m * mbar)
                          + eta * eta * (e - 2.0 * m * mbar + rho * ebar))
        rho, m, e = (rho - step * l_op(rho),
                     m - step * l_op(m),
                     e - step * l_op(e) + step * exchange)
        t += step
        out_t.append(t)
        out_rho.append(rho.copy())
        out_m.append(m.copy())
        out_e.append(e.copy())

    return MomentTrajectory(
        times=np.array(out_t),
        rho=np.array(out_rho),
        m_w=np.array(out_m),
        e_w=np.array(out_e),
    )


def l1_relative_error(g_num: np.ndarray, g_ref: np.ndarray) -> float:
    """sum |num - ref| / sum |ref| over matching shapes."""
    num = np.asarray(g_num, dtype=np.float64)
    ref = np.asarray(g_ref, dtype=np.float64)
    if num.shape != ref.shape:
        raise ValueError(f"shape mismatch {num.shape} vs {ref.shape}")
    denom = np.abs(ref).sum()
    if denom == 0.0:
        raise ValueError("reference profile is identically zero")
    return float(np.abs(num - ref).sum() / denom)


def count_clusters(g: np.ndarray, prominence_threshold: float = 0.1,
                   smooth: bool = True) -> int:
    """Strict interior maxima of g above threshold * max, after one
    3-point moving average (histogram and scheme noise suppression)."""
    g = np.asarray(g, dtype=np.float64)
    if (g < 0).any():
        raise ValueError("profile must be nonnegative")
    if g.size < 3:
        return 0
    if smooth:
        s = g.copy()
        s[1:-1] = (g[:-2] + g[1:-1] + g[2:]) / 3.0
    else:
        s = g
    peak = s.max()
    if peak <= 0:
        return 0
    interior = s[1:-1]
    is_max = (interior > s[:-2]) & (interior > s[2:])
    return int(np.sum(is_max & (interior > prominence_threshold * peak)))
