"""Pure-numpy implementations of the hot kernels.

The compiled extension (netopinion._core) implements the same functions
with identical arithmetic (expression trees match and FMA contraction is
disabled there), so results are bit-identical across backends.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "pure-python"


def thomas_shared(dl: np.ndarray, d: np.ndarray, du: np.ndarray,
                  rhs: np.ndarray) -> np.ndarray:
    """Solve one tridiagonal system against many right-hand sides.

    dl, du have length M-1, d length M, rhs shape (R, M).
    """
    m = d.shape[0]
    r = rhs.shape[0]
    cp = np.empty(m - 1)
    x = np.empty((r, m))
    denom = d[0]
    x[:, 0] = rhs[:, 0] / denom
    for i in range(1, m):
        cp[i - 1] = du[i - 1] / denom
        denom = d[i] - dl[i - 1] * cp[i - 1]
        x[:, i] = (rhs[:, i] - dl[i - 1] * x[:, i - 1]) / denom
    for i in range(m - 2, -1, -1):
        x[:, i] = x[:, i] - cp[i] * x[:, i + 1]
    return x


def thomas_rows(dl: np.ndarray, d: np.ndarray, du: np.ndarray,
                rhs: np.ndarray) -> np.ndarray:
    """Solve R independent tridiagonal systems, one per row.

    dl, du shape (R, M-1), d and rhs shape (R, M).
    """
    r, m = d.shape
    cp = np.empty((r, m - 1))
    x = np.empty((r, m))
    denom = d[:, 0].copy()
    x[:, 0] = rhs[:, 0] / denom
    for i in range(1, m):
        cp[:, i - 1] = du[:, i - 1] / denom
        denom = d[:, i] - dl[:, i - 1] * cp[:, i - 1]
        x[:, i] = (rhs[:, i] - dl[:, i - 1] * x[:, i - 1]) / denom
    for i in range(m - 2, -1, -1):
        x[:, i] = x[:, i] - cp[:, i] * x[:, i + 1]
    return x


def cc_explicit_update(f: np.ndarray, lam: np.ndarray, delta: np.ndarray,
                       chalf: np.ndarray, dt: float, dw: float) -> np.ndarray:
    """Flux-form explicit step with zero boundary fluxes.

    f has shape (N+1, C), the half-point arrays shape (N, C).  Returns the
    updated field f + dt/dw * (F_{i+1/2} - F_{i-1/2}).
    """
    up = (1.0 - delta) * lam + 1.0
    lo = delta * lam - 1.0
    flux = (chalf / dw) * (up * f[1:] + lo * f[:-1])
    coef = dt / dw
    out = np.empty_like(f)
    out[0] = f[0] + coef * flux[0]
    out[1:-1] = f[1:-1] + coef * (flux[1:] - flux[:-1])
    out[-1] = f[-1] - coef * flux[-1]
    return out


def mc_network_update(c: np.ndarray, u_add: np.ndarray, u_rem: np.ndarray,
                      dt: float, vr: float, va: float, alpha: float,
                      beta: float, gamma_n: float, c_max: int) -> np.ndarray:
    """Per-particle link creation then removal, probabilities from pre-step c."""
    cf = c.astype(np.float64)
    pa = (dt * va) * (cf + alpha) / (gamma_n + alpha)
    pr = (dt * vr) * (cf + beta) / (gamma_n + beta)
    c1 = c + ((c <= c_max - 1) & (u_add < pa))
    return c1 - ((c1 >= 1) & (u_rem < pr))


def mc_collision_update(w1: np.ndarray, w2: np.ndarray, p12: np.ndarray,
                        p21: np.ndarray, d1: np.ndarray, d2: np.ndarray,
                        xi1: np.ndarray, xi2: np.ndarray,
                        interact: np.ndarray, eps: float):
    """Scaled binary exchange with whole-pair rejection outside [-1, 1]."""
    cand1 = w1 + (eps * p12) * (w2 - w1) + xi1 * d1
    cand2 = w2 + (eps * p21) * (w1 - w2) + xi2 * d2
    ok = interact & (np.abs(cand1) <= 1.0) & (np.abs(cand2) <= 1.0)
    return np.where(ok, cand1, w1), np.where(ok, cand2, w2)
