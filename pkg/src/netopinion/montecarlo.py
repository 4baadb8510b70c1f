"""Stochastic particle solver.

A population of (opinion, connectivity) samples evolves by first-order
splitting: a per-particle connection add/remove sweep with probabilities
built from the empirical mean connectivity, then a binary-exchange sweep
over a random disjoint pairing in the quasi-invariant scaling (compromise
strength epsilon, interaction probability dt/epsilon, noise variance
epsilon*sigma2).  Pair updates that would leave [-1, 1] are discarded
whole, so the opinion bounds hold by construction.

All randomness flows through one seeded generator in a fixed draw order,
so trajectories are reproducible and backend-independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend as backend
from .grids import (
    ConnectivityRange,
    DensityField,
    ModelParams,
    OpinionGrid,
    TimeStepError,
)
from .kernels import DiffusionFunction, InteractionKernel

__all__ = [
    "Ensemble",
    "sample_initial",
    "admissible_dt_network",
    "network_step",
    "collision_step",
    "reconstruct_density",
    "MCSchedule",
    "MCResult",
    "run_mc",
]


@dataclass
class Ensemble:
    """Particle population with its random stream."""

    w: np.ndarray
    c: np.ndarray
    rng: np.random.Generator

    def __post_init__(self):
        if self.w.shape != self.c.shape or self.w.ndim != 1:
            raise ValueError("w and c must be 1-D arrays of equal length")
        if self.w.size % 2 != 0:
            raise ValueError("particle count must be even (disjoint pairing)")

    @property
    def size(self) -> int:
        return self.w.size

    def empirical_gamma(self) -> float:
        return float(self.c.mean())

    def mean_opinion(self) -> float:
        return float(self.w.mean())


def sample_initial(density: DensityField, n_samples: int, seed: int) -> Ensemble:
    """Inverse-CDF sampling: connectivity from the degree marginal, then the
    opinion from the conditional profile, piecewise constant on cells."""
    if n_samples % 2 != 0:
        raise ValueError("n_samples must be even")
    if density.mass() <= 0:
        raise ValueError("cannot sample from a zero-mass density")
    rng = np.random.default_rng(seed)
    f = density.values
    grid, crange = density.grid, density.crange

    rho = density.marginal_rho()
    rho = rho / rho.sum()
    c_cdf = np.cumsum(rho)
    c_cdf[-1] = 1.0
    c = np.searchsorted(c_cdf, rng.random(n_samples), side="right").astype(np.int64)
    c = np.minimum(c, crange.c_max)

    u_node = rng.random(n_samples)
    u_cell = rng.random(n_samples)
    nodes = grid.nodes
    idx = np.empty(n_samples, dtype=np.int64)
    for level in np.unique(c):
        col = f[:, level]
        total = col.sum()
        sel = c == level
        if total <= 0:
            # empty column can only be hit through roundoff in the cdf
            idx[sel] = 0
            continue
        cdf = np.cumsum(col / total)
        cdf[-1] = 1.0
        idx[sel] = np.searchsorted(cdf, u_node[sel], side="right")
    w = nodes[idx] + (u_cell - 0.5) * grid.dw
    np.clip(w, -1.0, 1.0, out=w)
    return Ensemble(w=w, c=c, rng=rng)


def admissible_dt_network(gamma_n: float, params: ModelParams, c_max: int) -> float:
    """Per-agent sampling bound keeping both event probabilities <= 1."""
    if not params.constant_rates:
        raise ValueError("the particle network sweep uses constant rates")
    vr, va = params.rates.v_r, params.rates.v_a
    bounds = []
    if vr > 0:
        bounds.append((gamma_n + params.beta) / (vr * (c_max + params.beta)))
    if va > 0:
        bounds.append((gamma_n + params.alpha) / (va * (c_max + params.alpha)))
    return min(bounds) if bounds else float("inf")


def network_step(ens: Ensemble, params: ModelParams, dt: float,
                 crange: ConnectivityRange) -> Ensemble:
    """One add-then-remove sweep; probabilities use the pre-step counts."""
    gamma_n = ens.empirical_gamma()
    dt_max = admissible_dt_network(gamma_n, params, crange.c_max)
    if dt > dt_max:
        raise TimeStepError(dt, dt_max, "network sweep")
    u_add = ens.rng.random(ens.size)
    u_rem = ens.rng.random(ens.size)
    ens.c = backend.mc_network_update(
        ens.c, u_add, u_rem, dt, params.rates.v_r, params.rates.v_a,
        params.alpha, params.beta, gamma_n, crange.c_max)
    return ens


def collision_step(ens: Ensemble, dt: float, kernel: InteractionKernel,
                   diffusion: DiffusionFunction, epsilon: float,
                   sigma2: float) -> Ensemble:
    """Scaled binary-exchange sweep over a random disjoint pairing."""
    if dt > epsilon:
        raise TimeStepError(dt, epsilon, "collision sweep")
    n = ens.size
    perm = ens.rng.permutation(n)
    i1, i2 = perm[0::2], perm[1::2]
    u_int = ens.rng.random(n // 2)
    half_width = np.sqrt(3.0 * epsilon * sigma2)  # centered, variance eps*sigma2
    xi1 = ens.rng.uniform(-half_width, half_width, n // 2)
    xi2 = ens.rng.uniform(-half_width, half_width, n // 2)

    w1, w2 = ens.w[i1], ens.w[i2]
    c1, c2 = ens.c[i1], ens.c[i2]
    p12 = np.ascontiguousarray(kernel.p(w1, w2, c1, c2), dtype=np.float64)
    p21 = np.ascontiguousarray(kernel.p(w2, w1, c2, c1), dtype=np.float64)
    d1 = np.ascontiguousarray(diffusion.d(w1, c1), dtype=np.float64)
    d2 = np.ascontiguousarray(diffusion.d(w2, c2), dtype=np.float64)
    interact = (u_int < dt / epsilon).view(np.uint8)

    new1, new2 = backend.mc_collision_update(
        np.ascontiguousarray(w1), np.ascontiguousarray(w2), p12, p21,
        d1, d2, xi1, xi2, interact, epsilon)
    ens.w[i1] = new1
    ens.w[i2] = new2
    return ens


def reconstruct_density(ens: Ensemble, grid: OpinionGrid,
                        crange: ConnectivityRange) -> DensityField:
    """Histogram on node-centered opinion cells x connectivity levels."""
    idx = np.clip(np.rint((ens.w + 1.0) / grid.dw).astype(np.int64), 0, grid.n)
    flat = idx * (crange.c_max + 1) + np.clip(ens.c, 0, crange.c_max)
    counts = np.bincount(flat, minlength=(grid.n + 1) * (crange.c_max + 1))
    values = counts.reshape(grid.n + 1, crange.c_max + 1) / (ens.size * grid.dw)
    return DensityField(values, grid, crange)


@dataclass
class MCSchedule:
    t_final: float
    dt: float
    epsilon: float
    snapshot_times: tuple = ()
    record_every: int = 10


@dataclass
class MCResult:
    times: np.ndarray
    gamma: np.ndarray
    mean_opinion: np.ndarray
    snapshots: list
    ensemble: Ensemble


def run_mc(field0: DensityField, params: ModelParams, kernel: InteractionKernel,
           diffusion: DiffusionFunction, schedule: MCSchedule, n_samples: int,
           seed: int, network: bool = True, collisions: bool = True) -> MCResult:
    """Splitting loop: network sweep, then collision sweep, per time step.

    The step size adapts to min(requested dt, network bound, epsilon) so the
    preconditions of both sweeps hold throughout.
    """
    ens = sample_initial(field0, n_samples, seed)
    grid, crange = field0.grid, field0.crange
    eps = schedule.epsilon
    snap_times = sorted(schedule.snapshot_times)
    snaps = []
    rows = {"t": [], "gamma": [], "mean": []}

    def record(t):
        rows["t"].append(t)
        rows["gamma"].append(ens.empirical_gamma())
        rows["mean"].append(ens.mean_opinion())

    t, step = 0.0, 0
    record(t)
    while t < schedule.t_final - 1e-12:
        dt = min(schedule.dt, eps, schedule.t_final - t)
        if network:
            dt = min(dt, admissible_dt_network(ens.empirical_gamma(), params, crange.c_max))
        if snap_times and t < snap_times[0] < t + dt:
            dt = max(snap_times[0] - t, 1e-12)
        if network:
            network_step(ens, params, dt, crange)
        if collisions:
            collision_step(ens, dt, kernel, diffusion, eps, params.sigma2)
        t += dt
        step += 1
        if step % schedule.record_every == 0 or t >= schedule.t_final - 1e-12:
            record(t)
        if snap_times and t >= snap_times[0] - 1e-9:
            snaps.append((t, reconstruct_density(ens, grid, crange)))
            snap_times.pop(0)

    return MCResult(
        times=np.array(rows["t"]),
        gamma=np.array(rows["gamma"]),
        mean_opinion=np.array(rows["mean"]),
        snapshots=snaps,
        ensemble=ens,
    )
