"""Experiment configuration, named presets and artifact output.

Configs are flat ``key = value`` text files (``#`` starts a comment).
Unknown keys are rejected with their line number.  Presets fill in the
tabulated parameter sets of the four study cases plus the degree-law
family run; explicit keys override preset values.

Artifacts per run: ``snapshot_t*.csv`` (full field, header ``w,c,f``),
marginal files (``w,g`` and ``c,rho``), a diagnostics time series
(``t,mass,gamma,mean_opinion,l1_error``) and ``manifest.json`` with every
parameter, the seed, the dt history and wall time.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import _backend
from .diagnostics import compute_moments, l1_relative_error, solve_moment_system
from .fokkerplanck import FPSchedule, FPSolver, QuadratureRule
from .grids import (
    ConnectivityRange,
    ConstantRates,
    DensityField,
    ModelParams,
    OpinionGrid,
    Remark1Rates,
)
from .kernels import (
    DiffusionFunction,
    InteractionKernel,
    bounded_confidence_kernel,
    connectivity_power_kernel,
    constant_diffusion,
    local_compromise_kernel,
    quadratic_diffusion,
    unity_kernel,
)
from .montecarlo import MCSchedule, run_mc
from .network import admissible_dt_rho, step_rho_explicit
from .stationary import StationaryDegreeLaw, StationaryOpinionProfile, g_inf

__all__ = [
    "ExperimentConfig",
    "ConfigError",
    "load_config",
    "preset_config",
    "build_initial_field",
    "run_experiment",
    "PRESET_NAMES",
]


class ConfigError(ValueError):
    """Schema violation in a config file."""


def _parse_floats(s: str) -> tuple:
    return tuple(float(x) for x in s.split(",") if x.strip())


# key -> (parser, default)
_SCHEMA = {
    "preset": (str, None),
    "solver": (str, "fp"),
    "quadrature": (str, "midpoint"),
    "n_grid": (int, 80),
    "c_max": (int, 250),
    "t_final": (float, 10.0),
    "dt": (str, "auto"),
    "seed": (int, 7071),
    "out_dir": (str, "runs/out"),
    "snapshot_times": (_parse_floats, ()),
    "alpha": (float, 0.1),
    "beta": (float, 0.0),
    "sigma2": (float, 5e-2),
    "rate_mode": (str, "constant"),
    "v_r": (float, None),
    "v_a": (float, None),
    "u_r": (float, None),
    "u_a": (float, None),
    "epsilon": (float, 5e-4),
    "n_samples": (int, 100000),
    "kernel": (str, "unity"),
    "bc_delta": (float, 0.25),
    "bc_d0": (float, None),
    "k_a": (float, 3.0),
    "k_b": (float, 3.0),
    "diffusion": (str, "quadratic"),
    "initial": (str, "test1_g0"),
    "gamma0": (float, 30.0),
    "w0": (float, 0.0),
    "c0": (int, 20),
    "sigma_f2": (float, 6e-2),
    "sigma_l2": (float, 2.5e-2),
    "oracle": (str, "auto"),
}

_VALID = {
    "solver": {"mc", "fp", "network-only", "moments"},
    "quadrature": {"midpoint", "milne"},
    "rate_mode": {"constant", "remark1"},
    "kernel": {"unity", "local", "bounded_confidence", "connectivity_power"},
    "oracle": {"auto", "none"},
}

PRESET_NAMES = ("test1", "test2", "test3", "test4", "fig1")

_PRESETS: dict[str, dict] = {
    # linear compromise, quadratic diffusion, bimodal opinion data
    "test1": dict(solver="fp", kernel="unity", diffusion="quadratic",
                  initial="test1_g0", sigma2=5e-2, sigma_f2=6e-2, c_max=250,
                  v_r=1.0, v_a=1.0, gamma0=30.0, alpha=0.1, beta=0.0,
                  n_grid=80, t_final=10.0, dt="paper:test1"),
    # coupled run toward the product stationary state; rates are chosen
    # per run and remain required
    "test2": dict(solver="fp", kernel="unity", diffusion="quadratic",
                  initial="test2_f0", sigma2=5e-2, sigma_f2=6e-2, c_max=250,
                  gamma0=30.0, alpha=0.1, beta=0.0,
                  n_grid=80, t_final=20.0, dt="auto"),
    # connectivity-weighted compromise: a concentrated, highly connected
    # minority drags the mean opinion
    "test3": dict(solver="fp", kernel="connectivity_power", k_a=3.0, k_b=3.0,
                  diffusion="quadratic", initial="test3_f0",
                  sigma2=5e-3, sigma_f2=4e-2, sigma_l2=2.5e-2, c_max=250,
                  v_r=1.0, v_a=1.0, gamma0=30.0, alpha=1e-4, beta=0.0,
                  n_grid=80, t_final=2.5, dt="auto", oracle="none"),
    # bounded confidence from uniform opinion data
    "test4": dict(solver="fp", kernel="bounded_confidence", bc_delta=0.25,
                  diffusion="quadratic", initial="test4_uniform",
                  sigma2=1e-3, c_max=250, v_r=1.0, v_a=1.0, gamma0=30.0,
                  alpha=0.1, beta=0.0, n_grid=80, t_final=100.0, dt="auto",
                  oracle="none"),
    # degree-law family: pure connectivity evolution at large c_max
    "fig1": dict(solver="network-only", c_max=1500, v_r=1.0, v_a=1.0,
                 gamma0=30.0, alpha=0.1, beta=0.0, t_final=400.0, dt="auto",
                 initial="dirac"),
}


@dataclass(frozen=True)
class ExperimentConfig:
    preset: str | None = None
    solver: str = "fp"
    quadrature: str = "midpoint"
    n_grid: int = 80
    c_max: int = 250
    t_final: float = 10.0
    dt: str = "auto"
    seed: int = 7071
    out_dir: str = "runs/out"
    snapshot_times: tuple = ()
    alpha: float = 0.1
    beta: float = 0.0
    sigma2: float = 5e-2
    rate_mode: str = "constant"
    v_r: float | None = None
    v_a: float | None = None
    u_r: float | None = None
    u_a: float | None = None
    epsilon: float = 5e-4
    n_samples: int = 100000
    kernel: str = "unity"
    bc_delta: float = 0.25
    bc_d0: float | None = None
    k_a: float = 3.0
    k_b: float = 3.0
    diffusion: str = "quadratic"
    initial: str = "test1_g0"
    gamma0: float = 30.0
    w0: float = 0.0
    c0: int = 20
    sigma_f2: float = 6e-2
    sigma_l2: float = 2.5e-2
    oracle: str = "auto"

    def validate(self) -> "ExperimentConfig":
        for key, allowed in _VALID.items():
            if getattr(self, key) not in allowed:
                raise ConfigError(f"{key}={getattr(self, key)!r} not in {sorted(allowed)}")
        if self.rate_mode == "constant" and (self.v_r is None or self.v_a is None):
            raise ConfigError("constant rate_mode requires keys v_r and v_a")
        if self.rate_mode == "remark1" and (self.u_r is None or self.u_a is None):
            raise ConfigError("remark1 rate_mode requires keys u_r and u_a")
        if self.dt not in ("auto",) and not self.dt.startswith(("fixed:", "paper:")):
            raise ConfigError(f"dt policy {self.dt!r}; use auto, fixed:<value> or paper:test1")
        if self.solver == "mc" and self.n_samples % 2:
            raise ConfigError("n_samples must be even")
        return self


def preset_config(name: str, **overrides) -> ExperimentConfig:
    if name not in _PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    merged = dict(_PRESETS[name])
    merged.update(overrides)
    cfg = ExperimentConfig(preset=name, **merged)
    return cfg.validate()


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse and validate a key-value config file."""
    raw: dict[str, object] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        parser, _ = _SCHEMA[key]
        try:
            raw[key] = parser(value)
        except Exception as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc

    preset = raw.pop("preset", None)
    if preset is not None:
        return preset_config(str(preset), **raw)
    return ExperimentConfig(**raw).validate()


# -- model assembly -------------------------------------------------------

def build_params(cfg: ExperimentConfig) -> ModelParams:
    if cfg.rate_mode == "constant":
        rates = ConstantRates(v_r=cfg.v_r, v_a=cfg.v_a)
    else:
        rates = Remark1Rates(u_r=cfg.u_r, u_a=cfg.u_a)
    return ModelParams(alpha=cfg.alpha, beta=cfg.beta, rates=rates,
                       sigma2=cfg.sigma2, epsilon=cfg.epsilon)


def build_kernel(cfg: ExperimentConfig) -> InteractionKernel:
    if cfg.kernel == "unity":
        return unity_kernel()
    if cfg.kernel == "local":
        return local_compromise_kernel()
    if cfg.kernel == "bounded_confidence":
        if cfg.bc_d0 is not None:
            return bounded_confidence_kernel(d0=cfg.bc_d0, c_max=cfg.c_max)
        return bounded_confidence_kernel(delta=cfg.bc_delta)
    return connectivity_power_kernel(cfg.k_a, cfg.k_b, cfg.c_max)


def build_diffusion(cfg: ExperimentConfig) -> DiffusionFunction:
    if cfg.diffusion == "quadratic":
        return quadratic_diffusion()
    if cfg.diffusion.startswith("constant:"):
        return constant_diffusion(float(cfg.diffusion.split(":", 1)[1]))
    raise ConfigError(f"unknown diffusion {cfg.diffusion!r}")


def _bimodal_g(w: np.ndarray, sigma_f2: float) -> np.ndarray:
    z = 1.0 / (2.0 * np.sqrt(2.0 * np.pi * sigma_f2))
    return z * (np.exp(-((w + 0.5) ** 2) / (2 * sigma_f2))
                + np.exp(-((w - 0.5) ** 2) / (2 * sigma_f2)))


def build_initial_field(cfg: ExperimentConfig, grid: OpinionGrid,
                        crange: ConnectivityRange) -> DensityField:
    w = grid.nodes
    c = crange.values
    name = cfg.initial

    if name == "test1_g0":
        # bimodal opinion profile, all agents at gamma0 connections
        f = np.zeros((grid.n + 1, crange.c_max + 1))
        f[:, int(round(cfg.gamma0))] = _bimodal_g(w, cfg.sigma_f2)
    elif name == "test2_f0":
        # two opinion camps on staggered connectivity bands; the band
        # profile is the parabola c (2 gamma0 - c) on [0, 2 gamma0]
        # (printed with reversed sign, which would put all mass past
        # 2 gamma0 and contradict the tabulated gamma0)
        cf = c.astype(np.float64)
        p0 = np.maximum(cf * (2.0 * cfg.gamma0 - cf), 0.0)
        shift = int(cfg.c0)
        p0_shift = np.zeros_like(p0)
        p0_shift[shift:] = p0[: p0.size - shift]
        z = 1.0 / np.sqrt(2.0 * np.pi * cfg.sigma_f2)
        g_minus = z * np.exp(-((w + 0.5) ** 2) / (2 * cfg.sigma_f2))
        g_plus = z * np.exp(-((w - 0.5) ** 2) / (2 * cfg.sigma_f2))
        f = (2.0 / 3.0) * np.outer(g_minus, p0) + (1.0 / 3.0) * np.outer(g_plus, p0_shift)
    elif name == "test3_f0":
        # follower band around w = -1/2 on connectivity 0..20, leader band
        # around w = +3/4 on 60..80; each band carries the closed-form
        # degree profile renormalized within the band, so the opinion
        # factors set the (larger) follower share
        law = StationaryDegreeLaw(cfg.gamma0, cfg.alpha, crange.c_max).pmf()
        lo = np.zeros_like(law)
        hi = np.zeros_like(law)
        lo[0:21] = law[0:21] / law[0:21].sum()
        hi[60:81] = law[60:81] / law[60:81].sum()
        followers = np.exp(-((w + 0.5) ** 2) / (2 * cfg.sigma_f2))
        leaders = np.exp(-((w - 0.75) ** 2) / (2 * cfg.sigma_l2))
        f = np.outer(followers, lo) + np.outer(leaders, hi)
    elif name == "test4_uniform":
        law = StationaryDegreeLaw(cfg.gamma0, cfg.alpha, crange.c_max).normalized()
        f = np.tile(0.5 * law, (grid.n + 1, 1))
    elif name == "dirac":
        f = np.zeros((grid.n + 1, crange.c_max + 1))
        i = int(np.argmin(np.abs(w - cfg.w0)))
        f[i, int(round(cfg.gamma0))] = 1.0
    elif name.startswith("file:"):
        f = _field_from_csv(name.split(":", 1)[1], grid, crange)
    else:
        raise ConfigError(f"unknown initial datum {name!r}")

    return DensityField(f, grid, crange).normalized()


def _field_from_csv(path: str, grid: OpinionGrid, crange: ConnectivityRange) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    if data.shape[0] != (grid.n + 1) * (crange.c_max + 1):
        raise ConfigError(
            f"{path}: expected {(grid.n + 1) * (crange.c_max + 1)} rows for the "
            f"configured grid, found {data.shape[0]}")
    return data[:, 2].reshape(grid.n + 1, crange.c_max + 1)


# -- artifact writing ------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_snapshot(path: Path, field: DensityField) -> None:
    w = field.grid.nodes
    lines = ["w,c,f"]
    for i in range(field.grid.n + 1):
        for cc in range(field.crange.c_max + 1):
            lines.append(f"{_fmt(w[i])},{cc},{_fmt(field.values[i, cc])}")
    path.write_text("\n".join(lines) + "\n")


def write_marginals(stem: Path, field: DensityField) -> None:
    w = field.grid.nodes
    g = field.marginal_g()
    rho = field.marginal_rho()
    g_lines = ["w,g"] + [f"{_fmt(w[i])},{_fmt(g[i])}" for i in range(w.size)]
    stem.with_name(stem.name + "_g.csv").write_text("\n".join(g_lines) + "\n")
    r_lines = ["c,rho"] + [f"{cc},{_fmt(rho[cc])}" for cc in range(rho.size)]
    stem.with_name(stem.name + "_rho.csv").write_text("\n".join(r_lines) + "\n")


def _write_diagnostics(path: Path, times, mass, gamma, mean, l1) -> None:
    lines = ["t,mass,gamma,mean_opinion,l1_error"]
    for k in range(len(times)):
        l1v = _fmt(l1[k]) if l1 is not None else ""
        lines.append(f"{_fmt(times[k])},{_fmt(mass[k])},{_fmt(gamma[k])},"
                     f"{_fmt(mean[k])},{l1v}")
    path.write_text("\n".join(lines) + "\n")


def _oracle_for(cfg: ExperimentConfig, field0: DensityField):
    """Reference state for the diagnostics error column, or None."""
    if cfg.oracle == "none":
        return None
    grid, crange = field0.grid, field0.crange
    if cfg.solver == "network-only":
        return StationaryDegreeLaw(cfg.gamma0, cfg.alpha, crange.c_max).normalized()
    if cfg.kernel != "unity" or cfg.diffusion != "quadratic":
        return None
    mbar = compute_moments(field0).total_mean
    profile = StationaryOpinionProfile(kappa=1.0, mbar=mbar, sigma2=cfg.sigma2)
    g = g_inf(profile, grid)
    if cfg.initial == "test1_g0":
        return g  # opinion marginal comparison
    law = StationaryDegreeLaw(cfg.gamma0, cfg.alpha, crange.c_max).normalized()
    return np.outer(g, law)


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run one configured experiment and write its artifacts."""
    cfg = cfg.validate()
    started = time.time()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = OpinionGrid(cfg.n_grid)
    crange = ConnectivityRange(cfg.c_max)
    params = build_params(cfg)
    field0 = build_initial_field(cfg, grid, crange)
    oracle = _oracle_for(cfg, field0)

    artifacts: dict[str, object] = {"out_dir": str(out)}
    dt_history: list = []

    if cfg.solver == "fp":
        dt = _dt_from_policy(cfg, grid)
        solver = FPSolver(grid, crange, params, build_kernel(cfg),
                          build_diffusion(cfg), QuadratureRule(cfg.quadrature))
        schedule = FPSchedule(t_final=cfg.t_final, dt=dt,
                              snapshot_times=cfg.snapshot_times)
        res = solver.run(field0, schedule, oracle=oracle)
        _write_diagnostics(out / "diagnostics.csv", res.times, res.mass,
                           res.gamma, res.mean_opinion, res.l1_error)
        for t, snap in [(0.0, field0)] + res.snapshots:
            stem = out / f"snapshot_t{t:g}"
            write_snapshot(out / f"snapshot_t{t:g}.csv", snap)
            write_marginals(stem, snap)
        dt_history = res.dt_history
        artifacts["min_value"] = res.min_value
    elif cfg.solver == "mc":
        schedule = MCSchedule(t_final=cfg.t_final, dt=_mc_dt(cfg),
                              epsilon=cfg.epsilon,
                              snapshot_times=cfg.snapshot_times)
        res = run_mc(field0, params, build_kernel(cfg), build_diffusion(cfg),
                     schedule, cfg.n_samples, cfg.seed)
        l1 = None
        if oracle is not None and res.snapshots:
            l1 = [_snapshot_error(s, oracle) for _, s in res.snapshots]
        _write_diagnostics(out / "diagnostics.csv", res.times,
                           np.ones_like(res.times), res.gamma,
                           res.mean_opinion, None)
        for t, snap in res.snapshots:
            stem = out / f"snapshot_t{t:g}"
            write_snapshot(out / f"snapshot_t{t:g}.csv", snap)
            write_marginals(stem, snap)
        if l1 is not None:
            artifacts["snapshot_l1"] = l1
    elif cfg.solver == "network-only":
        rho = field0.marginal_rho()
        times, gammas, l1s = [0.0], [float(crange.values @ rho)], []
        ref = oracle
        if ref is not None:
            l1s.append(l1_relative_error(rho, ref))
        t = 0.0
        while t < cfg.t_final - 1e-12:
            step = min(0.9 * admissible_dt_rho(rho, params), cfg.t_final - t)
            rho = step_rho_explicit(rho, params, step)
            t += step
            times.append(t)
            gammas.append(float(crange.values @ rho))
            if ref is not None:
                l1s.append(l1_relative_error(rho, ref))
        lines = ["c,rho"] + [f"{cc},{_fmt(rho[cc])}" for cc in range(rho.size)]
        (out / "rho_final.csv").write_text("\n".join(lines) + "\n")
        _write_diagnostics(out / "diagnostics.csv", np.array(times),
                           np.full(len(times), rho.sum()), np.array(gammas),
                           np.zeros(len(times)),
                           np.array(l1s) if ref is not None else None)
    else:  # moments
        if params.eta is None:
            params = ModelParams(alpha=params.alpha, beta=params.beta,
                                 rates=params.rates, sigma2=params.sigma2,
                                 epsilon=params.epsilon, eta=cfg.epsilon,
                                 lambda_freq=1.0 / cfg.epsilon)
        rec = compute_moments(field0)
        traj = solve_moment_system(rec.rho, rec.m_w, rec.e_w, params, cfg.t_final)
        lines = ["t,mass,gamma,mean_opinion,total_second_moment"]
        cvals = crange.values.astype(np.float64)
        for k, t in enumerate(traj.times):
            lines.append(
                f"{_fmt(t)},{_fmt(traj.rho[k].sum())},{_fmt(cvals @ traj.rho[k])},"
                f"{_fmt(traj.m_w[k].sum())},{_fmt(traj.e_w[k].sum())}")
        (out / "moments.csv").write_text("\n".join(lines) + "\n")

    manifest = {
        "config": asdict(cfg),
        "backend": _backend.BACKEND,
        "dt_history": [(int(s), float(d)) for s, d in dt_history],
        "wall_time_s": time.time() - started,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    artifacts["manifest"] = str(out / "manifest.json")
    return artifacts


def _snapshot_error(snap: DensityField, oracle: np.ndarray) -> float:
    cur = snap.marginal_g() if oracle.ndim == 1 else snap.values
    return l1_relative_error(cur, oracle)


def _dt_from_policy(cfg: ExperimentConfig, grid: OpinionGrid) -> float | None:
    if cfg.dt == "auto":
        return None
    if cfg.dt.startswith("fixed:"):
        return float(cfg.dt.split(":", 1)[1])
    if cfg.dt == "paper:test1":
        return grid.dw ** 2 / (4.0 * cfg.sigma2)
    raise ConfigError(f"unknown dt policy {cfg.dt!r}")


def _mc_dt(cfg: ExperimentConfig) -> float:
    if cfg.dt == "auto":
        return cfg.epsilon
    if cfg.dt.startswith("fixed:"):
        return float(cfg.dt.split(":", 1)[1])
    raise ConfigError(f"dt policy {cfg.dt!r} is not valid for the mc solver")
