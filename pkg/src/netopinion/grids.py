"""Opinion grid, connectivity range, density fields and model parameters.

These are the value objects shared by every solver.  A density is stored as
a matrix of cell averages ``f[i, c]`` over the opinion nodes
``w_i = -1 + i*dw`` (``i = 0..N``, ``dw = 2/N``) and the discrete
connectivity levels ``c = 0..c_max``.  The quadrature convention is a
uniform weight ``dw`` for all ``N+1`` nodes, so the discrete mass is
``dw * f.sum()``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

__all__ = [
    "OpinionGrid",
    "ConnectivityRange",
    "DensityField",
    "ConstantRates",
    "Remark1Rates",
    "ModelParams",
    "DegenerateDiffusionError",
    "DegenerateConnectivityError",
    "TimeStepError",
]

# Entries more negative than -NEGATIVE_TOL * max|f| indicate a violated
# time-step bound; anything shallower is roundoff and gets zeroed.
NEGATIVE_TOL = 1e-12


class DegenerateDiffusionError(ValueError):
    """Diffusion vanishes everywhere, so no noise bound exists."""


class DegenerateConnectivityError(ValueError):
    """gamma + alpha or gamma + beta is not positive."""


class TimeStepError(ValueError):
    """Requested time step violates a stability or positivity bound."""

    def __init__(self, dt: float, dt_max: float, what: str = "time step"):
        self.dt = dt
        self.dt_max = dt_max
        super().__init__(f"{what} dt={dt:g} exceeds admissible maximum {dt_max:g}")


@dataclass(frozen=True)
class OpinionGrid:
    """Uniform grid on [-1, 1] with N subintervals and N+1 nodes."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"grid needs at least 2 subintervals, got {self.n}")

    @property
    def dw(self) -> float:
        return 2.0 / self.n

    @property
    def nodes(self) -> np.ndarray:
        # linspace guarantees the endpoints are exactly -1 and +1
        return np.linspace(-1.0, 1.0, self.n + 1)

    @property
    def half_points(self) -> np.ndarray:
        """Interior half points w_{i+1/2}, i = 0..N-1."""
        nodes = self.nodes
        return 0.5 * (nodes[:-1] + nodes[1:])

    def quarter_points(self) -> np.ndarray:
        """Open 3-point abscissae per cell, shape (N, 3)."""
        left = self.nodes[:-1]
        h = self.dw / 4.0
        return np.stack([left + h, left + 2 * h, left + 3 * h], axis=1)


@dataclass(frozen=True)
class ConnectivityRange:
    """Discrete connectivity levels 0..c_max."""

    c_max: int

    def __post_init__(self):
        if self.c_max < 1:
            raise ValueError(f"c_max must be >= 1, got {self.c_max}")

    @property
    def size(self) -> int:
        return self.c_max + 1

    @property
    def values(self) -> np.ndarray:
        return np.arange(self.c_max + 1)


@dataclass(frozen=True)
class DensityField:
    """Nonnegative cell-average density on an opinion grid x connectivity range.

    The ``values`` array is made read-only; derive new fields instead of
    mutating.  Construction clips roundoff-level negatives to zero and
    rejects anything materially negative.
    """

    values: np.ndarray
    grid: OpinionGrid
    crange: ConnectivityRange

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        expected = (self.grid.n + 1, self.crange.c_max + 1)
        if v.shape != expected:
            raise ValueError(f"field shape {v.shape} does not match grid {expected}")
        scale = float(np.max(np.abs(v))) if v.size else 0.0
        if scale > 0 and float(v.min()) < -NEGATIVE_TOL * scale:
            raise ValueError(
                f"density has material negative entries (min {v.min():g}); "
                "this indicates a violated time-step bound"
            )
        v = np.where(v < 0.0, 0.0, v)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def mass(self) -> float:
        return float(self.grid.dw * self.values.sum())

    def normalized(self) -> "DensityField":
        m = self.mass()
        if m <= 0.0:
            raise ValueError("cannot normalize a zero-mass density")
        return DensityField(self.values / m, self.grid, self.crange)

    def marginal_rho(self) -> np.ndarray:
        """Degree distribution rho(c) = dw * sum_i f[i, c]."""
        return self.grid.dw * self.values.sum(axis=0)

    def marginal_g(self) -> np.ndarray:
        """Opinion profile g_i = sum_c f[i, c]."""
        return self.values.sum(axis=1)

    def gamma(self) -> float:
        """Mean connectivity sum_c c * rho(c)."""
        return float(self.crange.values @ self.marginal_rho())

    def gamma_f(self) -> np.ndarray:
        """Connectivity first moment per opinion node, sum_c c * f[i, c]."""
        return self.values @ self.crange.values.astype(np.float64)

    @staticmethod
    def from_product(g: np.ndarray, rho: np.ndarray, grid: OpinionGrid,
                     crange: ConnectivityRange, normalize: bool = True) -> "DensityField":
        f = np.outer(np.asarray(g, dtype=np.float64), np.asarray(rho, dtype=np.float64))
        out = DensityField(f, grid, crange)
        return out.normalized() if normalize else out


@dataclass(frozen=True)
class ConstantRates:
    """Constant removal/creation intensities V_r, V_a."""

    v_r: float = 1.0
    v_a: float = 1.0

    def __post_init__(self):
        if self.v_r < 0 or self.v_a < 0:
            raise ValueError("rates must be nonnegative")


@dataclass(frozen=True)
class Remark1Rates:
    """Density-dependent intensities built from constants U_r, U_a.

    V_r = U_r (gamma + beta) / (gamma_f + beta g),
    V_a = U_a (gamma + alpha) / (gamma_f + alpha g),
    which makes the connection dynamics a preferential-attachment process
    with respect to the per-opinion conditional density f/g.
    """

    u_r: float = 1.0
    u_a: float = 1.0

    def __post_init__(self):
        if self.u_r < 0 or self.u_a < 0:
            raise ValueError("rates must be nonnegative")


@dataclass(frozen=True)
class ModelParams:
    """Scalar model parameters.

    eta is the compromise rate of the unscaled binary rule and must lie in
    (0, 1/2) so that interactions contract opinion distances; epsilon is the
    scaling parameter of the quasi-invariant regime used by the Monte Carlo
    solver; lambda_freq is the interaction frequency of the unscaled model
    (used by the closed moment system).
    """

    alpha: float
    beta: float = 0.0
    rates: ConstantRates | Remark1Rates = dc_field(default_factory=ConstantRates)
    sigma2: float = 0.0
    epsilon: float | None = None
    eta: float | None = None
    lambda_freq: float | None = None

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if self.sigma2 < 0:
            raise ValueError(f"sigma2 must be >= 0, got {self.sigma2}")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.eta is not None and not (0.0 < self.eta < 0.5):
            raise ValueError(f"eta must lie in (0, 1/2), got {self.eta}")
        if self.lambda_freq is not None and not self.lambda_freq > 0:
            raise ValueError(f"lambda_freq must be > 0, got {self.lambda_freq}")

    @property
    def constant_rates(self) -> bool:
        return isinstance(self.rates, ConstantRates)
