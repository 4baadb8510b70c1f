"""Compromise kernels P = H*K and diffusion amplitudes D(w, c).

H carries the opinion dependence (it may also depend on the receiving
agent's connectivity, as in the bounded-confidence rule), K the
connectivity dependence.  All evaluators broadcast over numpy arrays and
return values in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .grids import ConnectivityRange, DegenerateDiffusionError, OpinionGrid

__all__ = [
    "InteractionKernel",
    "DiffusionFunction",
    "unity_kernel",
    "local_compromise_kernel",
    "bounded_confidence_kernel",
    "connectivity_power_kernel",
    "quadratic_diffusion",
    "constant_diffusion",
    "noise_bound",
]


@dataclass(frozen=True)
class InteractionKernel:
    """Factorized compromise function P(w, w*, c, c*) = H(w, w*; c) K(c, c*).

    ``h_depends_on_c`` marks kernels whose opinion factor uses the
    receiver's connectivity; ``k_is_unity`` lets solvers skip the
    connectivity contraction.
    """

    name: str
    h: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
    k: Callable[[np.ndarray, np.ndarray], np.ndarray]
    h_depends_on_c: bool = False
    k_is_unity: bool = False
    params: dict = field(default_factory=dict)

    def p(self, w, w_star, c, c_star) -> np.ndarray:
        """Full compromise value for (receiver; source) pairs."""
        return self.h(w, w_star, c) * self.k(c, c_star)

    def k_matrix(self, crange: ConnectivityRange) -> np.ndarray:
        """K evaluated on the full (c, c*) table."""
        c = crange.values.astype(np.float64)
        return np.asarray(self.k(c[:, None], c[None, :]), dtype=np.float64)


def unity_kernel() -> InteractionKernel:
    """P identically 1."""
    return InteractionKernel(
        name="unity",
        h=lambda w, w_star, c: np.ones(np.broadcast_shapes(np.shape(w), np.shape(w_star))),
        k=lambda c, c_star: np.ones(np.broadcast_shapes(np.shape(c), np.shape(c_star))),
        k_is_unity=True,
    )


def local_compromise_kernel() -> InteractionKernel:
    """H = 1 - w^2 (receiver side), K = 1."""
    return InteractionKernel(
        name="local",
        h=lambda w, w_star, c: (1.0 - np.asarray(w) ** 2) * np.ones(np.shape(w_star)),
        k=lambda c, c_star: np.ones(np.broadcast_shapes(np.shape(c), np.shape(c_star))),
        k_is_unity=True,
    )


def bounded_confidence_kernel(delta: float | None = None,
                              d0: float | None = None,
                              c_max: int | None = None) -> InteractionKernel:
    """Indicator |w - w*| <= Delta(c).

    Either a constant confidence level ``delta`` or a connectivity-growing
    one, Delta(c) = d0 * c / c_max.
    """
    if (delta is None) == (d0 is None):
        raise ValueError("give exactly one of delta (constant) or d0 (growing)")
    if d0 is not None:
        if c_max is None:
            raise ValueError("growing confidence needs c_max")

        def h(w, w_star, c):
            lim = d0 * np.asarray(c, dtype=np.float64) / c_max
            return (np.abs(np.asarray(w) - np.asarray(w_star)) <= lim).astype(np.float64)

        return InteractionKernel(
            name="bounded_confidence",
            h=h,
            k=lambda c, c_star: np.ones(np.broadcast_shapes(np.shape(c), np.shape(c_star))),
            h_depends_on_c=True,
            k_is_unity=True,
            params={"d0": d0, "c_max": c_max},
        )

    def h_const(w, w_star, c):
        return (np.abs(np.asarray(w) - np.asarray(w_star)) <= delta).astype(np.float64)

    return InteractionKernel(
        name="bounded_confidence",
        h=h_const,
        k=lambda c, c_star: np.ones(np.broadcast_shapes(np.shape(c), np.shape(c_star))),
        k_is_unity=True,
        params={"delta": delta},
    )


def connectivity_power_kernel(a: float, b: float, c_max: int,
                              compromise: str = "local") -> InteractionKernel:
    """K = clip((c/c_max)^-a (c*/c_max)^b, 0, 1), biased toward high-c* sources.

    The negative-exponent factor is evaluated at max(c, 1); the formula is
    otherwise singular at c = 0.  ``compromise`` picks the H factor
    ("local" for 1 - w^2, "unity" for 1).
    """
    if a <= 0 or b <= 0:
        raise ValueError("exponents a, b must be positive")

    def k(c, c_star):
        cc = np.maximum(np.asarray(c, dtype=np.float64), 1.0)
        raw = (cc / c_max) ** (-a) * (np.asarray(c_star, dtype=np.float64) / c_max) ** b
        return np.clip(raw, 0.0, 1.0)

    base = local_compromise_kernel() if compromise == "local" else unity_kernel()
    return InteractionKernel(
        name=f"connectivity_power[{compromise}]",
        h=base.h,
        k=k,
        params={"a": a, "b": b, "c_max": c_max},
    )


@dataclass(frozen=True)
class DiffusionFunction:
    """Local diffusion amplitude D(w, c) >= 0 and its w-derivative."""

    name: str
    d: Callable[[np.ndarray, np.ndarray], np.ndarray]
    d_prime: Callable[[np.ndarray, np.ndarray], np.ndarray]


def quadratic_diffusion() -> DiffusionFunction:
    """D = 1 - w^2, vanishing at the opinion boundaries."""
    return DiffusionFunction(
        name="quadratic",
        d=lambda w, c: (1.0 - np.asarray(w) ** 2) * np.ones(np.shape(c)),
        d_prime=lambda w, c: (-2.0 * np.asarray(w)) * np.ones(np.shape(c)),
    )


def constant_diffusion(value: float = 1.0) -> DiffusionFunction:
    if value < 0:
        raise ValueError("diffusion amplitude must be >= 0")
    return DiffusionFunction(
        name=f"constant[{value:g}]",
        d=lambda w, c: np.full(np.broadcast_shapes(np.shape(w), np.shape(c)), float(value)),
        d_prime=lambda w, c: np.zeros(np.broadcast_shapes(np.shape(w), np.shape(c))),
    )


def noise_bound(diffusion: DiffusionFunction, grid: OpinionGrid,
                crange: ConnectivityRange) -> float:
    """Largest admissible noise magnitude keeping interactions inside [-1, 1].

    Returns min over grid points of (1 - w)/D(w, c) restricted to D != 0.
    The w = +1 node is excluded (the ratio is identically 0 there and the
    rejection step owns the boundary).  A diffusion vanishing everywhere
    has no finite bound and raises.
    """
    w = grid.nodes[:-1][:, None]
    c = crange.values[None, :].astype(np.float64)
    d = np.asarray(diffusion.d(w, c), dtype=np.float64)
    mask = d != 0.0
    if not mask.any():
        raise DegenerateDiffusionError("diffusion is identically zero")
    ratio = np.where(mask, (1.0 - w) / np.where(mask, d, 1.0), np.inf)
    return float(ratio.min())
