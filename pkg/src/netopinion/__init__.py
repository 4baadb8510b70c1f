"""Kinetic opinion dynamics on evolving networks.

Two solvers for one model: a direct-simulation Monte Carlo method for the
binary-interaction dynamics coupled to a per-agent connection process, and
an implicit-explicit finite-difference scheme whose flux weights preserve
the stationary states exactly.  Closed-form stationary laws serve as
oracles throughout.
"""

from ._backend import BACKEND
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
    noise_bound,
    quadratic_diffusion,
    unity_kernel,
)
from .stationary import (
    StationaryDegreeLaw,
    StationaryOpinionProfile,
    f_inf_product,
    g_inf,
    rho_inf,
    rho_inf_poisson,
    rho_inf_powerlaw,
    rho_inf_vector,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    "OpinionGrid",
    "ConnectivityRange",
    "DensityField",
    "ModelParams",
    "ConstantRates",
    "Remark1Rates",
    "InteractionKernel",
    "DiffusionFunction",
    "unity_kernel",
    "local_compromise_kernel",
    "bounded_confidence_kernel",
    "connectivity_power_kernel",
    "quadratic_diffusion",
    "constant_diffusion",
    "noise_bound",
    "StationaryDegreeLaw",
    "StationaryOpinionProfile",
    "rho_inf",
    "rho_inf_vector",
    "rho_inf_poisson",
    "rho_inf_powerlaw",
    "g_inf",
    "f_inf_product",
]
