"""Singular limit of the reduced Kobayashi-Warren-Carter equation.

Finite-difference solver for the epsilon-problem, a product-integration
solver for the limiting equation with memory, closed-form and Laplace-domain
references, the stationary weighted-TV check and the limit grain system.
"""
from .params import ModelParams, TimeSeries
from .special_functions import DomainError, KernelParams, MemoryKernel
from .epsilon_pde import GridField, SchemeConfig
from .fractional_limit import ForcingSpec, LimitEnergy, closed_form_eta, closed_form_xi, solve_volterra

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "ForcingSpec",
    "GridField",
    "KernelParams",
    "LimitEnergy",
    "MemoryKernel",
    "ModelParams",
    "SchemeConfig",
    "TimeSeries",
    "closed_form_eta",
    "closed_form_xi",
    "solve_volterra",
]
