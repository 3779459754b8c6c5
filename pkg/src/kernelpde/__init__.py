"""Kernel-based explicit solvers for nonlinear convection-diffusion problems.

Spatial derivatives are built from successive convolutions with exponential
kernels, which keeps explicit SSP Runge-Kutta stepping stable at any CFL
number. The package exposes the building blocks (quadrature, operators,
time stepping), a problem/solver layer, a Von Neumann stability toolkit and
a comparison against the prior-work diffusion operator.
"""
from .grid import Field, FieldSet, Grid1D, Grid2D, extract_line, periodic_index, write_line
from .quadrature import Kernel, KernelParams, WeightSet, apply_Linv, compute_weights, make_kernel
from .operators import VARIANTS, apply_D, deriv_new, diffusion_apply, diffusion_old, transport_term
from .timestep import (
    BETA1_MAX,
    BETA2_MAX,
    BETA_OLD_MAX,
    ConfigurationError,
    RKScheme,
    alpha_selection,
    default_beta,
    ssp_rk_step,
)
from .problems import PRESET_NAMES, ProblemSpec, preset
from .solver import BlowUpError, RunConfig, SchemeConfig, convergence_order, error_norms, integrate
from .stability import (
    amplification_full_1d,
    amplification_semi_1d,
    amplification_semi_2d,
    beta_max_semi,
    s_k,
)

__version__ = "0.1.0"
