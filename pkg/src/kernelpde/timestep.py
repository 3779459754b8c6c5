"""SSP Runge-Kutta stepping and the per-stage choice of kernel rates."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

# Diffusion (H3, forward Euler A-stability) and transport bounds for k = 1, 2, 3.
BETA2_MAX = {1: 8.0, 2: 3.2275, 3: 1.9800}
BETA1_MAX = {1: 2.0, 2: 1.0, 3: 1.243}
# Prior-work D_0-series diffusion operator.
BETA_OLD_MAX = {1: 2.0, 2: 1.0, 3: 0.8375}

# Shu-Osher form: u_s = a_s u^n + b_s (u_{s-1} + dt H[u_{s-1}]), stage time t + c_s dt
SSP_TABLEAU = {
    1: ((0.0, 1.0, 0.0),),
    2: ((0.0, 1.0, 0.0), (0.5, 0.5, 1.0)),
    3: ((0.0, 1.0, 0.0), (0.75, 0.25, 1.0), (1.0 / 3.0, 2.0 / 3.0, 0.5)),
}


class StepError(FloatingPointError):
    """A stage produced a non-finite tendency."""

    def __init__(self, stage: int, message: str = ""):
        self.stage = stage
        super().__init__(message or f"non-finite tendency in RK stage {stage}")


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class RKScheme:
    order: int

    def __post_init__(self):
        if self.order not in SSP_TABLEAU:
            raise ConfigurationError(f"SSP-RK order must be 1, 2 or 3, got {self.order}")


def ssp_rk_step(state, t: float, dt: float, rhs: Callable, scheme: RKScheme | int):
    """Advance ``state`` by one SSP-RK step of size ``dt``.

    ``rhs(state, time)`` returns the tendency. Each stage is a convex
    combination of the initial state and a forward-Euler step from the
    previous stage; stage times are ``t``, ``t + dt`` and ``t + dt/2``.
    """
    order = scheme.order if isinstance(scheme, RKScheme) else RKScheme(int(scheme)).order
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    u0 = np.asarray(state, dtype=float)
    u = u0
    for stage, (a, b, c) in enumerate(SSP_TABLEAU[order], start=1):
        tendency = np.asarray(rhs(u, t + c * dt), dtype=float)
        if not np.all(np.isfinite(tendency)):
            raise StepError(stage)
        euler = u + dt * tendency
        u = euler if a == 0.0 else a * u0 + b * euler
    return u


@dataclass(frozen=True)
class AlphaSelection:
    """Kernel rates for one direction of one RK stage."""

    beta1: float
    beta2: float
    c: float
    r: float
    dt: float

    @property
    def alpha0(self) -> float:
        return math.sqrt(self.beta2 / (self.c * self.dt)) if self.c > 0 else math.inf

    @property
    def alphaLR(self) -> float:
        return self.beta1 / (self.r * self.dt) if self.r > 0 else math.inf


def default_beta(k: int, dims: int = 1, has_cross: bool = False, term: str = "diffusion",
                 mixed: bool = False) -> float:
    """Largest beta with proven A-stability for the requested configuration.

    ``mixed`` means diffusion and transport are both present.

    ========  =============  =====================  ==================
    dims      configuration  diffusion (beta2)      transport (beta1)
    ========  =============  =====================  ==================
    1         pure           beta2_max              beta1_max
    1         mixed          beta2_max / 2          beta1_max / 2
    2         no cross       beta2_max / 2          beta1_max
    2         cross terms    beta2_max / 4          beta1_max
    2         mixed          beta2_max / 8          beta1_max / 4
    ========  =============  =====================  ==================
    """
    if k not in (1, 2, 3):
        raise ConfigurationError(f"k must be 1, 2 or 3, got {k}")
    if dims not in (1, 2):
        raise ConfigurationError(f"dims must be 1 or 2, got {dims}")
    if term == "diffusion":
        b = BETA2_MAX[k]
        if dims == 1:
            return b / 2 if mixed else b
        if mixed:
            return b / 8
        return b / 4 if has_cross else b / 2
    if term == "transport":
        b = BETA1_MAX[k]
        if dims == 1:
            return b / 2 if mixed else b
        return b / 4 if mixed else b
    raise ConfigurationError(f"term must be 'diffusion' or 'transport', got {term!r}")


def check_beta(value: float, limit: float, name: str) -> None:
    """Warn when a user-supplied beta exceeds the proven stability bound."""
    if value > limit * (1 + 1e-12):
        warnings.warn(f"{name}={value} exceeds the A-stability bound {limit:g}; the scheme may be unstable",
                      stacklevel=3)


def coefficient_max(values) -> float:
    return float(np.max(np.abs(values)))


def alpha_selection(c: float, r: float, dt: float, beta1: float, beta2: float,
                    need_diffusion: bool = True) -> AlphaSelection:
    """Package the kernel rates ``sqrt(beta2/(c dt))`` and ``beta1/(r dt)``.

    ``c`` and ``r`` are the maxima of ``|A_ii|`` and ``|B_i|`` over the grid
    at the current stage state (per direction in 2D).
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if need_diffusion and not c > 0:
        raise ConfigurationError("diffusion coefficient vanishes everywhere; the problem is not parabolic")
    return AlphaSelection(beta1=beta1, beta2=beta2, c=float(c), r=float(r), dt=float(dt))
