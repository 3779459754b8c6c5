"""Right-hand-side assembly and time integration for 1D/2D problems and systems."""
from __future__ import annotations

import dataclasses
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .grid import FieldSet, Grid1D, Grid2D
from .operators import diffusion_old, inner_derivative, outer_derivative, transport_term
from .problems import ProblemSpec
from .quadrature import make_kernel
from .timestep import (
    AlphaSelection,
    ConfigurationError,
    StepError,
    alpha_selection,
    check_beta,
    default_beta,
    ssp_rk_step,
)

log = logging.getLogger(__name__)


class BlowUpError(FloatingPointError):
    """The solution became non-finite; carries the step index."""

    def __init__(self, step: int, t: float, stage: Optional[int] = None):
        self.step = step
        self.t = t
        self.stage = stage
        where = f" (RK stage {stage})" if stage else ""
        super().__init__(f"solution blew up at step {step}, t={t:.6g}{where}")


class ProblemError(ValueError):
    pass


@dataclass(frozen=True)
class SchemeConfig:
    """Spatial/temporal scheme parameters for one step size."""

    k: int = 3
    beta1: float = 1.0
    beta2: float = 1.0
    dt: float = 0.0
    variant: str = "H3"


@dataclass(frozen=True)
class RunConfig:
    n: int
    k: int = 3
    cfl: float = 1.0
    t_end: float = 1.0
    variant: str = "H3"
    ny: Optional[int] = None
    beta1: Optional[float] = None
    beta2: Optional[float] = None
    snapshots: tuple[float, ...] = ()

    def __post_init__(self):
        if self.k not in (1, 2, 3):
            raise ConfigurationError(f"k must be 1, 2 or 3, got {self.k}")
        if not self.cfl > 0:
            raise ConfigurationError(f"cfl must be positive, got {self.cfl}")
        if not self.t_end > 0:
            raise ConfigurationError(f"t_end must be positive, got {self.t_end}")


def resolve_betas(problem: ProblemSpec, k: int, beta1=None, beta2=None, variant: str = "H3"):
    """Fill in beta1/beta2 from explicit values, preset values or the stability table."""
    from .timestep import BETA_OLD_MAX

    dims = problem.dims
    mixed = problem.mixed
    b1_limit = default_beta(k, dims, problem.has_cross, "transport", mixed)
    if variant == "Hold":
        b2_limit = BETA_OLD_MAX[k]
    else:
        b2_limit = default_beta(k, dims, problem.has_cross, "diffusion", mixed)
    preset1 = problem.beta_for("transport", k)
    preset2 = problem.beta_for("diffusion", k)
    b1 = beta1 if beta1 is not None else (preset1 if preset1 is not None else b1_limit)
    b2 = beta2 if beta2 is not None else (preset2 if preset2 is not None else b2_limit)
    if beta1 is not None:
        check_beta(b1, b1_limit, "beta1")
    if beta2 is not None and variant in ("H3", "Hold"):
        check_beta(b2, b2_limit, "beta2")
    return b1, b2


def _evaluate(f, u, x, y, t, shape, what: str):
    if f is None:
        return None
    values = np.broadcast_to(np.asarray(f(u, x, y, t), dtype=float), shape)
    if not np.all(np.isfinite(values)):
        bad = np.argwhere(~np.isfinite(values))[0]
        raise ProblemError(f"{what} is not finite at node {tuple(int(i) for i in bad)}, t={t:.6g}")
    return values


# axis of a field array along which x-lines and y-lines run; fields are (ny, nx)
_AXIS = {"x": -1, "y": 0}


def _diffusion_transport(u, grid, coeffs: dict, scheme: SchemeConfig):
    """Diffusion and transport terms of one scalar field with pre-evaluated coefficients."""
    k, dt, variant = scheme.k, scheme.dt, scheme.variant
    two_d = isinstance(grid, Grid2D)
    lines = {"x": grid.gx if two_d else grid}
    if two_d:
        lines["y"] = grid.gy
    diag = {"x": coeffs.get("A11"), "y": coeffs.get("A22")}
    out = np.zeros_like(u)

    kernels = {}
    for ax, g in lines.items():
        if diag[ax] is None:
            continue
        sel = alpha_selection(float(np.max(np.abs(diag[ax]))), 0.0, dt, scheme.beta1, scheme.beta2)
        kernels[ax] = make_kernel(sel.alpha0, g.dx, g.n)

    if kernels:
        if two_d and set(kernels) != {"x", "y"}:
            raise ConfigurationError("2D diffusion needs both A11 and A22")
        if variant == "Hold":
            if coeffs.get("A12") is not None or coeffs.get("A21") is not None:
                raise ConfigurationError("the Hold operator has no cross-derivative form")
            for ax, kern in kernels.items():
                out += diffusion_old(u, diag[ax], kern, k, _AXIS[ax])
        else:
            w = {ax: inner_derivative(u, kern, k, variant, _AXIS[ax]) for ax, kern in kernels.items()}
            flux_x = diag["x"] * w["x"]
            if two_d:
                if coeffs.get("A21") is not None:
                    flux_x = flux_x + coeffs["A21"] * w["y"]
                flux_y = diag["y"] * w["y"]
                if coeffs.get("A12") is not None:
                    flux_y = flux_y + coeffs["A12"] * w["x"]
                out += outer_derivative(flux_y, kernels["y"], k, variant, _AXIS["y"])
            out += outer_derivative(flux_x, kernels["x"], k, variant, _AXIS["x"])

    scale = float(np.max(np.abs(u))) if u.size else 1.0
    for ax, name in (("x", "B1"), ("y", "B2")):
        B = coeffs.get(name)
        if B is None or ax not in lines:
            continue
        r = float(np.max(np.abs(B)))
        if r <= 1e-14 * max(scale, 1e-300):
            continue
        sel = alpha_selection(0.0, r, dt, scheme.beta1, scheme.beta2, need_diffusion=False)
        kern = make_kernel(sel.alphaLR, lines[ax].dx, lines[ax].n)
        out += transport_term(u, B, r, kern, k, scale=scale, axis=_AXIS[ax])
    return out


def _coordinates(grid):
    x, y = grid.coords()
    return x, y


def _scalar_rhs(state, t, problem: ProblemSpec, grid, scheme: SchemeConfig):
    u = state[0]
    x, y = _coordinates(grid)
    shape = grid.shape
    coeffs = {name: _evaluate(getattr(problem, name), u, x, y, t, shape, name)
              for name in ("A11", "A22", "A12", "A21", "B1", "B2")}
    out = _diffusion_transport(u, grid, coeffs, scheme)
    if problem.C is not None:
        out += _evaluate(problem.C, u, x, y, t, shape, "C")
    return out[None]


def _system_rhs(state, t, problem: ProblemSpec, grid, scheme: SchemeConfig):
    x, y = _coordinates(grid)
    two_d = isinstance(grid, Grid2D)
    out = np.empty_like(state)
    for m, d in enumerate(problem.diffusivity):
        coeffs = {"A11": np.full(grid.shape, d)}
        if two_d:
            coeffs["A22"] = coeffs["A11"]
        out[m] = _diffusion_transport(state[m], grid, coeffs, scheme)
    if problem.reaction is not None:
        react = problem.reaction(tuple(state), x, y, t)
        for m, r in enumerate(react):
            r = np.broadcast_to(np.asarray(r, dtype=float), grid.shape)
            if not np.all(np.isfinite(r)):
                raise ProblemError(f"reaction term for {problem.components[m]} is not finite, t={t:.6g}")
            out[m] += r
    return out


def rhs_1d(state, t: float, problem: ProblemSpec, grid: Grid1D, scheme: SchemeConfig):
    """Semi-discrete tendency of a 1D problem; ``state`` has shape ``(ncomp, n)``."""
    if problem.dims != 1:
        raise ConfigurationError(f"{problem.name} is not a 1D problem")
    state = np.asarray(state, dtype=float)
    if problem.is_system:
        return _system_rhs(state, t, problem, grid, scheme)
    return _scalar_rhs(state, t, problem, grid, scheme)


def rhs_2d(state, t: float, problem: ProblemSpec, grid: Grid2D, scheme: SchemeConfig):
    """Semi-discrete tendency of a 2D problem; ``state`` has shape ``(ncomp, ny, nx)``.

    Gradients ``w1``, ``w2`` are computed along x-lines and y-lines first;
    the fluxes ``A11 w1 + A21 w2`` and ``A22 w2 + A12 w1`` are then
    differentiated along x and y with the direction's own kernel rate.
    """
    if problem.dims != 2:
        raise ConfigurationError(f"{problem.name} is not a 2D problem")
    state = np.asarray(state, dtype=float)
    if problem.is_system:
        return _system_rhs(state, t, problem, grid, scheme)
    return _scalar_rhs(state, t, problem, grid, scheme)


def select_alphas(problem: ProblemSpec, state, grid, t: float, dt: float, beta1: float, beta2: float):
    """Kernel rates for the current stage state.

    Returns one :class:`AlphaSelection` in 1D and an ``(x, y)`` pair in 2D.
    """
    state = np.asarray(state, dtype=float)
    u = state[0]
    x, y = _coordinates(grid)

    def extremum(name):
        f = getattr(problem, name)
        return 0.0 if f is None else float(np.max(np.abs(_evaluate(f, u, x, y, t, grid.shape, name))))

    if problem.is_system:
        c = max(problem.diffusivity)
        sel = alpha_selection(c, 0.0, dt, beta1, beta2)
        return sel if problem.dims == 1 else (sel, sel)
    need = problem.has_diffusion
    sx = alpha_selection(extremum("A11"), extremum("B1"), dt, beta1, beta2, need)
    if problem.dims == 1:
        return sx
    sy = alpha_selection(extremum("A22"), extremum("B2"), dt, beta1, beta2, need)
    return sx, sy


def error_norms(numeric, exact, grid=None) -> tuple[float, float]:
    """Max-norm and grid-weighted L2 norm of ``numeric - exact``.

    ``numeric`` is a :class:`~kernelpde.grid.Field` or an array (then
    ``grid`` is required); ``exact`` is an array of nodal values.
    """
    if grid is None:
        grid = numeric.grid
        numeric = numeric.values
    err = np.asarray(numeric, dtype=float) - np.asarray(exact, dtype=float)
    linf = float(np.max(np.abs(err)))
    l2 = float(math.sqrt(grid.cell_volume * np.sum(err * err)))
    return linf, l2


def convergence_order(e_coarse: float, e_fine: float) -> float:
    """Observed order ``log2(e_n / e_2n)`` between successive grid doublings."""
    return math.log2(e_coarse / e_fine)


@dataclass
class IntegrationResult:
    problem: str
    grid: Grid1D | Grid2D
    state: FieldSet
    t: float
    steps: int
    dt: float
    snapshots: dict = field(default_factory=dict)
    linf: Optional[float] = None
    l2: Optional[float] = None
    cpu_seconds: float = 0.0


def integrate(problem: ProblemSpec, cfg: RunConfig) -> IntegrationResult:
    """Advance ``problem`` from ``t = 0`` to ``cfg.t_end`` with fixed ``dt = cfl * dx``.

    Steps are shortened to land exactly on every snapshot time and on
    ``t_end``; the kernel rates follow the shortened step. Raises
    :class:`BlowUpError` if the state stops being finite.
    """
    problem.check_parabolic()
    grid = problem.make_grid(cfg.n, cfg.ny)
    dx = grid.dx if problem.dims == 1 else min(grid.gx.dx, grid.gy.dx)
    dt = cfg.cfl * dx
    beta1, beta2 = resolve_betas(problem, cfg.k, cfg.beta1, cfg.beta2, cfg.variant)
    base = SchemeConfig(k=cfg.k, beta1=beta1, beta2=beta2, dt=dt, variant=cfg.variant)
    rhs_fn = rhs_1d if problem.dims == 1 else rhs_2d

    u = problem.initial_state(grid)
    snapshots = {}
    requested = sorted(set(float(s) for s in cfg.snapshots))
    if any(s < 0 or s > cfg.t_end for s in requested):
        raise ConfigurationError("snapshot times must lie in [0, t_end]")
    if 0.0 in requested:
        snapshots[0.0] = FieldSet(grid, problem.components, u.copy())
    stops = sorted(set(s for s in requested if s > 0.0) | {float(cfg.t_end)})

    log.debug("integrate %s n=%s dt=%.4g beta1=%.4g beta2=%.4g", problem.name, cfg.n, dt, beta1, beta2)
    t = 0.0
    step = 0
    start = time.process_time()
    for stop in stops:
        while stop - t > 1e-12 * max(1.0, stop):
            h = stop - t if stop - t <= dt * (1 + 1e-9) else dt
            scheme = base if h == dt else dataclasses.replace(base, dt=h)
            try:
                u = ssp_rk_step(u, t, h, lambda s, tt: rhs_fn(s, tt, problem, grid, scheme), cfg.k)
            except StepError as exc:
                raise BlowUpError(step + 1, t, exc.stage) from exc
            except FloatingPointError as exc:
                raise BlowUpError(step + 1, t) from exc
            step += 1
            t = stop if h != dt else t + h
            if not np.all(np.isfinite(u)):
                raise BlowUpError(step, t)
        if stop in requested:
            snapshots[stop] = FieldSet(grid, problem.components, u.copy())
    cpu = time.process_time() - start

    result = IntegrationResult(problem.name, grid, FieldSet(grid, problem.components, u), t, step, dt,
                               snapshots, cpu_seconds=cpu)
    exact = problem.exact_state(grid, t)
    if exact is not None:
        result.linf, result.l2 = error_norms(u, exact, grid)
    return result


def run_convergence_study(problem: ProblemSpec, grids: Sequence[int], base: RunConfig):
    """Run one refinement sequence; returns ``(n, linf, order)`` rows.

    A blow-up is reported as an infinite error instead of propagating.
    """
    rows = []
    prev = None
    for n in grids:
        try:
            res = integrate(problem, dataclasses.replace(base, n=n))
            err = res.linf
        except BlowUpError:
            err = math.inf
        order = None
        if prev is not None and math.isfinite(prev) and math.isfinite(err) and err > 0:
            order = convergence_order(prev, err)
        rows.append((n, err, order))
        prev = err
    return rows
