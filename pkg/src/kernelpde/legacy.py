"""Prior-work diffusion operator and the H1/H2 baselines, packaged for comparisons.

Two experiments live here: the error-versus-alpha monotonicity probe on
``sin x`` / ``sin 2x``, and the CPU-versus-error benchmark of H3 against the
prior-work operator on the heat equation.
"""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .grid import Grid1D
from .operators import diffusion_apply, diffusion_old
from .problems import preset
from .quadrature import make_kernel
from .solver import BlowUpError, RunConfig, integrate
from .timestep import BETA2_MAX, BETA_OLD_MAX

__all__ = [
    "diffusion_old",
    "ComparisonRecord",
    "monotonicity_probe",
    "is_nonincreasing",
    "compare_efficiency",
    "cpu_at_error",
    "PROBE_NODES",
    "ALPHA_DOUBLINGS",
    "ALPHA_QUARTER_OCTAVES",
    "symbol_error",
    "roundoff_floor",
]

PROBE_NODES = 2048
ALPHA_DOUBLINGS = tuple(2.0**j for j in range(1, 9))  # 2 .. 256
# 0.5 .. 256; the H1/H2 error bumps for sin x sit below alpha = 2
ALPHA_QUARTER_OCTAVES = tuple(2.0 ** (j / 4) for j in range(-4, 33))

VARIANT_NAMES = {"H_old": "Hold", "Hold": "Hold", "H1": "H1", "H2": "H2", "H3": "H3"}

_TEST_FUNCTIONS = {
    # name -> (u, u_xx)
    "sin_x": (np.sin, lambda x: -np.sin(x)),
    "sin_2x": (lambda x: np.sin(2 * x), lambda x: -4.0 * np.sin(2 * x)),
}


@dataclass(frozen=True)
class ComparisonRecord:
    variant: str
    k: int
    n: int
    cpu_seconds: float
    linf_error: float

    def csv_row(self) -> str:
        return f"{self.variant},{self.k},{self.n},{self.cpu_seconds:.6f},{self.linf_error:.6e}"


def monotonicity_probe(variant: str, k: int, test_function: str = "sin_x",
                       alpha_list: Sequence[float] = ALPHA_DOUBLINGS, n: int = PROBE_NODES):
    """Max-norm error of a diffusion variant against the exact ``u_xx`` for each ``alpha``.

    The grid is fine (``n = 2048`` on ``[0, 2 pi]``) so the quadrature error is
    negligible next to the ``alpha``-truncation error being probed.
    """
    try:
        name = VARIANT_NAMES[variant]
    except KeyError:
        raise ValueError(f"unknown variant {variant!r}") from None
    try:
        u_fn, uxx_fn = _TEST_FUNCTIONS[test_function]
    except KeyError:
        raise ValueError(f"test_function must be one of {sorted(_TEST_FUNCTIONS)}") from None
    alphas = [float(a) for a in alpha_list]
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alpha_list must be strictly increasing")
    grid = Grid1D(0.0, 2.0 * math.pi, n)
    x = grid.x
    u, exact = u_fn(x), uxx_fn(x)
    ones = np.ones(n)
    out = []
    for alpha in alphas:
        kern = make_kernel(alpha, grid.dx, n)
        approx = diffusion_apply(u, ones, kern, k, name)
        out.append((alpha, float(np.max(np.abs(approx - exact)))))
    return out


def _mp_weights(nu):
    # Weights of the six-point rule from its defining integrals, in working precision:
    # c_j = int_0^1 e^{-nu (1 - s)} l_j(s) nu ds with l_j the Lagrange basis on
    # nodes s = -2..3 (node 0 is x_{i-1}, node 1 is x_i)
    nodes = [mpmath.mpf(m) for m in range(-2, 4)]
    out = []
    for j, sj in enumerate(nodes):
        def basis(s, j=j, sj=sj):
            val = mpmath.mpf(1)
            for m, sm in enumerate(nodes):
                if m != j:
                    val *= (s - sm) / (sj - sm)
            return val
        out.append(nu * mpmath.quad(lambda s: mpmath.exp(-nu * (1 - s)) * basis(s), [0, 1]))
    return out


def symbol_error(variant: str, k: int, kappa: int, alpha: float, n: int = PROBE_NODES,
                 digits: int = 40) -> float:
    """Exact-arithmetic counterpart of :func:`monotonicity_probe` for one ``alpha``.

    Evaluates the discrete symbol of the chosen operator on the mode
    ``exp(i kappa x)`` of an ``n``-node periodic grid with ``digits``
    significant digits: quadrature weights from their defining integrals,
    geometric closure of the sweep, then the operator's partial sums. The
    max-norm error on ``sin(kappa x)`` is ``|H + kappa^2|`` up to sampling of
    the phase, which is below ``(pi/n)^2`` relative.
    """
    name = VARIANT_NAMES[variant]
    with mpmath.workdps(digits):
        dx = 2 * mpmath.pi / n
        a = mpmath.mpf(alpha)
        nu = a * dx
        theta = kappa * dx
        c = _mp_weights(nu)
        # c_j multiplies v_{i-3+j} for the left sweep
        cl = mpmath.fsum(cj * mpmath.expj((j - 3) * theta) for j, cj in enumerate(c))
        linv_l = cl / (1 - mpmath.exp(-nu) * mpmath.expj(-theta))
        linv_r = mpmath.conj(linv_l)
        dl, dr = 1 - linv_l, 1 - linv_r
        d0 = (dl + dr) / 2

        def psum(d, m):
            return mpmath.fsum(d**p for p in range(1, m + 1))

        if name == "H3":
            g = (a / 2) * (dl - dr) * mpmath.fsum(d0 ** (p - 1) for p in range(1, k + 1))
            h = g * g
        elif name == "H1":
            h = -(a * psum(dl, 2 * k)) * (a * psum(dr, 2 * k))
        elif name == "H2":
            g = (a / 2) * (psum(dl, 2 * k) - psum(dr, 2 * k))
            h = g * g
        else:
            h = -a * a * psum(d0, k)
        return float(abs(h + kappa * kappa))


def roundoff_floor(alpha: float, scale: float = 1.0) -> float:
    """Double-precision noise level ``alpha^2 eps`` of a second-derivative operator."""
    return alpha * alpha * np.finfo(float).eps * scale


def is_nonincreasing(errors: Iterable[float], band: float = 0.01) -> bool:
    """True when every error is at most ``(1 + band)`` times its predecessor."""
    errors = list(errors)
    return all(b <= (1.0 + band) * a for a, b in zip(errors, errors[1:]))


def _timed_run(problem, cfg: RunConfig, repeats: int):
    times = []
    res = None
    for _ in range(repeats):
        res = integrate(problem, cfg)
        times.append(res.cpu_seconds)
    return statistics.median(times), res


def compare_efficiency(k: int, grids: Sequence[int], variants: Sequence[str] = ("H3", "H_old"),
                       cfl: float = 1.0, t_end: float = 1.0, repeats: int = 5) -> list[ComparisonRecord]:
    """CPU time (median of ``repeats``) and max-norm error on the heat equation.

    H3 runs with the A-stability bound of the new operator, H_old with the
    prior-work bound, as in the published comparison.
    """
    problem = preset("heat1d")
    records = []
    for variant in variants:
        name = VARIANT_NAMES[variant]
        beta = BETA_OLD_MAX[k] if name == "Hold" else BETA2_MAX[k]
        for n in grids:
            cfg = RunConfig(n=n, k=k, cfl=cfl, t_end=t_end, variant=name, beta2=beta)
            try:
                cpu, res = _timed_run(problem, cfg, repeats)
                records.append(ComparisonRecord(variant, k, n, cpu, res.linf))
            except BlowUpError:
                records.append(ComparisonRecord(variant, k, n, math.nan, math.inf))
    return records


def cpu_at_error(records: Sequence[ComparisonRecord], variant: str, target: float) -> float:
    """Smallest CPU time among runs of ``variant`` whose error is at most ``target``.

    Returns ``inf`` when no run reached the target.
    """
    hits = [r.cpu_seconds for r in records if r.variant == variant and r.linf_error <= target]
    return min(hits) if hits else math.inf
