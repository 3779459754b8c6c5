"""Exponential-kernel quadrature and the O(n) periodic convolutions.

The inverse operators

    L_L^{-1}[v](x) = alpha * int_a^x  exp(-alpha (x - y)) v(y) dy + A_L exp(-alpha (x - a))
    L_R^{-1}[v](x) = alpha * int_x^b  exp(-alpha (y - x)) v(y) dy + B_R exp(-alpha (b - x))

are evaluated on a periodic grid line in three stages: a six-point local
quadrature over each cell (``local_integrals``), a first-order recursive
sweep that accumulates the cells (``sweep``), and a closure that adds the
exponential tails making the result periodic (``apply_Linv``).

Lines are stored along the last axis of an array, so every function here
accepts either a single line of shape ``(n,)`` or a stack ``(m, n)``.
"""
from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.signal import lfilter

from . import _fastconv

__all__ = [
    "NU_SERIES_THRESHOLD",
    "WeightSet",
    "KernelParams",
    "Kernel",
    "compute_weights",
    "local_integrals",
    "sweep",
    "apply_Linv",
    "make_kernel",
    "linv",
    "count_convolutions",
]

STENCIL_OFFSETS = (-3, -2, -1, 0, 1, 2)

# Closed forms: c_m = (P_m(nu) + Q_m(nu) e^{-nu}) / (120 nu^5), coefficients in
# ascending powers of nu, for the interpolant through x_{i-3}..x_{i+2}
# integrated against alpha*exp(-alpha(x_i - y)) over [x_{i-1}, x_i].
_CLOSED_P = (
    (120, 0, -30, 0, 4),
    (-600, 120, 210, -10, -30),
    (1200, -480, -420, 160, 120),
    (-1200, 720, 300, -300, -40, 120),
    (600, -480, -30, 160, -60),
    (-120, 120, -30, -10, 6),
)
_CLOSED_Q = (
    (-120, -120, -30, 10, 6),
    (600, 480, -30, -160, -60),
    (-1200, -720, 300, 300, -40, -120),
    (1200, 480, -420, -160, 120),
    (-600, -120, 210, 10, -30),
    (120, 0, -30, 0, 4),
)

#: Below this nu the closed forms lose digits to cancellation (they divide
#: by nu**5); the moment series is used instead.
NU_SERIES_THRESHOLD = 1.0
_SERIES_TERMS = 30


def _lagrange_coeffs(m: int) -> list[Fraction]:
    """Ascending monomial coefficients of the Lagrange basis polynomial for node ``m``."""
    coeffs = [Fraction(1)]
    for q in STENCIL_OFFSETS:
        if q == m:
            continue
        denom = Fraction(m - q)
        # multiply by (s - q) / (m - q)
        shifted = [Fraction(0)] + coeffs
        scaled = [-q * c for c in coeffs] + [Fraction(0)]
        coeffs = [(a + b) / denom for a, b in zip(shifted, scaled)]
    return coeffs


def _series_table() -> np.ndarray:
    # c_m(nu) = sum_n nu^(n+1)/n! * int_{-1}^0 L_m(s) s^n ds
    table = np.empty((6, _SERIES_TERMS))
    for row, m in enumerate(STENCIL_OFFSETS):
        lag = _lagrange_coeffs(m)
        for n in range(_SERIES_TERMS):
            # int_{-1}^0 s^j ds = (-1)^j / (j + 1)
            moment = sum(
                c * Fraction((-1) ** (j + n), j + n + 1) for j, c in enumerate(lag)
            )
            table[row, n] = float(moment / math.factorial(n))
    return table


_SERIES = _series_table()


@dataclass(frozen=True)
class WeightSet:
    """Quadrature weights for one value of ``nu = alpha * dx``.

    ``c[j]`` multiplies ``v[i - 3 + j]`` in the left local integral ``J^L_i``.
    """

    nu: float
    c: tuple[float, float, float, float, float, float]
    expnu: float


@dataclass(frozen=True)
class KernelParams:
    alpha: float
    mu: float


def _closed_form(nu: float) -> np.ndarray:
    e = math.exp(-nu)
    out = np.empty(6)
    for j, (p, q) in enumerate(zip(_CLOSED_P, _CLOSED_Q)):
        num = np.polynomial.polynomial.polyval(nu, p) + e * np.polynomial.polynomial.polyval(nu, q)
        out[j] = num / (120.0 * nu**5)
    return out


def _series(nu: float) -> np.ndarray:
    # Horner in nu for each row, then the leading factor nu
    acc = np.zeros(6)
    for n in range(_SERIES_TERMS - 1, -1, -1):
        acc = acc * nu + _SERIES[:, n]
    return nu * acc


def compute_weights(nu: float) -> WeightSet:
    """Six-point fifth-order weights for the left local integral.

    Parameters
    ----------
    nu : float
        ``alpha * dx``; must be positive and finite.

    Returns
    -------
    WeightSet
        Weights summing to ``1 - exp(-nu)``. For ``nu < NU_SERIES_THRESHOLD``
        the weights come from a truncated Taylor series of the same
        expressions.
    """
    nu = float(nu)
    if not math.isfinite(nu) or nu <= 0.0:
        raise ValueError(f"nu must be positive and finite, got {nu!r}")
    c = _series(nu) if nu < NU_SERIES_THRESHOLD else _closed_form(nu)
    return WeightSet(nu=nu, c=tuple(float(x) for x in c), expnu=math.exp(-nu))


def _check_line(line: np.ndarray) -> np.ndarray:
    line = np.asarray(line, dtype=float)
    if line.shape[-1] < 6:
        raise ValueError(f"grid line needs at least 6 nodes, got {line.shape[-1]}")
    return line


def local_integrals(line, weights: WeightSet, side: str) -> np.ndarray:
    """Cell integrals ``J^L_i`` (``side='L'``) or ``J^R_i`` (``side='R'``).

    ``J^L_i = sum_j c_j v_{i-3+j}`` and ``J^R_i = sum_j c_j v_{i+3-j}``, with
    periodic wrap. ``J^L_i`` covers the cell ``[x_{i-1}, x_i]`` and ``J^R_i``
    the cell ``[x_i, x_{i+1}]``.
    """
    v = _check_line(line)
    out = np.zeros_like(v)
    for cj, off in zip(weights.c, STENCIL_OFFSETS):
        if side == "L":
            out += cj * np.roll(v, -off, axis=-1)
        elif side == "R":
            out += cj * np.roll(v, off, axis=-1)
        else:
            raise ValueError(f"side must be 'L' or 'R', got {side!r}")
    return out


def sweep(J, expdx: float, side: str) -> np.ndarray:
    """Accumulate cell integrals into ``I^L`` or ``I^R`` at logical nodes ``0..n``.

    ``J`` holds the periodic cell integrals at nodes ``0..n-1``; node ``n``
    is node ``0``. The result has ``n + 1`` entries along the last axis:
    ``I^L_0 = 0, I^L_i = I^L_{i-1} expdx + J^L_i`` and
    ``I^R_n = 0, I^R_i = I^R_{i+1} expdx + J^R_i``.
    """
    J = np.asarray(J, dtype=float)
    shape = J.shape[:-1] + (J.shape[-1] + 1,)
    out = np.zeros(shape)
    if side == "L":
        seq = np.roll(J, -1, axis=-1)  # J_1, ..., J_{n-1}, J_n = J_0
        out[..., 1:] = lfilter([1.0], [1.0, -expdx], seq, axis=-1)
    elif side == "R":
        seq = J[..., ::-1]  # J_{n-1}, ..., J_0
        out[..., :-1] = lfilter([1.0], [1.0, -expdx], seq, axis=-1)[..., ::-1]
    else:
        raise ValueError(f"side must be 'L' or 'R', got {side!r}")
    return out


def apply_Linv(line, params: KernelParams, weights: WeightSet, which: str) -> np.ndarray:
    """Periodic ``L_L^{-1}``, ``L_R^{-1}`` or ``L_0^{-1}`` applied to a grid line.

    This is the literal three-stage pipeline (local integrals, sweep,
    closure). The operator module uses the fused kernel in
    :func:`linv`, which computes the same values.
    """
    if which not in ("L", "R", "0"):
        raise ValueError(f"which must be 'L', 'R' or '0', got {which!r}")
    v = _check_line(line)
    n = v.shape[-1]
    tail = weights.expnu ** np.arange(n + 1)
    scale = 1.0 / (1.0 - params.mu)
    left = right = None
    if which in ("L", "0"):
        IL = sweep(local_integrals(v, weights, "L"), weights.expnu, "L")
        AL = IL[..., n:] * scale
        left = IL[..., :n] + AL * tail[:n]
    if which in ("R", "0"):
        IR = sweep(local_integrals(v, weights, "R"), weights.expnu, "R")
        BR = IR[..., :1] * scale
        right = IR[..., :n] + BR * tail[n:0:-1]
    if which == "L":
        return left
    if which == "R":
        return right
    # I^0 = (I^L + I^R)/2 with A_0 = I^0(b)/(1-mu), B_0 = I^0(a)/(1-mu)
    return 0.5 * (left + right)


@dataclass(frozen=True)
class Kernel:
    """Everything needed to apply the periodic inverses on lines of one grid."""

    params: KernelParams
    weights: WeightSet
    dx: float
    n: int
    tail: np.ndarray = field(repr=False, compare=False)
    # 1 / (1 - mu), the periodic closure factor
    scale: float = field(default=1.0, compare=False)

    @property
    def alpha(self) -> float:
        return self.params.alpha

    @property
    def nu(self) -> float:
        return self.weights.nu


@lru_cache(maxsize=64)
def make_kernel(alpha: float, dx: float, n: int) -> Kernel:
    """Build (and cache) the kernel data for rate ``alpha`` on an ``n``-cell periodic line."""
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha <= 0.0:
        raise ValueError(f"alpha must be positive and finite, got {alpha!r}")
    if n < 6:
        raise ValueError(f"grid line needs at least 6 nodes, got {n}")
    weights = compute_weights(alpha * dx)
    mu = math.exp(-alpha * dx * n)
    if mu >= 1.0:
        # only reachable when a runaway state drives alpha toward zero
        raise FloatingPointError(f"kernel rate alpha={alpha:.3g} too small for a line of length {dx * n:.3g}")
    tail = weights.expnu ** np.arange(n + 1)
    tail.flags.writeable = False
    return Kernel(KernelParams(alpha, mu), weights, float(dx), int(n), tail, -1.0 / math.expm1(-alpha * dx * n))


class _Counter:
    def __init__(self) -> None:
        self.value = 0


_active_counters: list[_Counter] = []


@contextlib.contextmanager
def count_convolutions():
    """Count one-sided recursive convolutions performed inside the block.

    One count is one left or one right sweep over a batch of lines.
    """
    counter = _Counter()
    _active_counters.append(counter)
    try:
        yield counter
    finally:
        _active_counters.remove(counter)


def _tick(amount: int) -> None:
    for c in _active_counters:
        c.value += amount


def _as_lines(a: np.ndarray, axis: int) -> np.ndarray:
    """View ``a`` as ``(lines, n)`` with the line index along ``axis``; no copy for ndim <= 2."""
    if a.ndim == 1:
        return a[None, :]
    if a.ndim == 2:
        return a.T if axis in (0, -2) else a
    moved = np.moveaxis(a, axis, -1)
    return moved.reshape(-1, moved.shape[-1])


def combine(v, kernel: Kernel, wv: float, wl: float, wr: float, axis: int = -1) -> np.ndarray:
    """``wv v + wl L_L^{-1} v + wr L_R^{-1} v`` along ``axis`` in one fused pass.

    ``D_L`` is ``(1, -1, 0)``, ``D_R`` is ``(1, 0, -1)``, ``D_0`` is
    ``(1, -1/2, -1/2)``. Only the sweeps with a nonzero weight are run.
    """
    v = np.asarray(v, dtype=float)
    if v.shape[axis] != kernel.n:
        raise ValueError(f"line length {v.shape[axis]} does not match kernel n={kernel.n}")
    out = np.empty_like(v, order="C")
    lines_out = _as_lines(out, axis)
    direct = np.shares_memory(lines_out, out) and (v.ndim <= 2)
    target = lines_out if direct else np.empty(lines_out.shape)
    _fastconv.combine(_as_lines(v, axis), np.asarray(kernel.weights.c), kernel.weights.expnu, kernel.tail,
                      kernel.scale, float(wv), float(wl), float(wr), target)
    if not direct:
        out = np.moveaxis(target.reshape(np.moveaxis(out, axis, -1).shape), -1, axis).copy()
    _tick(int(wl != 0.0) + int(wr != 0.0))
    return out


def linv(v, kernel: Kernel, left: bool = True, right: bool = True, axis: int = -1):
    """Return ``(L_L^{-1} v, L_R^{-1} v)`` along ``axis``; entries not requested are ``None``."""
    out_l = combine(v, kernel, 0.0, 1.0, 0.0, axis) if left else None
    out_r = combine(v, kernel, 0.0, 0.0, 1.0, axis) if right else None
    return out_l, out_r
