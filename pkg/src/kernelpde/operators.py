"""Successive-convolution derivative operators on periodic grid lines.

With ``L^{-1}`` the periodic kernel inverses from :mod:`kernelpde.quadrature`,

    D_L = I - L_L^{-1},   D_R = I - L_R^{-1},   D_0 = (D_L + D_R) / 2.

Powers ``D^p`` are repeated applications, each with its own periodic
closure. All functions act along ``axis`` (default: the last one) and take a
:class:`~kernelpde.quadrature.Kernel` carrying ``alpha`` and the weights.
"""
from __future__ import annotations

import numpy as np

from .quadrature import Kernel, combine

VARIANTS = ("H1", "H2", "H3", "Hold")

__all__ = [
    "VARIANTS",
    "apply_D",
    "ux_biased",
    "ux_biased_mod3",
    "transport_term",
    "deriv_new",
    "diffusion_apply",
    "diffusion_old",
]


def _check_k(k: int) -> None:
    if k not in (1, 2, 3):
        raise ValueError(f"truncation order k must be 1, 2 or 3, got {k!r}")


_D_WEIGHTS = {"L": (1.0, -1.0, 0.0), "R": (1.0, 0.0, -1.0), "0": (1.0, -0.5, -0.5)}


def apply_D(v, kernel: Kernel, which: str, axis: int = -1) -> np.ndarray:
    """``D_which[v] = v - L_which^{-1}[v]`` for ``which`` in ``'L'``, ``'R'``, ``'0'``."""
    try:
        w = _D_WEIGHTS[which]
    except KeyError:
        raise ValueError(f"which must be 'L', 'R' or '0', got {which!r}") from None
    return combine(v, kernel, *w, axis=axis)


def _power_sum(v, kernel: Kernel, which: str, terms: int, axis: int = -1) -> np.ndarray:
    """``sum_{p=1..terms} D_which^p [v]``, plus the last power."""
    g = apply_D(v, kernel, which, axis)
    acc = g.copy()
    for _ in range(terms - 1):
        g = apply_D(g, kernel, which, axis)
        acc += g
    return acc, g


def ux_biased(v, kernel: Kernel, k: int, side: str, axis: int = -1) -> np.ndarray:
    """Left-biased (``'minus'``) or right-biased (``'plus'``) partial sum for ``v_x``."""
    _check_k(k)
    if side == "minus":
        return kernel.alpha * _power_sum(v, kernel, "L", k, axis)[0]
    if side == "plus":
        return -kernel.alpha * _power_sum(v, kernel, "R", k, axis)[0]
    raise ValueError(f"side must be 'minus' or 'plus', got {side!r}")


def ux_biased_mod3(v, kernel: Kernel, side: str, axis: int = -1) -> np.ndarray:
    """Third-order biased derivative with the ``D_0 D^2`` correction.

    minus: ``alpha * (sum_{p<=3} D_L^p - (D_L + D_R) D_L^2 / 2)[v]``;
    plus mirrors it with ``D_R`` and the opposite sign. The correction
    carries the factor ``alpha`` like the main sum; without it the k=3
    scheme is not A-stable for any positive beta.

    Since ``D_0 D_L^2 = (D_L^3 + D_R D_L^2) / 2`` the correction costs one
    extra one-sided pass: the sum is ``g + g2 + g3/2 - D_R[g2]/2``, and
    ``g2 + (D_L - D_R)[g2]/2`` is a single fused two-sided pass.
    """
    if side == "minus":
        which, sign = "L", 1.0
    elif side == "plus":
        which, sign = "R", -1.0
    else:
        raise ValueError(f"side must be 'minus' or 'plus', got {side!r}")
    g = apply_D(v, kernel, which, axis)
    g2 = apply_D(g, kernel, which, axis)
    # (D_L - D_R) = L_R^{-1} - L_L^{-1}; the sign flips with the side
    tail = combine(g2, kernel, 1.0, -0.5 * sign, 0.5 * sign, axis)
    return sign * kernel.alpha * (g + tail)


def transport_term(u, B, r: float, kernel: Kernel | None, k: int, *, scale: float = 1.0,
                   axis: int = -1) -> np.ndarray:
    """Upwind-split approximation of ``B u_x``.

    Returns ``B (u_x^- + u_x^+)/2 + r (u_x^+ - u_x^-)/2``. The biased
    derivatives use the plain partial sums for ``k <= 2`` and the modified
    form for ``k = 3``. When ``r`` is negligible relative to ``scale`` the
    term is zero and ``kernel`` may be ``None``.
    """
    _check_k(k)
    if r < 0:
        raise ValueError(f"wave speed r must be nonnegative, got {r}")
    u = np.asarray(u, dtype=float)
    if r <= 1e-14 * max(scale, 1e-300):
        return np.zeros_like(u)
    if np.max(np.abs(B)) > r + 1e-12:
        raise ValueError("r must bound |B| at every node")
    if k == 3:
        um = ux_biased_mod3(u, kernel, "minus", axis)
        up = ux_biased_mod3(u, kernel, "plus", axis)
    else:
        um = ux_biased(u, kernel, k, "minus", axis)
        up = ux_biased(u, kernel, k, "plus", axis)
    return 0.5 * B * (um + up) + 0.5 * r * (up - um)


def deriv_new(v, kernel: Kernel, k: int, axis: int = -1) -> np.ndarray:
    """Symmetric derivative ``(alpha/2) sum_{p=1..k} D_0^{p-1} (D_L - D_R)[v]``.

    Error is ``O(alpha^{-2k})`` for smooth periodic ``v``. The inner
    ``(D_L - D_R) v`` is formed once and then smoothed by successive ``D_0``
    applications, so the cost is ``2k`` one-sided convolutions.
    """
    _check_k(k)
    half = 0.5 * kernel.alpha
    g = combine(v, kernel, 0.0, -half, half, axis)  # (D_L - D_R) = L_R^{-1} - L_L^{-1}
    acc = g.copy()
    for _ in range(k - 1):
        g = apply_D(g, kernel, "0", axis)
        acc += g
    return acc


def _sym_sum_2k(v, kernel: Kernel, k: int, axis: int = -1) -> np.ndarray:
    # (alpha/2) sum_{p=1..2k} (D_L^p - D_R^p)[v]
    sl = _power_sum(v, kernel, "L", 2 * k, axis)[0]
    sr = _power_sum(v, kernel, "R", 2 * k, axis)[0]
    return 0.5 * kernel.alpha * (sl - sr)


def inner_derivative(u, kernel: Kernel, k: int, variant: str, axis: int = -1) -> np.ndarray:
    """Gradient approximation ``w`` used by each diffusion variant."""
    if variant == "H3":
        return deriv_new(u, kernel, k, axis)
    if variant == "H1":
        return -kernel.alpha * _power_sum(u, kernel, "R", 2 * k, axis)[0]
    if variant == "H2":
        return _sym_sum_2k(u, kernel, k, axis)
    raise ValueError(f"variant {variant!r} has no first-derivative form")


def outer_derivative(f, kernel: Kernel, k: int, variant: str, axis: int = -1) -> np.ndarray:
    """Divergence approximation applied to the flux ``A w``."""
    if variant == "H3":
        return deriv_new(f, kernel, k, axis)
    if variant == "H1":
        return kernel.alpha * _power_sum(f, kernel, "L", 2 * k, axis)[0]
    if variant == "H2":
        return _sym_sum_2k(f, kernel, k, axis)
    raise ValueError(f"variant {variant!r} has no first-derivative form")


def diffusion_old(u, A, kernel: Kernel, k: int, axis: int = -1) -> np.ndarray:
    """Prior-work operator ``-alpha^2 sum_{p=1..k} D_0^p [A u]``."""
    _check_k(k)
    return -kernel.alpha**2 * _power_sum(np.asarray(A) * u, kernel, "0", k, axis)[0]


def diffusion_apply(u, A, kernel: Kernel, k: int, variant: str = "H3", axis: int = -1) -> np.ndarray:
    """Approximate ``(A u_x)_x`` with one of the variants ``H1``, ``H2``, ``H3``, ``Hold``.

    ``A`` holds nodal coefficient values; the product ``A w`` is formed
    pointwise before the outer operator is applied.
    """
    _check_k(k)
    if variant == "Hold":
        return diffusion_old(u, A, kernel, k, axis)
    if variant not in VARIANTS:
        raise ValueError(f"unknown diffusion variant {variant!r}")
    w = inner_derivative(u, kernel, k, variant, axis)
    return outer_derivative(np.asarray(A) * w, kernel, k, variant, axis)
