"""Von Neumann analysis of the H3 diffusion scheme.

With ``z = kappa / alpha`` the operator symbols are

    D_L -> iz/(1+iz),   D_R -> -iz/(1-iz),   D_0 -> z^2/(1+z^2),

so one forward-Euler step of ``u_t = c u_xx`` multiplies a Fourier mode by
``1 - beta S_k(z)`` with ``S_k(z) = z^2 (1 - (z^2/(1+z^2))^k)^2``.
The fully discrete factor replaces the exact symbols by those of the
quadrature pipeline, measured on an explicit ring of nodes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from .operators import diffusion_apply
from .quadrature import make_kernel
from .timestep import ConfigurationError, RKScheme

RING_NODES = 256


@dataclass(frozen=True)
class SymbolPoint:
    z: float | tuple[float, float]
    value: complex


@dataclass(frozen=True)
class FullSymbolPoint:
    kappa_dx: float
    dt_over_dx2: float
    lam: complex


def s_k(z, k: int):
    """``S_k(z) = z^2 (1 - (z^2/(1+z^2))^k)^2``; even and nonnegative."""
    z = np.asarray(z, dtype=float)
    w = z * z / (1.0 + z * z)
    return z * z * (1.0 - w**k) ** 2


def r_k(z, k: int):
    """``R_k(z) = sum_{p=1..k} z^{2p-1} / (1+z^2)^p = z (1 - (z^2/(1+z^2))^k)``; ``R_k^2 = S_k``."""
    z = np.asarray(z, dtype=float)
    w = z * z / (1.0 + z * z)
    return z * (1.0 - w**k)


@lru_cache(maxsize=None)
def _max_s(k: int) -> tuple[float, float]:
    """``(z*, M_k)`` with ``M_k = max_z S_k(z)``: log scan, then golden section."""
    z = np.logspace(-3, 3, 4001)
    s = s_k(z, k)
    i = int(np.argmax(s))
    lo, hi = z[max(i - 1, 0)], z[min(i + 1, z.size - 1)]
    res = minimize_scalar(lambda t: -float(s_k(t, k)), bracket=(lo, z[i], hi), method="golden",
                          tol=1e-8)
    return float(res.x), float(-res.fun)


def beta_max_semi(k: int) -> float:
    """Largest ``beta`` with ``|1 - beta S_k(z)| <= 1`` for all ``z``, i.e. ``2 / M_k``."""
    RKScheme(k)
    return 2.0 / _max_s(k)[1]


def argmax_s(k: int) -> float:
    return _max_s(k)[0]


def amplification_semi_1d(k: int, beta: float, z):
    """Forward-Euler amplification factor ``1 - beta S_k(z)``."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    return 1.0 - beta * s_k(z, k)


def amplification_semi_2d(k: int, beta: float, z1, z2, cross_ratio: float = 0.0):
    """``1 - beta (R_x^2 + R_y^2 + cross_ratio R_x R_y)`` for the dimension-by-dimension scheme.

    ``cross_ratio = (A12 + A21) / sqrt(A11 A22)``; the problem is parabolic
    only when its magnitude is at most 2.
    """
    if abs(cross_ratio) > 2.0:
        raise ConfigurationError(f"|cross_ratio| = {abs(cross_ratio)} > 2: diffusion matrix is not elliptic")
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    rx = r_k(z1, k)
    ry = r_k(z2, k)
    return 1.0 - beta * (rx * rx + ry * ry + cross_ratio * rx * ry)


def rk_polynomial(order: int, x):
    """Linear SSP-RK amplification ``sum_{j<=order} x^j / j!``."""
    RKScheme(order)
    x = np.asarray(x)
    out = np.ones_like(x, dtype=complex if np.iscomplexobj(x) else float)
    term = np.ones_like(out)
    for j in range(1, order + 1):
        term = term * x / j
        out = out + term
    return out


def _ring_alpha(k: int, beta: float, dt_over_dx2: float, n: int) -> tuple[float, float, float]:
    # unit diffusion coefficient, dx = 2 pi / n; alpha dx = sqrt(beta / (dt/dx^2))
    dx = 2.0 * math.pi / n
    dt = dt_over_dx2 * dx * dx
    return math.sqrt(beta / dt), dx, dt


def _spatial_symbol(k: int, beta: float, m: int, dt_over_dx2: float, n: int) -> complex:
    """``dt`` times the H3 symbol of mode ``m`` on the ring, measured from the pipeline."""
    alpha, dx, dt = _ring_alpha(k, beta, dt_over_dx2, n)
    kern = make_kernel(alpha, dx, n)
    j = np.arange(n)
    modes = np.stack([np.cos(2 * np.pi * m * j / n), np.sin(2 * np.pi * m * j / n)])
    resp = diffusion_apply(modes, np.ones(n), kern, k, "H3")
    # the operator is circulant, so exp(i theta j) is an eigenvector
    z = resp[0] + 1j * resp[1]
    e = np.exp(2j * np.pi * m * j / n)
    return complex(dt * np.vdot(e, z) / n)


def amplification_full_1d(k: int, beta: float, kappa_dx: float, dt_over_dx2: float,
                          n: int = RING_NODES) -> complex:
    """Fully discrete amplification ``lambda`` for ``u_t = u_xx``.

    The spatial symbol is measured by applying the production H3 pipeline
    (quadrature weights, periodic sweeps, partial sums) to the mode
    ``exp(i kappa x_j)`` on a ring of ``n`` nodes; ``lambda`` is the RK-k
    polynomial of that symbol. ``kappa_dx`` must be a ring mode ``2 pi m / n``.
    """
    if not 0.0 <= kappa_dx <= 2.0 * math.pi + 1e-12:
        raise ValueError(f"kappa_dx must lie in [0, 2 pi], got {kappa_dx}")
    m_real = kappa_dx * n / (2.0 * math.pi)
    m = int(round(m_real))
    if abs(m - m_real) > 1e-9 * max(1.0, m_real):
        raise ValueError(f"kappa_dx={kappa_dx} is not a mode of the {n}-node ring")
    sym = _spatial_symbol(k, beta, m % n, dt_over_dx2, n)
    return complex(rk_polynomial(k, sym))


def full_symbol(k: int, beta: float, kappa_dx, dt_over_dx2: float):
    """Closed-form counterpart of :func:`amplification_full_1d` on an infinite grid.

    Uses the quadrature symbol ``c(theta) / (1 - e^{-nu} e^{-i theta})`` for
    ``L_L^{-1}`` and its conjugate for ``L_R^{-1}``; ``kappa_dx`` may be any
    real array.
    """
    from .quadrature import STENCIL_OFFSETS, compute_weights

    theta = np.asarray(kappa_dx, dtype=float)
    nu = math.sqrt(beta / dt_over_dx2)
    wts = compute_weights(nu)
    cl = sum(c * np.exp(1j * off * theta) for c, off in zip(wts.c, STENCIL_OFFSETS))
    linv_l = cl / (1.0 - wts.expnu * np.exp(-1j * theta))
    linv_r = np.conj(linv_l)
    dl, dr = 1.0 - linv_l, 1.0 - linv_r
    d0 = 0.5 * (dl + dr)
    acc = np.zeros_like(d0)
    term = np.ones_like(d0)
    for _ in range(k):
        acc = acc + term
        term = term * d0
    # dt H3 with c = 1 and alpha^2 dt = beta
    sym = 0.25 * beta * ((dl - dr) * acc) ** 2
    return rk_polynomial(k, sym)


def scan_semi_1d(k: int, beta: float, z_points: int = 10_000, z_max: float = 1e3):
    """``(z, S_k, Q)`` on a log grid of ``z`` in ``[1e-3, z_max]`` plus ``z = 0``."""
    z = np.concatenate([[0.0], np.logspace(-3, math.log10(z_max), z_points - 1)])
    s = s_k(z, k)
    return z, s, 1.0 - beta * s


def scan_semi_2d(k: int, beta: float, cross_ratio: float = 0.0, points: int = 200, z_max: float = 1e2):
    """``(Z1, Z2, Q)`` over a symmetric ``points x points`` grid of ``z1, z2``.

    Negative ``z`` values matter once ``cross_ratio != 0`` since the cross
    term is odd in each argument.
    """
    half = np.logspace(-3, math.log10(z_max), points // 2)
    z = np.concatenate([-half[::-1], half])
    z1, z2 = np.meshgrid(z, z)
    return z1, z2, amplification_semi_2d(k, beta, z1, z2, cross_ratio)


def scan_full_1d(k: int, beta: float, modes: int = RING_NODES, ratios=None, n: int = RING_NODES):
    """``(kappa_dx, dt/dx^2, |lambda|)`` rows over ring modes and step ratios.

    All ``n`` ring modes are obtained at once per step ratio by applying the
    pipeline to the identity matrix; ``modes`` chooses how many equally
    spaced wavenumbers in ``[0, 2 pi]`` are reported.
    """
    if ratios is None:
        ratios = np.logspace(-2, 3, 16)
    rows = []
    m_list = np.unique(np.round(np.linspace(0, n, modes, endpoint=False)).astype(int))
    for ratio in ratios:
        alpha, dx, dt = _ring_alpha(k, beta, float(ratio), n)
        kern = make_kernel(alpha, dx, n)
        # column j of the operator matrix = response to the unit impulse at node j
        mat = diffusion_apply(np.eye(n), np.ones(n), kern, k, "H3").T
        eig = np.fft.fft(mat[:, 0])  # circulant: eigenvalues are the DFT of one column
        lam = rk_polynomial(k, dt * eig)
        for m in m_list:
            rows.append((2.0 * math.pi * m / n, float(ratio), float(abs(lam[m]))))
    return rows
