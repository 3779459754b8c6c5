import math

import numpy as np
import pytest

from kernelpde.grid import Grid1D
from kernelpde.operators import (
    apply_D,
    deriv_new,
    diffusion_apply,
    diffusion_old,
    transport_term,
    ux_biased,
    ux_biased_mod3,
)
from kernelpde.quadrature import count_convolutions, make_kernel

N = 256
GRID = Grid1D(0.0, 2 * math.pi, N)
X = GRID.x


def kern(alpha, n=N):
    return make_kernel(alpha, 2 * math.pi / n, n)


@pytest.mark.parametrize("which", ["L", "R", "0"])
def test_D_annihilates_constants(which):
    assert np.max(np.abs(apply_D(np.full(N, 3.0), kern(5.0), which))) < 1e-13


def test_D0_is_mean_of_DL_DR():
    v = np.sin(X) + 0.3 * np.cos(3 * X)
    k = kern(4.0)
    assert np.allclose(apply_D(v, k, "0"), 0.5 * (apply_D(v, k, "L") + apply_D(v, k, "R")), atol=1e-15)


def test_apply_D_rejects_unknown_kernel():
    with pytest.raises(ValueError):
        apply_D(np.ones(N), kern(1.0), "X")


def _cplx(op, eta=1):
    mode = np.exp(1j * eta * X)
    return op(mode.real) + 1j * op(mode.imag), mode


@pytest.mark.parametrize("k", [1, 2, 3])
def test_ux_biased_error_decreases_like_alpha_power(k):
    errs = []
    for alpha in (10, 20, 40, 80):
        errs.append(np.max(np.abs(ux_biased(np.sin(X), kern(alpha), k, "minus") - np.cos(X))))
    assert all(b < a for a, b in zip(errs, errs[1:]))
    order = math.log2(errs[-2] / errs[-1])
    assert abs(order - k) < 0.2


def test_ux_biased_mirror_symmetry():
    rng = np.random.default_rng(0)
    v = np.convolve(rng.standard_normal(N + 10), np.ones(11) / 11, "valid")
    k = kern(6.0)
    lhs = ux_biased(v[::-1], k, 2, "minus")
    rhs = -ux_biased(v, k, 2, "plus")[::-1]
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_ux_biased_mod3_symbol_and_order():
    alpha = 20.0
    k = kern(alpha)
    z = 1.0 / alpha
    dl, dr = 1j * z / (1 + 1j * z), -1j * z / (1 - 1j * z)
    sym = alpha * (dl + dl**2 + dl**3 - 0.5 * (dl + dr) * dl**2)
    got, mode = _cplx(lambda v: ux_biased_mod3(v, k, "minus"))
    assert np.max(np.abs(got - sym * mode)) < 1e-9
    errs = [np.max(np.abs(ux_biased_mod3(np.sin(X), kern(a), "minus") - np.cos(X))) for a in (20, 40, 80)]
    # at least third order; the D_0 D_L^2 correction cancels the leading alpha^-3 term,
    # so smooth data shows alpha^-4
    assert math.log2(errs[-2] / errs[-1]) > 3 - 0.25


def test_transport_degenerate_and_upwind():
    k = kern(10.0)
    u = np.sin(X)
    assert np.all(transport_term(u, np.zeros(N), 0.0, None, 2) == 0.0)
    c = 0.7
    got = transport_term(u, np.full(N, c), c, k, 2)
    assert np.allclose(got, c * ux_biased(u, k, 2, "plus"), atol=1e-14)
    with pytest.raises(ValueError):
        transport_term(u, np.zeros(N), -1.0, k, 2)
    with pytest.raises(ValueError):
        transport_term(u, np.full(N, 2.0), 1.0, k, 2)


def test_transport_error_shrinks_like_dt_squared():
    u = np.sin(X)
    errs = []
    for dt in (0.1, 0.05, 0.025):
        alpha = 1.0 / (1.0 * dt)
        errs.append(np.max(np.abs(transport_term(u, np.ones(N), 1.0, kern(alpha), 2) - np.cos(X))))
    assert math.log2(errs[0] / errs[1]) > 1.8 and math.log2(errs[1] / errs[2]) > 1.8


def test_deriv_new_k1_symbol():
    alpha = 3.0
    got = deriv_new(np.sin(X), kern(alpha), 1)
    assert np.allclose(got, np.cos(X) / (1 + alpha**-2), atol=1e-9)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_deriv_new_order_2k(k):
    alphas = [4.0, 8.0, 16.0]
    errs = [np.max(np.abs(deriv_new(np.sin(X), kern(a), k) - np.cos(X))) for a in alphas]
    slope = -np.polyfit(np.log(alphas), np.log(errs), 1)[0]
    assert abs(slope - 2 * k) <= 0.25


@pytest.mark.parametrize("variant", ["H1", "H2", "H3", "Hold"])
def test_diffusion_of_constant_is_zero(variant):
    assert np.max(np.abs(diffusion_apply(np.full(N, 2.0), np.ones(N), kern(5.0), 2, variant))) < 1e-11


def test_H3_k1_symbol_and_old_symbol():
    alpha = 4.0
    k = kern(alpha)
    z = 1 / alpha
    assert np.allclose(diffusion_apply(np.sin(X), np.ones(N), k, 1, "H3"), -np.sin(X) / (1 + z * z) ** 2, atol=1e-8)
    assert np.allclose(diffusion_old(np.sin(X), np.ones(N), k, 1), -np.sin(X) / (1 + z * z), atol=1e-8)


def test_H1_k1_not_monotone_in_alpha():
    alphas = 2.0 ** np.arange(-1, 8.01, 0.25)
    errs = [np.max(np.abs(diffusion_apply(np.sin(X), np.ones(N), kern(a), 1, "H1") + np.sin(X))) for a in alphas]
    assert any(b > 1.01 * a for a, b in zip(errs, errs[1:]))


def test_unknown_variant_and_order():
    with pytest.raises(ValueError):
        diffusion_apply(np.ones(N), np.ones(N), kern(1.0), 2, "H4")
    with pytest.raises(ValueError):
        deriv_new(np.ones(N), kern(1.0), 4)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_convolution_counts(k):
    u, A, kk = np.sin(X), np.ones(N), kern(5.0)
    counts = {}
    for variant in ("H1", "H2", "H3"):
        with count_convolutions() as c:
            diffusion_apply(u, A, kk, k, variant)
        counts[variant] = c.value
    assert counts["H3"] == counts["H1"] == 4 * k
    assert counts["H2"] == 2 * counts["H3"]


def test_operators_act_along_axis():
    n = 32
    g = np.linspace(0, 2 * np.pi, n, endpoint=False)
    field = np.sin(g)[:, None] * np.ones((5, 1)).T  # (n, 5), varies along axis 0
    k = kern(3.0, n)
    got = deriv_new(field, k, 2, axis=0)
    ref = deriv_new(np.sin(g), k, 2)
    assert np.allclose(got, ref[:, None])
