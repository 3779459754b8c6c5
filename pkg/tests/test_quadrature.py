import math
import time

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kernelpde import quadrature as q
from kernelpde.legacy import _mp_weights
from kernelpde.quadrature import (
    KernelParams,
    apply_Linv,
    combine,
    compute_weights,
    count_convolutions,
    linv,
    local_integrals,
    make_kernel,
    sweep,
)

NUS = [1e-8, 1e-4, 1e-2, 0.1, 0.5, 0.999, 1.0, 2.0, 20.0, 200.0]


def _params(alpha, dx, n):
    return KernelParams(alpha, math.exp(-alpha * dx * n))


@pytest.mark.parametrize("nu", NUS)
def test_weights_reproduce_constants(nu):
    w = compute_weights(nu)
    assert math.isclose(sum(w.c), -math.expm1(-nu), rel_tol=1e-12)


@pytest.mark.parametrize("nu", NUS)
def test_weights_reproduce_linear(nu):
    # v(y) = y with dx = 1, x_i = 0: nu int_{-1}^0 e^{nu y} y dy, evaluated in high precision
    w = compute_weights(nu)
    got = sum(c * off for c, off in zip(w.c, q.STENCIL_OFFSETS))
    with mpmath.workdps(40):
        m = mpmath.mpf(nu)
        exact = float(m * mpmath.quad(lambda y: mpmath.exp(m * y) * y, [-1, 0]))
    assert math.isclose(got, exact, rel_tol=1e-12)


@pytest.mark.parametrize("nu", [1e-4, 0.01, 0.3, 0.9, 0.99, 1.0, 1.5, 2.0, 20.0])
def test_weights_match_high_precision_oracle(nu):
    with mpmath.workdps(30):
        ref = np.array([float(c) for c in _mp_weights(mpmath.mpf(nu))])
    assert np.allclose(compute_weights(nu).c, ref, rtol=1e-13, atol=0)


def test_branches_agree_past_threshold():
    # the closed form loses digits as nu -> 0, which is why the series takes over below 1
    for nu in (1.0, 1.5, 2.0):
        assert np.allclose(q._series(nu), q._closed_form(nu), rtol=1e-13, atol=0)
    assert not np.allclose(q._series(0.01), q._closed_form(0.01), rtol=1e-6, atol=0)


@pytest.mark.parametrize("nu", [0.0, -1.0, math.inf, math.nan])
def test_weights_reject_bad_nu(nu):
    with pytest.raises(ValueError):
        compute_weights(nu)


def test_local_integrals_of_constant():
    w = compute_weights(0.3)
    J = local_integrals(np.ones(10), w, "L")
    assert np.allclose(J, 1 - math.exp(-0.3), rtol=1e-13)


def test_local_integrals_degree5_interior():
    nu, n = 0.7, 16
    w = compute_weights(nu)
    s = np.arange(n, dtype=float)
    p = lambda y: 1 + y - 0.3 * y**2 + 0.01 * y**5 / 100
    J = local_integrals(p(s), w, "L")
    for i in range(3, n - 2):
        exact = float(mpmath.quad(lambda y: nu * mpmath.exp(-nu * (i - y)) * p(y), [i - 1, i]))
        assert math.isclose(J[i], exact, rel_tol=1e-11)


def test_local_integrals_mirror_symmetry():
    rng = np.random.default_rng(1)
    v = rng.standard_normal(12)
    w = compute_weights(0.4)
    JL = local_integrals(v, w, "L")
    JR = local_integrals(v[::-1], w, "R")
    assert np.allclose(JL, JR[::-1], rtol=0, atol=1e-15)


def test_local_integrals_short_line():
    with pytest.raises(ValueError):
        local_integrals(np.ones(5), compute_weights(1.0), "L")


def test_sweep_examples():
    assert np.all(sweep(np.zeros(6), 0.5, "L") == 0.0)
    # n = 2 unrolled: I_0 = 0, I_1 = J_1, I_2 = J_1 e + J_2 with J_2 = J_0
    out = sweep(np.array([3.0, 2.0]), 0.5, "L")
    assert out.tolist() == [0.0, 2.0, 2.0 * 0.5 + 3.0]
    out = sweep(np.array([3.0, 2.0]), 0.5, "R")
    assert out.tolist() == [3.0 + 0.5 * 2.0, 2.0, 0.0]


@pytest.mark.parametrize("which", ["L", "R", "0"])
def test_linv_preserves_constants(which):
    n, alpha = 20, 3.0
    dx = 2 * math.pi / n
    out = apply_Linv(np.ones(n), _params(alpha, dx, n), compute_weights(alpha * dx), which)
    assert np.allclose(out, 1.0, rtol=0, atol=1e-13)


def test_L0_inverse_of_sine():
    alpha = 2.0
    for n in (64, 128):
        x = 2 * math.pi * np.arange(n) / n
        dx = x[1]
        out = apply_Linv(np.sin(x), _params(alpha, dx, n), compute_weights(alpha * dx), "0")
        assert np.max(np.abs(out - np.sin(x) / (1 + 1 / alpha**2))) < 1e-8


def test_linv_fifth_order_in_dx():
    alpha = 3.0
    errs = []
    for n in (32, 64, 128, 256):
        x = 2 * math.pi * np.arange(n) / n
        dx = x[1]
        out = apply_Linv(np.sin(x), _params(alpha, dx, n), compute_weights(alpha * dx), "L")
        z = 1 / alpha
        exact = (np.exp(1j * x) / (1 + 1j * z)).imag  # L_L^{-1} symbol 1/(1+iz)
        errs.append(np.max(np.abs(out - exact)))
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert min(orders[1:]) >= 4.5, orders


def test_closure_is_periodic():
    # the value at node 0 from the closure equals the sweep continued to x = b
    rng = np.random.default_rng(2)
    n, alpha = 40, 1.5
    dx = 1.0 / n
    v = rng.standard_normal(n)
    w = compute_weights(alpha * dx)
    out = apply_Linv(v, _params(alpha, dx, n), w, "L")
    IL = sweep(local_integrals(v, w, "L"), w.expnu, "L")
    at_b = IL[n] + out[0] * math.exp(-alpha * dx * n)
    assert math.isclose(at_b, out[0], rel_tol=1e-12)


def test_linearity_and_positivity():
    rng = np.random.default_rng(3)
    n, alpha = 50, 4.0
    dx = 0.1
    p, w = _params(alpha, dx, n), compute_weights(alpha * dx)
    u, v = rng.standard_normal(n), rng.standard_normal(n)
    lhs = apply_Linv(2 * u - 3 * v, p, w, "0")
    rhs = 2 * apply_Linv(u, p, w, "0") - 3 * apply_Linv(v, p, w, "0")
    assert np.allclose(lhs, rhs, atol=1e-13)
    pos = np.abs(u)
    assert apply_Linv(pos, p, w, "0").min() >= -1e-12 * pos.max()


@settings(max_examples=40, deadline=None)
@given(st.integers(6, 80), st.floats(0.05, 50.0), st.integers(1, 4), st.sampled_from(["L", "R", "0"]))
def test_fused_kernel_matches_reference_pipeline(n, alpha, lines, which):
    # two independent routes: lfilter-based three-stage pipeline vs the fused numba kernel
    rng = np.random.default_rng(n)
    dx = 2 * math.pi / n
    v = rng.standard_normal((lines, n))
    kern = make_kernel(alpha, dx, n)
    ref = apply_Linv(v, kern.params, kern.weights, which)
    wl, wr = {"L": (1.0, 0.0), "R": (0.0, 1.0), "0": (0.5, 0.5)}[which]
    got = combine(v, kern, 0.0, wl, wr)
    assert np.allclose(got, ref, rtol=1e-12, atol=1e-12 * np.abs(v).max())


def test_combine_along_either_axis_of_2d_and_3d():
    rng = np.random.default_rng(4)
    v = rng.standard_normal((7, 9))
    k9, k7 = make_kernel(2.0, 0.3, 9), make_kernel(2.0, 0.3, 7)
    rows = combine(v, k9, 1.0, -1.0, 0.0, axis=-1)
    cols = combine(v, k7, 1.0, -1.0, 0.0, axis=0)
    assert np.allclose(rows, np.stack([combine(r, k9, 1.0, -1.0, 0.0) for r in v]))
    assert np.allclose(cols, combine(v.T.copy(), k7, 1.0, -1.0, 0.0).T)
    v3 = rng.standard_normal((2, 7, 9))
    assert np.allclose(combine(v3, k7, 0.0, 1.0, 1.0, axis=1),
                       np.stack([combine(s, k7, 0.0, 1.0, 1.0, axis=0) for s in v3]))


def test_linv_pair_and_counter():
    k = make_kernel(1.0, 0.5, 12)
    v = np.arange(12.0)
    with count_convolutions() as c:
        left, right = linv(v, k)
        only_left, none = linv(v, k, right=False)
    assert none is None and np.array_equal(left, only_left)
    assert c.value == 3


def test_make_kernel_validation():
    with pytest.raises(ValueError):
        make_kernel(0.0, 0.1, 10)
    with pytest.raises(ValueError):
        make_kernel(1.0, 0.1, 5)
    with pytest.raises(FloatingPointError):
        make_kernel(1e-300, 1e-20, 10)


@pytest.mark.timing
def test_cost_is_linear_in_n():
    def best(n):
        v = np.random.default_rng(0).standard_normal(n)
        k = make_kernel(2.0, 1.0 / n, n)
        combine(v, k, 1.0, -0.5, -0.5)
        times = []
        for _ in range(5):
            t = time.perf_counter()
            combine(v, k, 1.0, -0.5, -0.5)
            times.append(time.perf_counter() - t)
        return min(times)

    assert best(400_000) / best(200_000) <= 2.5
