import math

import numpy as np
import pytest

from kernelpde import stability as sl
from kernelpde.timestep import BETA2_MAX, ConfigurationError


def test_s_k_examples():
    assert sl.s_k(1.0, 1) == pytest.approx(0.25)
    for k in (1, 2, 3):
        assert sl.s_k(0.0, k) == 0.0
        assert sl.s_k(1e6, k) < 1e-5
        z = np.linspace(-5, 5, 101)
        assert np.allclose(sl.s_k(z, k), sl.s_k(-z, k))
        assert np.all(sl.s_k(z, k) >= 0)


def test_factor_identity_and_monotone_factors():
    rng = np.random.default_rng(0)
    z = rng.uniform(0, 20, 100)
    w = z * z / (1 + z * z)
    for k in (1, 2, 3):
        lhs = z * z * (1 - w**k)
        rhs = sum(w**p for p in range(1, k + 1))
        assert np.allclose(lhs, rhs)
        zs = np.sort(z)
        ws = zs * zs / (1 + zs * zs)
        partial = sum(ws**p for p in range(1, k + 1))
        assert np.all(np.diff(partial) >= 0) and partial.max() <= k
        assert np.all(np.diff(1 - ws**k) <= 0)
        assert np.allclose(sl.r_k(z, k) ** 2, sl.s_k(z, k))


def test_beta_max_k1_closed_form():
    assert sl.argmax_s(1) == pytest.approx(1.0, rel=1e-6)
    assert sl.beta_max_semi(1) == pytest.approx(8.0, rel=1e-9)


def test_semi_1d_examples():
    for k in (1, 2, 3):
        b = sl.beta_max_semi(k)
        assert sl.amplification_semi_1d(k, 1.01 * b, sl.argmax_s(k)) < -1
        assert sl.amplification_semi_1d(k, 3.0, 0.0) == 1.0
    with pytest.raises(ValueError):
        sl.amplification_semi_1d(1, 0.0, 1.0)


def test_semi_2d_examples():
    assert sl.amplification_semi_2d(3, 0.4, 0.0, 0.0, 2.0) == 1.0
    with pytest.raises(ConfigurationError):
        sl.amplification_semi_2d(3, 0.4, 1.0, 1.0, 2.5)
    _, _, q = sl.scan_semi_2d(3, 0.495, 2.0)
    assert q.min() >= -1 - 1e-10


def test_rk_polynomial():
    assert sl.rk_polynomial(3, -0.1) == pytest.approx(1 - 0.1 + 0.005 - 0.1**3 / 6)
    assert sl.rk_polynomial(2, 1j) == pytest.approx(1 + 1j - 0.5)


def test_full_amplification_constant_mode_and_stability():
    for k in (1, 2, 3):
        assert abs(sl.amplification_full_1d(k, BETA2_MAX[k], 0.0, 1.0) - 1.0) < 1e-12
    lam = [abs(sl.amplification_full_1d(1, 8.0, 2 * math.pi * m / 256, r))
           for m in range(0, 256, 8) for r in (0.1, 1.0, 10.0, 100.0)]
    assert max(lam) <= 1 + 1e-12
    with pytest.raises(ValueError):
        sl.amplification_full_1d(1, 8.0, 0.1234, 1.0)


def test_ring_pipeline_matches_closed_form_symbol():
    # two routes to the fully discrete factor: measured on the ring vs closed form
    for k in (1, 2, 3):
        for ratio in (0.05, 2.0, 300.0):
            for m in (1, 17, 64, 128):
                ring = sl.amplification_full_1d(k, BETA2_MAX[k], 2 * math.pi * m / 256, ratio)
                closed = complex(sl.full_symbol(k, BETA2_MAX[k], 2 * math.pi * m / 256, ratio))
                assert abs(ring - closed) < 1e-11


def test_full_tends_to_semi_for_small_kappa_dx():
    k, beta, ratio = 2, 3.0, 50.0
    nu = math.sqrt(beta / ratio)  # alpha dx
    for kdx in (0.05, 0.1):
        z = kdx / nu
        lam = complex(sl.full_symbol(k, beta, kdx, ratio))
        # dt times the H3 symbol is -beta S_k(z) up to quadrature error
        expect = sl.rk_polynomial(k, -beta * float(sl.s_k(z, k)))
        assert abs(lam - expect) < 1e-5


def test_scan_shapes():
    z, s, q = sl.scan_semi_1d(2, 3.0, 100)
    assert z[0] == 0.0 and len(z) == len(s) == len(q) == 100
    rows = sl.scan_full_1d(1, 8.0, modes=8, ratios=[1.0, 10.0], n=32)
    assert len(rows) == 16
