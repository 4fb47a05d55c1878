import math

import numpy as np
import pytest

from beurling import gdensity, gfun

# closed-form B-spline values: g = sum_n chi^{*n}(w)/n with
# chi^{*2}(2.5) = 1/2, chi^{*2}(3.5) = 1/2, chi^{*3}(3.5) = 1/8,
# chi^{*3}(4.25) = 11/16, chi^{*4}(4.25) = 1/384
G_EXACT = {
    1.5: 1.0,
    2.5: 0.25,
    3.5: 0.5 / 2 + 0.125 / 3,
    4.25: 11.0 / 16.0 / 3 + (0.25**3 / 6.0) / 4,
}

# independent grid-convolution oracle (h = 1e-4 Riemann sums)
G_NUMERIC = {4.25: 0.22984426531275, 6.8: 0.14153123366558887}


def test_convolution_power_is_a_partition_spline():
    for n in (1, 2, 3, 7, 20):
        c = gdensity.convolution_power(n)
        assert c.support == (float(n), float(2 * n))
        # total mass of an n-fold convolution of a unit indicator is 1;
        # integrate the local polynomials exactly
        mass = sum(float(np.sum(p / np.arange(1, len(p) + 1))) for p in c.pieces)
        assert abs(mass - 1.0) < 1e-12


def test_g_values_exact():
    for w, ref in G_EXACT.items():
        assert abs(float(gdensity.eval_g_w(w)) - ref) < 1e-14


def test_g_values_against_convolution_oracle():
    for w, ref in G_NUMERIC.items():
        assert abs(float(gdensity.eval_g_w(w)) - ref) < 1e-4


def test_g_plateau_and_domain():
    w = np.linspace(1.0 + 1e-12, 2.0 - 1e-12, 2001)
    assert np.max(np.abs(gdensity.eval_g_w(w) - 1.0)) == 0.0
    assert float(gdensity.eval_g(1.0)) == 0.0
    with pytest.raises(gdensity.DomainError):
        gdensity.eval_g(0.5)
    with pytest.raises(gdensity.DomainError):
        gdensity.eval_g_w(float(gdensity.N_CAP) + 1.0)


def test_g_derivative_chain_rule():
    u = np.exp(np.linspace(5.5, 9.5, 50))
    h = 1e-6
    fd = (gdensity.eval_g(u * (1 + h)) - gdensity.eval_g(u * (1 - h))) / (2 * h * u)
    assert np.max(np.abs(fd - gdensity.eval_g_derivative(u))) < 1e-6


def test_mellin_identity_spot_checks():
    for z in (1.0, 2.0 + 3.0j, 0.6 - 12.0j, 3.0 + 19.0j):
        gap = abs(gfun.log_G(z) - gdensity.mellin_log_G(z, tol=1e-10))
        assert gap < 1e-8


def test_g_times_w_sup():
    w = np.linspace(1.0, 30.0, 200001)
    prod = gdensity.eval_g_w(w) * w
    assert np.max(prod) <= gdensity.G_TIMES_W_SUP + 1e-9
    # the sup is attained at the right end of the plateau
    assert abs(float(gdensity.eval_g_w(2.0 - 1e-12)) * 2.0 - 2.0) < 1e-9


def test_decay_slope_reproducible():
    s1, _ = gdensity.decay_slope()
    s2, _ = gdensity.decay_slope()
    assert s1 == s2
    assert s1 < 0.0
