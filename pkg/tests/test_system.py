import math

import numpy as np
import pytest

from beurling import system

# mpmath quadrature oracles for Li
LI_ORACLE = {100.0: 28.021746293370195956, 1e4: 1243.3396734281190804}


def params():
    return system.make_params(0.5, 2)


def test_make_params_values():
    p = params()
    assert list(p.l) == [4, 16]
    assert p.gamma[0] == pytest.approx(math.exp(2.0), rel=1e-15)
    assert p.gamma[1] == pytest.approx(math.exp(4.0), rel=1e-15)
    assert p.rho[0] == pytest.approx((1 - 0.25) + 1j * math.exp(2.0))
    assert p.k_beta == 1


def test_make_params_validation():
    with pytest.raises(system.ParameterError):
        system.make_params(1.5, 2)
    with pytest.raises(system.ParameterError):
        system.make_params(0.5, 0)
    with pytest.raises(system.ParameterError):
        system.make_params(0.9, 12)  # gamma overflows double


def test_li_against_oracle():
    for x, ref in LI_ORACLE.items():
        assert system.li(x) == pytest.approx(ref, abs=1e-9)
        assert system.li_quad_oracle(x) == pytest.approx(ref, abs=1e-6)
    assert system.li(1.0) == 0.0


def test_f_C_closed_form_points():
    # for w in [4, 8): only the k=1 term is active and g(w/4) = 1 there
    spec = system.DensitySpec(params(), truncated=False)
    for w in (5.0, 6.0, 7.5):
        expected = (1 - math.exp(-w)) / w \
            - 0.5 * math.exp(-w / 4.0) * math.cos(math.exp(2.0) * w)
        assert system.f_C(math.exp(w), spec) == pytest.approx(expected, abs=1e-14)
    assert system.f_C(1.0, spec) == 1.0


def test_truncated_vs_full_agree_below_crossover():
    full = system.DensitySpec(params(), truncated=False)
    trunc = system.DensitySpec(params(), truncated=True)
    v = np.exp(np.linspace(0.0, 40.0, 400))
    assert np.array_equal(system.f_C(v, full), system.f_C(v, trunc))


def test_chebyshev_delta():
    spec = system.DensitySpec(params(), truncated=False)
    delta = system.chebyshev_delta(spec)
    assert 0.0 < delta < 1.0
    with pytest.raises(ValueError):
        system.chebyshev_delta(spec, np.array([2.0]))


def test_Pi_C_matches_cumulative_density():
    spec = system.DensitySpec(params(), truncated=True)
    cum = system.cumulative_density(spec, 1e4)
    for x in (10.0, 1e2, 1e3, 1e4):
        val, err = system.Pi_C(x, spec)
        assert val == pytest.approx(float(cum.eval(math.log(x))[0]), abs=1e-7)


def test_mellin_f_C_pure_main_term():
    # with x below e^4 no oscillatory term contributes:
    # integral_1^X v^-s (1-1/v)/log v dv, oracle via scipy quad
    from scipy.integrate import quad
    spec = system.DensitySpec(params(), truncated=True)
    s = 2.0
    oracle, _ = quad(lambda u: u**-s * (1 - 1 / u) / math.log(u)
                     if u > 1 else 0.0, 1.0, math.exp(3.0), limit=200)
    val = system.mellin_f_C(spec, s, w_hi=3.0, tol=1e-10)
    assert val.imag == 0.0
    assert val.real == pytest.approx(oracle, abs=1e-8)


def test_mellin_f_C_infinite_requires_halfplane():
    spec = system.DensitySpec(params(), truncated=True)
    with pytest.raises(ValueError):
        system.mellin_f_C(spec, 0.9)


def test_cumulative_density_roundtrip():
    spec = system.DensitySpec(params(), truncated=True)
    cum = system.cumulative_density(spec, 1e5)
    targets = np.linspace(0.5, cum.total - 0.5, 200)
    w = cum.invert(targets)
    back = cum.eval(w)
    assert np.max(np.abs(back - targets)) < 1e-9
    assert np.all(np.diff(w) > 0)
