import math

import numpy as np
import pytest

from beurling import gfun

# high-precision root oracle (mpmath findroot, 30 digits)
ZERO_ORACLE = {
    1: -0.51272406808386242091 + 4.0255543637098589142j,
    2: -1.1147772965275287322 + 6.8662446587427238702j,
    3: -1.0509678483948505105 + 10.262958531877495446j,
    10: -1.7995468326380608655 + 32.11285026462660907j,
    50: -2.5591968924584914583 + 157.82902013967067534j,
}


def test_eval_G_at_zero_and_continuity():
    assert gfun.eval_G(0.0) == 0.0
    # Taylor branch must join the direct formula smoothly at the switch radius
    r = gfun.SWITCH_RADIUS
    for z in (r * 0.999, r * 1.001, r * 0.999j, -r * 0.999 + 1e-5j):
        direct = 1.0 - (np.exp(-z) - np.exp(-2.0 * z)) / z
        assert abs(gfun.eval_G(z) - direct) < 1e-13


def test_eval_G_deriv_matches_difference_quotient():
    rng = np.random.default_rng(1)
    z = rng.uniform(-1, 2, 20) + 1j * rng.uniform(-10, 10, 20)
    h = 1e-6
    fd = (gfun.eval_G(z + h) - gfun.eval_G(z - h)) / (2 * h)
    assert np.max(np.abs(fd - gfun.eval_G_deriv(z))) < 1e-7


def test_find_zeros_against_oracle():
    zeros = gfun.find_zeros(50, certify=False)
    for n, ref in ZERO_ORACLE.items():
        assert abs(zeros[n].location - ref) < 1e-12


def test_zero_certification_strips():
    zeros = gfun.find_zeros(12, certify=True)
    assert all(z.strip_ok for z in zeros[1:])
    assert max(z.residual for z in zeros[1:]) < 1e-12
    assert gfun.zero_bound_witness(zeros) > 0.5


def test_log_G_branch():
    # principal region: agrees with the principal log
    z = 2.0 + 1.0j
    assert abs(gfun.log_G(z) - np.log(gfun.eval_G(z))) < 1e-14
    # everywhere in the right half plane: exp(log_G) = G
    rng = np.random.default_rng(3)
    for _ in range(30):
        z = complex(rng.uniform(0.05, 3.0), rng.uniform(-30.0, 30.0))
        assert abs(np.exp(gfun.log_G(z)) - gfun.eval_G(z)) < 1e-10
    with pytest.raises(gfun.DomainError):
        gfun.log_G(-1.0 + 2.0j)


def test_G_bound_sampling():
    report = gfun.check_G_bounds(20000, seed=11)
    assert report["violations"] == 0
    assert report["max_approx_ratio"] <= 1.0
    assert report["max_modulus_ratio"] <= 1.0
