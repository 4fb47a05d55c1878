import math

import numpy as np
import pytest

from beurling import discretize, system


@pytest.fixture(scope="module")
def spec():
    return system.DensitySpec(system.make_params(0.5, 2), truncated=True)


@pytest.fixture(scope="module")
def P_median(spec):
    return discretize.generate(spec, 1e4, scheme="median")


def test_median_scheme_block_property(spec, P_median):
    # prime j sits at cumulative f-mass j - 1/2, so |pi - integral| <= 1
    assert discretize.pi_error_sup(P_median) <= 1.0
    cum = system.cumulative_density(spec, 1e4)
    F = cum.eval(P_median.log_primes)
    assert np.max(np.abs(F - (np.arange(len(P_median)) + 0.5))) < 1e-9


def test_counts_match_density_mass(spec, P_median):
    cum = system.cumulative_density(spec, 1e4)
    assert len(P_median) == int(math.floor(cum.total))
    for x in (10.0, 100.0, 5000.0):
        pi = discretize.pi_count(P_median, x)
        assert abs(pi - float(cum.eval(math.log(x))[0])) <= 1.0


def test_determinism_and_seeding(spec):
    a = discretize.generate(spec, 1e3, scheme="median")
    b = discretize.generate(spec, 1e3, scheme="median")
    assert np.array_equal(a.primes, b.primes)
    r1 = discretize.generate(spec, 1e3, scheme="random", seed=5)
    r2 = discretize.generate(spec, 1e3, scheme="random", seed=5)
    r3 = discretize.generate(spec, 1e3, scheme="random", seed=6)
    assert np.array_equal(r1.primes, r2.primes)
    assert not np.array_equal(r1.primes, r3.primes)
    # randomized primes stay inside their blocks
    cum = system.cumulative_density(spec, 1e3)
    F = cum.eval(r1.log_primes)
    assert np.all(np.floor(F - 1e-12) == np.arange(len(r1)))


def test_random_scheme_needs_seed(spec):
    with pytest.raises(ValueError):
        discretize.generate(spec, 1e3, scheme="random")
    with pytest.raises(ValueError):
        discretize.generate(spec, 1e3, scheme="sobol")


def test_discrepancy_small_against_envelope(spec, P_median):
    for x in (1e2, 1e4):
        for t in (0.5, 50.0, 5e3):
            d = discretize.exp_sum_discrepancy(P_median, spec, x, t)
            assert d <= 10.0 * discretize.discrepancy_envelope(x, t)


def test_exp_sum_at_t_zero_is_counting_gap(spec, P_median):
    # at t = 0 the discrepancy degenerates to |pi(x) - Pi_C(x)|
    x = 4000.0
    d = discretize.exp_sum_discrepancy(P_median, spec, x, 0.0)
    cum = system.cumulative_density(spec, 1e4)
    gap = abs(discretize.pi_count(P_median, x) - float(cum.eval(math.log(x))[0]))
    assert d == pytest.approx(gap, abs=1e-6)


def test_save_load_roundtrip(tmp_path, spec):
    P = discretize.generate(spec, 1e3, scheme="random", seed=42)
    path = tmp_path / "primes.bin"
    discretize.save(P, path)
    Q = discretize.load(path)
    assert np.array_equal(P.primes, Q.primes)
    assert Q.scheme == "random" and Q.seed == 42
    assert Q.x_max == P.x_max
    assert Q.spec.params.beta == 0.5 and Q.spec.params.K == 2
    assert Q.spec.truncated
