import math

import numpy as np
import pytest

from beurling import counting, discretize, system


@pytest.fixture(scope="module")
def P(spec=None):
    spec = system.DensitySpec(system.make_params(0.5, 2), truncated=True)
    return discretize.generate(spec, 1e4, scheme="median")


def test_count_N_hand_case():
    # rational primes {2, 3}: integers up to 10 are 1,2,3,4,6,8,9
    assert counting.count_N(np.array([2.0, 3.0]), 10.0) == 7
    assert counting.count_N(np.array([2.0, 3.0]), 0.5) == 0
    assert counting.count_N(np.array([2.0, 3.0]), 1.0) == 1


def test_count_N_matches_brute_force():
    rng = np.random.default_rng(1234)
    for _ in range(20):
        n = int(rng.integers(1, 7))
        primes = np.sort(rng.uniform(1.3, 50.0, n))
        x = float(rng.uniform(10.0, 1e4))
        assert counting.count_N(primes, x) == counting.brute_force_count_N(primes, x)


def test_count_N_grid_consistency(P):
    edges, N = counting.count_N_grid(P, 1e3)
    for x in (10.0, 100.0, 999.0):
        i = int(math.log(x) / counting.GRID_H)
        direct = counting.count_N(P, math.exp(edges[i + 1]) * (1 - 1e-12))
        assert N[i] == direct


def test_horizon_guard(P):
    with pytest.raises(counting.HorizonError):
        counting.count_N(P, 1e8)


def test_psi_and_Pi_hand_case():
    spec = system.DensitySpec(system.make_params(0.5, 1), truncated=True)
    P23 = discretize.PrimeSequence(np.array([2.0, 3.0]), "median", None, 100.0, spec)
    # psi(10) = 3 log 2 + 2 log 3
    assert counting.psi(P23, 10.0) == pytest.approx(3 * math.log(2) + 2 * math.log(3))
    # Pi(10) = pi(10) + pi(sqrt 10)/2 + pi(10^(1/3))/3 = 2 + 1/2 + 1/3... with
    # pi(sqrt 10) = 2 and pi(10^(1/3)) = 1: 2 + 2/2 + 1/3 = 10/3
    assert counting.Pi_riemann(P23, 10.0) == pytest.approx(10.0 / 3.0)
    assert counting.pi_from_psi(P23, 10.0) == pytest.approx(10.0 / 3.0)


def test_Pi_routes_agree(P):
    for x in (10.0, 123.0, 9999.0):
        assert counting.Pi_riemann(P, x) == pytest.approx(
            counting.pi_from_psi(P, x), abs=1e-9)


def test_exp_star_of_single_prime():
    # dPi for one prime p = e: atoms 1/k at w = k. dN = exp*(dPi) must put
    # weight exactly 1 at every power (exp of sum x^k/k is the geometric series)
    h = 1.0 / 64.0
    a = np.zeros(300)
    for k in (1, 2, 3, 4):
        a[64 * k] = 1.0 / k
    n = counting.exp_star(a, h)
    assert n[0] == 1.0
    for k in (1, 2, 3, 4):
        assert n[64 * k] == pytest.approx(1.0)
    assert abs(n[65]) < 1e-12
    # dropping the higher powers leaves the factorial series exp*(delta)
    b = np.zeros(300)
    b[64] = 1.0
    m = counting.exp_star(b, h)
    assert m[128] == pytest.approx(0.5)
    assert m[192] == pytest.approx(1.0 / 6.0)


def test_exp_star_matches_dfs(P):
    locs, nu = counting._powers_of(P, 1e4)
    m = counting.atomic_measure(np.exp(locs * nu), 1.0 / nu)
    h = counting.GRID_H
    edges, Ncum = counting.exp_star_cumulative(m, math.log(1e4), h=h)
    drift = math.log(1e4) / P.log_primes[0] * h / 2.0
    for x in (1e2, 1e3, 1e4):
        i = int(math.log(x) / h)
        lo = counting.count_N(P, x * math.exp(-drift - h))
        hi = counting.count_N(P, x * math.exp(drift + h))
        assert lo - 0.5 <= Ncum[i] <= hi + 0.5


def test_exp_star_rejects_mass_at_origin():
    a = np.zeros(10)
    a[0] = 0.5
    with pytest.raises(ValueError):
        counting.exp_star(a, 0.1)


def test_build_Pi_K_truncation_guard(P):
    with pytest.raises(ValueError):
        counting.build_Pi_K(P, P.spec, 1)  # crossover e^16 > x_max
    m = counting.build_Pi_K(P, P.spec, 1, allow_truncation=True)
    assert m.truncated_at == P.x_max
    assert m.atom_count > 0
    assert m.density_spec.truncated


def test_write_counting_csv(tmp_path):
    path = tmp_path / "n.csv"
    counting.write_counting_csv(path, [1.0, 2.0], [3, 4.5])
    lines = path.read_text().splitlines()
    assert lines[0] == "x,value"
    assert lines[1].startswith("1,")
