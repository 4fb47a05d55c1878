import math

import numpy as np
import pytest

from beurling import counting, discretize, system, zeta


@pytest.fixture(scope="module")
def params():
    return system.make_params(0.5, 4)


@pytest.fixture(scope="module")
def P(params):
    spec = system.DensitySpec(system.make_params(0.5, 2), truncated=True)
    return discretize.generate(spec, 1e5, scheme="median")


def test_zeta_CK_pole_and_limit(params):
    with pytest.raises(zeta.EvaluationError):
        zeta.zeta_CK(params, 2, 1.0)
    # far right the product tends to s/(s-1)
    s = 40.0
    assert zeta.zeta_CK(params, 2, s) == pytest.approx(s / (s - 1), rel=1e-12)


def test_product_route_vs_measure_route(params):
    m = counting.continuous_measure(system.DensitySpec(params, truncated=False))
    for s in (1.3 + 0.0j, 1.5 + 7.0j, 2.0 - 30.0j, 3.0 + 100.0j):
        v1, K_used = zeta.zeta_C_product(params, s, tol=1e-10)
        v2 = zeta.zeta_from_measure(m, s, tol=1e-9)
        assert abs(v1 - v2) / abs(v1) < 1e-7
        assert 1 <= K_used <= params.K


def test_product_route_guards(params):
    with pytest.raises(zeta.EvaluationError):
        zeta.zeta_C_product(params, 0.9 + 2.0j)


def test_log_zeta_CK_is_a_log(params):
    for s in (1.5 + 3.0j, 1.2 + 20.0j, 2.0 + 100.0j):
        lv = zeta.log_zeta_CK(params, 3, s)
        assert abs(np.exp(lv) - zeta.zeta_CK(params, 3, s)) < 1e-9 * abs(np.exp(lv))


def test_residue_two_routes(params):
    assert zeta.residue_aK(params, 0) == 1.0
    for K in (1, 2, 3):
        a1 = zeta.residue_aK(params, K)
        a2 = zeta.density_a_continuous(params, K, tol=1e-12)
        assert abs(a1 - a2) <= 1e-10
    # residues stay within the guaranteed band (0, 1]
    assert 0.0 < zeta.residue_aK(params, 3) <= 1.0


def test_residue_pole_of_zeta_CK(params):
    # (s - 1) zeta_{C,K}(s) -> a_K as s -> 1
    K = 2
    a = zeta.residue_aK(params, K)
    for eps in (1e-4, 1e-5):
        v = (eps) * zeta.zeta_CK(params, K, 1.0 + eps)
        assert v == pytest.approx(a, rel=1e-3)


def test_zeta_from_measure_atoms_only():
    m = counting.atomic_measure(np.array([2.0, 3.0]), np.array([1.0, 1.0]))
    s = 2.0
    expected = math.exp(2.0**-s + 3.0**-s)
    assert zeta.zeta_from_measure(m, s) == pytest.approx(expected, rel=1e-14)


def test_log_zeta_gap_entire_side(P):
    spec = P.spec
    # the gap is the same analytic object evaluated two ways; it must be
    # moderate in size on Re s = 3/4 and tiny far right
    g_right = zeta.log_zeta_gap(P, spec, 1, 6.0 + 0.0j)
    assert abs(g_right) < 0.2
    g_line = zeta.log_zeta_gap(P, spec, 1, 0.75 + 10.0j)
    assert np.isfinite(g_line.real) and np.isfinite(g_line.imag)
    with pytest.raises(zeta.EvaluationError):
        zeta.log_zeta_gap(P, spec, 1, 0.5 + 1.0j)


def test_density_a_close_to_continuous_residue(P):
    a_hat, tail = zeta.density_a(P)
    assert tail > 0
    assert 0.1 < a_hat < 10.0


def test_bound_survey_report(P, tmp_path):
    rep = zeta.bound_survey(P, P.spec, 1, 1e5, n_t=12)
    assert len(rep.t) == 12
    assert set(rep.category) <= {"small-t", "generic", "halfplane",
                                 "window-k1-near", "window-k1-far",
                                 "window-k2-near", "window-k2-far"}
    assert np.all(np.isfinite(rep.ratio))
    path = tmp_path / "survey.csv"
    rep.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "sigma,t,abs_zeta,category,ratio"
    assert len(lines) == 13
