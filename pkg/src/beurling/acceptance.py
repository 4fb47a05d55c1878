"""The acceptance suite: eleven numbered criteria, shared by tests and CLI.

Each criterion function returns a CriterionResult with the measured numbers
in ``details``; thresholds are hard-coded here so the tests and the CLI
cannot drift apart.  Functions are independent and deterministic (fixed
seeds); expensive shared inputs (prime sequences) are cached per process.
"""

import functools
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import gfun, gdensity, system, discretize, counting, zeta, analysis


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d} {self.name}"


def _timed(fn):
    @functools.wraps(fn)
    def wrapper(*a, **k):
        t0 = time.perf_counter()
        res = fn(*a, **k)
        res.seconds = time.perf_counter() - t0
        return res
    return wrapper


@lru_cache(maxsize=4)
def _median_primes(x_max, beta=0.5, K=2):
    spec = system.DensitySpec(system.make_params(beta, K), truncated=True)
    return discretize.generate(spec, x_max, scheme="median")


@_timed
def criterion_1_zero_certification(n_max=50):
    """Zeros z_1..z_n_max lie in their strips, |G(z_n)| < 1e-10, winding = 1."""
    zeros = gfun.find_zeros(n_max, certify=True)
    worst = max(z.residual for z in zeros[1:])
    strips = all(z.strip_ok for z in zeros[1:])
    return CriterionResult(
        1, "zero certification", strips and worst < 1e-10,
        {"n_max": n_max, "max_residual": worst, "strips_ok": strips})


@_timed
def criterion_2_g_exactness_and_decay():
    """g = 1 on (e, e^2) to 1e-14; envelope slope of |g log u - 1| in [-0.26, -0.20]."""
    w = np.linspace(1.0 + 1e-9, 2.0 - 1e-9, 4001)
    plateau = float(np.max(np.abs(gdensity.eval_g_w(w) - 1.0)))
    slope, _ = gdensity.decay_slope(w_lo=5.0, w_hi=14.0)
    ok = plateau < 1e-14 and -0.26 <= slope <= -0.20
    return CriterionResult(
        2, "g exactness and decay", ok,
        {"plateau_error": plateau, "slope": slope,
         "slope_window": (-0.26, -0.20),
         "strip_bound_exponent": gdensity.DECAY_EXPONENT})


@_timed
def criterion_3_mellin_identity(n_samples=50, seed=20260823):
    """|log G(z) - (-integral g(u) u^(-z-1) du)| < 1e-6 at random sample points."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.5, 3.0, n_samples)
    y = rng.uniform(-20.0, 20.0, n_samples)
    worst = 0.0
    for z in x + 1j * y:
        gap = abs(gfun.log_G(z) - gdensity.mellin_log_G(z, tol=1e-9))
        worst = max(worst, gap)
    return CriterionResult(
        3, "Mellin identity", worst < 1e-6,
        {"n_samples": n_samples, "max_gap": worst})


@_timed
def criterion_4_chebyshev(beta=0.5, n_grid=512):
    """delta-hat < 1 and f_C > 0 on a 512-point log grid over [e^4, e^40]."""
    spec = system.DensitySpec(system.make_params(beta, 2), truncated=False)
    v = np.exp(np.linspace(4.0, 40.0, n_grid))
    delta = system.chebyshev_delta(spec, v, strict=False)
    f = system.f_C(v, spec)
    ok = delta < 1.0 and bool(np.all(f > 0))
    return CriterionResult(
        4, "Chebyshev bounds", ok,
        {"delta_hat": delta, "min_f": float(np.min(f)), "beta": beta})


@_timed
def criterion_5_zeta_identities(beta=0.5):
    """Product vs Mellin zeta to 1e-6 relative; residue routes to 1e-8 for K <= 3."""
    params = system.make_params(beta, 5)
    m = counting.continuous_measure(system.DensitySpec(params, truncated=False))
    worst_rel = 0.0
    for sigma in (1.2, 1.6, 2.0, 3.0):
        for t in (0.0, 3.0, -11.0, 40.0, 100.0):
            s = sigma + 1j * t
            v1, _ = zeta.zeta_C_product(params, s, tol=1e-10)
            v2 = zeta.zeta_from_measure(m, s, tol=1e-9)
            worst_rel = max(worst_rel, abs(v1 - v2) / abs(v1))
    worst_res = 0.0
    for K in (1, 2, 3):
        gap = abs(zeta.residue_aK(params, K)
                  - zeta.density_a_continuous(params, K, tol=1e-12))
        worst_res = max(worst_res, gap)
    ok = worst_rel < 1e-6 and worst_res <= 1e-8
    return CriterionResult(
        5, "zeta identities", ok,
        {"max_rel_gap": worst_rel, "max_residue_gap": worst_res})


@_timed
def criterion_6_discretization(x_max=1e6, beta=0.5, K=2, n_seeds=8):
    """Median scheme: |pi - integral f| <= 1 everywhere; both schemes: normalized
    exponential-sum discrepancy <= 10 over the (x, t) survey grid."""
    spec = system.DensitySpec(system.make_params(beta, K), truncated=True)
    P0 = _median_primes(x_max, beta, K)
    sup = discretize.pi_error_sup(P0)
    xs = [1e2, 1e3, 1e4, 1e5, 1e6]
    ts = [0.5, 5.0, 50.0, 500.0, 5e3, 5e4]
    seqs = [P0] + [discretize.generate(spec, x_max, scheme="random", seed=s)
                   for s in range(n_seeds)]
    worst = 0.0
    for P in seqs:
        for x in xs:
            for t in ts:
                d = discretize.exp_sum_discrepancy(P, spec, x, t)
                worst = max(worst, d / discretize.discrepancy_envelope(x, t))
    ok = sup <= 1.0 and worst <= 10.0
    return CriterionResult(
        6, "discretization bound", ok,
        {"pi_error_sup": sup, "max_normalized_discrepancy": worst,
         "n_seeds": n_seeds})


@_timed
def criterion_7_counting_oracle(seed=7, n_sets=20):
    """count_N == brute force on 20 random small systems; exp* matches count_N
    within the grid cell drift for x <= 1e5."""
    rng = np.random.default_rng(seed)
    exact = True
    for _ in range(n_sets):
        n = int(rng.integers(1, 7))
        primes = np.sort(rng.uniform(1.3, 50.0, n))
        x = float(rng.uniform(10.0, 1e4))
        a = counting.count_N(primes, x)
        b = counting.brute_force_count_N(primes, x)
        if a != b:
            exact = False
            break
    P = _median_primes(1e5)
    locs, nu = counting._powers_of(P, 1e5)
    m = counting.atomic_measure(np.exp(locs * nu), 1.0 / nu)
    h = counting.GRID_H
    edges, Ncum = counting.exp_star_cumulative(m, math.log(1e5), h=h)
    # atoms move by at most h/2 per factor; bracket with the max factor count
    drift = math.log(1e5) / P.log_primes[0] * h / 2.0
    bracket_ok = True
    worst_excess = 0.0
    for x in (1e2, 1e3, 1e4, 1e5):
        i = int(math.log(x) / h)
        val = Ncum[i]
        lo = counting.count_N(P, x * math.exp(-drift - h))
        hi = counting.count_N(P, x * math.exp(drift + h))
        if not (lo - 0.5 <= val <= hi + 0.5):
            bracket_ok = False
            worst_excess = max(worst_excess, max(lo - val, val - hi))
    ok = exact and bracket_ok
    return CriterionResult(
        7, "counting oracle equivalence", ok,
        {"brute_force_exact": exact, "expstar_bracket_ok": bracket_ok,
         "worst_excess": worst_excess})


@_timed
def criterion_8_perron(beta=0.5, x=50.0, kappa=1.25, T=1e5):
    """Dual-route integral_1^x N du agrees within 2% including the tail budget."""
    params = system.make_params(beta, 1)
    r = analysis.perron_check(params, 1, x, kappa=kappa, T=T)
    return CriterionResult(
        8, "Perron cross-check", r["rel_gap"] <= 0.02, r)


@_timed
def criterion_9_envelope(beta=0.5, center=32.0, half_width=0.2):
    """max of (x - psi_C)/E over the window in [1.7, 2.3], min in [-2.3, -1.7]."""
    params = system.make_params(beta, 3)
    rec_max = analysis.oscillation_search(params, center, half_width, +1)
    rec_min = analysis.oscillation_search(params, center, half_width, -1)
    ok = (1.7 <= rec_max.ratio <= 2.3) and (-2.3 <= rec_min.ratio <= -1.7)
    return CriterionResult(
        9, "envelope reproduction", ok,
        {"max_ratio": rec_max.ratio, "min_ratio": rec_min.ratio,
         "argmax_log_x": math.log(rec_max.x), "argmin_log_x": math.log(rec_min.x),
         "window": (center - half_width, center + half_width)})


@_timed
def criterion_10_psi_bridge(beta=0.5, K=2, n_pts=120):
    """|psi - psi_C|/(sqrt x log x) with running max stable over the top decades."""
    P = _median_primes(1e6, beta, K)
    params = P.spec.params
    xs = np.exp(np.linspace(math.log(1e2), math.log(1e6), n_pts))
    r = np.array([abs(counting.psi(P, x) - analysis.psi_C(params, x)[0])
                  / (math.sqrt(x) * math.log(x)) for x in xs])
    run_max = np.maximum.accumulate(r)
    i4 = int(np.searchsorted(xs, 1e4))
    growth = run_max[-1] / run_max[i4]
    ok = bool(np.isfinite(r).all()) and growth <= 1.1
    return CriterionResult(
        10, "discrete/continuous psi bridge", ok,
        {"sup_ratio": float(r.max()), "running_max_growth_top_decades": float(growth)})


@_timed
def criterion_11_N_density(beta=0.5, K=2, x_max=1e7, n_pts=60):
    """(N - a x)/x falls in running median over [1e3, 1e7]; fitted exponent > 0."""
    P = _median_primes(x_max, beta, K)
    a_hat, tail = zeta.density_a(P)
    xs = np.exp(np.linspace(math.log(1e3), math.log(x_max), n_pts))
    recs, c_hat = analysis.N_error_profile(P, a_hat, xs)
    rel = np.abs(np.array([v for _, v in recs]))
    run_med = np.array([np.median(rel[: i + 1]) for i in range(len(rel))])
    i4 = int(np.searchsorted(xs, 1e4))
    decreasing = run_med[-1] < run_med[i4]
    trend = float(np.polyfit(np.log(xs), np.log(run_med), 1)[0])
    ok = decreasing and trend < 0.0 and c_hat > 0.0
    return CriterionResult(
        11, "N-density profile", ok,
        {"a_hat": a_hat, "a_hat_tail": tail, "c_hat": c_hat,
         "running_median_trend": trend,
         "running_median_end_over_1e4": float(run_med[-1] / run_med[i4])})


ALL_CRITERIA = (
    criterion_1_zero_certification,
    criterion_2_g_exactness_and_decay,
    criterion_3_mellin_identity,
    criterion_4_chebyshev,
    criterion_5_zeta_identities,
    criterion_6_discretization,
    criterion_7_counting_oracle,
    criterion_8_perron,
    criterion_9_envelope,
    criterion_10_psi_bridge,
    criterion_11_N_density,
)


def run_all():
    return [fn() for fn in ALL_CRITERIA]
