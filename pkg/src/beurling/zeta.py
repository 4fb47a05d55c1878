"""Zeta evaluators, residues, and the log-gap survey.

zeta_C(s) = s/(s-1) * prod_k G(l_k (s - rho_k)) G(l_k (s - rho_bar_k)) for
sigma >= 1; the finite products zeta_{C,K} continue to the whole plane.  The
same function is reachable through exp of the Mellin transform of the prime
measure, which gives the dual-route identity checks.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .gfun import eval_G, log_G
from .gdensity import eval_g_w, g_poly, N_CAP
from .oscquad import filon
from .system import mellin_f_C, li
from .counting import MixedMeasure, _powers_of

__all__ = [
    "zeta_from_measure", "zeta_C_product", "zeta_CK", "log_zeta_CK",
    "zeta_K", "log_zeta_gap", "bound_survey", "residue_aK", "density_a",
    "density_a_continuous", "ZetaBoundReport",
]


class EvaluationError(RuntimeError):
    pass


def _factor_args(params, K, s):
    l = params.l[:K].astype(float)
    return l[:, None] * (s - np.stack([params.rho[:K],
                                       np.conj(params.rho[:K])], axis=1))


def zeta_CK(params, K, s):
    """The finite product zeta_{C,K}(s); meromorphic, valid for all s != 1."""
    s = complex(s)
    if s == 1.0:
        raise EvaluationError("simple pole at s = 1")
    z = _factor_args(params, K, s)
    return s / (s - 1.0) * np.prod(eval_G(z.ravel()))


def log_zeta_CK(params, K, s):
    """log zeta_{C,K} as sum of per-factor logs; needs Re of every factor arg > 0."""
    s = complex(s)
    if s == 1.0:
        raise EvaluationError("simple pole at s = 1")
    z = _factor_args(params, K, s)
    total = np.log(s / (s - 1.0))
    for zz in z.ravel():
        g = eval_G(zz)
        if abs(g - 1.0) < 0.9:
            total += np.log1p(g - 1.0)
        else:
            total += log_G(zz)
    return total


def _product_tail_bound(params, s, K_from):
    """Bound on |sum_{k >= K_from} log factors| via the G approximation."""
    total = 0.0
    sigma = s.real
    for k in range(K_from, K_from + 200):
        lk = 4.0 ** k
        x = lk * (sigma - 1.0) + 1.0
        u = 2.0 * (math.exp(-x) + math.exp(-2.0 * x)) / x
        total += 2.0 * u  # |log(1+u)| <= 2u once u <= 1/2, two factors per k
        if u < 1e-18:
            break
    return total


def zeta_C_product(params, s, tol=1e-10):
    """zeta_C(s) for Re s > 1 by the infinite product, with a certified cut.

    Returns (value, K_used); factors are multiplied until the analytic tail
    bound drops below tol.
    """
    s = complex(s)
    if s == 1.0:
        raise EvaluationError("simple pole at s = 1")
    if s.real <= 1.0:
        raise EvaluationError("the infinite product needs Re s > 1")
    K_used = 1
    while _product_tail_bound(params, s, K_used + 1) > tol:
        K_used += 1
        if K_used > params.K:
            raise EvaluationError(
                f"tail not certifiable below tol={tol} with K={params.K}"
            )
    return zeta_CK(params, K_used, s), K_used


def zeta_from_measure(m, s, tol=1e-9):
    """zeta(s) = exp( sum atoms w loc^-s + integral v^-s f(v) dv ).

    The density part (when present) needs Re s > 1; its cut carries the
    analytic tail bound used by mellin_f_C.
    """
    s = complex(s)
    total = 0.0 + 0.0j
    if m.atom_count:
        total += np.sum(m.atom_weights * np.exp(-s * np.log(m.atom_locs)))
    if m.density_spec is not None:
        if s.real <= 1.0:
            raise EvaluationError("unbounded density tail needs Re s > 1")
        full = mellin_f_C(m.density_spec, s, tol=tol)
        if m.crossover > 1.0:
            full -= mellin_f_C(m.density_spec, s,
                               w_hi=math.log(m.crossover), tol=tol)
        total += full
    return np.exp(total)


def log_zeta_gap(P, spec, K, s):
    """log zeta_K(s) - log zeta_{C,K}(s), an entire function of s.

    Equals the prime-power sum minus the density integral over
    [1, min(e^(4^(K+1)), x_max)]; evaluated for Re s >= 3/4.
    """
    s = complex(s)
    if s.real < 0.75:
        raise EvaluationError("gap is surveyed on Re s >= 3/4")
    X = math.exp(4.0 ** (K + 1)) if 4.0 ** (K + 1) < 700 else math.inf
    X = min(X, P.x_max)
    lp, nu = _powers_of(P, X)
    atoms = np.sum(np.exp(-s * lp * nu) / nu) if nu.size else 0.0
    integral = mellin_f_C(spec, s, w_hi=math.log(X), tol=1e-10)
    return atoms - integral


def zeta_K(P, spec, K, s):
    """zeta of the mixed system Pi_K: zeta_{C,K} * exp(gap)."""
    return zeta_CK(spec.params, K, s) * np.exp(log_zeta_gap(P, spec, K, s))


def residue_aK(params, K):
    """a_K = res_{s=1} zeta_{C,K}(s) = prod_{k<=K} G(1 - i l_k g_k) G(1 + i l_k g_k)."""
    if K == 0:
        return 1.0
    z = _factor_args(params, K, 1.0 + 0.0j)
    return float(np.prod(eval_G(z.ravel())).real)


def density_a_continuous(params, K, tol=1e-12):
    """a_K via the exp-integral route for the continuous system f_{C,K}.

    exp( integral_1^inf (f_{C,K}(u) - dLi/du) du/u ): the Li part cancels the
    main term of f_{C,K} exactly, leaving one Mellin integral of g per k.
    """
    total = 0.0
    for k in range(1, K + 1):
        lk = float(params.l[k - 1])
        gam = params.gamma[k - 1]
        # substitute u = w / l_k: -2 Re integral_1^inf g(e^u) e^-u e^{i l_k gam u} du
        W = 10.0
        while 2.0 / W * math.exp(-W) > tol / 4.0:
            W += 5.0
        if W > N_CAP:
            raise EvaluationError("tolerance not reachable within g range")
        poly = g_poly()
        amp = lambda u: poly(u) * np.exp(-u)
        val = filon(amp, 1.0, W, lk * gam, knots=np.arange(1, int(W) + 1),
                    max_h=1.0, rtol=1e-14, atol=tol / 10.0)
        total -= 2.0 * val.real
    return math.exp(total)


def density_a(P, horizon=None):
    """a-hat = exp( integral_1^H (dPi(u) - dLi(u))/u ) for the discrete system.

    Returns (a_hat, tail_estimate): the tail is bounded through
    |Pi - Li| <= C sqrt(u) with C measured at the horizon.
    """
    H = P.x_max if horizon is None else min(horizon, P.x_max)
    lp, nu = _powers_of(P, H)
    atom_part = float(np.sum(np.exp(-lp * nu) / nu))
    # integral_1^H dLi(u)/u = integral_0^log H (1 - e^-w)/w dw
    W = math.log(H)
    from .oscquad import gl_integrate
    li_part = gl_integrate(
        lambda w: np.where(w > 0, (1.0 - np.exp(-w)) / np.where(w > 0, w, 1.0), 1.0),
        0.0, W, max_h=0.5)
    # measured discrepancy constant at the horizon drives the tail estimate
    Pi_H = float(np.sum(1.0 / nu)) if nu.size else 0.0
    C = abs(Pi_H - li(H)) / math.sqrt(H) + 1.0
    tail = 3.0 * C / math.sqrt(H)
    return math.exp(atom_part - li_part), tail


@dataclass
class ZetaBoundReport:
    """Samples of |zeta_K| along the survey curves with bound categories."""

    curve: str
    sigma: np.ndarray
    t: np.ndarray
    abs_zeta: np.ndarray
    category: list
    ratio: np.ndarray
    A_hat: float
    B_hat: float
    notes: dict = field(default_factory=dict)

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write("sigma,t,abs_zeta,category,ratio\n")
            for sg, tt, az, c, r in zip(self.sigma, self.t, self.abs_zeta,
                                        self.category, self.ratio):
                fh.write(f"{sg:.17g},{tt:.17g},{az:.17g},{c},{r:.17g}\n")


def _categorize(params, K, t):
    """The lemma's case split by gamma_k windows for k in [k(beta), K]."""
    if t <= 2.0:
        return "small-t", None
    for k in range(max(params.k_beta, 1), K + 1):
        gam = params.gamma[k - 1]
        if abs(t - gam) < gam / 2.0:
            return "window", k
    return "generic", None


def measure_gap_constants(P, spec, K, t_grid=None, sigma=0.75):
    """Measured A-hat, B-hat of |log zeta_K - log zeta_{C,K}| on Re s = sigma."""
    if t_grid is None:
        t_grid = np.concatenate([[0.0, 1.0], np.exp(np.linspace(
            math.log(2.0), math.log(1e4), 25))])
    gaps = np.array([abs(log_zeta_gap(P, spec, K, sigma + 1j * t))
                     for t in t_grid])
    small = t_grid <= 2.0
    A_hat = float(np.max(gaps[small])) if np.any(small) else float(gaps[0])
    big = t_grid > 2.0
    if np.any(big):
        B_hat = float(np.max(
            np.maximum(gaps[big] - A_hat, 0.0) / np.sqrt(np.log(t_grid[big]))))
    else:
        B_hat = 0.0
    return A_hat, B_hat, t_grid, gaps


def bound_survey(P, spec, K, x_anchor, n_t=80):
    """|zeta_K| along sigma_1 and sigma(t), classified per the bound lemma.

    sigma_1 = 1 - (1/2)(log x)^(beta-1); sigma(t) = 1 - (1/4) log|t|/log x.
    Ratios are |zeta_K| over the category's bound shape with unit constants
    (the lemma's constants are existential); report-only.
    """
    params = spec.params
    beta = params.beta
    logx = math.log(x_anchor)
    sigma1 = 1.0 - 0.5 * logx ** (beta - 1.0)
    A_hat, B_hat, _, _ = measure_gap_constants(P, spec, K)

    t_hi = 3.0 * params.gamma[K - 1]
    ts = np.exp(np.linspace(math.log(0.1), math.log(t_hi), n_t))
    rows = {"sigma": [], "t": [], "abs": [], "cat": [], "ratio": []}
    for t in ts:
        on_half = t >= 2.0 * params.gamma[K - 1]
        sigma = (1.0 - 0.25 * math.log(max(t, 2.0)) / logx) if on_half else sigma1
        s = sigma + 1j * t
        az = abs(zeta_K(P, spec, K, s)) if sigma >= 0.75 else abs(
            zeta_CK(params, K, s)) * math.exp(A_hat + B_hat * math.sqrt(
                math.log(max(t, 2.0))))
        cat, k0 = _categorize(params, K, t)
        if on_half:
            cat = "halfplane"
            shape = math.exp(B_hat * math.sqrt(math.log(max(t, 2.0))))
        elif cat == "small-t":
            shape = 1.0 / abs(sigma - 1.0)
        elif cat == "generic":
            shape = math.exp(B_hat * math.sqrt(math.log(t)))
        else:
            gam = params.gamma[k0 - 1]
            d = 4.0 ** k0 * abs(s - params.rho[k0 - 1])
            base = math.exp(B_hat * math.sqrt(math.log(t)))
            shape = base * (1.0 + t / d) if d >= 1.0 else base
            cat = f"window-k{k0}" + ("-near" if d < 1.0 else "-far")
        rows["sigma"].append(sigma)
        rows["t"].append(t)
        rows["abs"].append(az)
        rows["cat"].append(cat)
        rows["ratio"].append(az / shape)
    return ZetaBoundReport(
        curve="sigma1+sigma(t)",
        sigma=np.array(rows["sigma"]), t=np.array(rows["t"]),
        abs_zeta=np.array(rows["abs"]), category=rows["cat"],
        ratio=np.array(rows["ratio"]), A_hat=A_hat, B_hat=B_hat,
        notes={"x_anchor": x_anchor, "sigma1": sigma1},
    )
