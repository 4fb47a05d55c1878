"""The continuous generalized number system.

Parameters l_k = 4^k, gamma_k = exp(4^(beta k)), rho_k = 1 - 1/l_k + i gamma_k
place zeta zeros on the curve sigma = 1 - 1/(log t)^(1/beta).  The prime
density is

    f_C(v) = (1 - 1/v)/log v
             - 2 sum_k g(v^(1/l_k)) v^(-1/l_k) cos(gamma_k log v) / l_k,

positive and Chebyshev-bounded for v >= e^4.  Truncating the sum at K gives
f_{C,K}, which agrees with f_C below e^(4^(K+1)).
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .gdensity import eval_g_w, g_poly, N_CAP
from .oscquad import filon, gl_integrate, CumulativeDensity

# gamma_k overflows double once 4^(beta k) > ~709
_LOG_GAMMA_MAX = 700.0


class ParameterError(ValueError):
    pass


class ConstructionError(RuntimeError):
    """The measured construction violates a guaranteed bound."""


@dataclass(frozen=True)
class SystemParams:
    """beta, truncation level K, and the derived l_k, gamma_k, rho_k, k(beta)."""

    beta: float
    K: int
    l: np.ndarray
    gamma: np.ndarray
    rho: np.ndarray
    k_beta: int

    def __post_init__(self):
        if not np.all(np.diff(self.gamma) > 0):
            raise ParameterError("gamma_k must be strictly increasing")


def make_params(beta, K):
    """Build SystemParams; k(beta) is the first k from which 3 gamma_k < gamma_{k+1}."""
    if not 0.0 < beta < 1.0:
        raise ParameterError(f"beta must be in (0,1), got {beta}")
    if K < 1:
        raise ParameterError("K must be >= 1")
    k = np.arange(1, K + 1)
    log_gamma = 4.0 ** (beta * k)
    if np.any(log_gamma > _LOG_GAMMA_MAX):
        raise ParameterError(f"gamma_k overflows double for K={K} at beta={beta}")
    l = 4 ** k
    gamma = np.exp(log_gamma)
    rho = (1.0 - 1.0 / l) + 1j * gamma
    # 3 gamma_k < gamma_{k+1}  <=>  log 3 < 4^(beta k) (4^beta - 1); monotone in k
    k_beta = 1
    while math.log(3.0) >= 4.0 ** (beta * k_beta) * (4.0**beta - 1.0):
        k_beta += 1
    return SystemParams(beta=beta, K=K, l=l, gamma=gamma, rho=rho, k_beta=k_beta)


@dataclass(frozen=True)
class DensitySpec:
    """f_C (mode 'full') or its truncation f_{C,K} (mode 'truncated')."""

    params: SystemParams
    truncated: bool = False

    @property
    def mode(self):
        return "truncated" if self.truncated else "full"

    def active_terms(self, w_max):
        """Indices k whose term can be nonzero for log v <= w_max."""
        ks = [int(k) for k, lk in enumerate(self.params.l, start=1) if lk <= w_max]
        if not self.truncated and 4.0 ** (self.params.K + 1) <= w_max:
            raise ParameterError(
                "full-mode density needs params.K large enough to cover w_max"
            )
        return ks


def li(x):
    """Li(x) = integral_1^x (1 - 1/u)/log u du; the integrand extends by 1 at u=1."""
    if x < 1.0:
        raise ValueError("li requires x >= 1")
    if x == 1.0:
        return 0.0
    w_max = math.log(x)
    f = lambda w: np.where(w > 0, (1.0 - np.exp(-w)) / np.where(w > 0, w, 1.0), 1.0) \
        * np.exp(w)
    return gl_integrate(f, 0.0, w_max, max_h=0.5)


def f_C(v, spec):
    """The prime density, vectorized; f_C(1) = 1 by continuous extension."""
    v = np.asarray(v, dtype=float)
    scalar = v.ndim == 0
    v = np.atleast_1d(v)
    if np.any(v < 1.0):
        raise ValueError("f_C requires v >= 1")
    w = np.log(v)
    out = np.where(w > 0, (1.0 - np.exp(-w)) / np.where(w > 0, w, 1.0), 1.0)
    p = spec.params
    for k in spec.active_terms(float(np.max(w))):
        lk = p.l[k - 1]
        m = w >= lk
        if not np.any(m):
            continue
        wk = w[m] / lk
        out[m] -= (2.0 / lk) * eval_g_w(wk) * np.exp(-wk) * np.cos(p.gamma[k - 1] * w[m])
    return out[0] if scalar else out


def _term_knots(lk, w_lo, w_hi):
    """g(v^(1/l_k)) has knots where log v is an integer multiple of l_k."""
    lo = int(math.floor(w_lo / lk))
    hi = int(math.ceil(w_hi / lk))
    return [m * lk for m in range(max(lo, 1), hi + 1)]


def _term_integral(p, k, s, w_lo, w_hi, rtol=1e-12, atol=0.0):
    """integral of v^{-s} * (-2/l_k) g(v^(1/l_k)) v^(-1/l_k) cos(gamma_k log v) dv
    over log v in [w_lo, w_hi], as a pair of Filon integrals."""
    lk = float(p.l[k - 1])
    gam = p.gamma[k - 1]
    w_lo = max(w_lo, lk)
    if w_hi <= w_lo:
        return 0.0 + 0.0j
    c = 1.0 - s.real - 1.0 / lk
    amp = lambda w: eval_g_w(w / lk) * np.exp(c * w)
    knots = _term_knots(lk, w_lo, w_hi)
    max_h = min(1.0, 3.0 / max(abs(c), 1.0))
    a = filon(amp, w_lo, w_hi, gam - s.imag, knots, max_h, rtol=rtol, atol=atol)
    b = filon(amp, w_lo, w_hi, -gam - s.imag, knots, max_h, rtol=rtol, atol=atol)
    return -(a + b) / lk


def mellin_f_C(spec, s, w_hi=None, tol=1e-9):
    """integral_1^X v^{-s} f(v) dv for f = f_C or f_{C,K}, X = e^w_hi.

    With w_hi None the integral runs to infinity: requires Re s > 1 and the
    cut is chosen so the analytic tail bound 2 e^{(1-sigma)W}/((sigma-1) W)
    stays below tol/2.
    """
    s = complex(s)
    p = spec.params
    if w_hi is None:
        if s.real <= 1.0:
            raise ValueError("infinite Mellin integral needs Re s > 1")
        w_hi = 10.0
        while 2.0 * math.exp((1.0 - s.real) * w_hi) / ((s.real - 1.0) * w_hi) > tol / 2:
            w_hi += 5.0
            if w_hi > (N_CAP - 1) * float(p.l[0]):
                raise ValueError(f"tolerance {tol} not reachable within g range")
    c = 1.0 - s.real
    main_amp = lambda w: np.where(
        w > 0, (1.0 - np.exp(-w)) / np.where(w > 0, w, 1.0), 1.0
    ) * np.exp(c * w)
    max_h = min(1.0, 3.0 / max(abs(c), 1.0))
    total = filon(main_amp, 0.0, w_hi, -s.imag, (), max_h, rtol=1e-13, atol=tol / 10)
    for k in spec.active_terms(w_hi):
        total += _term_integral(p, k, s, 0.0, w_hi, rtol=1e-13, atol=tol / 10)
    return total


def Pi_C(x, spec, tol=1e-9):
    """Pi_C(x) = integral_1^x f(v) dv with an absolute error estimate.

    Returns (value, err): the main term is Li(x); each oscillatory term is a
    Filon integral with oscillation-aware panels split at the g-knots.
    """
    if x < 1.0:
        raise ValueError("Pi_C requires x >= 1")
    if x == 1.0:
        return 0.0, 0.0
    w_hi = math.log(x)
    total = li(x)
    err = 1e-14 * abs(total)
    for k in spec.active_terms(w_hi):
        val = _term_integral(spec.params, k, 0.0 + 0.0j, 0.0, w_hi,
                             rtol=1e-13, atol=tol / 10)
        total += val.real
        err += tol / 10
    return total, err


@lru_cache(maxsize=16)
def _cumulative_cached(params_key, truncated, w_max):
    beta, K = params_key
    spec = DensitySpec(make_params(beta, K), truncated=truncated)
    p = spec.params
    knots = []
    max_h = 0.5
    for k in spec.active_terms(w_max):
        knots += _term_knots(p.l[k - 1], 0.0, w_max)
        max_h = min(max_h, 8.0 / p.gamma[k - 1])
    f_w = lambda w: f_C(np.exp(w), spec) * np.exp(w)
    return CumulativeDensity(f_w, w_max, knots=sorted(set(knots)), max_h=max_h)


def cumulative_density(spec, x_max):
    """CumulativeDensity of f in w over [0, log x_max] (cached per system)."""
    return _cumulative_cached((spec.params.beta, spec.params.K), spec.truncated,
                              float(math.log(x_max)))


def chebyshev_delta(spec, v_grid=None, strict=True):
    """delta_hat = max |f(v) log v / (1 - 1/v) - 1| over the grid (v >= e^4).

    A value >= 1 contradicts the guaranteed Chebyshev estimates and raises
    ConstructionError unless ``strict`` is off.
    """
    if v_grid is None:
        v_grid = np.exp(np.linspace(4.0, 40.0, 512))
    v = np.asarray(v_grid, dtype=float)
    if np.any(v < math.exp(4.0) * (1.0 - 1e-12)):
        raise ValueError("chebyshev_delta grid must lie in [e^4, inf)")
    f = f_C(v, spec)
    delta = float(np.max(np.abs(f * np.log(v) / (1.0 - 1.0 / v) - 1.0)))
    if strict and delta >= 1.0:
        raise ConstructionError(f"Chebyshev delta >= 1: {delta}")
    return delta


def li_asymptotic_ratio(x):
    """Li(x) log x / x, the classical sanity ratio (tends to 1)."""
    return li(x) * math.log(x) / x


def li_quad_oracle(x):
    """Independent Li oracle via scipy adaptive quadrature in u."""
    f = lambda u: (1.0 - 1.0 / u) / math.log(u) if u > 1.0 else 1.0
    val, _ = quad(f, 1.0, x, limit=500)
    return val
