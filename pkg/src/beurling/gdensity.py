"""The density g(u) = sum_{n>=1} chi^{*n}(u)/n as an exact piecewise polynomial.

chi is the indicator of [e, e^2]; in w = log u it becomes the indicator of
[1, 2], and multiplicative convolution becomes additive convolution.  So
chi^{*n} in w is the n-fold convolution of an indicator: a B-spline of
degree n-1 supported on [n, 2n] with integer knots.  All pieces carry their
coefficients in the shifted variable (w - left knot) for conditioning.
"""

import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .oscquad import filon

N_CAP = 64

# sup of g(u) * log u (attained at u = e^2); used for Mellin tail bounds
G_TIMES_W_SUP = 2.0

# -(1/2) log(pi/2), the decay exponent from the zero-strip bound
DECAY_EXPONENT = -0.5 * math.log(math.pi / 2.0)


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class LogPiecewisePolynomial:
    """Piecewise polynomial in w = log u on consecutive integer knots.

    ``pieces[i]`` holds coefficients (low order first) in the local variable
    w - knots[i], valid on [knots[i], knots[i] + 1).  Zero outside the knots.
    """

    knots: np.ndarray
    pieces: tuple = field(repr=False)

    @property
    def support(self):
        return float(self.knots[0]), float(self.knots[0] + len(self.pieces))

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        scalar = w.ndim == 0
        w = np.atleast_1d(w)
        out = np.zeros_like(w)
        k0 = int(self.knots[0])
        idx = np.floor(w).astype(int) - k0
        ok = (idx >= 0) & (idx < len(self.pieces))
        for i in np.unique(idx[ok]):
            m = ok & (idx == i)
            s = w[m] - (k0 + i)
            c = self.pieces[i]
            v = np.zeros_like(s)
            for cc in c[::-1]:
                v = v * s + cc
            out[m] = v
        return out[0] if scalar else out

    def derivative(self):
        new = []
        for c in self.pieces:
            if len(c) <= 1:
                new.append(np.zeros(1))
            else:
                new.append(c[1:] * np.arange(1, len(c)))
        return LogPiecewisePolynomial(self.knots, tuple(new))

    def degree_on(self, m):
        """Polynomial degree of the piece on [m, m+1)."""
        i = m - int(self.knots[0])
        c = self.pieces[i]
        nz = np.nonzero(np.abs(c) > 1e-300)[0]
        return int(nz[-1]) if nz.size else 0


_conv_cache = {}
_g_cache = {}
_cache_lock = threading.Lock()


def convolution_power(n, n_cap=N_CAP):
    """chi^{*n} in w: B-spline of degree n-1 on [n, 2n], by the stable recurrence.

    Uses M_n(t) = (t M_{n-1}(t) + (n - t) M_{n-1}(t - 1)) / (n - 1) for the
    cardinal B-spline M_n on [0, n]; chi^{*n}(w) = M_n(w - n).  The
    alternating-sum closed form is avoided (it cancels catastrophically).
    """
    if not 1 <= n <= n_cap:
        raise DomainError(f"n must be in [1, {n_cap}]")
    with _cache_lock:
        top = max(_conv_cache) if _conv_cache else 0
        if top < n:
            if top == 0:
                _conv_cache[1] = (np.array([1.0]),)
                top = 1
            for m in range(top + 1, n + 1):
                prev = _conv_cache[m - 1]
                cur = []
                for j in range(m):
                    acc = np.zeros(m)
                    if j <= m - 2:
                        p = prev[j]
                        acc[: len(p)] += j * p
                        acc[1: len(p) + 1] += p
                    if 0 <= j - 1 <= m - 2:
                        q = prev[j - 1]
                        acc[: len(q)] += (m - j) * q
                        acc[1: len(q) + 1] -= q
                    cur.append(acc / (m - 1))
                _conv_cache[m] = tuple(cur)
        pieces = _conv_cache[n]
    return LogPiecewisePolynomial(np.arange(n, 2 * n + 1), pieces)


def g_poly(n_cap=N_CAP):
    """g in w on [1, n_cap + 1): exact finite sums of chi^{*n}/n per unit interval."""
    with _cache_lock:
        if n_cap in _g_cache:
            return _g_cache[n_cap]
    convs = [convolution_power(n, n_cap) for n in range(1, n_cap + 1)]
    pieces = []
    for m in range(1, n_cap + 1):
        acc = np.zeros(max(1, m))
        for n in range(1, m + 1):
            if n <= m <= 2 * n - 1:
                c = convs[n - 1].pieces[m - n]
                acc[: len(c)] += c / n
        pieces.append(acc)
    poly = LogPiecewisePolynomial(np.arange(1, n_cap + 2), tuple(pieces))
    with _cache_lock:
        _g_cache[n_cap] = poly
    return poly


def eval_g_w(w, n_cap=N_CAP):
    """g as a function of w = log u; exact for w < n_cap + 1."""
    w = np.asarray(w, dtype=float)
    if np.any(w >= n_cap + 1):
        raise DomainError(f"g is only built up to w = {n_cap + 1}")
    return g_poly(n_cap)(w)


def eval_g(u, n_cap=N_CAP):
    """g(u) for u >= 1; zero below e, identically 1 on (e, e^2)."""
    u = np.asarray(u, dtype=float)
    if np.any(u < 1.0):
        raise DomainError("g requires u >= 1")
    return eval_g_w(np.log(u), n_cap)


def eval_g_derivative(u, n_cap=N_CAP):
    """g'(u) for u >= e^5 (where g is differentiable), via the w-chain rule."""
    u = np.asarray(u, dtype=float)
    if np.any(u < math.exp(5.0)):
        raise DomainError("g' is only provided for u >= e^5")
    w = np.log(u)
    if np.any(w >= n_cap + 1):
        raise DomainError(f"g is only built up to w = {n_cap + 1}")
    return g_poly(n_cap).derivative()(w) / u


def mellin_tail_bound(w_cut, re_z):
    """|integral_{w_cut}^inf g(e^w) e^{-z w} dw| <= sup(g*w)/w_cut * e^{-x w}/x."""
    return G_TIMES_W_SUP / w_cut * math.exp(-re_z * w_cut) / re_z


def mellin_log_G(z, tol=1e-9, n_cap=N_CAP):
    """log G(z) = -integral_1^inf g(u) u^{-z-1} du, by Filon quadrature in w.

    The integral is cut at W with the analytic tail bound below tol/2; raises
    if no admissible cut exists within the built range of g.
    """
    z = complex(z)
    if z.real <= 0:
        raise DomainError("mellin_log_G requires Re z > 0")
    w_cut = None
    for W in range(8, n_cap + 1):
        if mellin_tail_bound(W, z.real) <= tol / 2.0:
            w_cut = W
            break
    if w_cut is None:
        raise DomainError(f"tolerance {tol} not achievable with n_cap={n_cap}")
    poly = g_poly(n_cap)
    amp = lambda w: poly(w) * np.exp(-z.real * w)
    val = filon(amp, 1.0, float(w_cut), -z.imag,
                knots=np.arange(1, w_cut + 1), max_h=1.0,
                rtol=1e-13, atol=tol / 10.0)
    return -val


def decay_envelope(w_lo=3.0, w_hi=14.0, points_per_unit=2000, n_cap=N_CAP):
    """Per-unit-interval maxima of s(u) = |g(u) log u - 1| * u^{-DECAY_EXPONENT}.

    Returns (w_at_max, s_max, raw_max_of_|g log u - 1|) arrays, one row per
    unit interval of w.
    """
    poly = g_poly(n_cap)
    rows = []
    for a in range(int(w_lo), int(w_hi)):
        w = np.linspace(a, a + 1, points_per_unit, endpoint=False)[1:]
        r = np.abs(poly(w) * w - 1.0)
        s = r * np.exp(-DECAY_EXPONENT * w)
        i = int(np.argmax(s))
        rows.append((w[i], s[i], r[int(np.argmax(r))]))
    return np.array(rows)


def decay_slope(w_lo=5.0, w_hi=14.0, n_cap=N_CAP):
    """Regression slope of the log-envelope of |g(u) log u - 1| versus log u."""
    poly = g_poly(n_cap)
    pts = []
    for a in range(int(w_lo), int(w_hi)):
        w = np.linspace(a, a + 1, 2000, endpoint=False)[1:]
        r = np.abs(poly(w) * w - 1.0)
        i = int(np.argmax(r))
        pts.append((w[i], r[i]))
    pts = np.array(pts)
    slope = np.polyfit(pts[:, 0], np.log(pts[:, 1]), 1)[0]
    return float(slope), pts


def derivative_decay_envelope(w_lo=5.0, w_hi=14.0, points_per_unit=2000,
                              n_cap=N_CAP):
    """Per-unit maxima of |(g(u) log u)'| * u^{1 - DECAY_EXPONENT} (u-derivative)."""
    poly = g_poly(n_cap)
    dpoly = poly.derivative()
    rows = []
    for a in range(int(w_lo), int(w_hi)):
        w = np.linspace(a, a + 1, points_per_unit, endpoint=False)[1:]
        # d/du [g log u] = (g'(w) w + g(w)) / u
        val = np.abs(dpoly(w) * w + poly(w)) * np.exp(-w)
        s = val * np.exp((1.0 - DECAY_EXPONENT) * w)
        i = int(np.argmax(s))
        rows.append((w[i], s[i]))
    return np.array(rows)
