"""Oscillatory and panel quadrature in logarithmic coordinates.

Everything here works in w = log u. The central tool is a Filon-Legendre
rule: on each panel the smooth amplitude is expanded in Legendre
polynomials from Gauss-Legendre node values and integrated against
e^(i*omega*w) exactly via spherical Bessel moments, so the panel count is
driven by the amplitude, not by the oscillation frequency.
"""

import numpy as np
from scipy.special import eval_legendre, spherical_jn

NODES = 24

_GL_X, _GL_W = np.polynomial.legendre.leggauss(NODES)
_LEG_AT_NODES = np.array([eval_legendre(j, _GL_X) for j in range(NODES)])
# node values -> Legendre coefficients (exact for degree < NODES)
_VAL_TO_COEF = _LEG_AT_NODES * _GL_W * (2.0 * np.arange(NODES)[:, None] + 1.0) / 2.0
_DEGREES = np.arange(NODES)
_I_POW = 1j ** _DEGREES


class QuadratureError(RuntimeError):
    """Requested tolerance could not be certified."""


def _panel_edges(a, b, knots, max_h):
    pts = np.array([a, b, *knots], dtype=float)
    pts = np.unique(pts[(pts >= a) & (pts <= b)])
    out = []
    for lo, hi in zip(pts[:-1], pts[1:]):
        n = max(1, int(np.ceil((hi - lo) / max_h)))
        out.append(np.linspace(lo, hi, n + 1))
    return np.unique(np.concatenate(out))


def _filon_pass(f, edges, omega):
    lo, hi = edges[:-1], edges[1:]
    h2 = (hi - lo) / 2.0
    mid = (lo + hi) / 2.0
    nodes = mid[:, None] + h2[:, None] * _GL_X[None, :]
    fv = np.asarray(f(nodes.ravel())).reshape(nodes.shape)
    coef = fv @ _VAL_TO_COEF.T
    theta = omega * h2
    jn = spherical_jn(
        _DEGREES[None, :].repeat(len(theta), axis=0), np.abs(theta)[:, None]
    )
    moments = 2.0 * _I_POW[None, :] * jn
    neg = theta < 0
    moments[neg] = np.conj(moments[neg])
    return np.sum(h2 * np.exp(1j * omega * mid) * (coef * moments).sum(axis=1))


def filon(f, a, b, omega, knots=(), max_h=1.0, rtol=1e-12, atol=0.0, max_levels=8):
    """integral_a^b f(w) e^(i*omega*w) dw for smooth vectorized f.

    Panels are split at ``knots`` and refined globally until two successive
    levels agree to the requested tolerance.
    """
    if b <= a:
        return 0.0 + 0.0j
    edges = _panel_edges(a, b, knots, max_h)
    prev = _filon_pass(f, edges, omega)
    for _ in range(max_levels):
        edges = np.unique(np.concatenate([edges, (edges[:-1] + edges[1:]) / 2.0]))
        cur = _filon_pass(f, edges, omega)
        if abs(cur - prev) <= rtol * abs(cur) + atol:
            return cur
        prev = cur
    raise QuadratureError(
        f"filon did not converge on [{a}, {b}] at omega={omega}: "
        f"last delta {abs(cur - prev):.3e}"
    )


def gl_integrate(f, a, b, knots=(), max_h=0.5, rtol=1e-12, atol=0.0, max_levels=8):
    """Adaptive panel Gauss-Legendre integral of a smooth vectorized f."""
    return filon(f, a, b, 0.0, knots, max_h, rtol, atol, max_levels).real


class CumulativeDensity:
    """Cumulative integral of a smooth density in w, invertible to machine precision.

    Per panel the density is stored as a Legendre series fitted at
    Gauss-Legendre nodes; the antiderivative is exact for the series, so
    evaluation and inversion of the cumulative are cheap and vectorized.
    """

    def __init__(self, f, w_max, knots=(), max_h=0.25, w_min=0.0):
        edges = _panel_edges(w_min, w_max, knots, max_h)
        self.edges = edges
        lo, hi = edges[:-1], edges[1:]
        self.h2 = (hi - lo) / 2.0
        self.mid = (lo + hi) / 2.0
        nodes = self.mid[:, None] + self.h2[:, None] * _GL_X[None, :]
        fv = np.asarray(f(nodes.ravel()), dtype=float).reshape(nodes.shape)
        coef = fv @ _VAL_TO_COEF.T                       # (panels, deg)
        self._coef = coef.T                              # (deg, panels)
        anti = np.polynomial.legendre.legint(self._coef, axis=0)
        # fix the constant of integration so the antiderivative is 0 at x = -1
        anti[0] -= np.polynomial.legendre.legval(-1.0, anti, tensor=False)
        self._anti = anti                                # antiderivative, 0 at panel left
        panel_mass = self.h2 * np.polynomial.legendre.legval(1.0, anti, tensor=False)
        self.base = np.concatenate([[0.0], np.cumsum(panel_mass)])
        self.total = float(self.base[-1])

    def _panel_of(self, w):
        idx = np.searchsorted(self.edges, w, side="right") - 1
        return np.clip(idx, 0, len(self.edges) - 2)

    def eval(self, w):
        """Cumulative mass on [w_min, w]."""
        w = np.atleast_1d(np.asarray(w, dtype=float))
        idx = self._panel_of(w)
        x = (w - self.mid[idx]) / self.h2[idx]
        x = np.clip(x, -1.0, 1.0)
        part = self.h2[idx] * np.polynomial.legendre.legval(
            x, self._anti[:, idx], tensor=False
        )
        return self.base[idx] + part

    def density(self, w):
        w = np.atleast_1d(np.asarray(w, dtype=float))
        idx = self._panel_of(w)
        x = np.clip((w - self.mid[idx]) / self.h2[idx], -1.0, 1.0)
        return np.polynomial.legendre.legval(x, self._coef[:, idx], tensor=False)

    def invert(self, targets):
        """w-values at which the cumulative reaches ``targets`` (vectorized)."""
        t = np.atleast_1d(np.asarray(targets, dtype=float))
        if np.any((t < 0) | (t > self.total)):
            raise ValueError("target mass outside [0, total]")
        idx = np.clip(np.searchsorted(self.base, t, side="right") - 1, 0,
                      len(self.edges) - 2)
        resid = t - self.base[idx]
        lo = np.full_like(t, -1.0)
        hi = np.full_like(t, 1.0)
        x = np.zeros_like(t)
        anti = self._anti[:, idx]
        coef = self._coef[:, idx]
        scale = self.h2[idx]
        for _ in range(200):
            fx = scale * np.polynomial.legendre.legval(x, anti, tensor=False) - resid
            lo = np.where(fx <= 0, x, lo)
            hi = np.where(fx > 0, x, hi)
            d = scale * np.polynomial.legendre.legval(x, coef, tensor=False)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = np.where(d > 0, fx / np.maximum(d, 1e-300), 0.0)
            xn = x - step
            bad = (xn <= lo) | (xn >= hi) | ~np.isfinite(xn) | (d <= 0)
            xn = np.where(bad, (lo + hi) / 2.0, xn)
            if np.max(np.abs(xn - x)) < 1e-15:
                x = xn
                break
            x = xn
        return self.mid[idx] + self.h2[idx] * x
