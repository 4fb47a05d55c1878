"""The generator function G(z) = 1 - (e^-z - e^-2z)/z.

G is entire (removable singularity at 0, G(0) = 0) and its zeros z_n sit in
horizontal strips n*pi < Im z < (n+1)*pi with Re z_n < -(1/2) log(n*pi/2).
Rescaled translates of G supply the zeros of the designer zeta functions.
"""

import math
from dataclasses import dataclass

import numpy as np

SWITCH_RADIUS = 1e-2
TAYLOR_DEGREE = 10
B_CAP = 5.0

# (e^-z - e^-2z)/z = sum_{m>=0} (-1)^m (2^(m+1) - 1) z^m / (m+1)!
_TAYLOR = np.array(
    [(-1.0) ** m * (2.0 ** (m + 1) - 1.0) / math.factorial(m + 1)
     for m in range(TAYLOR_DEGREE + 1)]
)


class DomainError(ValueError):
    pass


class CertificationError(RuntimeError):
    """A zero could not be located or certified by the argument principle."""


def eval_G(z):
    """G(z), vectorized; Taylor series below |z| = SWITCH_RADIUS avoids cancellation."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    small = np.abs(z) < SWITCH_RADIUS
    zb = z[~small]
    out[~small] = 1.0 - (np.exp(-zb) - np.exp(-2.0 * zb)) / zb
    zs = z[small]
    acc = np.zeros_like(zs)
    for c in _TAYLOR[::-1]:
        acc = acc * zs + c
    out[small] = 1.0 - acc
    return out[0] if scalar else out


def eval_G_deriv(z):
    """G'(z) = (e^-z - e^-2z)/z^2 - (-e^-z + 2 e^-2z)/z, with Taylor fallback."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    small = np.abs(z) < SWITCH_RADIUS
    zb = z[~small]
    e1, e2 = np.exp(-zb), np.exp(-2.0 * zb)
    out[~small] = (e1 - e2) / zb**2 - (-e1 + 2.0 * e2) / zb
    zs = z[small]
    acc = np.zeros_like(zs)
    dcoef = _TAYLOR[1:] * np.arange(1, TAYLOR_DEGREE + 1)
    for c in dcoef[::-1]:
        acc = acc * zs + c
    out[small] = -acc
    return out[0] if scalar else out


def log_G(z, ray_step=0.25, ray_to=40.0):
    """Branch of log G(z) that tends to 0 as Re z -> +infinity.

    Requires Re z > 0 (G has no zeros there).  When G(z) is far from 1 the
    branch is fixed by unwrapping arg G along the horizontal ray to Re = ray_to.
    """
    z = complex(z)
    if z.real <= 0:
        raise DomainError("log_G requires Re z > 0")
    g = eval_G(z)
    if abs(g - 1.0) < 0.9:
        return np.log(g)
    n = int(np.ceil((ray_to - z.real) / ray_step)) + 1
    xs = np.linspace(ray_to, z.real, n)
    vals = eval_G(xs + 1j * z.imag)
    args = np.unwrap(np.angle(vals))
    return math.log(abs(g)) + 1j * args[-1]


@dataclass(frozen=True)
class GZero:
    """A zero of G: index n >= 0, location x_n + i y_n, and |G| residual."""

    index: int
    location: complex
    residual: float

    @property
    def strip_ok(self):
        n = self.index
        if n == 0:
            return self.location == 0
        x, y = self.location.real, self.location.imag
        return (n * math.pi < y < (n + 1) * math.pi
                and x < -0.5 * math.log(n * math.pi / 2.0))


def _damped_newton(z, tol):
    g = eval_G(z)
    for _ in range(200):
        if abs(g) <= tol:
            return z, abs(g)
        step = g / eval_G_deriv(z)
        lam = 1.0
        for _ in range(40):
            zn = z - lam * step
            gn = eval_G(zn)
            if abs(gn) < abs(g):
                z, g = zn, gn
                break
            lam /= 2.0
        else:
            break
    return z, abs(g)


def _arg_increment(f, z_from, z_to, max_step):
    n = max(8, int(np.ceil(abs(z_to - z_from) / max_step)) + 1)
    for _ in range(20):
        pts = z_from + (z_to - z_from) * np.linspace(0.0, 1.0, n)
        vals = f(pts)
        if np.any(vals == 0):
            raise CertificationError("zero on contour")
        d = np.angle(vals[1:] / vals[:-1])
        if np.max(np.abs(d)) < math.pi / 2:
            return float(np.sum(d))
        n *= 2
    raise CertificationError("argument tracking did not resolve on edge")


def winding_number(f, x_lo, x_hi, y_lo, y_hi, max_step=0.2):
    """Argument-principle zero count of f inside a rectangle.

    Edge sampling is refined until consecutive argument steps stay below
    pi/2 and the total winding is within 0.1 of an integer.
    """
    corners = [x_lo + 1j * y_lo, x_hi + 1j * y_lo,
               x_hi + 1j * y_hi, x_lo + 1j * y_hi, x_lo + 1j * y_lo]
    step = max_step
    for _ in range(12):
        total = sum(_arg_increment(f, a, b, step)
                    for a, b in zip(corners[:-1], corners[1:]))
        wind = total / (2.0 * math.pi)
        if abs(wind - round(wind)) < 0.1:
            return int(round(wind))
        step /= 2.0
    raise CertificationError("winding estimate did not settle near an integer")


def find_zeros(n_max, b_cap=B_CAP, tol=1e-14, certify=True):
    """Zeros z_0 = 0 and z_n for 1 <= n <= n_max (conjugates implied).

    Each zero is found by damped Newton from the seed
    (-log(n*pi/2), (n+1/2)*pi) and, when ``certify`` is set, confirmed by a
    winding count of exactly 1 over the full strip
    [-b_cap*log(n*pi/2), 1] x [n*pi, (n+1)*pi].
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    zeros = [GZero(0, 0.0 + 0.0j, 0.0)]
    for n in range(1, n_max + 1):
        seed = complex(-math.log(n * math.pi / 2.0), (n + 0.5) * math.pi)
        z, res = _damped_newton(seed, 1e-12)
        if res > 1e-12:
            z, res = _grid_rescue(n, b_cap)
        z, res = _damped_newton(z, tol)
        if res > 1e-10:
            raise CertificationError(f"Newton failed for zero n={n}: |G|={res:.3e}")
        if certify:
            x_lo = -b_cap * math.log(max(n * math.pi / 2.0, 1.0 + 1e-9))
            x_lo = min(x_lo, z.real - 1.0)
            count = winding_number(eval_G, x_lo, 1.0, n * math.pi, (n + 1) * math.pi)
            if count != 1:
                raise CertificationError(
                    f"strip winding count for n={n} is {count}, expected 1"
                )
        zeros.append(GZero(n, z, res))
    return zeros


def _grid_rescue(n, b_cap):
    x_lo = -b_cap * math.log(max(n * math.pi / 2.0, 1.0 + 1e-9)) + 1e-3
    xs = np.linspace(min(x_lo, -1.0), 0.0, 40)
    ys = np.linspace(n * math.pi + 1e-3, (n + 1) * math.pi - 1e-3, 40)
    Z = xs[None, :] + 1j * ys[:, None]
    vals = np.abs(eval_G(Z))
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    return _damped_newton(Z[i, j], 1e-12)


def zero_bound_witness(zeros):
    """max over n >= 1 of -x_n / log(n*pi/2); the strip lemma needs some b > 1/2."""
    vals = [-z.location.real / math.log(z.index * math.pi / 2.0)
            for z in zeros if z.index >= 1]
    return max(vals)


def check_G_bounds(sample_count, seed, box=((-1.0, 3.0), (-50.0, 50.0))):
    """Seeded random check of the two G inequalities.

    |G(z) - 1| <= (e^-x + e^-2x)/|z| for z != 0, and
    |G(z)| <= 1 + e^2 - e for x >= -1.  Returns max observed slack ratios.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    (x0, x1), (y0, y1) = box
    z = rng.uniform(x0, x1, sample_count) + 1j * rng.uniform(y0, y1, sample_count)
    z = z[np.abs(z) > 0]
    g = eval_G(z)
    approx_rhs = (np.exp(-z.real) + np.exp(-2.0 * z.real)) / np.abs(z)
    approx_ratio = np.abs(g - 1.0) / approx_rhs
    cap = 1.0 + math.e**2 - math.e
    mod_ratio = np.abs(g[z.real >= -1.0]) / cap
    report = {
        "samples": len(z),
        "max_approx_ratio": float(np.max(approx_ratio)),
        "max_modulus_ratio": float(np.max(mod_ratio)) if mod_ratio.size else 0.0,
        "violations": int(np.sum(approx_ratio > 1.0 + 1e-12)
                          + np.sum(mod_ratio > 1.0 + 1e-12)),
    }
    if report["violations"]:
        bad = np.argmax(approx_ratio)
        report["witness"] = complex(z[bad])
    return report
