"""Counting functions of discrete and mixed systems.

N(x) counts multisets of generalized primes with product <= x (including the
empty product), each multiset once, coincident products counted separately.
psi and the Riemann counting function Pi run over prime powers.  exp_star
maps a prime measure dPi to its integer measure dN = exp*(dPi) on a w-grid
via the derivation identity w dN = (w dPi) * dN.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .system import DensitySpec, cumulative_density

ENUMERATION_HORIZON = 1e7
GRID_H = 2.0 ** -10


class HorizonError(ValueError):
    pass


@njit(cache=True)
def _dfs_count(log_p, budget):
    """Number of nonempty nondecreasing-index multisets with sum of logs <= budget."""
    n = len(log_p)
    total = 0
    stack_i = np.empty(4096, np.int64)
    stack_r = np.empty(4096, np.float64)
    top = 0
    stack_i[0] = 0
    stack_r[0] = budget
    top = 1
    while top > 0:
        top -= 1
        i0 = stack_i[top]
        rem = stack_r[top]
        for i in range(i0, n):
            if log_p[i] > rem:
                break
            total += 1
            if top >= len(stack_i):
                stack_i = np.concatenate((stack_i, np.empty(len(stack_i), np.int64)))
                stack_r = np.concatenate((stack_r, np.empty(len(stack_r), np.float64)))
            stack_i[top] = i
            stack_r[top] = rem - log_p[i]
            top += 1
    return total


@njit(cache=True)
def _dfs_hist(log_p, budget, h, counts):
    """Histogram of floor(log-product / h) over all nonempty multisets <= budget."""
    n = len(log_p)
    stack_i = np.empty(4096, np.int64)
    stack_r = np.empty(4096, np.float64)
    stack_i[0] = 0
    stack_r[0] = 0.0
    top = 1
    while top > 0:
        top -= 1
        i0 = stack_i[top]
        acc = stack_r[top]
        for i in range(i0, n):
            s = acc + log_p[i]
            if s > budget:
                break
            counts[int(s / h)] += 1
            if top >= len(stack_i):
                stack_i = np.concatenate((stack_i, np.empty(len(stack_i), np.int64)))
                stack_r = np.concatenate((stack_r, np.empty(len(stack_r), np.float64)))
            stack_i[top] = i
            stack_r[top] = s
            top += 1


def count_N(P, x, horizon=ENUMERATION_HORIZON):
    """N(x) for the semigroup of P, by depth-first enumeration (empty product = 1)."""
    if x > horizon * (1.0 + 1e-12):
        raise HorizonError(f"x={x} beyond enumeration horizon {horizon}")
    if x < 1.0:
        return 0
    lp = P.log_primes if hasattr(P, "log_primes") else np.log(np.asarray(P, float))
    lp = np.sort(lp[lp <= math.log(x) + 0.0])
    if lp.size == 0:
        return 1
    return 1 + int(_dfs_count(lp, math.log(x)))


def count_N_grid(P, x_max, h=GRID_H, horizon=ENUMERATION_HORIZON):
    """(w_edges, N) with N[i] = N(e^{w_edges[i+1]^-}): counts on a w-grid.

    N is right-continuous; N[i] counts generalized integers with
    log n < (i+1) h, so N at x is N[floor(log x / h)] for x off the grid.
    """
    if x_max > horizon * (1.0 + 1e-12):
        raise HorizonError(f"x_max={x_max} beyond enumeration horizon {horizon}")
    budget = math.log(x_max)
    n_cells = int(budget / h) + 2
    counts = np.zeros(n_cells, np.int64)
    lp = np.sort(P.log_primes if hasattr(P, "log_primes")
                 else np.log(np.asarray(P, float)))
    lp = lp[lp <= budget]
    _dfs_hist(lp, budget, h, counts)
    counts[0] += 1  # empty product
    edges = np.arange(n_cells + 1) * h
    return edges, np.cumsum(counts)


def brute_force_count_N(primes, x):
    """Independent N oracle: plain recursive multiset enumeration, no pruning tricks."""
    primes = sorted(float(p) for p in primes)

    def rec(i, prod):
        total = 1
        for j in range(i, len(primes)):
            q = prod * primes[j]
            if q <= x:
                total += rec(j, q)
        return total

    return rec(0, 1.0)


def _powers_of(P, x):
    """(log_p, nu) pairs over prime powers p^nu <= x."""
    lp = P.log_primes
    lx = math.log(x) if x > 1 else 0.0
    out_lp, out_nu = [], []
    nu = 1
    while True:
        m = lp * nu <= lx
        if not np.any(m):
            break
        out_lp.append(lp[m])
        out_nu.append(np.full(int(np.sum(m)), nu))
        nu += 1
    if not out_lp:
        return np.empty(0), np.empty(0, int)
    return np.concatenate(out_lp), np.concatenate(out_nu)


def psi(P, x):
    """psi(x) = sum over prime powers p^nu <= x of log p."""
    if x > P.x_max:
        raise ValueError("x beyond generation horizon")
    lp = P.log_primes
    lp = lp[P.primes <= x]
    if lp.size == 0 or x < 1.0:
        return 0.0
    return float(np.sum(np.floor(math.log(x) / lp) * lp))


def Pi_riemann(P, x):
    """Pi(x) = sum_nu pi(x^(1/nu)) / nu, a finite sum."""
    if x > P.x_max:
        raise ValueError("x beyond generation horizon")
    if x < P.primes[0]:
        return 0.0
    total = 0.0
    nu = 1
    while P.primes[0] ** nu <= x:
        total += np.searchsorted(P.primes, x ** (1.0 / nu), side="right") / nu
        nu += 1
    return float(total)


def pi_from_psi(P, x):
    """Stieltjes sum sum_{p^nu <= x} log p / log(p^nu) = sum 1/nu."""
    if x > P.x_max:
        raise ValueError("x beyond generation horizon")
    _, nu = _powers_of(P, x)
    return float(np.sum(1.0 / nu)) if nu.size else 0.0


@dataclass(frozen=True)
class MixedMeasure:
    """Prime measure: atoms (p^nu, 1/nu) below the crossover, density above."""

    atom_locs: np.ndarray
    atom_weights: np.ndarray
    density_spec: DensitySpec | None
    crossover: float
    truncated_at: float | None = None

    @property
    def atom_count(self):
        return len(self.atom_locs)


def zero_measure():
    return MixedMeasure(np.empty(0), np.empty(0), None, 1.0)


def atomic_measure(locs, weights):
    locs = np.asarray(locs, float)
    weights = np.asarray(weights, float)
    order = np.argsort(locs)
    return MixedMeasure(locs[order], weights[order], None,
                        float(locs.max()) * (1 + 1e-12) if locs.size else 1.0)


def continuous_measure(spec):
    """Pure density measure dPi = f(v) dv on [1, inf)."""
    return MixedMeasure(np.empty(0), np.empty(0), spec, 1.0)


def build_Pi_K(P, spec, K, allow_truncation=False):
    """dPi_K: the discrete Pi below e^(4^(K+1)), the density f_{C,K} above."""
    crossover = math.exp(4.0 ** (K + 1)) if 4.0 ** (K + 1) < 700 else math.inf
    truncated_at = None
    if P.x_max < crossover:
        if not allow_truncation:
            raise ValueError(
                f"x_max={P.x_max} below crossover {crossover}; "
                "pass allow_truncation=True for the truncated variant"
            )
        crossover = P.x_max
        truncated_at = P.x_max
    lp, nu = _powers_of(P, crossover)
    locs = np.exp(lp * nu)
    keep = locs < crossover
    locs, nu = locs[keep], nu[keep]
    order = np.argsort(locs)
    trunc_spec = DensitySpec(spec.params, truncated=True)
    if spec.params.K < K:
        raise ValueError("spec.params.K must be >= K")
    return MixedMeasure(locs[order], 1.0 / nu[order], trunc_spec,
                        float(crossover), truncated_at)


def measure_masses_on_grid(m, W, h):
    """Cell masses of the measure on the w-grid [0, W), atoms by nearest cell."""
    n = int(math.ceil(W / h)) + 1
    a = np.zeros(n)
    if m.atom_count:
        lw = np.log(m.atom_locs)
        keep = lw < W
        idx = np.rint(lw[keep] / h).astype(int)
        np.add.at(a, np.clip(idx, 0, n - 1), m.atom_weights[keep])
    if m.density_spec is not None:
        w_lo = math.log(m.crossover)
        if w_lo < W:
            cum = cumulative_density(m.density_spec, math.exp(W))
            # cell i covers [i h - h/2, i h + h/2); exact masses from the cumulative
            bounds = np.clip(np.arange(n + 1) * h - h / 2.0, w_lo, W)
            cell_mass = np.diff(cum.eval(bounds))
            cell_mass[1] += cell_mass[0]  # keep a_0 = 0 (the delta at 1 is exp*'s n_0)
            cell_mass[0] = 0.0
            a += cell_mass
    return a


def exp_star(masses, h):
    """dN = exp*(dPi) on the grid: n_i = (1/i) sum_j j a_j n_{i-j}, n_0 = 1.

    ``masses`` are the Pi cell masses a_i in w (a_0 must be 0: primes > 1).
    Returns the dN cell masses; cumulative N is their cumsum.
    """
    a = np.asarray(masses, float)
    if a[0] != 0.0:
        raise ValueError("Pi measure must vanish at w = 0")
    n = np.zeros_like(a)
    n[0] = 1.0
    ja = np.arange(len(a)) * a
    for i in range(1, len(a)):
        n[i] = np.dot(ja[1:i + 1], n[i - 1::-1][:i]) / i
    return n


def exp_star_cumulative(m, W, h=GRID_H):
    """(w_edges, N) for dN = exp*(dPi) of a MixedMeasure on [0, W]."""
    a = measure_masses_on_grid(m, W, h)
    n = exp_star(a, h)
    edges = np.arange(len(n) + 1) * h
    return edges, np.cumsum(n)


def write_counting_csv(path, thresholds, values):
    with open(path, "w") as fh:
        fh.write("x,value\n")
        for x, v in zip(thresholds, values):
            fh.write(f"{x:.17g},{v:.17g}\n")
