"""Discretization of a prime density into an actual prime sequence.

[1, x_max] is partitioned into consecutive blocks carrying f-mass exactly 1
(the last partial block is dropped) and one prime is placed per block:
either at the block's f-median (deterministic, reproducible, |pi - integral|
<= 1 everywhere) or sampled from f restricted to the block by inverse CDF
(randomized, seeded).  The exponential-sum discrepancy

    D(x, t) = | sum_{p_j <= x} p_j^{-it} - integral_1^x u^{-it} f(u) du |

is measured against the envelope sqrt(x) + sqrt(x log(|t|+1)/log(x+1)).
"""

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .system import DensitySpec, cumulative_density, mellin_f_C, make_params

SCHEMES = ("median", "random")


@dataclass(frozen=True)
class PrimeSequence:
    """Sorted generalized primes with their generation metadata."""

    primes: np.ndarray
    scheme: str
    seed: int | None
    x_max: float
    spec: DensitySpec

    def __len__(self):
        return len(self.primes)

    @property
    def log_primes(self):
        return np.log(self.primes)


def generate(spec, x_max, scheme="median", seed=None):
    """Generate a PrimeSequence from the density on [1, x_max]."""
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}")
    cum = cumulative_density(spec, x_max)
    n_blocks = int(math.floor(cum.total))
    if n_blocks < 1:
        raise ValueError("insufficient f-mass on [1, x_max] (need >= 1)")
    if scheme == "median":
        targets = np.arange(n_blocks) + 0.5
        used_seed = None
    else:
        if seed is None:
            raise ValueError("randomized scheme needs a seed")
        rng = np.random.default_rng(seed)
        targets = np.arange(n_blocks) + rng.random(n_blocks)
        used_seed = int(seed)
    w = cum.invert(targets)
    primes = np.sort(np.exp(w))
    return PrimeSequence(primes=primes, scheme=scheme, seed=used_seed,
                         x_max=float(x_max), spec=spec)


def pi_count(P, x):
    """pi(x) = |{j : p_j <= x}|, closed counting."""
    if x > P.x_max:
        raise ValueError("x beyond generation horizon")
    return int(np.searchsorted(P.primes, x, side="right"))


def pi_error_sup(P):
    """sup_x |pi(x) - integral_1^x f| over [1, x_max], evaluated exactly.

    pi jumps only at primes and the mass integral is monotone, so the sup
    is attained at prime locations or the endpoints.
    """
    cum = cumulative_density(P.spec, P.x_max)
    F = cum.eval(P.log_primes)
    j = np.arange(1, len(P.primes) + 1)
    sup = max(np.max(np.abs(j - F)), np.max(np.abs(j - 1 - F)))
    sup = max(sup, abs(len(P.primes) - cum.total))
    return float(sup)


def exp_sum_discrepancy(P, spec, x, t, tol=1e-8):
    """D(x, t): modulus of the exponential-sum minus oscillatory-integral gap."""
    if x > P.x_max:
        raise ValueError("x beyond generation horizon")
    if x < 1.0:
        raise ValueError("x must be >= 1")
    lp = P.log_primes
    lp = lp[P.primes <= x]
    s = np.sum(np.exp(-1j * t * lp)) if lp.size else 0.0
    integral = mellin_f_C(spec, 1j * t, w_hi=math.log(x), tol=tol) if x > 1 else 0.0
    return float(abs(s - integral))


def discrepancy_envelope(x, t):
    """The lemma's right-hand-side shape sqrt(x) + sqrt(x log(|t|+1)/log(x+1))."""
    return math.sqrt(x) + math.sqrt(x * math.log(abs(t) + 1.0) / math.log(x + 1.0))


MAGIC_META_KEYS = ("scheme", "seed", "beta", "K", "truncated", "x_max")


def save(P, path):
    """Binary file: 8-byte little-endian count then float64 primes; text sidecar."""
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(np.uint64(len(P.primes)).tobytes())
        fh.write(P.primes.astype("<f8").tobytes())
    meta = {
        "scheme": P.scheme,
        "seed": "" if P.seed is None else P.seed,
        "beta": repr(P.spec.params.beta),
        "K": P.spec.params.K,
        "truncated": int(P.spec.truncated),
        "x_max": repr(P.x_max),
    }
    with open(path.with_suffix(path.suffix + ".meta"), "w") as fh:
        for k in MAGIC_META_KEYS:
            fh.write(f"{k}={meta[k]}\n")


def load(path):
    path = Path(path)
    with open(path, "rb") as fh:
        n = int(np.frombuffer(fh.read(8), dtype="<u8")[0])
        primes = np.frombuffer(fh.read(8 * n), dtype="<f8").copy()
    meta = {}
    with open(path.with_suffix(path.suffix + ".meta")) as fh:
        for line in fh:
            k, _, v = line.strip().partition("=")
            meta[k] = v
    spec = DensitySpec(make_params(float(meta["beta"]), int(meta["K"])),
                       truncated=bool(int(meta["truncated"])))
    seed = None if meta["seed"] == "" else int(meta["seed"])
    return PrimeSequence(primes=primes, scheme=meta["scheme"], seed=seed,
                         x_max=float(meta["x_max"]), spec=spec)
