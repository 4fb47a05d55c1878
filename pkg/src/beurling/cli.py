"""Command line harness: experiment orchestration and artifact outputs.

Each subcommand runs one experiment, writes CSV artifacts plus a
manifest.json (inputs, versions, wall time, pass/fail), and exits 0 on
success, 1 on a tolerance failure (with the report still written), 2 on
configuration errors.  File names are derived deterministically from the
hash of the effective configuration, so identical configs give identical
artifacts byte for byte.
"""

import argparse
import concurrent.futures
import hashlib
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, acceptance, analysis, counting, discretize
from . import gdensity, gfun, system, zeta


def _fmt(x):
    return f"{x:.17g}"


def _load_config(path):
    cfg = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith(";"):
                continue
            k, sep, v = line.partition("=")
            if not sep:
                raise ValueError(f"config line is not key=value: {line!r}")
            cfg[k.strip()] = v.strip()
    return cfg


def _effective_config(args):
    cfg = {}
    if args.config:
        cfg.update(_load_config(args.config))
    for k in ("beta", "K", "x_max", "scheme", "seed", "threads", "n_max",
              "center", "half_width", "kappa", "T", "x"):
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    cfg["subcommand"] = args.subcommand
    return cfg


def _config_hash(cfg):
    blob = json.dumps({k: str(v) for k, v in sorted(cfg.items())},
                      sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:10]


def _validate(cfg):
    beta = float(cfg.get("beta", 0.5))
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must be in (0,1), got {beta}")
    K = int(cfg.get("K", 2))
    if K < 1:
        raise ValueError("K must be >= 1")
    scheme = cfg.get("scheme", "median")
    if scheme not in discretize.SCHEMES:
        raise ValueError(f"scheme must be one of {discretize.SCHEMES}")
    if scheme == "random" and cfg.get("seed") is None:
        raise ValueError("randomized scheme needs --seed")
    x_max = float(cfg.get("x_max", 1e6))
    if x_max <= 1.0:
        raise ValueError("x_max must be > 1")
    return beta, K, scheme, x_max


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(str(c) if isinstance(c, (str, int)) else _fmt(c)
                              for c in row) + "\n")


class Runner:
    def __init__(self, args):
        self.cfg = _effective_config(args)
        self.tag = _config_hash(self.cfg)
        out = os.environ.get("BEURLING_OUT") or args.out or "."
        self.out = Path(out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.files = []
        self.checks = {}
        self.measured = {}

    def path(self, name):
        p = self.out / f"{self.cfg['subcommand']}-{self.tag}-{name}"
        self.files.append(p.name)
        return p

    def finish(self, wall):
        self.checks = {k: bool(v) for k, v in self.checks.items()}
        self.measured = {k: float(v) for k, v in self.measured.items()}
        passed = all(self.checks.values())
        manifest = {
            "subcommand": self.cfg["subcommand"],
            "inputs": {k: str(v) for k, v in sorted(self.cfg.items())},
            "version": __version__,
            "numpy": np.__version__,
            "wall_seconds": round(wall, 3),
            "pass": passed,
            "checks": self.checks,
            "measured": self.measured,
            "files": self.files,
        }
        mpath = self.out / f"{self.cfg['subcommand']}-{self.tag}-manifest.json"
        with open(mpath, "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
        for name, ok in self.checks.items():
            print(f"[{'PASS' if ok else 'FAIL'}] {name}")
        print(f"manifest: {mpath}")
        return 0 if passed else 1


def cmd_zeros(r, args):
    zeros = gfun.find_zeros(args.n_max, certify=True)
    rows = [(z.index, z.location.real, z.location.imag, z.residual,
             int(z.strip_ok)) for z in zeros[1:]]
    _write_csv(r.path("zeros.csv"), "n,x,y,residual,strip_ok", rows)
    r.checks["residuals_below_1e-10"] = max(z.residual for z in zeros[1:]) < 1e-10
    r.checks["strips_ok"] = all(z.strip_ok for z in zeros[1:])


def cmd_gfun(r, args):
    w = np.linspace(1.0, 14.0, 2601)
    g = gdensity.eval_g_w(w)
    _write_csv(r.path("g.csv"), "w,g", zip(w, g))
    env = gdensity.decay_envelope()
    _write_csv(r.path("envelope.csv"), "w_at_max,scaled_max,raw_max", env)
    slope, pts = gdensity.decay_slope()
    _write_csv(r.path("decayfit.csv"), "w,raw_max", pts)
    plateau = float(np.max(np.abs(
        gdensity.eval_g_w(np.linspace(1.0 + 1e-9, 2.0 - 1e-9, 4001)) - 1.0)))
    r.checks["plateau_exact"] = plateau < 1e-14
    r.checks["decay_slope_in_window"] = -0.26 <= slope <= -0.20
    r.measured["slope"] = slope


def cmd_density(r, args):
    beta, K, _, _ = _validate(r.cfg)
    spec = system.DensitySpec(system.make_params(beta, K), truncated=False)
    v = np.exp(np.linspace(0.0, 40.0, 2048))
    f = system.f_C(v, spec)
    _write_csv(r.path("density.csv"), "v,f", zip(v, f))
    grid = np.exp(np.linspace(4.0, 40.0, 512))
    delta = system.chebyshev_delta(spec, grid, strict=False)
    r.checks["delta_below_1"] = delta < 1.0
    r.checks["density_positive"] = bool(np.all(system.f_C(grid, spec) > 0))
    r.measured["delta_hat"] = delta


def cmd_discretize(r, args):
    beta, K, scheme, x_max = _validate(r.cfg)
    spec = system.DensitySpec(system.make_params(beta, K), truncated=True)
    seed = None if r.cfg.get("seed") is None else int(r.cfg["seed"])
    P = discretize.generate(spec, x_max, scheme=scheme, seed=seed)
    discretize.save(P, r.path("primes.bin"))
    sup = discretize.pi_error_sup(P)
    rows = []
    worst = 0.0
    x_lo = min(1e2, x_max / 2.0)
    for x in np.minimum(np.exp(np.linspace(math.log(x_lo), math.log(x_max), 5)),
                        x_max):
        for t in (0.5, 5.0, 50.0, 500.0, 5e3, 5e4):
            d = discretize.exp_sum_discrepancy(P, spec, x, t)
            ratio = d / discretize.discrepancy_envelope(x, t)
            worst = max(worst, ratio)
            rows.append((x, t, d, ratio))
    _write_csv(r.path("discrepancy.csv"), "x,t,D,normalized", rows)
    r.checks["normalized_discrepancy_below_10"] = worst <= 10.0
    if scheme == "median":
        r.checks["pi_error_sup_below_1"] = sup <= 1.0
    r.measured["pi_error_sup"] = sup


def cmd_count(r, args):
    beta, K, scheme, x_max = _validate(r.cfg)
    x_max = min(x_max, counting.ENUMERATION_HORIZON)
    spec = system.DensitySpec(system.make_params(beta, K), truncated=True)
    seed = None if r.cfg.get("seed") is None else int(r.cfg["seed"])
    P = discretize.generate(spec, x_max, scheme=scheme, seed=seed)
    xs = np.minimum(np.exp(np.linspace(math.log(10.0), math.log(x_max), 40)), x_max)
    counting.write_counting_csv(r.path("N.csv"), xs,
                                [counting.count_N(P, x) for x in xs])
    counting.write_counting_csv(r.path("psi.csv"), xs,
                                [counting.psi(P, x) for x in xs])
    counting.write_counting_csv(r.path("Pi.csv"), xs,
                                [counting.Pi_riemann(P, x) for x in xs])
    gap = max(abs(counting.Pi_riemann(P, x) - counting.pi_from_psi(P, x))
              for x in xs)
    r.checks["Pi_route_agreement"] = gap < 1e-9


def cmd_zeta(r, args):
    beta, K, scheme, x_max = _validate(r.cfg)
    res = acceptance.criterion_5_zeta_identities(beta=beta)
    r.checks["zeta_identities"] = res.passed
    spec = system.DensitySpec(system.make_params(beta, max(K, 2)), truncated=True)
    seed = None if r.cfg.get("seed") is None else int(r.cfg["seed"])
    P = discretize.generate(spec, x_max, scheme=scheme, seed=seed)
    rep = zeta.bound_survey(P, spec, min(K, spec.params.K), x_max, n_t=80)
    rep.write_csv(r.path("boundsurvey.csv"))
    r.measured["A_hat"] = rep.A_hat
    r.measured["B_hat"] = rep.B_hat


def cmd_psi(r, args):
    beta = float(r.cfg.get("beta", 0.5))
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must be in (0,1), got {beta}")
    center = float(r.cfg.get("center", 32.0))
    half = float(r.cfg.get("half_width", 0.2))
    params = system.make_params(beta, 3)
    rec_max = analysis.oscillation_search(params, center, half, +1)
    rec_min = analysis.oscillation_search(params, center, half, -1)
    with open(r.path("oscillation.csv"), "w") as fh:
        fh.write("log_x,psiC,E,ratio,k0,mu_frac\n")
        fh.write(rec_max.csv_row() + "\n")
        fh.write(rec_min.csv_row() + "\n")
    r.checks["max_ratio_in_window"] = 1.7 <= rec_max.ratio <= 2.3
    r.checks["min_ratio_in_window"] = -2.3 <= rec_min.ratio <= -1.7
    r.measured["max_ratio"] = rec_max.ratio
    r.measured["min_ratio"] = rec_min.ratio


def cmd_perron(r, args):
    beta = float(r.cfg.get("beta", 0.5))
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must be in (0,1), got {beta}")
    params = system.make_params(beta, 1)
    res = analysis.perron_check(params, 1, float(r.cfg.get("x", 50.0)),
                                kappa=float(r.cfg.get("kappa", 1.25)),
                                T=float(r.cfg.get("T", 1e5)))
    _write_csv(r.path("perron.csv"), "key,value",
               [(k, v) for k, v in sorted(res.items())])
    r.checks["perron_gap_below_2pct"] = res["rel_gap"] <= 0.02
    r.measured["rel_gap"] = res["rel_gap"]


def cmd_all(r, args):
    threads = int(r.cfg.get("threads", 1))
    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(lambda fn: fn(), acceptance.ALL_CRITERIA))
    else:
        results = acceptance.run_all()
    results.sort(key=lambda c: c.number)
    rows = [(c.number, c.name, "PASS" if c.passed else "FAIL", c.seconds)
            for c in results]
    _write_csv(r.path("acceptance.csv"), "number,name,status,seconds", rows)
    for c in results:
        r.checks[f"criterion_{c.number:02d}_{c.name.replace(' ', '_')}"] = c.passed


COMMANDS = {
    "zeros": cmd_zeros,
    "gfun": cmd_gfun,
    "density": cmd_density,
    "discretize": cmd_discretize,
    "count": cmd_count,
    "zeta": cmd_zeta,
    "psi": cmd_psi,
    "perron": cmd_perron,
    "all": cmd_all,
}


def build_parser():
    p = argparse.ArgumentParser(
        prog="beurling",
        description="Numerical laboratory for a designer Beurling prime system.")
    sub = p.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--beta", type=float, default=None)
        sp.add_argument("--K", type=int, default=None)
        sp.add_argument("--x-max", dest="x_max", type=float, default=None)
        sp.add_argument("--scheme", choices=discretize.SCHEMES, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--threads", type=int, default=None)
        sp.add_argument("--out", type=str, default=None)
        sp.add_argument("--config", type=str, default=None)
        if name == "zeros":
            sp.add_argument("--n-max", dest="n_max", type=int, default=50)
        if name == "psi":
            sp.add_argument("--center", type=float, default=32.0)
            sp.add_argument("--half-width", dest="half_width", type=float,
                            default=0.2)
        if name == "perron":
            sp.add_argument("--x", type=float, default=50.0)
            sp.add_argument("--kappa", type=float, default=1.25)
            sp.add_argument("--T", type=float, default=1e5)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        runner = Runner(args)
        if args.subcommand not in ("zeros", "gfun", "psi", "perron", "all"):
            _validate(runner.cfg)
    except (ValueError, system.ParameterError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    t0 = time.perf_counter()
    try:
        COMMANDS[args.subcommand](runner, args)
    except (ValueError, system.ParameterError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    return runner.finish(time.perf_counter() - t0)


if __name__ == "__main__":
    sys.exit(main())
