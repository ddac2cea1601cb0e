"""Command-line front door: evaluation, moments, fits, the lemma-check
suites, distribution statistics, and run manifests.

Exit codes: 0 success, 1 computation error, 2 usage error.  Every
randomized suite takes a seed, every output file lands in the manifest
with its digest, and reruns with the same config and seed are
byte-identical regardless of worker count.
"""

import argparse
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .cache import GridCache, default_cache_dir
from .characters import character_group
from .errors import CritlabError
from .lfunc import parse_selector
from .satake import satake_from_character, zeta_spec


def _fmt(x):
    """Deterministic float formatting for reports."""
    if isinstance(x, float):
        return f"{x:.17g}"
    return x


def _json_default(x):
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    raise TypeError(f"unserializable {type(x)}")


def dump_json(obj):
    return json.dumps(obj, sort_keys=True, default=_json_default)


class Manifest:
    """Config snapshot, per-stage wall times, cache traffic, output digests."""

    def __init__(self, config):
        self.data = {
            "version": __version__,
            "config": config,
            "stages": {},
            "cache": {"hits": 0, "misses": 0},
            "outputs": {},
        }
        self._t0 = time.perf_counter()

    def stage(self, name):
        self.data["stages"][name] = round(1e3 * (time.perf_counter() - self._t0), 3)
        self._t0 = time.perf_counter()

    def add_output(self, path):
        with open(path, "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()
        self.data["outputs"][os.path.basename(path)] = digest

    def record_cache(self, cache):
        self.data["cache"] = {"hits": cache.hits, "misses": cache.misses}

    def write(self, path):
        with open(path, "w") as fh:
            fh.write(dump_json(self.data) + "\n")


def _specs_for(ids):
    """SatakeSpec list for ids with Euler products (zeta / dirichlet)."""
    specs = []
    for lid in ids:
        if lid.kind == "zeta":
            specs.append(zeta_spec())
        elif lid.kind == "dirichlet":
            specs.append(satake_from_character(character_group(lid.q)[lid.index]))
        else:
            raise CritlabError(f"{lid.key()} carries no Euler-product coefficients")
    return specs


def _write_lines(path, lines):
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


_CONFIG_KEYS = {"cache_dir", "workers"}


def _load_config(path):
    out = {}
    if not path:
        return out
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise CritlabError(f"config line without '=': {line!r}")
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise CritlabError(f"unknown config key {key!r}; allowed: {sorted(_CONFIG_KEYS)}")
            out[key] = val.strip()
    return out


# ---------------------------------------------------------------- commands


def cmd_eval(args, cache, manifest):
    ids, _ = parse_selector(args.lfunc)
    if len(ids) != 1:
        raise CritlabError("eval takes exactly one L-function selector")
    g = cache.grid(ids[0], args.t0, args.t1, args.step, clamp_floor=args.clamp_floor)
    manifest.stage("grid")
    g.to_csv(args.out)
    manifest.add_output(args.out)
    manifest.stage("write")
    return 0


def cmd_moment(args, cache, manifest):
    from .moments import moment_series

    ids, ks = parse_selector(args.lfunc)
    T_list = [float(x) for x in args.T.split(",")]
    records = moment_series(ids, ks, T_list, delta=args.step, cache=cache)
    lines = [dump_json(r) for r in records]
    _write_lines(args.out, lines)
    if args.out:
        manifest.add_output(args.out)
    manifest.stage("moment")
    return 0


def cmd_fit(args, cache, manifest):
    from .moments import scaling_fit

    with open(args.records) as fh:
        recs = [json.loads(line) for line in fh if line.strip()]
    pts = [(r["T"], r["value"]) for r in recs]
    f = scaling_fit(pts)
    out = {
        "exponent": f.exponent,
        "intercept": f.intercept,
        "residual_norm": f.residual_norm,
        "T_range": list(f.T_range),
    }
    _write_lines(args.out, [dump_json(out)])
    if args.out:
        manifest.add_output(args.out)
    manifest.stage("fit")
    return 0


def cmd_windowed(args, cache, manifest):
    from .meanvalues import windowed_integrals

    ids, ks = parse_selector(args.lfunc)
    specs = _specs_for(ids)
    rep = windowed_integrals(args.sigma, args.T, args.N, ks, ids, specs)
    _write_lines(args.out, [dump_json(rep)])
    if args.out:
        manifest.add_output(args.out)
    manifest.stage("windowed")
    return 0


def cmd_chandee(args, cache, manifest):
    from .harper import chandee_audit

    ids, ks = parse_selector(args.lfunc)
    specs = _specs_for(ids)
    x = args.T ** args.x_exponent if args.x is None else args.x
    delta = args.step or 0.05
    grids = [cache.grid(lid, args.T, 2.0 * args.T, delta) for lid in ids]
    manifest.record_cache(cache)
    rep = chandee_audit(ks, specs, x, grids, args.T)
    _write_lines(args.out, [dump_json(rep)])
    if args.out:
        manifest.add_output(args.out)
    manifest.stage("chandee")
    return 0


def cmd_harper(args, cache, manifest):
    from .harper import PolyBank, build_schedule, classify_sets

    ids, ks = parse_selector(args.lfunc)
    specs = _specs_for(ids)
    schedule = build_schedule(args.T, ks, specs, beta=args.beta, eps=args.eps, exact=args.exact)
    if args.action == "schedule":
        _write_lines(args.out, schedule.dump().splitlines())
    else:
        bank = PolyBank.build(schedule, ks, specs)
        delta = args.step or 0.05
        g = cache.grid(ids[0], args.T, 2.0 * args.T, delta)
        rep = classify_sets(schedule, bank, g)
        labels = rep.pop("labels")
        rep["max_absP"] = {f"{j}:{s}": v for (j, s), v in rep["max_absP"].items()}
        if args.labels_csv:
            with open(args.labels_csv, "w") as fh:
                fh.write("t,label\n")
                ts = g.ts
                for t, lab in zip(ts, labels):
                    fh.write(f"{t:.17g},{int(lab)}\n")
            manifest.add_output(args.labels_csv)
        _write_lines(args.out, [dump_json(rep)])
    if args.out:
        manifest.add_output(args.out)
    manifest.stage("harper")
    return 0


def _suite_truncation(seed):
    from .harper import truncation_ratio, truncation_remainder

    rng = np.random.default_rng(seed)
    lines = []
    worst = 0.0
    for i in range(200):
        V = 10.0 * rng.random()
        r = V * np.sqrt(rng.random())
        th = 2.0 * np.pi * rng.random()
        D = r * np.exp(1j * th)
        rem = truncation_remainder(D, V)
        ratio = truncation_ratio(D, V)
        ok = abs(rem) <= 2.0 * np.exp(-9.0 * V)
        worst = max(worst, abs(rem) / (2.0 * np.exp(-9.0 * V)))
        lines.append(
            dump_json(
                {
                    "case": i,
                    "V": V,
                    "D": complex(D),
                    "ratio": ratio,
                    "remainder": rem,
                    "bound": 2.0 * np.exp(-9.0 * V),
                    "pass": bool(ok),
                }
            )
        )
    lines.append(dump_json({"suite": "truncation", "worst_fraction_of_bound": worst}))
    return lines


def _suite_mv(seed):
    from .meanvalues import mv_check

    rng = np.random.default_rng(seed)
    lines = []
    for N, T in ((10, 1e6), (100, 1e6)):
        coeffs = np.ones(N)
        rep = mv_check(coeffs, T)
        lines.append(dump_json({"suite": "mv", **{k: rep[k] for k in sorted(rep)}}))
    coeffs = rng.standard_normal(50)
    rep = mv_check(coeffs, 1e5)
    lines.append(dump_json({"suite": "mv-random", **{k: rep[k] for k in sorted(rep)}}))
    return lines


def _suite_coprime(seed):
    from .meanvalues import coprime_factorization_check

    rng = np.random.default_rng(seed)
    configs = [
        [(np.array([1, 2, 4, 8, 16, 32]), rng.standard_normal(6)),
         (np.array([1, 3, 9, 27]), rng.standard_normal(4))],
        [(np.array([1, 2, 4]), rng.standard_normal(3)),
         (np.array([1, 3]), rng.standard_normal(2)),
         (np.array([1, 5]), rng.standard_normal(2))],
        [(np.array([1, 7, 49]), rng.standard_normal(3))],
    ]
    lines = []
    for cfg in configs:
        rep = coprime_factorization_check(cfg, 1e6)
        rep.pop("factor_means")
        lines.append(dump_json({"suite": "coprime", **{k: rep[k] for k in sorted(rep)}}))
    return lines


def _suite_highmoment(seed):
    from .meanvalues import high_moment_check
    from .primes import sieve_primes

    primes = sieve_primes(51).primes
    lines = []
    for ell in (1, 2, 3):
        rep = high_moment_check(primes, np.ones(len(primes)), ell, 1e6)
        lines.append(dump_json({"suite": "highmoment", **{k: rep[k] for k in sorted(rep)}}))
    return lines


def _suite_gabriel(seed):
    from .lfunc import zeta_id
    from .meanvalues import gabriel_check
    from .satake import zeta_spec

    rng = np.random.default_rng(seed)
    lines = []
    for i in range(20):
        alpha = 1.001 + 0.2 * rng.random()
        beta = min(1.5, alpha + 0.25 + 0.2 * rng.random())
        gamma = alpha + (beta - alpha) * rng.random()
        tau = 60.0 + 300.0 * rng.random()
        k = float(rng.choice([0.5, 0.7, 1.0, 1.3, 2.0]))
        rep = gabriel_check(40, [k], [zeta_id()], [zeta_spec()], alpha, gamma, beta, tau)
        rep["case"] = i
        rep["k"] = k
        lines.append(dump_json({k_: rep[k_] for k_ in sorted(rep)}))
    return lines


def cmd_verify(args, cache, manifest):
    suites = {
        "truncation": _suite_truncation,
        "mv": _suite_mv,
        "coprime": _suite_coprime,
        "highmoment": _suite_highmoment,
        "gabriel": _suite_gabriel,
    }
    if args.suite not in suites:
        raise CritlabError(f"unknown suite {args.suite!r}; pick from {sorted(suites)}")
    lines = suites[args.suite](args.seed)
    _write_lines(args.out, lines)
    if args.out:
        manifest.add_output(args.out)
    manifest.stage(f"verify-{args.suite}")
    return 0


def cmd_dist(args, cache, manifest):
    from .deviations import (
        TailGrid,
        empirical_phi,
        fubini_check,
        joint_tail_ratio,
        large_deviation_profile,
        mass_concentration_check,
        selberg_clt_test,
    )

    ids, ks = parse_selector(args.lfunc)
    if args.action == "clt":
        g = cache.grid(ids[0], 1.0, args.T, args.step or np.pi / np.log(args.T))
        rep = selberg_clt_test(g, T=args.T)
        out = {
            "sample_mean": rep.sample_mean,
            "sample_variance": rep.sample_variance,
            "ks_distance": rep.ks_distance,
            "n": rep.n,
            "normalized_mean": rep.normalized_mean,
            "variance_reference": rep.variance_reference,
        }
        _write_lines(args.out, [dump_json(out)])
    else:
        tg = TailGrid.build(ids, args.T, delta=args.step, cache=cache, dyadic=args.dyadic)
        V = [float(v) for v in args.V.split(",")] if args.V else [1.0] * tg.r
        if args.action == "phi":
            rep = {"phi": empirical_phi(tg, V), "V": V, "n": tg.n, "T": tg.T}
        elif args.action == "joint":
            rep = {"log_ratio": joint_tail_ratio(tg, V), "V": V, "T": tg.T}
        elif args.action == "ldp":
            cs = [float(c) for c in (args.c or "1.0").split(",")]
            rep = large_deviation_profile(tg, cs)
        elif args.action == "fubini":
            rep = fubini_check(tg, ks, v_step=args.v_step)
        elif args.action == "mass":
            rep = mass_concentration_check(tg, ks, args.eps_window, v_step=args.v_step)
        else:
            raise CritlabError(f"unknown dist action {args.action!r}")
        _write_lines(args.out, [dump_json(rep)])
    if args.out:
        manifest.add_output(args.out)
    manifest.stage(f"dist-{args.action}")
    return 0


def cmd_hurwitz(args, cache, manifest):
    if args.action == "identity":
        from .lfunc import hurwitz_from_characters, hurwitz_zeta

        rng = np.random.default_rng(args.seed)
        lines = []
        worst = 0.0
        for _ in range(args.samples):
            s = complex(0.5 + 1.5 * rng.random(), -50.0 + 100.0 * rng.random())
            if abs(s - 1.0) < 0.05:
                continue
            lhs = hurwitz_zeta(s, args.a, args.q)
            rhs = hurwitz_from_characters(s, args.a, args.q)
            worst = max(worst, abs(lhs - rhs))
            lines.append(dump_json({"s": s, "residual": abs(lhs - rhs)}))
        lines.append(dump_json({"worst_residual": worst, "a": args.a, "q": args.q}))
        _write_lines(args.out, lines)
    else:
        from .moments import twisted_hurwitz_moment

        rep = twisted_hurwitz_moment(args.a, args.q, args.k, args.T, delta=args.step)
        _write_lines(args.out, [dump_json(rep)])
    if args.out:
        manifest.add_output(args.out)
    manifest.stage(f"hurwitz-{args.action}")
    return 0


# ---------------------------------------------------------------- dispatch


def build_parser():
    p = argparse.ArgumentParser(prog="critlab", description=__doc__)
    p.add_argument("--config", help="key=value config file (flags override)")
    p.add_argument("--cache-dir", default=None, help=f"grid cache dir (or ${'{'}CRITLAB_CACHE{'}'})")
    p.add_argument("--workers", type=int, default=1, help="thread budget for grid fills")
    p.add_argument("--manifest", default=None, help="write the run manifest here")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("eval", help="fill a log|L| grid and export CSV")
    q.add_argument("--lfunc", required=True)
    q.add_argument("--t0", type=float, required=True)
    q.add_argument("--t1", type=float, required=True)
    q.add_argument("--step", type=float, required=True)
    q.add_argument("--clamp-floor", type=float, default=-40.0)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_eval)

    q = sub.add_parser("moment", help="joint moments over a T sweep (JSON lines)")
    q.add_argument("--lfunc", required=True)
    q.add_argument("--T", required=True, help="comma-separated T values")
    q.add_argument("--step", type=float, default=None)
    q.add_argument("--out", default=None)
    q.set_defaults(func=cmd_moment)

    q = sub.add_parser("fit", help="scaling fit over moment records")
    q.add_argument("--records", required=True, help="JSON-lines moment records")
    q.add_argument("--out", default=None)
    q.set_defaults(func=cmd_fit)

    q = sub.add_parser("windowed", help="the H/K/J windowed integrals")
    q.add_argument("--lfunc", required=True)
    q.add_argument("--sigma", type=float, required=True)
    q.add_argument("--T", type=float, required=True)
    q.add_argument("--N", type=int, required=True)
    q.add_argument("--out", default=None)
    q.set_defaults(func=cmd_windowed)

    q = sub.add_parser("chandee", help="smoothed prime-sum majorant audit")
    q.add_argument("--lfunc", required=True)
    q.add_argument("--T", type=float, required=True)
    q.add_argument("--x", type=float, default=None)
    q.add_argument("--x-exponent", type=float, default=0.1)
    q.add_argument("--step", type=float, default=None)
    q.add_argument("--out", default=None)
    q.set_defaults(func=cmd_chandee)

    q = sub.add_parser("harper", help="prime-block schedule and set classification")
    q.add_argument("action", choices=["schedule", "classify"])
    q.add_argument("--lfunc", required=True)
    q.add_argument("--T", type=float, required=True)
    q.add_argument("--beta", type=float, default=0.01)
    q.add_argument("--eps", type=float, default=0.2)
    q.add_argument("--exact", action="store_true")
    q.add_argument("--step", type=float, default=None)
    q.add_argument("--labels-csv", default=None)
    q.add_argument("--out", default=None)
    q.set_defaults(func=cmd_harper)

    q = sub.add_parser("verify", help="lemma-check suites")
    q.add_argument("--suite", required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", default=None)
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("dist", help="value-distribution statistics")
    q.add_argument("action", choices=["phi", "clt", "joint", "ldp", "fubini", "mass"])
    q.add_argument("--lfunc", required=True)
    q.add_argument("--T", type=float, required=True)
    q.add_argument("--step", type=float, default=None)
    q.add_argument("--V", default=None, help="comma-separated thresholds")
    q.add_argument("--c", default=None, help="threshold multipliers for ldp")
    q.add_argument("--v-step", type=float, default=0.01)
    q.add_argument("--eps-window", type=float, default=0.3)
    q.add_argument("--dyadic", action="store_true")
    q.add_argument("--out", default=None)
    q.set_defaults(func=cmd_dist)

    q = sub.add_parser("hurwitz", help="decomposition identity / twisted moment")
    q.add_argument("action", choices=["identity", "twisted"])
    q.add_argument("--a", type=int, required=True)
    q.add_argument("--q", type=int, required=True)
    q.add_argument("--k", type=float, default=1.0)
    q.add_argument("--T", type=float, default=1e4)
    q.add_argument("--samples", type=int, default=100)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--step", type=float, default=None)
    q.add_argument("--out", default=None)
    q.set_defaults(func=cmd_hurwitz)
    return p


def dispatch(argv):
    """Run one command; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    if getattr(args, "lfunc", None) is not None:
        from .errors import DomainError

        try:
            parse_selector(args.lfunc)
        except DomainError as exc:
            sys.stderr.write(f"usage error: --lfunc {args.lfunc!r}: {exc}\n")
            return 2
    try:
        config = _load_config(args.config)
    except (CritlabError, OSError) as exc:
        sys.stderr.write(f"usage error: --config: {exc}\n")
        return 2
    cache_dir = args.cache_dir or config.get("cache_dir") or default_cache_dir()
    workers = args.workers if args.workers != 1 else int(config.get("workers", 1))
    cache = GridCache(directory=cache_dir, workers=workers)
    snapshot = {k: v for k, v in vars(args).items() if k != "func" and v is not None}
    snapshot["cache_dir"] = cache_dir
    manifest = Manifest(snapshot)
    try:
        code = args.func(args, cache, manifest)
    except CritlabError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    manifest.record_cache(cache)
    if args.manifest:
        manifest.write(args.manifest)
    return code


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
