"""Command-line front end: one-shot estimates, sample sizes, and experiment sweeps.

Exit codes are a stable contract: 0 success, 1 verification failure, 2 usage
error, 3 domain or numerical error.  Every experiment run echoes its fully
resolved configuration (flags > config file > defaults) as ``#`` header
lines in the CSV, so any output can be reproduced from its own header.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import __version__
from .errors import ConfigError, DomainError, RestrictedBayesError
from .estimators import (
    interval_estimate,
    precautionary_estimate,
    required_sample_size,
    scale_mean,
)
from .losses import (
    BrownLog,
    IntervalBrownLogit,
    IntervalSquared,
    MultivariatePrecautionary,
    MultivariateScaleFamily,
    NormalizedSquared,
    Precautionary,
    ScaleFamily,
    ScaleInvariantPrecautionary,
    SquaredError,
    Stein,
)
from .moments import MomentSet, beta_moments, mc_moments, truncated_normal_moments
from .sim import (
    BINOMIAL_ESTIMATORS,
    CI_KINDS,
    NORMAL_ESTIMATORS,
    ExperimentSpec,
    run_study,
    write_csv,
)
from .verify import FAMILIES, run_checks

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3


# ---------------------------------------------------------------------------
# option plumbing


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


def _parse_strs(text: str) -> tuple[str, ...]:
    return tuple(tok.strip() for tok in text.split(",") if tok.strip())


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


def _parse_grid(text: str) -> tuple[float, ...]:
    """Either 'lo:hi:count' (inclusive linspace) or a comma list of values."""
    if ":" in text:
        lo, hi, count = text.split(":")
        return tuple(np.linspace(float(lo), float(hi), int(count)).tolist())
    return _parse_floats(text)


_PARSERS = {
    "n": int,
    "reps": int,
    "seed": int,
    "workers": int,
    "nodes": int,
    "level": float,
    "a": float,
    "sigma2": float,
    "out": str,
    "grid": _parse_grid,
    "estimators": _parse_strs,
    "ci_kinds": _parse_strs,
    "alpha1": _parse_floats,
    "alpha2": _parse_floats,
    "lambdas": _parse_floats,
    "nus": _parse_floats,
    "k_list": _parse_ints,
}


def _load_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"config line {line!r} is not key=value")
            key, _, val = line.partition("=")
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """flags > config file > built-in defaults, with per-key coercion."""
    config = _load_config(args.config) if getattr(args, "config", None) else {}
    unknown = set(config) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    resolved = {}
    for key, default in defaults.items():
        flag = getattr(args, key, None)
        if flag is not None:
            resolved[key] = flag
        elif key in config:
            resolved[key] = _PARSERS[key](config[key])
        else:
            resolved[key] = default
    return resolved


def _meta_lines(command: str, resolved: dict) -> list[str]:
    lines = [f"tool=restricted-bayes {__version__}", f"timestamp={time.strftime('%Y-%m-%dT%H:%M:%S')}"]
    lines.append(f"command={command}")
    for key in sorted(resolved):
        value = resolved[key]
        if isinstance(value, tuple):
            value = ",".join(str(v) for v in value)
        lines.append(f"{key}={value}")
    return lines


def _run_and_write(spec: ExperimentSpec, resolved: dict, command: str) -> int:
    result = run_study(spec, workers=resolved["workers"])
    write_csv(result, resolved["out"], _meta_lines(command, resolved))
    print(
        f"{command}: wrote {len(result.rows)} rows for {len(spec.grid)} grid points "
        f"to {resolved['out']} (reps={spec.reps}, seed={spec.seed}, aborted={result.aborted})"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# one-shot commands


def _moments_from_args(args) -> MomentSet:
    k = getattr(args, "k", None)
    if args.beta is not None:
        x, n = args.beta
        return beta_moments(int(x), int(n), k)
    if args.truncnorm is not None:
        c, sd, a, b = args.truncnorm
        return truncated_normal_moments(c, sd, a, b)
    if args.mc is not None:
        samples = np.loadtxt(args.mc, ndmin=1)
        return mc_moments(samples, k)
    raise ConfigError("specify a posterior: --beta, --truncnorm, or --mc")


def cmd_estimate(args) -> int:
    if args.loss == "scale" and args.k is None:
        args.k = 1.0
    moments = _moments_from_args(args)
    if args.loss == "sq":
        point, risk = moments.m1, moments.m2 - moments.m1**2
    elif args.loss == "precautionary":
        res = precautionary_estimate(moments)
        point, risk = res.point, res.achieved_risk
    elif args.loss == "scale":
        res = scale_mean(moments)
        point, risk = res.point, res.achieved_risk
    else:  # iq
        a, b = args.interval if args.interval is not None else (0.0, 1.0)
        res = interval_estimate(moments, a, b)
        point, risk = res.point, res.achieved_risk
    print(f"{point:.12g} {risk:.12g}")
    return EXIT_OK


def cmd_samplesize(args) -> int:
    if (args.p_placebo is None) == (args.x is None):
        raise ConfigError("give either --p-placebo or --x/--n")
    if args.p_placebo is not None:
        n = required_sample_size(args.target, args.p_placebo, args.alpha, 1.0 - args.power)
        print(f"p_placebo={args.p_placebo:.12g} n={n}")
        return EXIT_OK

    if args.n is None:
        raise ConfigError("--x needs --n")
    a, b = args.interval if args.interval is not None else (0.0, 1.0)
    p_naive = args.x / args.n
    p_iq = interval_estimate(beta_moments(args.x, args.n), a, b).point
    failures = 0
    try:
        n_naive = required_sample_size(args.target, p_naive, args.alpha, 1.0 - args.power)
        print(f"p_naive={p_naive:.12g} n_naive={n_naive}")
    except DomainError as err:
        failures += 1
        print(f"p_naive={p_naive:.12g} n_naive=NA ({err})")
    try:
        n_iq = required_sample_size(args.target, p_iq, args.alpha, 1.0 - args.power)
        print(f"p_iq={p_iq:.12g} n_iq={n_iq}")
    except DomainError as err:
        failures += 1
        print(f"p_iq={p_iq:.12g} n_iq=NA ({err})")
    return EXIT_OK if failures < 2 else EXIT_DOMAIN


_LOSS_KINDS = (
    "sq",
    "precautionary",
    "scale",
    "sip",
    "nq",
    "stein",
    "brown",
    "iq",
    "ibrown",
    "mscale",
    "mprecautionary",
)


def _build_loss(args):
    a, b = args.interval if args.interval is not None else (0.0, 1.0)
    k = args.k if args.k is not None else 1.0
    theta = _parse_floats(args.theta)
    d = _parse_floats(args.d)
    m = len(theta)
    table = {
        "sq": SquaredError(),
        "precautionary": Precautionary(),
        "scale": ScaleFamily(k),
        "sip": ScaleInvariantPrecautionary(),
        "nq": NormalizedSquared(),
        "stein": Stein(),
        "brown": BrownLog(),
        "iq": IntervalSquared(a, b),
        "ibrown": IntervalBrownLogit(a, b),
        "mscale": MultivariateScaleFamily(k, m),
        "mprecautionary": MultivariatePrecautionary(m),
    }
    loss = table[args.kind]
    if loss.dim is None:
        if m != 1:
            raise ConfigError(f"loss {args.kind} is univariate, got {m} components")
        return loss, theta[0], d[0]
    return loss, theta, d


def cmd_losses(args) -> int:
    if args.list:
        for kind in _LOSS_KINDS:
            print(kind)
        return EXIT_OK
    if args.kind is None or args.theta is None or args.d is None:
        raise ConfigError("need --kind, --theta and --d (or --list)")
    loss, theta, d = _build_loss(args)
    print(f"{loss.evaluate(theta, d):.12g}")
    return EXIT_OK


def cmd_verify(args) -> int:
    families = _parse_strs(args.family) if args.family else None
    checks = run_checks(families, seed=args.seed)
    failed = 0
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        failed += 0 if c.passed else 1
        print(f"{status} {c.family}: {c.name} ({c.detail})")
    return EXIT_OK if failed == 0 else EXIT_VERIFY_FAIL


# ---------------------------------------------------------------------------
# experiment commands


def cmd_binomial(args, with_coverage: bool = False) -> int:
    command = "coverage" if with_coverage else "binomial"
    defaults = {
        "n": 15,
        "reps": 100_000,
        "seed": 1,
        "workers": 1,
        "grid": tuple(np.linspace(0.01, 0.99, 99).tolist()),
        "estimators": BINOMIAL_ESTIMATORS,
        "ci_kinds": CI_KINDS if with_coverage else (),
        "level": 0.95,
        "out": f"{command}.csv",
    }
    resolved = _resolve(args, defaults)
    spec = ExperimentSpec(
        study="binomial",
        n=resolved["n"],
        reps=resolved["reps"],
        grid=resolved["grid"],
        estimators=resolved["estimators"],
        seed=resolved["seed"],
        extras={"ci_kinds": tuple(resolved["ci_kinds"]), "level": resolved["level"]},
    )
    return _run_and_write(spec, resolved, command)


def cmd_normal(args) -> int:
    defaults = {
        "n": 15,
        "reps": 100_000,
        "seed": 1,
        "workers": 1,
        "a": 2.0,
        "sigma2": 4.0,
        "grid": None,
        "estimators": NORMAL_ESTIMATORS,
        "out": "normal.csv",
    }
    resolved = _resolve(args, defaults)
    if resolved["grid"] is None:
        a = resolved["a"]
        resolved["grid"] = tuple(np.linspace(-0.95 * a, 0.95 * a, 39).tolist())
    spec = ExperimentSpec(
        study="normal",
        n=resolved["n"],
        reps=resolved["reps"],
        grid=resolved["grid"],
        estimators=resolved["estimators"],
        seed=resolved["seed"],
        extras={"a": resolved["a"], "sigma2": resolved["sigma2"]},
    )
    return _run_and_write(spec, resolved, "normal")


def cmd_gamma(args) -> int:
    defaults = {
        "n": 15,
        "reps": 1000,
        "seed": 1,
        "workers": 1,
        "alpha1": (1.0, 3.0, 5.0, 7.0, 9.0),
        "alpha2": (1.0, 3.0, 5.0, 7.0, 9.0),
        "nodes": 120,
        "estimators": ("postmean", "precautionary"),
        "out": "gamma.csv",
    }
    resolved = _resolve(args, defaults)
    grid = tuple((a1, a2) for a1 in resolved["alpha1"] for a2 in resolved["alpha2"])
    spec = ExperimentSpec(
        study="gamma",
        n=resolved["n"],
        reps=resolved["reps"],
        grid=grid,
        estimators=resolved["estimators"],
        seed=resolved["seed"],
        extras={"nodes": resolved["nodes"]},
    )
    return _run_and_write(spec, resolved, "gamma")


def cmd_weibull(args) -> int:
    defaults = {
        "n": 15,
        "reps": 1000,
        "seed": 1,
        "workers": 1,
        "lambdas": (1.0, 2.0, 3.0, 4.0, 5.0),
        "nus": (0.5, 1.0, 5.0, 10.0, 15.0),
        "k_list": (1, 2, 3, 4),
        "nodes": 120,
        "estimators": ("postmean", "scale_k"),
        "out": "weibull.csv",
    }
    resolved = _resolve(args, defaults)
    grid = tuple((lam, nu) for lam in resolved["lambdas"] for nu in resolved["nus"])
    spec = ExperimentSpec(
        study="weibull",
        n=resolved["n"],
        reps=resolved["reps"],
        grid=grid,
        estimators=resolved["estimators"],
        seed=resolved["seed"],
        extras={"nodes": resolved["nodes"], "k_list": resolved["k_list"]},
    )
    return _run_and_write(spec, resolved, "weibull")


# ---------------------------------------------------------------------------
# parser


def _add_experiment_options(sub, keys) -> None:
    sub.add_argument("--config", help="flat key=value config file (flags win)")
    sub.add_argument("--n", type=int, help="sample size per replication")
    sub.add_argument("--reps", type=int, help="replication count")
    sub.add_argument("--seed", type=int, help="64-bit stream seed")
    sub.add_argument("--workers", type=int, help="parallel workers (results invariant)")
    sub.add_argument("--out", help="output CSV path")
    if "grid" in keys:
        sub.add_argument("--grid", type=_parse_grid, help="'lo:hi:count' or comma list")
    if "estimators" in keys:
        sub.add_argument("--estimators", type=_parse_strs, help="comma list of estimator tags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="restricted-bayes",
        description="Bayes estimators for restricted parameter spaces and their benchmarking studies",
    )
    parser.add_argument("--version", action="version", version=f"restricted-bayes {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    est = subs.add_parser("estimate", help="one-shot Bayes estimate and achieved risk")
    est.add_argument("--beta", nargs=2, type=float, metavar=("X", "N"))
    est.add_argument("--truncnorm", nargs=4, type=float, metavar=("CENTER", "SD", "A", "B"))
    est.add_argument("--mc", help="file of posterior samples, one per line")
    est.add_argument("--loss", choices=("sq", "precautionary", "scale", "iq"), default="sq")
    est.add_argument("--k", type=float, help="order of the ratio loss")
    est.add_argument("--interval", nargs=2, type=float, metavar=("A", "B"))
    est.set_defaults(handler=cmd_estimate)

    ss = subs.add_parser("samplesize", help="two-group sample size from a placebo response estimate")
    ss.add_argument("--x", type=int, help="observed responders")
    ss.add_argument("--n", type=int, help="observed group size")
    ss.add_argument("--interval", nargs=2, type=float, metavar=("A", "B"))
    ss.add_argument("--p-placebo", type=float, dest="p_placebo")
    ss.add_argument("--target", type=float, required=True)
    ss.add_argument("--alpha", type=float, default=0.05)
    ss.add_argument("--power", type=float, default=0.90)
    ss.set_defaults(handler=cmd_samplesize)

    lo = subs.add_parser("losses", help="evaluate a loss from the catalog")
    lo.add_argument("--list", action="store_true", help="list available kinds")
    lo.add_argument("--kind", choices=_LOSS_KINDS)
    lo.add_argument("--theta", help="scalar or comma list")
    lo.add_argument("--d", help="scalar or comma list")
    lo.add_argument("--k", type=float)
    lo.add_argument("--interval", nargs=2, type=float, metavar=("A", "B"))
    lo.set_defaults(handler=cmd_losses)

    ver = subs.add_parser("verify", help="run the oracle cross-check suite")
    ver.add_argument("--family", help=f"comma list from {FAMILIES}")
    ver.add_argument("--seed", type=int, default=20240810)
    ver.set_defaults(handler=cmd_verify)

    bi = subs.add_parser("binomial", help="probability estimation MSE sweep")
    _add_experiment_options(bi, ("grid", "estimators"))
    bi.add_argument("--ci-kinds", type=_parse_strs, dest="ci_kinds")
    bi.add_argument("--level", type=float)
    bi.set_defaults(handler=lambda a: cmd_binomial(a, with_coverage=False))

    cov = subs.add_parser("coverage", help="confidence-interval coverage sweep")
    _add_experiment_options(cov, ("grid", "estimators"))
    cov.add_argument("--ci-kinds", type=_parse_strs, dest="ci_kinds")
    cov.add_argument("--level", type=float)
    cov.set_defaults(handler=lambda a: cmd_binomial(a, with_coverage=True))

    no = subs.add_parser("normal", help="restricted normal mean MSE sweep")
    _add_experiment_options(no, ("grid", "estimators"))
    no.add_argument("--a", type=float, help="the mean is known to lie in (-a, a)")
    no.add_argument("--sigma2", type=float)
    no.set_defaults(handler=cmd_normal)

    ga = subs.add_parser("gamma", help="gamma shape/scale estimation sweep")
    _add_experiment_options(ga, ("estimators",))
    ga.add_argument("--alpha1", type=_parse_floats, help="comma list of true shapes")
    ga.add_argument("--alpha2", type=_parse_floats, help="comma list of true scales")
    ga.add_argument("--nodes", type=int)
    ga.set_defaults(handler=cmd_gamma)

    we = subs.add_parser("weibull", help="Weibull shape/scale estimation sweep")
    _add_experiment_options(we, ("estimators",))
    we.add_argument("--lambdas", type=_parse_floats, help="comma list of true shapes")
    we.add_argument("--nus", type=_parse_floats, help="comma list of true scales")
    we.add_argument("--k-list", type=_parse_ints, dest="k_list")
    we.add_argument("--nodes", type=int)
    we.set_defaults(handler=cmd_weibull)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except RestrictedBayesError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
