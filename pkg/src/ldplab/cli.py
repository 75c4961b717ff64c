"""Command-line entry point.

Exit codes: 0 on success, 1 when a verification or postcondition fails,
2 on usage errors (bad arguments, unreadable or invalid inputs).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import bounds as B
from .accounting import kl_level
from .channels import (
    PROJECTION_METHODS,
    ChannelError,
    DiscreteChannel,
    audit_approx_dp,
    audit_pure_dp,
    audit_renyi,
    project_to_pure_dp,
    projection_tv_bound,
    row_tv,
)
from .harness import SUITES, ConfigError, ExperimentConfig, emit_results, run_experiment, verify_suite

SEED_ENV = "LDPLAB_SEED"


def _num(x: float):
    return x if math.isfinite(x) else ("inf" if x > 0 else "nan")


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}")


def _print(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_audit(args) -> int:
    ch = DiscreteChannel.load(args.channel)
    out = {"inputs": ch.input_size, "outputs": ch.output_size, "epsilon": _num(audit_pure_dp(ch))}
    if args.eps is not None:
        out["delta_at_eps"] = audit_approx_dp(ch, args.eps)
    if args.alpha is not None:
        out["renyi"] = {"alpha": args.alpha, "value": _num(audit_renyi(ch, args.alpha))}
    _print(out)
    return 0


def cmd_project(args) -> int:
    ch = DiscreteChannel.load(args.channel)
    proj = project_to_pure_dp(ch, args.eps, args.delta, method=args.method)
    tv = row_tv(ch, proj)
    allowance = projection_tv_bound(args.eps, args.delta)
    eps_hat = audit_pure_dp(proj)
    ok_ratio = eps_hat <= args.eps + 1e-9
    ok_tv = bool(tv.max() <= allowance + 1e-12)
    report = {
        "channel": proj.to_dict(),
        "audited_epsilon": _num(eps_hat),
        "row_tv": tv.tolist(),
        "tv_allowance": allowance,
        "ratio_ok": ok_ratio,
        "tv_ok": ok_tv,
    }
    if args.out:
        proj.dump(args.out)
    _print(report)
    return 0 if ok_ratio and ok_tv else 1


def cmd_bound(args) -> int:
    if args.eps_kl is not None:
        eps_kl = args.eps_kl
    elif args.eps is not None:
        eps_kl = kl_level(args.eps)
    else:
        raise ConfigError("give --eps or --eps-kl")
    fam = args.family
    if fam == "bernoulli":
        rep = B.corollary_bernoulli_bound(args.n, args.d, eps_kl, args.loss)
    elif fam == "gaussian":
        rep = B.corollary_gaussian_bound(args.n, args.d, args.sigma2, eps_kl)
    elif fam == "sparse_gaussian":
        rep = B.corollary_sparse_gaussian_bound(args.n, args.d, args.k, args.sigma2, eps_kl)
    else:
        rep = B.corollary_logistic_bound(args.n, args.d, eps_kl)
    _print(rep.to_dict())
    return 0


def cmd_simulate(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    elif os.environ.get(SEED_ENV) is not None:
        cfg.seed = _default_seed()
    if args.replications is not None:
        cfg.replications = args.replications
    cfg.__post_init__()
    table = run_experiment(cfg, workers=args.workers)
    if args.out:
        fmt = args.format or ("json" if args.out.endswith(".json") else "csv")
        emit_results(table, fmt, args.out)
    else:
        _print([r.to_dict() for r in table])
    return 0


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    report = verify_suite(args.suite, seed=seed, instances=args.instances)
    _print(report.to_dict())
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ldplab", description="Local privacy estimation laboratory.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("audit", help="audit a channel JSON file")
    a.add_argument("channel")
    a.add_argument("--eps", type=float, help="also report the tightest delta at this epsilon")
    a.add_argument("--alpha", type=float, help="also report the Renyi level of this order")
    a.set_defaults(func=cmd_audit)

    pr = sub.add_parser("project", help="project an (eps, delta) channel to eps-pure DP")
    pr.add_argument("channel")
    pr.add_argument("--eps", type=float, required=True)
    pr.add_argument("--delta", type=float, required=True)
    pr.add_argument("--method", choices=PROJECTION_METHODS, default="minimax")
    pr.add_argument("--out", help="write the projected channel here")
    pr.set_defaults(func=cmd_project)

    b = sub.add_parser("bound", help="evaluate a corollary lower bound")
    b.add_argument("family", choices=["bernoulli", "gaussian", "sparse_gaussian", "logistic"])
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--d", type=int, required=True)
    b.add_argument("--eps", type=float)
    b.add_argument("--eps-kl", type=float, dest="eps_kl")
    b.add_argument("--sigma2", type=float, default=1.0)
    b.add_argument("--k", type=int, default=1)
    b.add_argument("--loss", choices=B.LOSSES, default="squared")
    b.set_defaults(func=cmd_bound)

    s = sub.add_parser("simulate", help="run a Monte Carlo experiment")
    s.add_argument("config")
    s.add_argument("--out")
    s.add_argument("--format", choices=["csv", "json"])
    s.add_argument("--seed", type=int)
    s.add_argument("--replications", type=int)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--seed", type=int)
    v.add_argument("--instances", type=int)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ChannelError, ValueError, OSError) as exc:
        print(f"ldplab {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
