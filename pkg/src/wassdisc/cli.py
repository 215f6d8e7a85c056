"""Command line interface.

Subcommands:
  gen     emit a point-set CSV for a named family
  disc    star / uniform discrepancy of one or two point-set CSVs
  wass    exact W_p between two point-set CSVs
  bound   evaluate a named constant or bound from its parameters
  verify  run a named check suite from a config file, write a report
  report  convert a report between JSON and CSV

``verify`` exits 0 iff no record failed.  Every flag has a config-file
counterpart (key=value lines or a JSON object).
"""

from __future__ import annotations

import argparse
import sys

from . import bounds, harness
from .discrepancy import star_discrepancy, uniform_discrepancy
from .measures import Norm, UniformCube, read_points_csv, write_points_csv
from .transport import wasserstein_exact


def _norm(name: str) -> Norm:
    return Norm(name.lower())


def cmd_gen(args) -> int:
    config = harness.ExperimentConfig(
        family=harness.Family(args.family), n_values=(args.n,), d=args.d,
        seed=args.seed, custom_file=args.input,
    )
    m = harness.generate_measure(config, args.n, args.trial)
    write_points_csv(m, args.out)
    print(f"wrote {m.size} points of dimension {m.dim} to {args.out}")
    return 0


def cmd_disc(args) -> int:
    mu = read_points_csv(args.points[0])
    nu = read_points_csv(args.points[1]) if len(args.points) > 1 else UniformCube(mu.dim)
    if args.kind in ("star", "both"):
        print(f"star {format(star_discrepancy(mu, nu, args.grid_cap), '.17g')}")
    if args.kind in ("uniform", "both"):
        print(f"uniform {format(uniform_discrepancy(mu, nu, args.pair_cap, args.grid_cap), '.17g')}")
    return 0


def cmd_wass(args) -> int:
    mu = read_points_csv(args.points[0])
    nu = read_points_csv(args.points[1])
    value, plan = wasserstein_exact(mu, nu, args.p, _norm(args.norm), args.support_cap)
    print(f"w_{args.p} {format(value, '.17g')}")
    if args.plan:
        from .transport import plan_to_csv

        plan_to_csv(plan, args.plan)
        print(f"plan -> {args.plan}")
    return 0


def cmd_bound(args) -> int:
    name = args.name
    if name == "kappa":
        print(format(bounds.kappa(args.d), ".17g"))
    elif name == "b_pd":
        print(format(bounds.b_pd(args.p, args.d), ".17g"))
    elif name == "reverse_constant":
        print(format(bounds.reverse_constant(args.r, args.d), ".17g"))
    elif name == "cube":
        res = bounds.bound_cube(args.p, args.d, args.dinf, _norm(args.norm))
        print(f"{format(res.value, '.17g')} regime={res.regime.value}")
    elif name == "w1_refined":
        res = bounds.bound_w1_refined(args.d, args.dstar if args.star else args.dinf,
                                      _norm(args.norm), star=args.star)
        print(f"{format(res.value, '.17g')} constant={format(res.constant, '.17g')}")
    elif name == "level_sum":
        print(format(bounds.saturated_level_sum(args.u, args.dinf, args.p, args.d), ".17g"))
    elif name == "level_sum_bound":
        print(format(bounds.saturated_level_sum_bound(args.u, args.dinf, args.p, args.d), ".17g"))
    elif name == "rd_shape":
        res = bounds.bound_real_space(args.p, args.q, args.d, args.dinf, args.mq, args.scale)
        print(f"{format(res.value, '.17g')} exponent={format(res.exponent, '.17g')}")
    elif name == "w1_moment_1d":
        print(format(bounds.bound_w1_moment_1d(args.q, args.mq, args.dstar), ".17g"))
    elif name == "w1_exp_1d":
        print(format(bounds.bound_w1_exponential_1d(args.lam, args.eexp, args.dstar, args.dinf), ".17g"))
    elif name == "reverse":
        res = bounds.reverse_bound(args.r, args.d, args.w1, args.gnorm)
        print(f"{format(res.value, '.17g')} exponent={format(res.exponent, '.17g')}")
    else:
        print(f"unknown bound {name!r}", file=sys.stderr)
        return 2
    return 0


def _config_from_args(args) -> harness.ExperimentConfig:
    config = harness.load_config(args.config) if args.config else harness.ExperimentConfig()
    overrides = {}
    if args.family:
        overrides["family"] = harness.Family(args.family)
    if args.n:
        overrides["n_values"] = tuple(args.n)
    if args.d:
        overrides["d"] = args.d
    if args.p:
        overrides["p_values"] = tuple(args.p)
    if args.norm:
        overrides["norm"] = _norm(args.norm)
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials:
        overrides["trials"] = args.trials
    if overrides:
        base = config.to_dict()
        base.update({k: (v.value if hasattr(v, "value") else v) for k, v in overrides.items()})
        base["n_values"] = list(overrides.get("n_values", config.n_values))
        base["p_values"] = list(overrides.get("p_values", config.p_values))
        config = harness.ExperimentConfig.from_dict(base)
    return config


def cmd_verify(args) -> int:
    config = _config_from_args(args)
    report = harness.run_suite(args.suite, config)
    payload = harness.emit_report(report, args.format)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
    summary = report.summary()
    print(f"total={summary['total']} passed={summary['passed']} "
          f"failed={summary['failed']} skipped={summary['skipped']}", file=sys.stderr)
    return 0 if report.all_passed else 1


def cmd_report(args) -> int:
    with open(args.input, "rb") as fh:
        report = harness.parse_report(fh.read())
    payload = harness.emit_report(report, args.to)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wassdisc", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="emit a point-set CSV")
    g.add_argument("--family", default="iid_uniform",
                   choices=[f.value for f in harness.Family])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=int, default=1)
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--trial", type=int, default=0)
    g.add_argument("--input", help="source CSV for the custom family")
    g.add_argument("--out", required=True)
    g.set_defaults(fn=cmd_gen)

    d = sub.add_parser("disc", help="discrepancies of one or two CSVs")
    d.add_argument("points", nargs="+", help="one CSV (vs the uniform law) or two")
    d.add_argument("--kind", choices=["star", "uniform", "both"], default="both")
    d.add_argument("--grid-cap", type=int, default=20_000_000)
    d.add_argument("--pair-cap", type=int, default=100_000_000)
    d.set_defaults(fn=cmd_disc)

    w = sub.add_parser("wass", help="exact W_p between two CSVs")
    w.add_argument("points", nargs=2)
    w.add_argument("--p", type=float, default=1.0)
    w.add_argument("--norm", default="l2", choices=[n.value for n in Norm])
    w.add_argument("--support-cap", type=int, default=1024)
    w.add_argument("--plan", help="write the optimal plan as CSV triples")
    w.set_defaults(fn=cmd_wass)

    b = sub.add_parser("bound", help="evaluate a named constant or bound")
    b.add_argument("name", choices=["kappa", "b_pd", "reverse_constant", "cube",
                                    "w1_refined", "level_sum", "level_sum_bound",
                                    "rd_shape", "w1_moment_1d", "w1_exp_1d", "reverse"])
    b.add_argument("--p", type=float, default=1.0)
    b.add_argument("--q", type=float, default=2.0)
    b.add_argument("--d", type=int, default=1)
    b.add_argument("--r", type=float, default=1.0)
    b.add_argument("--u", type=float, default=1.0)
    b.add_argument("--dinf", type=float, default=0.5)
    b.add_argument("--dstar", type=float, default=0.5)
    b.add_argument("--mq", type=float, default=1.0)
    b.add_argument("--w1", type=float, default=0.0)
    b.add_argument("--gnorm", type=float, default=1.0)
    b.add_argument("--lam", type=float, default=1.0)
    b.add_argument("--eexp", type=float, default=2.0)
    b.add_argument("--scale", type=float, default=1.0)
    b.add_argument("--norm", default="linf", choices=[n.value for n in Norm])
    b.add_argument("--star", action="store_true")
    b.set_defaults(fn=cmd_bound)

    v = sub.add_parser("verify", help="run a named check suite")
    v.add_argument("suite", choices=sorted(harness.SUITES) + ["all"])
    v.add_argument("--config", help="JSON or key=value config file")
    v.add_argument("--family", choices=[f.value for f in harness.Family])
    v.add_argument("--n", type=int, nargs="+")
    v.add_argument("--d", type=int)
    v.add_argument("--p", type=float, nargs="+")
    v.add_argument("--norm", choices=[n.value for n in Norm])
    v.add_argument("--seed", type=int)
    v.add_argument("--trials", type=int)
    v.add_argument("--format", choices=["json", "csv"], default="json")
    v.add_argument("--out")
    v.set_defaults(fn=cmd_verify)

    r = sub.add_parser("report", help="convert a report between formats")
    r.add_argument("input")
    r.add_argument("--to", choices=["json", "csv"], required=True)
    r.add_argument("--out")
    r.set_defaults(fn=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
