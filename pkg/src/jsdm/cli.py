"""Command-line front end.

    jsdm cluster   [--config F] [--key value ...] [--seed N] [--out DIR]
    jsdm schedule  [--config F] [--alpha A] [--seed N] [--out DIR]
    jsdm run       [--config F] [--out DIR]
    jsdm figure {rate|fairness|precoders|threshold} [--config F] [--out DIR]
    jsdm validate-sinr [--config F]
    jsdm reduction verify --cnf FILE [--delta D]

Any ScenarioConfig key can be overridden with --<key> <value>.  Exit
codes: 0 ok, 2 config error, 3 numerical failure, 4 size-cap violation.
"""

import argparse
import math
import os
import sys
from dataclasses import fields

from .errors import ConfigError, JsdmError, NumericalError, SizeCapError
from .harness import (ScenarioConfig, Scenario, GroupSystem, figure_fairness,
                      figure_precoders, figure_rate, figure_threshold,
                      load_config, reduction_verify, run_scenario,
                      validate_sinr, write_rows, _effective_threshold)


def _add_config_flags(parser):
    parser.add_argument("--config", help="key=value scenario file")
    for f in fields(ScenarioConfig):
        parser.add_argument("--" + f.name, dest="cfg_" + f.name, metavar="V")


def _build_config(args):
    overrides = {f.name: getattr(args, "cfg_" + f.name)
                 for f in fields(ScenarioConfig)
                 if getattr(args, "cfg_" + f.name, None) is not None}
    if getattr(args, "seed", None) is not None:
        overrides["seeds"] = str(args.seed)
    return load_config(args.config, overrides)


def _scenario_prelude(config, seed):
    scenario = Scenario(config, seed)
    dol_th = _effective_threshold(config, scenario)
    clustering = scenario.cluster(dol_th)
    return scenario, dol_th, clustering


def cmd_cluster(args):
    config = _build_config(args)
    seed = config.seeds[0]
    scenario, dol_th, clustering = _scenario_prelude(config, seed)
    print("seed %d, dol_th %.3f -> %d clusters"
          % (seed, dol_th, clustering.num_clusters))
    for cid, members in enumerate(clustering.clusters):
        angles = ", ".join("%.1f" % (math.degrees(scenario.users[u].azimuth))
                           for u in members)
        print("  cluster %d: users %s (azimuth deg: %s)" % (cid, members, angles))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "clusters.csv")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("user,azimuth_deg,cluster\n")
            for u in range(config.num_users):
                fh.write("%d,%r,%d\n" % (u, math.degrees(scenario.users[u].azimuth),
                                         clustering.labels[u]))
        print("wrote %s" % path)
    return 0


def cmd_schedule(args):
    config = _build_config(args)
    seed = config.seeds[0]
    scenario, dol_th, clustering = _scenario_prelude(config, seed)
    users_by_group, centroids, streams, dropped = scenario.grouping(clustering)
    if not centroids:
        raise ConfigError("no schedulable group; raise dol_th")
    system = GroupSystem(centroids, streams, config.n_t, config.approach,
                         energy_fraction=config.energy_fraction)
    alpha = args.alpha if args.alpha is not None else config.alpha_sweep[0]
    sset = scenario.schedule_set(system, users_by_group, alpha)
    print("seed %d, dol_th %.3f, alpha %.3g, approach %s"
          % (seed, dol_th, alpha, config.approach))
    if dropped:
        print("  unschedulable (rank < members): %s" % dropped)
    for idx, members in enumerate(sset.schedules, start=1):
        print("  schedule %d: users %s" % (idx, members))
    outliers = {u: s for u, s in sset.membership.items() if len(s) > 1}
    if outliers:
        print("  outliers (multi-schedule): %s" % outliers)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "schedules.csv")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("schedule,user\n")
            for idx, members in enumerate(sset.schedules, start=1):
                for u in members:
                    fh.write("%d,%d\n" % (idx, u))
        print("wrote %s" % path)
    return 0


def cmd_run(args):
    config = _build_config(args)
    rows = run_scenario(config)
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    path = write_rows(rows, os.path.join(out, "results.csv"))
    print("wrote %s (%d rows)" % (path, len(rows)))
    return 0


def cmd_figure(args):
    config = _build_config(args)
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    driver = {"rate": figure_rate, "fairness": figure_fairness,
              "precoders": figure_precoders, "threshold": figure_threshold}[args.kind]
    path = driver(config, out)
    print("wrote %s" % path)
    return 0


def cmd_validate_sinr(args):
    config = _build_config(args)
    report = validate_sinr(config)
    print("deterministic vs Monte-Carlo SINR (%d draws), SNR %s dB"
          % (report["draws"], report["snr_db"]))
    for mode, errs in report["max_rel_err"].items():
        print("  %-9s max relative error per SNR: %s"
              % (mode, ["%.2f%%" % (100 * e) for e in errs]))
    print("verdict: interference_sum=%s matches the finite-sample oracle"
          % report["verdict"])
    return 0


def cmd_reduction_verify(args):
    report = reduction_verify(args.cnf, delta=args.delta)
    print("CNF (M=%d vars, D=%d clauses):" % (report["num_vars"], report["num_clauses"]))
    for line in report["cnf"].splitlines():
        print("  " + line)
    print("params: rho=%.6g beta=%.6g delta=%.6g" % (report["rho"], report["beta"],
                                                     report["delta"]))
    print("lemma conditions: %s" % report["lemma_conditions"])
    print("max feasible objective: %.9g  threshold gamma: %.9g"
          % (report["max_objective"], report["gamma"]))
    print("decision: %s  SAT oracle: %s  -> %s"
          % (report["decision"], report["sat_oracle"],
             "EQUIVALENT" if report["equivalent"] else "NOT EQUIVALENT"))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="jsdm", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster users at the configured threshold")
    _add_config_flags(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("schedule", help="build the schedule set for one tolerance")
    _add_config_flags(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("run", help="full scenario -> results.csv")
    _add_config_flags(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("figure", help="figure-level experiment CSVs")
    p.add_argument("kind", choices=("rate", "fairness", "precoders", "threshold"))
    _add_config_flags(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("validate-sinr", help="deterministic vs Monte-Carlo check")
    _add_config_flags(p)
    p.set_defaults(func=cmd_validate_sinr)

    p = sub.add_parser("reduction", help="NP-reduction tools")
    rsub = p.add_subparsers(dest="reduction_command", required=True)
    pv = rsub.add_parser("verify", help="verify decision == SAT for one DIMACS file")
    pv.add_argument("--cnf", required=True)
    pv.add_argument("--delta", type=float, default=0.05)
    pv.set_defaults(func=cmd_reduction_verify)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except SizeCapError as exc:
        print("size-cap violation: %s" % exc, file=sys.stderr)
        return 4
    except NumericalError as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return 3
    except JsdmError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
