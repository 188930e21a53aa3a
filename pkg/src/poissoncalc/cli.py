"""Command line experiment runner.

One subcommand per check suite plus `all` and `list-checks`. Runs load a JSON
configuration (bundled defaults when none is given), execute the selected
suites and write report.csv / report.json with full provenance (config hash,
library version, seeds). The exit code is 0 exactly when every executed check
is consistent or explicitly marked as report-only.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .reporting import rows_ok, write_reports
from .runconfig import (SEED_ENV_VAR, SUITES, ConfigError, RunConfig,
                        default_config, load_config, parse_config)
from .suites import SUITE_RUNNERS, RunContext, list_checks


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poissoncalc",
        description="Monte Carlo verification suites for stochastic calculus "
                    "on Poisson configuration spaces")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_command(name: str, help_text: str):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", help="path to a JSON run configuration "
                                          "(bundled defaults when omitted)")
        cmd.add_argument("--seed", type=int,
                         help=f"override the Monte Carlo master seed "
                              f"(also via ${SEED_ENV_VAR})")
        cmd.add_argument("--out-dir", help="report output directory")
        cmd.add_argument("--ci-level", type=float,
                         help="confidence level for reported intervals")
        cmd.add_argument("--workers", type=int,
                         help="shard workers (results are identical for any "
                              "worker count)")
        return cmd

    add_run_command("all", "run every suite selected in the configuration")
    for suite in SUITES:
        add_run_command(suite, f"run only the {suite} suite")
    sub.add_parser("list-checks", help="print every check id with the "
                                       "relation it verifies")
    return parser


def _load(args) -> RunConfig:
    if args.config:
        config = load_config(args.config)
    else:
        config = parse_config(default_config())
    doc = dict(config.raw)
    mc_doc = dict(doc["mc"])
    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed is not None:
        mc_doc["seed"] = int(env_seed)
    if args.seed is not None:
        mc_doc["seed"] = args.seed
    if args.ci_level is not None:
        mc_doc["ci_level"] = args.ci_level
    if args.workers is not None:
        mc_doc["workers"] = args.workers
    doc["mc"] = mc_doc
    if args.out_dir is not None:
        doc["out_dir"] = args.out_dir
    return parse_config(doc)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "list-checks":
        print(list_checks())
        return 0
    try:
        config = _load(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    suites = config.suites if args.command == "all" else (args.command,)
    ctx = RunContext(config)
    rows = []
    for suite in suites:
        try:
            rows.extend(SUITE_RUNNERS[suite](ctx))
        except Exception as err:  # noqa: BLE001 - name the failing suite
            print(f"check suite {suite!r} failed: {err}", file=sys.stderr)
            return 2
    config_doc = dict(config.raw)
    config_doc["suites"] = list(suites)
    csv_path, json_path = write_reports(rows, config_doc, config.out_dir,
                                        __version__)
    n_bad = sum(r.verdict == "violated" for r in rows)
    for r in rows:
        print(f"{r.verdict:>10}  {r.suite}/{r.check}")
    print(f"wrote {csv_path} and {json_path}: {len(rows)} checks, "
          f"{n_bad} violated")
    return 0 if rows_ok(rows) else 1


if __name__ == "__main__":
    sys.exit(main())
