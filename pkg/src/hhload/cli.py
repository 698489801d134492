"""Command-line front end for the experiment harness.

Subcommands: run, sweep-n, tradeoff-grid, groups, alloc-once,
predict-complexity.  Exit codes: 0 success, 2 usage error, 3 scenario or
configuration error, 4 I/O error, 1 anything else.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from . import harness
from .alloc import GainVector, hh_allocate, ledger_predicted, wf_initial_bits
from .errors import ConfigError, InvalidParameterError
from .harness import (Scenario, apply_overrides, dump_results, load_scenario,
                      run_scenario, run_tradeoff_grid, scenario_fields)
from .metrics import predicted_runtime

DEFAULT_SWEEP_N = (128, 256, 512, 1024, 2048, 4096)
DEFAULT_SWEEP_TAU_S = (2.5e-6, 12e-6, 25e-6)
QUICK_TRIALS = 500
QUICK_MAX_N = 1024


def _add_common(sub):
    sub.add_argument("--scenario", help="scenario file (flat key = value text)")
    sub.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                     help="override one scenario key (repeatable)")
    sub.add_argument("--out", default="results", help="output directory")
    sub.add_argument("--seed", type=int, help="master seed override")
    sub.add_argument("--trials", type=int, help="trial count override")
    sub.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                     help="worker processes for trials (default: all cores, "
                          "1 = sequential)")
    sub.add_argument("--quick", action="store_true",
                     help="desk-scale profile: 500 trials, N capped at 1024")
    sub.add_argument("--format", choices=("csv", "full"), default="csv",
                     dest="fmt", help="csv only, or csv plus a full JSON dump")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hhload",
        description="Greedy bit-loading and water-filling experiments for OFDMA")
    subs = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
            ("run", "run the scenario once and write summary results"),
            ("sweep-n", "capacity/iteration curves over the subcarrier sweep"),
            ("tradeoff-grid", "tau_max x G_T grid with the tradeoff surface"),
            ("groups", "grouping statistics only (no bit loading)")):
        sub = subs.add_parser(name, help=help_text)
        _add_common(sub)

    once = subs.add_parser("alloc-once", help="run one allocator on a gain-vector file")
    once.add_argument("gain_file", help="one gain per line, header '# gamma=G pmax=P'")
    once.add_argument("--kappa", type=int, default=1)
    once.add_argument("--wf-start", action="store_true",
                      help="warm start from the rounded water-filling bits")
    once.add_argument("--max-bits", type=int, default=None)

    pred = subs.add_parser("predict-complexity",
                           help="print the runtime model and reference op counts")
    pred.add_argument("n_values", nargs="+", type=int, metavar="N")
    return parser


def _build_scenario(args, parser) -> Scenario:
    if args.scenario:
        scenario = load_scenario(args.scenario)
    else:
        scenario = Scenario()
    overrides = {}
    for item in args.set:
        if "=" not in item:
            parser.error(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        key = key.strip()
        if key not in scenario_fields():
            parser.error(f"unknown scenario key: {key}")
        overrides[key] = value.strip()
    scenario = apply_overrides(scenario, overrides)
    if args.seed is not None:
        scenario = replace(scenario, seed=args.seed)
    if args.trials is not None:
        scenario = replace(scenario, trials=args.trials)
    elif args.quick:
        scenario = replace(scenario, trials=QUICK_TRIALS)
    if args.quick:
        scenario = replace(
            scenario,
            n_subcarriers=min(scenario.n_subcarriers, QUICK_MAX_N),
            sweep_n=tuple(n for n in scenario.sweep_n if n <= QUICK_MAX_N)
            if scenario.sweep_n else None)
    return scenario


def _print_summary_table(summaries) -> None:
    print(f"{'Algorithm':<12}{'Param':>8}{'N':>7}{'tau [us]':>10}"
          f"{'C [b/s/Hz]':>12}{'Iter':>10}{'Groups':>9}{'zeta':>7}")
    for row in summaries:
        param = "" if row.param is None else f"{row.param:g}"
        groups = "" if row.avg_groups is None else f"{row.avg_groups:.1f}"
        zeta = "" if row.zeta is None else f"{row.zeta:.3f}"
        cap = "" if row.avg_capacity_bps_hz is None else f"{row.avg_capacity_bps_hz:.3f}"
        iters = "" if row.avg_iterations is None else f"{row.avg_iterations:.2f}"
        print(f"{row.algorithm:<12}{param:>8}{row.n_subcarriers:>7}"
              f"{row.tau_max_us:>10.3g}{cap:>12}{iters:>10}{groups:>9}{zeta:>7}")


def _cmd_run(args, parser) -> int:
    scenario = _build_scenario(args, parser)
    scenario.validate()
    summaries = run_scenario(scenario, threads=args.threads)
    dump_results(summaries, args.out, fmt=args.fmt, scenario=scenario)
    _print_summary_table(summaries)
    return 0


def _cmd_sweep_n(args, parser) -> int:
    scenario = _build_scenario(args, parser)
    if not scenario.sweep_n:
        sweep = tuple(n for n in DEFAULT_SWEEP_N
                      if not args.quick or n <= QUICK_MAX_N)
        scenario = replace(scenario, sweep_n=sweep)
    scenario.validate()
    summaries = run_scenario(scenario, threads=args.threads)
    dump_results(summaries, args.out, fmt=args.fmt, scenario=scenario)
    top_n = max(scenario.sweep_n)
    _print_summary_table([s for s in summaries if s.n_subcarriers == top_n])
    return 0


def _cmd_tradeoff_grid(args, parser) -> int:
    scenario = _build_scenario(args, parser)
    if not scenario.sweep_tau_max_s:
        scenario = replace(scenario, sweep_tau_max_s=DEFAULT_SWEEP_TAU_S)
    scenario.validate()
    summaries, argmax = run_tradeoff_grid(scenario, threads=args.threads)
    dump_results(summaries, args.out, fmt=args.fmt, scenario=scenario)
    _print_summary_table(summaries)
    for tau, gt in argmax.items():
        print(f"best G_T at tau_max={tau * 1e6:g} us: {gt:g} dB")
    return 0


def _cmd_groups(args, parser) -> int:
    scenario = _build_scenario(args, parser)
    scenario.validate()
    summaries = harness.run_group_stats(scenario, threads=args.threads)
    dump_results(summaries, args.out, fmt=args.fmt, scenario=scenario)
    _print_summary_table(summaries)
    return 0


def _read_gain_file(path):
    gamma = pmax = None
    gains = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for token in line.lstrip("#").split():
                    if token.startswith("gamma="):
                        gamma = float(token[len("gamma="):])
                    elif token.startswith("pmax="):
                        pmax = float(token[len("pmax="):])
                continue
            gains.append(float(line))
    if gamma is None or pmax is None:
        raise ConfigError("gain file must carry a '# gamma=<val> pmax=<val>' header")
    if not gains:
        raise ConfigError("gain file holds no gains")
    return GainVector(np.array(gains), gamma, pmax)


def _cmd_alloc_once(args) -> int:
    gv = _read_gain_file(args.gain_file)
    initial = wf_initial_bits(gv) if args.wf_start else None
    res = hh_allocate(gv, initial_bits=initial, kappa=args.kappa,
                      max_bits=args.max_bits)
    print(f"bits={res.bits.tolist()}")
    print(f"powers={[float(f'{p:.6g}') for p in res.powers.tolist()]}")
    print(f"total_bits={res.total_bits} spent={res.powers.sum():.6g} "
          f"iterations={res.iterations}")
    return 0


def _cmd_predict_complexity(args) -> int:
    for n in args.n_values:
        pred = ledger_predicted(n)
        runtime = predicted_runtime(n) if n >= 1 else 0.0
        totals = pred.totals()
        print(f"N={n} T={runtime:g} "
              f"group1: mult={pred.group1.multiplications} exp={pred.group1.exponentiations} "
              f"per-iter: add={pred.per_iteration.additions} "
              f"mult={pred.per_iteration.multiplications} "
              f"exp={pred.per_iteration.exponentiations} "
              f"totals({pred.iterations} iter): add={totals.additions} "
              f"mult={totals.multiplications} exp={totals.exponentiations}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args, parser)
        if args.command == "sweep-n":
            return _cmd_sweep_n(args, parser)
        if args.command == "tradeoff-grid":
            return _cmd_tradeoff_grid(args, parser)
        if args.command == "groups":
            return _cmd_groups(args, parser)
        if args.command == "alloc-once":
            return _cmd_alloc_once(args)
        if args.command == "predict-complexity":
            return _cmd_predict_complexity(args)
        parser.error(f"unknown command {args.command}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 3
    except InvalidParameterError as exc:
        print(f"invalid parameter: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
