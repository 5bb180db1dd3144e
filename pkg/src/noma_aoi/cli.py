"""Command-line entry point: ``noma-aoi <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import experiments, kernel, sim
from .aoi import AbsorptionImpossible, average_aoi
from .levels import design_i_levels, design_ii_levels, feasibility_probs
from .oracle import InstanceTooLarge
from .params import SystemParams, db_to_linear, parse_policy

EXIT_USAGE = 1
EXIT_VALIDATION = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _scenario_args(p):
    p.add_argument("--r", type=float, default=1.0, help="target rate R in bits/s/Hz")
    p.add_argument("--k", type=int, default=2, help="number of SNR levels K")
    p.add_argument("--m", type=int, required=True, help="number of users M")
    p.add_argument("--n", type=int, default=8, help="slots per frame N")
    p.add_argument("--t", type=float, default=6.0, help="slot duration T in seconds")
    p.add_argument("--p-db", type=float, default=0.0, help="transmit power budget P in dB")
    p.add_argument("--ptx", default=None, help="fixed:<p> | noma | oma (default: noma, or oma for OMA)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", type=Path, default=None)


def _params(args, oma=False) -> SystemParams:
    policy = parse_policy(args.ptx or ("oma" if oma else "noma"))
    return SystemParams(args.m, args.k, args.n, args.t, args.r, db_to_linear(args.p_db), policy)


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _table(header, rows, fmt):
    if fmt == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows([[repr(x) if isinstance(x, float) else x for x in r] for r in rows])
    return buf.getvalue()


def cmd_levels(args):
    d1 = design_i_levels(args.r, args.k, args.m) if args.m >= 2 else None
    d2 = design_ii_levels(args.r, args.k)
    header = ["level", "design_i", "design_ii"]
    cols = [d1.levels if d1 else [""] * args.k, d2.levels]
    if args.p_db is not None:
        P = db_to_linear(args.p_db)
        header += ["design_i_infeasible", "design_ii_infeasible"]
        cols += [list(feasibility_probs(d1, P)) if d1 else [""] * args.k, list(feasibility_probs(d2, P))]
    rows = [[k + 1, *(float(c[k]) if c[k] != "" else "" for c in cols)] for k in range(args.k)]
    _emit(_table(header, rows, args.format), args.out)


_KERNELS = {"exact": kernel.NOMA_EXACT, "high-snr": kernel.NOMA_HIGH_SNR, "oma": kernel.OMA}


def _model(args):
    strategy = _KERNELS[args.strategy]
    params = _params(args, oma=strategy == kernel.OMA)
    return kernel.build_matrix(strategy, params, design_ii_levels(args.r, args.k)), params


def cmd_transitions(args):
    model, _ = _model(args)
    M = model.num_states
    header = ["state", *[f"to_{c}" for c in range(M)], "absorb"]
    rows = [[j, *map(float, model.transient[j]), float(model.absorption[j])] for j in range(M)]
    _emit(_table(header, rows, args.format), args.out)


def cmd_aoi(args):
    model, params = _model(args)
    b = average_aoi(model, params.slots_per_frame, params.slot_duration)
    rows = [[k, v] for k, v in vars(b).items()]
    _emit(_table(["quantity", "value"], rows, args.format), args.out)


def cmd_simulate(args):
    oma = args.scheme == "oma"
    params = _params(args, oma=oma)
    if oma:
        levels = None
    elif args.design == 1:
        levels = design_i_levels(args.r, args.k, args.m)
    else:
        levels = design_ii_levels(args.r, args.k)
    est = sim.simulate_frames(params, levels, sim.OMA if oma else sim.NOMA, args.frames, args.seed)
    record = {
        "seed": est.seed,
        "params": {"M": params.num_users, "K": params.num_levels, "N": params.slots_per_frame,
                   "T": params.slot_duration, "R": params.target_rate, "P_dB": args.p_db,
                   "ptx": str(params.tx_policy), "scheme": args.scheme,
                   "design": None if oma else args.design, "frames": args.frames},
        "mean_aoi": est.mean_aoi,
        "stderr_aoi": est.stderr_aoi,
        "deliveries": est.deliveries,
        "empirical_transitions": est.empirical_transitions.tolist(),
    }
    _emit(json.dumps(record, indent=2) + "\n", args.out)


def cmd_sweep(args):
    spec = experiments.parse_spec(args.spec.read_text())
    if args.frames is not None or args.seed is not None:
        from dataclasses import replace

        spec = replace(spec, frames=args.frames or spec.frames,
                       seed=spec.seed if args.seed is None else args.seed)
    rows = experiments.run_sweep(spec, jobs=args.jobs)
    _emit(experiments.rows_to_csv(rows), args.out)


def cmd_validate(args):
    grid = dict(experiments.ORACLE_GRID)
    if args.oracle_m:
        grid["M"] = tuple(args.oracle_m)
    report = experiments.validate(grid, frames=args.frames, seed=args.seed,
                                  perturb=args.perturb, monte_carlo=not args.no_monte_carlo)
    _emit(json.dumps(report.as_dict(), indent=2) + "\n", args.out)
    return 0 if report.passed else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="noma-aoi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("levels", help="Design I and II SNR ladders")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--p-db", type=float, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_levels)

    for name, func, hlp in (("transitions", cmd_transitions, "transient matrix and absorption vector"),
                            ("aoi", cmd_aoi, "closed-form average AoI breakdown")):
        p = sub.add_parser(name, help=hlp)
        _scenario_args(p)
        p.add_argument("--strategy", choices=sorted(_KERNELS), default="exact")
        p.set_defaults(func=func)

    p = sub.add_parser("simulate", help="Monte Carlo AoI estimate (JSON record)")
    _scenario_args(p)
    p.add_argument("--scheme", choices=("noma", "oma"), default="noma")
    p.add_argument("--design", type=int, choices=(1, 2), default=2)
    p.add_argument("--frames", type=int, default=experiments.DEFAULT_FRAMES)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run a sweep spec file, CSV out")
    p.add_argument("spec", type=Path)
    p.add_argument("--frames", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="run the consistency checks, JSON report")
    p.add_argument("--oracle-m", type=int, nargs="+", default=None, help="user counts for the oracle grid")
    p.add_argument("--frames", type=int, default=20_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--perturb", type=float, default=0.0, help=argparse.SUPPRESS)
    p.add_argument("--no-monte-carlo", action="store_true")
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args) or 0
    except (ValueError, InstanceTooLarge, OSError) as exc:
        print(f"noma-aoi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AbsorptionImpossible, sim.NoDeliveryObserved) as exc:
        print(f"noma-aoi: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
