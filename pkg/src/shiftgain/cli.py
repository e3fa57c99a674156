"""Command-line interface: ``shiftgain {synth,check,simulate,bench,gen}``.

Exit codes: 0 success, 1 usage or I/O error, 2 not controllable,
3 verification failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import replace

import numpy as np

from . import bench as bench_mod
from .controllability import rank_equivalence_check
from .errors import IllConditionedC, InvalidParams, NotControllable, ShiftGainError
from .generate import KINDS, generate_system
from .simulation import (
    decay_certificate,
    default_dt,
    lyapunov_monotonicity_check,
    simulate,
)
from .synthesis import feedback_gain, select_gammas, verify_margin
from .sysfile import load_system, save_system

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_CONTROLLABLE = 2
EXIT_VERIFY = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=1)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _synthesize(args):
    system = load_system(args.system)
    grid = select_gammas(system, args.gamma1, args.spacing)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditionedC)
        result = feedback_gain(system, grid, force=getattr(args, "force", False))
    return system, grid, result


def cmd_synth(args) -> int:
    _, grid, result = _synthesize(args)
    ok = verify_margin(result, grid.gamma1)
    doc = result.to_dict()
    doc["verified"] = ok
    _emit(doc, args.out)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_check(args) -> int:
    system = load_system(args.system)
    grid = select_gammas(system, args.gamma1, args.spacing)
    report = rank_equivalence_check(system, grid)
    doc = report.to_dict()
    doc["gammas"] = grid.gammas.tolist()
    _emit(doc, args.out)
    return EXIT_OK


def _parse_x0(text: str, n: int) -> np.ndarray:
    if text == "ones":
        return np.ones(n, dtype=complex)
    try:
        values = [complex(tok.strip().replace(" ", "")) for tok in text.split(",")]
    except ValueError as exc:
        raise InvalidParams(f"cannot parse --x0 {text!r}") from exc
    if len(values) != n:
        raise InvalidParams(f"--x0 has {len(values)} entries, system has N={n}")
    return np.array(values)


def cmd_simulate(args) -> int:
    system = load_system(args.system)
    x0 = _parse_x0(args.x0, system.n)
    if args.T <= 0 or (args.dt is not None and not 0 < args.dt <= args.T):
        raise InvalidParams("need T > 0 and 0 < dt <= T")
    _, grid, result = _synthesize(args)
    dt = args.dt if args.dt is not None else default_dt(grid.gammas)
    dt = min(dt, args.T)
    trace = simulate(result.closed_loop, x0, args.T, dt, C_factor=result.C_factor)
    trace.write_csv(args.out)
    decays, constant = decay_certificate(trace, grid.gamma1)
    monotone = lyapunov_monotonicity_check(trace, grid.gamma1)
    print(json.dumps({
        "decay_certificate": decays,
        "best_constant": constant,
        "lyapunov_monotone": monotone,
        "final_norm": float(trace.norms[-1]),
        "samples": len(trace),
    }, indent=1))
    return EXIT_OK if decays and monotone else EXIT_VERIFY


def cmd_bench(args) -> int:
    records = bench_mod.run_bench(args.nmin, args.nmax, args.m, args.trials, args.seed, args.gamma1)
    bench_mod.write_bench_csv(records, args.out)
    print(f"wrote {len(records)} records to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_gen(args) -> int:
    system = generate_system(args.kind, args.n, args.m, args.seed)
    system = replace(system, name=args.name or f"{args.kind}-n{args.n}-m{args.m}-s{args.seed}")
    save_system(system, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="shiftgain", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def shifts(p):
        p.add_argument("--gamma1", type=float, default=1.0)
        p.add_argument("--spacing", type=float, default=None,
                       help="default: max(1, ||A||_F / N)")

    p = sub.add_parser("synth", help="compute and verify the explicit gain")
    p.add_argument("--system", required=True)
    shifts(p)
    p.add_argument("--out")
    p.add_argument("--force", action="store_true", help="skip the Kalman gate")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("check", help="Kalman and resolvent ranks")
    p.add_argument("--system", required=True)
    shifts(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("simulate", help="simulate the closed loop to CSV")
    p.add_argument("--system", required=True)
    shifts(p)
    p.add_argument("--x0", default="ones", help='comma list of complex numbers or "ones"')
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="explicit vs Gramian timing CSV")
    p.add_argument("--nmin", type=int, required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gamma1", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="write a generated system file")
    p.add_argument("--kind", choices=KINDS, default="random")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except NotControllable as exc:
        print(f"not controllable: {exc}", file=sys.stderr)
        return EXIT_NOT_CONTROLLABLE
    except bench_mod.BenchFailure as exc:
        print(f"benchmark verification failed: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, ShiftGainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
