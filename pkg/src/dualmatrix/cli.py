"""Command line entry point: ``dma solve | gen | verify``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import numerics as nx
from .certify import (APPROXIMATE, BudgetExhausted, Feasible, Infeasible,
                      InfeasibilityCertificate, NotAWitness, verify_certificate,
                      verify_witness, witness_from_json, witness_to_json)
from .core import InvariantBreach
from .driver import SolveConfig, solve
from .generate import KINDS, gen
from .oracle import BallOracle
from .problem import FormatError, bit_params, load, preprocess, serialize
from .reference import BudgetExceeded, fm_feasible

EXIT_FEASIBLE, EXIT_INFEASIBLE, EXIT_BUDGET, EXIT_INPUT, EXIT_BREACH = 0, 1, 2, 3, 4


def _fractions(text: str):
    try:
        return [nx.parse_q(t) for t in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad rational list: {text!r}") from None


def _fraction(text: str):
    try:
        return nx.parse_q(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad rational: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dma", description="Exact strict-feasibility solver for A x > 0")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve a system or a ball family")
    s.add_argument("--input", type=Path)
    s.add_argument("--oracle", choices=("dense", "ball"), default="dense")
    s.add_argument("--center", type=_fractions, help="ball center, comma separated")
    s.add_argument("--radius", type=_fraction)
    s.add_argument("--mode", choices=("exact", "rounded"), default="rounded")
    s.add_argument("--sig-factor", type=int, default=2)
    s.add_argument("--max-steps-factor", type=int, default=20)
    s.add_argument("--long-edge-factor", type=float, default=4)
    s.add_argument("--s-override", type=int)
    s.add_argument("--center-witness", action="store_true",
                   help="return the simplex center instead of the vertex sum")
    s.add_argument("--trace", type=Path)
    s.add_argument("--json", action="store_true")

    g = sub.add_parser("gen", help="generate a seeded instance")
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--bits", type=int, default=3)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output", type=Path)

    v = sub.add_parser("verify", help="check a witness or certificate")
    v.add_argument("--system", type=Path, required=True)
    grp = v.add_mutually_exclusive_group()
    grp.add_argument("--witness", type=Path)
    grp.add_argument("--cert", type=Path)
    v.add_argument("--reference", action="store_true", help="also run Fourier-Motzkin")
    return p


def _cmd_solve(args) -> int:
    config = SolveConfig(mode=args.mode, sig_bits_factor=args.sig_factor,
                         max_steps_factor=args.max_steps_factor,
                         long_edge_factor=args.long_edge_factor,
                         s_override=args.s_override, center=args.center_witness)
    if args.oracle == "ball":
        if args.center is None or args.radius is None:
            raise FormatError("--oracle ball needs --center and --radius")
        target = BallOracle(args.center, args.radius)
    else:
        if args.input is None:
            raise FormatError("--input is required for the dense oracle")
        target = load(args.input.read_text())
    result = solve(target, config)
    if args.trace:
        args.trace.write_text(result.trace_csv())
    out = result.outcome
    if args.json:
        print(json.dumps(out.to_json()))
    elif isinstance(out, Feasible):
        print(f"feasible after {out.steps} steps")
        print(json.dumps(witness_to_json(out.x)))
    elif isinstance(out, Infeasible):
        print(f"infeasible ({out.certificate.kind} certificate) after {out.steps} steps")
        print(json.dumps(out.certificate.to_json()))
    else:
        print(f"budget exhausted after {out.steps} steps "
              f"(valuation log2 {out.last_valuation_log2:.6f}); inconclusive")
    if isinstance(out, Feasible):
        return EXIT_FEASIBLE
    if isinstance(out, Infeasible):
        return EXIT_INFEASIBLE
    return EXIT_BUDGET


def _cmd_gen(args) -> int:
    system = gen(args.kind, args.n, args.m, args.bits, args.seed)
    text = serialize(system)
    if args.output:
        args.output.write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_verify(args) -> int:
    system = load(args.system.read_text())
    ok = True
    if args.witness:
        x = witness_from_json(json.loads(args.witness.read_text()))
        try:
            res = verify_witness(system, x)
            print(f"witness ok, margin {res.margin}")
        except NotAWitness as exc:
            print(f"witness FAILED: {exc}")
            ok = False
    if args.cert:
        cert = InfeasibilityCertificate.from_json(json.loads(args.cert.read_text()))
        if cert.kind == APPROXIMATE:
            prepared = preprocess(system)
            target = prepared.system if prepared.system is not None else system
            good = verify_certificate(target, cert, bit_params(target))
        else:
            good = verify_certificate(system, cert)
        print(f"certificate ({cert.kind}) {'ok' if good else 'FAILED'}")
        ok = ok and good
    if args.reference:
        verdict = fm_feasible(system)
        print(f"reference: {'feasible' if verdict.feasible else 'infeasible'}")
        if args.witness and not verdict.feasible:
            ok = False
        if args.cert and verdict.feasible:
            ok = False
    return 0 if ok else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"solve": _cmd_solve, "gen": _cmd_gen, "verify": _cmd_verify}[args.command]
    try:
        return handler(args)
    except (FormatError, ValueError, OSError, KeyError, BudgetExceeded) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InvariantBreach, AssertionError) as exc:
        print(f"internal invariant breach: {exc}", file=sys.stderr)
        return EXIT_BREACH


if __name__ == "__main__":
    sys.exit(main())
