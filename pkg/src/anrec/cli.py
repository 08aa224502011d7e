"""Batch command line: constants, potentials, and verification suites.

All numeric output is exact (rational strings or cyclotomic coefficient
vectors); floating approximations appear only under --approx.  Randomised
suites draw from CPython's seeded Mersenne Twister and echo seed and
configuration into the report, so reruns are byte-identical.

Exit codes: 0 all checks pass, 1 verification failure or internal
consistency error, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys

from .combinatorics import (
    c_bracket,
    c_const,
    sym_c,
    verify_cbracket_generating,
    verify_remove_n,
    verify_symc_generating,
)
from .exactnum import NotRationalError, rat_str
from .genus0 import Profile, WellFoundednessError, euler_check, solve, wdvv_check
from .recursion import ConsistencyError, solve_recursion, wconstraint_report
from .reporting import SuiteReport
from .rootsys import RootData, cbracket_state, elem_sym_state, vandermonde_coeff

PRNG_NAME = "mersenne-twister (CPython random module)"


def _canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _emit(payload: dict, args) -> None:
    payload = dict(payload)
    payload["content_hash"] = hashlib.sha256(
        _canonical_json(payload).encode()).hexdigest()
    text = (json.dumps(payload, indent=2, sort_keys=True)
            if args.format == "json" else _as_text(payload))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _as_text(payload: dict) -> str:
    lines = []
    for k, v in payload.items():
        if k in ("results",):
            for r in v:
                mark = "ok" if r.get("pass") else "FAIL"
                lines.append(f"  [{mark}] {r.get('claim', '')}")
        else:
            lines.append(f"{k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}")
    return "\n".join(lines)


def _scalar_text(s) -> str:
    try:
        return rat_str(s.to_rational())
    except NotRationalError:
        return str(s)


def cmd_constants(args) -> int:
    if args.h is None:
        print("constants requires --h", file=sys.stderr)
        return 2
    try:
        rd = RootData(args.h - 1)
        tup = _parse_tuple(args.tuple)
        for a in tup:
            if not 1 <= a <= rd.h - 1:
                raise ValueError(f"entry {a} out of range 1..{rd.h - 1}")
    except ValueError as exc:
        print(f"bad tuple: {exc}", file=sys.stderr)
        return 2
    c = c_const(rd, tup)
    payload = {"h": rd.h, "tuple": list(tup), "c": c.to_json()}
    if args.format == "text":
        label = ",".join(str(a) for a in tup)
        print(f"C({label}) = {_scalar_text(c)}")
        if tup:
            s = sym_c(rd, tup)
            print(f"SymC({label}) = {_scalar_text(s)}")
            if all(a <= rd.N for a in tup):
                b = c_bracket(rd, tuple(sorted(tup)))
                print(f"C[{label}] = {_scalar_text(b)}")
        if args.approx:
            print(f"approx C = {c.approx(10):.10g}")
        return 0
    if tup:
        payload["symc"] = sym_c(rd, tup).to_json()
        if all(a <= rd.N for a in tup):
            payload["cbracket"] = c_bracket(rd, tuple(sorted(tup))).to_json()
    _emit(payload, args)
    return 0


def cmd_potential(args) -> int:
    if args.n is None:
        print("potential requires --n", file=sys.stderr)
        return 2
    try:
        rd = RootData(args.n)
    except ValueError as exc:
        print(f"bad rank: {exc}", file=sys.stderr)
        return 2
    try:
        if args.genus == 0:
            profile = Profile(N=args.n, m_in=args.m_in, D=args.degree)
            pot = solve(rd, profile, m_out=args.m_in)
            payload = pot.to_json()
        else:
            table = solve_recursion(rd, args.genus, args.degree,
                                            m_in=args.m_in)
            payload = table.to_json()
    except (ConsistencyError, WellFoundednessError, NotRationalError) as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return 1
    _emit(payload, args)
    return 0


def _parse_tuple(text: str) -> tuple[int, ...]:
    text = (text or "").strip()
    if not text:
        return ()
    return tuple(int(part) for part in text.split(","))


def _random_remove_n_cases(rd: RootData, trials: int, rng: random.Random):
    for _ in range(trials):
        blen = rng.randint(1, min(3, max(1, rd.N - 1)))
        b = tuple(sorted(rng.randint(1, rd.N - 1) for _ in range(blen)))
        bound = sum(b) % rd.h
        # cover the interior, the boundary m = bound, and the vanishing regime
        m = rng.choice([rng.randint(0, max(bound, 1)), bound, bound + rng.randint(1, 2)])
        yield b, m


def cmd_verify(args) -> int:
    suite = args.suite
    rng = random.Random(args.seed)
    config = {"suite": suite, "seed": args.seed, "trials": args.trials,
              "prng": PRNG_NAME}
    results = []
    try:
        if suite == "remove-n":
            if args.h is None:
                raise _Usage("remove-n requires --h")
            rd = RootData(args.h - 1)
            if rd.N < 2:
                raise _Usage("remove-n requires h >= 3")
            config["h"] = rd.h
            for b, m in _random_remove_n_cases(rd, args.trials, rng):
                results.append(verify_remove_n(rd, b, m))
        elif suite == "symstate":
            if args.h is None:
                raise _Usage("symstate requires --h")
            rd = RootData(args.h - 1)
            config["h"] = rd.h
            from .reporting import CheckReport
            e1 = elem_sym_state(rd, 1)
            results.append(CheckReport(claim=f"e1 state vanishes h={rd.h}",
                                       passed=e1.is_zero()))
            for r in range(2, rd.h + 1):
                same = cbracket_state(rd, r) == elem_sym_state(rd, r)
                results.append(CheckReport(
                    claim=f"bracket state equals elementary state h={rd.h} r={r}",
                    passed=same))
        elif suite == "vandermonde":
            if args.h is None:
                raise _Usage("vandermonde requires --h")
            rd = RootData(args.h - 1)
            config["h"] = rd.h
            from .reporting import CheckReport
            for _ in range(args.trials):
                r = rng.randint(1, rd.h)
                idx = tuple(sorted(rng.sample(range(1, rd.h + 1), r)))
                val = vandermonde_coeff(rd, idx)
                results.append(CheckReport(
                    claim=f"vandermonde h={rd.h} idx={list(idx)}",
                    passed=val == rd.ctx.one, lhs=val.to_json()))
        elif suite == "symc-gen":
            if args.h is None:
                raise _Usage("symc-gen requires --h")
            rd = RootData(args.h - 1)
            config["h"] = rd.h
            for tup in _all_small_tuples(rd, 3):
                results.append(verify_symc_generating(rd, tup))
        elif suite == "cbracket-gen":
            if args.h is None:
                raise _Usage("cbracket-gen requires --h")
            rd = RootData(args.h - 1)
            config["h"] = rd.h
            for tup in _all_small_tuples(rd, 3):
                results.append(verify_cbracket_generating(rd, tup))
        elif suite == "wdvv":
            if args.n is None:
                raise _Usage("wdvv requires --n")
            rd = RootData(args.n)
            config.update({"n": args.n, "degree": args.degree})
            pot = solve(rd, Profile(N=args.n, m_in=0, D=args.degree))
            results.append(wdvv_check(args.n, pot.F, args.degree))
        elif suite == "euler":
            if args.n is None:
                raise _Usage("euler requires --n")
            rd = RootData(args.n)
            config.update({"n": args.n, "degree": args.degree})
            pot = solve(rd, Profile(N=args.n, m_in=0, D=args.degree))
            results.append(euler_check(args.n, pot.F))
        elif suite == "wconstraint":
            if args.n is None:
                raise _Usage("wconstraint requires --n")
            config.update({"n": args.n, "degree": args.degree,
                           "genus": args.genus, "cap": args.cap})
            rd = RootData(args.n)
            table = solve_recursion(rd, args.genus, args.degree,
                                            m_in=args.m_in)
            from .reporting import CheckReport
            for a in range(1, args.n + 1):
                for m in range(args.m_max + 1):
                    rep = wconstraint_report(table, a, m, args.cap)
                    results.append(CheckReport(
                        claim=f"constraint residual a={a} m={m}",
                        passed=rep["pass"], witness=rep["residual_terms"] or None))
        else:
            raise _Usage(f"unknown suite: {suite}")
    except _Usage as exc:
        print(str(exc), file=sys.stderr)
        return 2
    report = SuiteReport(suite=suite, config=config, results=results)
    _emit(report.to_json(), args)
    return 0 if report.passed else 1


def _all_small_tuples(rd: RootData, max_len: int):
    from itertools import product as iproduct
    if rd.N < 2:
        return
    for r in range(1, max_len + 1):
        for tup in iproduct(range(1, rd.N), repeat=r):
            yield tup


class _Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="anrec",
                                 description="exact residue recursion toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("json", "text"), default="text")
        p.add_argument("--out", default=None)
        p.add_argument("--approx", action="store_true")

    p = sub.add_parser("constants", help="tuple constants C, SymC, C[.]")
    p.add_argument("--h", type=int, default=None)
    p.add_argument("--tuple", default="")
    common(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("potential", help="solve the recursion and print the table")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--genus", type=int, default=0)
    p.add_argument("--degree", type=int, default=5)
    p.add_argument("--m-in", dest="m_in", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_potential)

    p = sub.add_parser("verify", help="run a named verification suite")
    p.add_argument("suite")
    p.add_argument("--h", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--degree", type=int, default=5)
    p.add_argument("--genus", type=int, default=1)
    p.add_argument("--cap", type=int, default=3)
    p.add_argument("--m-max", dest="m_max", type=int, default=1)
    p.add_argument("--m-in", dest="m_in", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
