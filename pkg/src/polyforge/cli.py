"""Command-line interface.

Exit codes: 0 success, 1 verification disagreement, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from typing import Sequence

from . import ce, coding, forge, sphere
from .evaluate import Budget, sup_inf_eval, verify_trichotomy
from .expr.emit import emit, from_json
from .universal import oracle_universal


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=str)


def _fractions(text: str) -> list[Fraction]:
    try:
        return [Fraction(t.strip()) for t in text.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad rational list {text!r}") from exc


# forge -------------------------------------------------------------------------------------
def cmd_forge_emit(args) -> tuple[int, str]:
    qe, report = forge.preset(args.preset, args.universal, args.mode, args.zero_based)
    if args.format == "json":
        obj = json.loads(emit(qe, "json"))
        obj["meta"]["report"] = report
        return 0, _dump(obj)
    return 0, emit(qe, args.format)


def cmd_forge_arity(args) -> tuple[int, str]:
    table = forge.arity_table(args.a, args.m, args.nu, args.delta, args.mode)
    table["delta"] = str(table["delta"])
    table["degree"] = str(table["degree"])
    return 0, _dump(table)


# verify ---------------------------------------------------------------------------------------
def _random_samples(a: int, count: int, seed: int) -> list[list[Fraction]]:
    rng = random.Random(seed)
    return [[Fraction(rng.randint(-12, 12), rng.randint(1, 6)) for _ in range(a)] for _ in range(count)]


def cmd_verify_trichotomy(args) -> tuple[int, str]:
    U = ce.preset(args.set, args.a)
    if args.universal != "oracle":
        raise UsageError("trichotomy verification needs the oracle universal (--universal oracle)")
    g = forge.engineer(U, oracle_universal(ce.build_W1(U, args.a)))
    if args.samples:
        with open(args.samples) as fh:
            raw = json.load(fh)
        samples = [[Fraction(str(v)) for v in (s if isinstance(s, list) else [s])] for s in raw]
    else:
        samples = _random_samples(args.a, args.count, args.seed)
    for s in samples:
        if len(s) != args.a:
            raise UsageError(f"sample {s} does not have dimension {args.a}")
    b = Budget(nat_bound=args.nat_bound, stages=args.stages, ce_budget=args.ce_budget,
               threshold=Fraction(args.threshold[-1]))
    report = verify_trichotomy(g, U, samples, args.n_max, b, [Fraction(t) for t in args.threshold])
    if not args.rows:
        report.pop("rows")
    return (1 if report["disagreements"] else 0), _dump(report)


# sphere ---------------------------------------------------------------------------------------
def cmd_sphere_freeness(args) -> tuple[int, str]:
    cert = sphere.freeness_check(args.max_len)
    return (0 if cert["agree"] and not cert["collisions"] else 1), _dump(cert)


def cmd_sphere_decompose(args) -> tuple[int, str]:
    cert = sphere.decomposition_check(args.max_len)
    return (0 if cert["ok"] else 1), _dump(cert)


def cmd_sphere_separation(args) -> tuple[int, str]:
    try:
        cert = sphere.separation_check(args.count, args.precision, args.cap)
    except sphere.RefinementExhausted as exc:
        return 1, _dump({"disjoint": False, "error": str(exc)})
    return 0, _dump(cert)


def cmd_sphere_alpha(args) -> tuple[int, str]:
    cert = sphere.alpha_checks(args.precision)
    ok = cert["orthogonal"] and cert["det_contains_one"] and cert["width_ok"] and cert["axis_fixed"]
    return (0 if ok else 1), _dump(cert)


def cmd_sphere_classify(args) -> tuple[int, str]:
    point = _fractions(args.point)
    if len(point) != 3:
        raise UsageError("--point needs three coordinates")
    res = sphere.piece16_classify(point, args.budget, sphere.MockTransversal(args.oracle_budget))
    return 0, _dump(res.to_json())


# coding ---------------------------------------------------------------------------------------
def cmd_coding_pair(args) -> tuple[int, str]:
    return 0, _dump({"value": coding.pairN(args.values)})


def cmd_coding_unpair(args) -> tuple[int, str]:
    return 0, _dump({"values": list(coding.unpairN(args.value, args.n))})


def cmd_coding_decode(args) -> tuple[int, str]:
    region = coding.decode_nbhd(coding.SpaceCode.parse(args.space), args.index)
    return 0, _dump(region.to_json())


def cmd_coding_encode(args) -> tuple[int, str]:
    lo, hi = _fractions(args.interval)
    return 0, _dump({"index": coding.encode_interval(lo, hi)})


# eval -----------------------------------------------------------------------------------------
def cmd_eval(args) -> tuple[int, str]:
    text = sys.stdin.read() if args.input == "-" else open(args.input).read()
    q = from_json(text)
    free = {}
    for item in args.free:
        name, _, value = item.partition("=")
        if not value:
            raise UsageError(f"--free expects name=value, got {item!r}")
        free[name] = Fraction(value)
    b = Budget(nat_bound=args.nat_bound, stages=args.stages, threshold=Fraction(args.threshold))
    verdict = sup_inf_eval(q, free, b)
    return 0, _dump({"verdict": verdict.to_json(), "history": [str(v) for v in verdict.history]})


# parser ---------------------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polyforge", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    fg = sub.add_parser("forge", help="construct and emit polynomial indicators")
    fsub = fg.add_subparsers(dest="action", required=True)
    e = fsub.add_parser("emit")
    e.add_argument("--preset", required=True, choices=sorted(forge.PRESETS))
    e.add_argument("--format", default="text", choices=["text", "latex", "json"])
    e.add_argument("--mode", default=forge.MIN_DEGREE, choices=[forge.MIN_DEGREE, forge.MIN_VARS])
    e.add_argument("--universal", default="jones58", choices=["jones58", "jones28", "jones9"])
    e.add_argument("--zero-based", action="store_true")
    e.set_defaults(func=cmd_forge_emit)
    ar = fsub.add_parser("arity")
    ar.add_argument("--a", type=int, required=True)
    ar.add_argument("--m", type=int, default=0)
    ar.add_argument("--nu", type=int, default=58)
    ar.add_argument("--delta", type=int, default=4)
    ar.add_argument("--mode", default=forge.MIN_DEGREE, choices=[forge.MIN_DEGREE, forge.MIN_VARS])
    ar.set_defaults(func=cmd_forge_arity)

    vf = sub.add_parser("verify", help="oracle-equivalence checks")
    vsub = vf.add_subparsers(dest="action", required=True)
    t = vsub.add_parser("trichotomy")
    t.add_argument("--set", required=True, help="empty | full | box:<lo>,<hi> | punct:<c> | shrink:<c>")
    t.add_argument("--a", type=int, default=1)
    t.add_argument("--universal", default="oracle")
    t.add_argument("--nat-bound", type=int, default=64)
    t.add_argument("--threshold", type=int, action="append", default=None)
    t.add_argument("--stages", type=int, default=16)
    t.add_argument("--ce-budget", type=int, default=1000)
    t.add_argument("--n-max", type=int, default=8)
    t.add_argument("--samples", help="JSON list of samples (numbers or lists of rationals as strings)")
    t.add_argument("--count", type=int, default=25, help="random samples when --samples is absent")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--rows", action="store_true", help="include per-sample rows")
    t.set_defaults(func=cmd_verify_trichotomy)

    sp = sub.add_parser("sphere", help="free group and rotation certificates")
    ssub = sp.add_subparsers(dest="action", required=True)
    s = ssub.add_parser("freeness")
    s.add_argument("--max-len", type=int, default=8)
    s.set_defaults(func=cmd_sphere_freeness)
    s = ssub.add_parser("decompose")
    s.add_argument("--max-len", type=int, default=8)
    s.set_defaults(func=cmd_sphere_decompose)
    s = ssub.add_parser("separation")
    s.add_argument("--count", type=int, default=50)
    s.add_argument("--precision", type=int, default=128)
    s.add_argument("--cap", type=int, default=512)
    s.set_defaults(func=cmd_sphere_separation)
    s = ssub.add_parser("alpha")
    s.add_argument("--precision", type=int, default=128)
    s.set_defaults(func=cmd_sphere_alpha)
    s = ssub.add_parser("classify")
    s.add_argument("--point", required=True, help="x,y,z as rationals")
    s.add_argument("--budget", type=int, default=1000)
    s.add_argument("--oracle-budget", type=int, default=256)
    s.set_defaults(func=cmd_sphere_classify)

    cd = sub.add_parser("coding", help="pairing functions and neighbourhood codes")
    csub = cd.add_subparsers(dest="action", required=True)
    c = csub.add_parser("pair")
    c.add_argument("values", type=int, nargs="+")
    c.set_defaults(func=cmd_coding_pair)
    c = csub.add_parser("unpair")
    c.add_argument("value", type=int)
    c.add_argument("--n", type=int, default=2)
    c.set_defaults(func=cmd_coding_unpair)
    c = csub.add_parser("decode")
    c.add_argument("--space", required=True, help="e.g. RealxNat")
    c.add_argument("--index", type=int, required=True)
    c.set_defaults(func=cmd_coding_decode)
    c = csub.add_parser("encode")
    c.add_argument("--interval", required=True, help="lo,hi")
    c.set_defaults(func=cmd_coding_encode)

    ev = sub.add_parser("eval", help="budgeted evaluation of a quantified expression (JSON)")
    ev.add_argument("--input", required=True, help="JSON file, or - for stdin")
    ev.add_argument("--free", action="append", default=[], help="name=value")
    ev.add_argument("--nat-bound", type=int, default=64)
    ev.add_argument("--stages", type=int, default=3)
    ev.add_argument("--threshold", type=int, default=10**6)
    ev.set_defaults(func=cmd_eval)
    return p


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        parser.print_usage(err)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    if getattr(args, "threshold", 0) is None:
        args.threshold = [10**3, 10**6]
    try:
        code, text = args.func(args)
    except (UsageError, ValueError, KeyError, OSError) as exc:
        print(f"polyforge: error: {exc}", file=err)
        return 2
    print(text, file=out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
