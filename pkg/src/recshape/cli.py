"""Command-line front end.

    recshape analyze REC.json [--empirical-only] [--dump-spectral]
    recshape synthesize TARGETS.json
    recshape sample REC.json --n N
    recshape roundtrip [TARGETS.json] [--seed S]

Inputs are file paths, ``-`` for stdin, or inline JSON.  Exit status is 0 on
success, 1 on a domain error (or a failed round trip) and 2 on bad usage or
malformed input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .closure import ClosureConfig, TrigRangeConfig, closure_of
from .errors import RecshapeError
from .recurrence import LinearRecurrence, evaluate
from .spectral import SpectralConfig
from .synthesis import build, plan, random_targets, roundtrip

__all__ = ["main", "run"]


class UsageError(Exception):
    pass


def _read_json(source: str):
    text = source
    if source == "-":
        text = sys.stdin.read()
    elif not source.lstrip().startswith(("{", "[")):
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {source}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {source}: {exc}") from None


def _load_recurrence(source: str) -> LinearRecurrence:
    try:
        return LinearRecurrence.from_dict(_read_json(source))
    except ValueError as exc:
        raise UsageError(f"bad recurrence: {exc}") from None


def _load_targets(source: str) -> list[list[float]]:
    data = _read_json(source)
    if not isinstance(data, list) or not data:
        raise UsageError("targets must be a non-empty list of [mu, nu] pairs")
    out = []
    for i, iv in enumerate(data):
        ok = (
            isinstance(iv, list)
            and len(iv) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in iv)
        )
        if not ok or not all(math.isfinite(v) for v in iv):
            raise UsageError(f"targets[{i}] must be a pair of finite numbers")
        if iv[0] > iv[1]:
            raise UsageError(f"targets[{i}] has mu > nu")
        out.append([float(iv[0]), float(iv[1])])
    return out


def _positive(kind):
    def parse(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid value {text!r}") from None
        if v <= 0:
            raise argparse.ArgumentTypeError(f"{text} must be positive")
        return v

    return parse


def _non_negative_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"{text} must be >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recshape",
        description="Value-set closures of linear recurrences and their converse synthesis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_default):
        p.add_argument("--n", type=_positive(int), default=n_default, help="sample count")
        p.add_argument("--burn-in", type=_non_negative_int, default=None)
        p.add_argument("--gap-eps", type=_positive(float), default=0.01)
        p.add_argument("-o", "--output", help="write to this file instead of stdout")

    p = sub.add_parser("analyze", help="closure of a recurrence's value set")
    p.add_argument("input")
    common(p, 1_000_000)
    p.add_argument("--tol", type=_positive(float), default=1e-6, help="trig range tolerance")
    p.add_argument("--empirical-only", action="store_true")
    p.add_argument("--dump-spectral", action="store_true")

    p = sub.add_parser("synthesize", help="recurrence for a union of intervals")
    p.add_argument("input")
    common(p, 1_000_000)
    p.add_argument("--no-reduce", action="store_true")

    p = sub.add_parser("sample", help="print terms of a recurrence")
    p.add_argument("input")
    common(p, 10)

    p = sub.add_parser("roundtrip", help="synthesize then recover by sampling")
    p.add_argument("input", nargs="?")
    common(p, 1_000_000)
    p.add_argument("--seed", type=int, default=None, help="random target collection")
    p.add_argument("--tolerance", type=_positive(float), default=0.05)
    return parser


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _spectral_block(report) -> dict:
    dec = report.decomposition
    out = {"growth": dec.growth.value}
    if dec.roots is not None:
        out["roots"] = dec.roots.to_json()
    if dec.spectral is not None:
        out["dominant_modulus"] = dec.spectral.dominant_modulus
        out["d"] = dec.spectral.d
        out["g"] = dec.g
    out["independence_verified"] = dec.independence_verified
    out["sections"] = [
        {
            "k": s.k,
            "offset": s.offsets[0],
            "amplitudes": list(s.trig.amplitudes),
            "freqs": [list(c) for c in s.trig.freqs],
            "phases": list(s.trig.phases),
            "taus": list(s.trig.taus),
        }
        for s in dec.sections
    ]
    return out


def _analyze(args) -> tuple[str, int]:
    rec = _load_recurrence(args.input)
    burn_in = 64 if args.burn_in is None else args.burn_in
    if args.n <= burn_in:
        raise UsageError("--n must exceed --burn-in")
    cfg = ClosureConfig(
        spectral=SpectralConfig(),
        trig=TrigRangeConfig(tol=args.tol),
        burn_in=burn_in,
        n_samples=args.n,
        gap_eps=args.gap_eps,
        empirical_only=args.empirical_only,
    )
    report = closure_of(rec, cfg)
    out = report.to_dict()
    if args.dump_spectral:
        out["spectral"] = _spectral_block(report)
    return json.dumps(out), 0


def _synthesize(args) -> tuple[str, int]:
    targets = _load_targets(args.input)
    p = plan(targets)
    rec = build(p, reduce_order=not args.no_reduce)
    out = rec.to_dict()
    rt = roundtrip(targets, n_samples=args.n, gap_eps=args.gap_eps, recurrence=rec)
    out["verification"] = rt.summary() | {"plan_cover_exact": p.exact_cover_holds()}
    return json.dumps(out), 0


def _sample(args) -> tuple[str, int]:
    rec = _load_recurrence(args.input)
    start = args.burn_in or 0
    vals = evaluate(rec, start, start + args.n - 1)
    return "\n".join(_fmt(v) for v in vals), 0


def _roundtrip(args) -> tuple[str, int]:
    if args.input is not None:
        targets = _load_targets(args.input)
    elif args.seed is not None:
        targets = random_targets(np.random.default_rng(args.seed))
    else:
        raise UsageError("roundtrip needs a targets file or --seed")
    rt = roundtrip(targets, n_samples=args.n, gap_eps=args.gap_eps, tolerance=args.tolerance)
    out = {"targets": [list(t) for t in rt.plan.targets]} | rt.summary()
    return json.dumps(out), 0 if rt.passed else 1


_COMMANDS = {
    "analyze": _analyze,
    "synthesize": _synthesize,
    "sample": _sample,
    "roundtrip": _roundtrip,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, code = _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"recshape {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (RecshapeError, ArithmeticError, ValueError) as exc:
        print(f"recshape {args.command}: {exc}", file=sys.stderr)
        return 1
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
