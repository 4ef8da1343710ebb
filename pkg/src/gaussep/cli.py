"""``gaussep`` command-line interface.

Exit codes: 0 ok, 1 verification failure, 2 bad input, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .channels import CanonicalKind, ChannelSpec, Primitive, build, dual_spec, to_amp_then_loss
from .decision import all_measurements_separable, dual_povm_check
from .exceptions import GaussepError
from .measurements import cv_bell
from .swapping import SwapParams, rows_to_csv, simulate_swap, threshold_scan
from .verification import run_all

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_IO = 3

SIG_DIGITS = 12
R_REG_TREND = (2.0, 3.0, 4.0, 5.0, 6.0)


class BadInput(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_BAD_INPUT, f"{self.prog}: error: {message}\n")


def round_floats(obj):
    """Round every float to 12 significant digits; non-finite values become ``None``."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        val = float(obj)
        return float(f"{val:.{SIG_DIGITS}g}") if math.isfinite(val) else None
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return round_floats(obj.tolist())
    if isinstance(obj, dict):
        return {k: round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(round_floats(obj), indent=2)


def _load_spec(inline: str | None, path: str | None, label: str, default: str | None = None) -> ChannelSpec:
    if inline is not None and path is not None:
        raise BadInput(f"give either --{label} or --{label}-file, not both")
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise BadInput(f"cannot read spec file {path}: {exc}") from None
        return ChannelSpec.from_json(text)
    if inline is None:
        if default is None:
            raise BadInput(f"missing channel spec for --{label}")
        inline = default
    return ChannelSpec.parse(inline)


def parse_grid(text: str) -> tuple[float, ...]:
    """``"v1,v2,..."`` or ``"start:stop:num"`` (inclusive linspace)."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise BadInput(f"grid range must be start:stop:num, got {text!r}")
            start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
            if num < 1:
                raise BadInput(f"grid needs at least one point, got {text!r}")
            return tuple(float(f"{v:.15g}") for v in np.linspace(start, stop, num))
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise BadInput(f"bad grid {text!r}") from None


def cmd_decide(args) -> int:
    spec_a = _load_spec(args.a, args.a_file, "a")
    spec_b = _load_spec(args.b, args.b_file, "b")
    report = all_measurements_separable(spec_a, spec_b)
    rec = {"spec_A": str(spec_a), "spec_B": str(spec_b), **report.to_record()}
    print(dumps(rec))
    return EXIT_OK


def cmd_swap(args) -> int:
    params = SwapParams(
        r=args.r, a_A=args.aa, a_B=args.ab, l_A=args.la, l_B=args.lb, n_A_noise=args.na, n_B_noise=args.nb
    )
    print(dumps(simulate_swap(params).to_record()))
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.jobs < 1:
        raise BadInput("--jobs must be at least 1")
    rows = threshold_scan(
        parse_grid(args.la),
        parse_grid(args.lb),
        a_A=parse_grid(args.aa),
        a_B=parse_grid(args.ab),
        n_A_noise=parse_grid(args.na),
        n_B_noise=parse_grid(args.nb),
        r=args.r,
        jobs=args.jobs,
    )
    if args.format == "csv":
        text = rows_to_csv(rows)
    else:
        text = dumps([row.to_record() for row in rows]) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
        return EXIT_OK
    try:
        Path(args.out).write_text(text)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    return EXIT_OK


def _dual_of(channel_spec: ChannelSpec) -> tuple[ChannelSpec, str]:
    try:
        return dual_spec(channel_spec), "primitive"
    except GaussepError as primitive_err:
        form = to_amp_then_loss(channel_spec)
        if form.kind is not CanonicalKind.AMP_THEN_LOSS:
            raise BadInput(f"{channel_spec} has no finite dual: {primitive_err}") from None
        steps = (Primitive("amp", a=1.0 / (1.0 - form.l)), Primitive("loss", l=1.0 - 1.0 / form.a))
        return ChannelSpec(steps), "amp_then_loss"


def cmd_dual(args) -> int:
    spec_a = _load_spec(args.a, args.a_file, "a")
    dual_a, route = _dual_of(spec_a)
    ch = build(dual_a)
    rec = {
        "spec": str(spec_a),
        "route": route,
        "dual": dual_a.to_records(),
        "dual_x": ch.X,
        "dual_y": ch.Y,
    }
    if args.check_bell:
        spec_b = _load_spec(args.b, args.b_file, "b", default="identity")
        decision = all_measurements_separable(spec_a, spec_b)
        rec["spec_B"] = str(spec_b)
        rec["decision"] = decision.verdict
        rec["bell_trend"] = [
            {"r_reg": r_reg, **dual_povm_check(cv_bell(), spec_a, spec_b, r_reg).to_record()}
            for r_reg in R_REG_TREND
        ]
    print(dumps(rec))
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.samples < 1 or args.jobs < 1:
        raise BadInput("--samples and --jobs must be at least 1")
    results = run_all(seed=args.seed, samples=args.samples, jobs=args.jobs, inject_fault=args.inject_fault)
    for res in results:
        status = "PASS" if res.ok else "FAIL"
        print(f"{status} {res.name}: {res.passed} passed, {res.failed} failed")
        for label in res.failures:
            print(f"    {label}")
    failed = sum(not r.ok for r in results)
    print(f"{len(results) - failed}/{len(results)} suites passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gaussep", description="Separability of Gaussian measurements behind noisy channels.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    spec_help = "inline spec, e.g. loss:0.3,noise:0.2 or b1:0.4:x"

    p = sub.add_parser("decide", help="decide whether every measurement after the channel pair is separable")
    p.add_argument("--a", help=spec_help)
    p.add_argument("--b", help=spec_help)
    p.add_argument("--a-file", help="JSON channel spec for side A")
    p.add_argument("--b-file", help="JSON channel spec for side B")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("swap", help="simulate CV Bell entanglement swapping")
    p.add_argument("--r", type=float, required=True, help="two-mode squeezing of both resources")
    p.add_argument("--la", type=float, default=0.0)
    p.add_argument("--lb", type=float, default=0.0)
    p.add_argument("--aa", type=float, default=1.0)
    p.add_argument("--ab", type=float, default=1.0)
    p.add_argument("--na", type=float, default=0.0)
    p.add_argument("--nb", type=float, default=0.0)
    p.set_defaults(func=cmd_swap)

    p = sub.add_parser("sweep", help="scan swap outcomes over a parameter grid")
    grid_help = "comma list or start:stop:num"
    p.add_argument("--la", default="0:1:11", help=grid_help)
    p.add_argument("--lb", default="0:1:11", help=grid_help)
    p.add_argument("--aa", default="1", help=grid_help)
    p.add_argument("--ab", default="1", help=grid_help)
    p.add_argument("--na", default="0", help=grid_help)
    p.add_argument("--nb", default="0", help=grid_help)
    p.add_argument("--r", type=float, default=4.0)
    p.add_argument("--out", help="output path (default: standard output)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("dual", help="dual channel and the dual-route CV Bell check")
    p.add_argument("--a", help=spec_help)
    p.add_argument("--a-file")
    p.add_argument("--b", help="partner channel for --check-bell (default identity)")
    p.add_argument("--b-file")
    p.add_argument("--check-bell", action="store_true", help="report the dual-route verdict over r_reg")
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("verify", help="run every invariant suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BadInput, GaussepError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
