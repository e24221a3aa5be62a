"""Command line front end: ``qkdrate <command> [flags]``.

Exit status is 0 on success, 2 on a usage error and 1 when a computation
fails; failures print a single ``error: <stage>: <message>`` line.
"""

import argparse
import sys
import warnings
from collections import Counter

from . import channel, experiment, scan
from .core_math import pa_term_max_deviation
from .errors import QKDError
from .postprocessing import F_EC_CASCADE, SCHEMES


class _Failure(Exception):
    def __init__(self, stage, exc):
        super().__init__(f"{stage}: {exc}")


def _mu_arg(text):
    if text in ("auto", "origin"):
        return text
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'auto', 'origin' or a number, got {text!r}") from None
    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError(f"mu must lie in (0, 1], got {value}")
    return value


def _override_arg(text):
    key, sep, value = text.partition("=")
    name = experiment.PARAM_ALIASES.get(key.strip().lower())
    if not sep or name is None:
        allowed = ", ".join(experiment.PARAM_ALIASES)
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE with KEY in {allowed}, got {text!r}")
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"override value {value!r} is not a number") from None


def _add_setup_flags(p, distance_grid=False):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--setup", choices=sorted(channel.SETUPS), help="built-in setup")
    src.add_argument("--setup-file", metavar="PATH", help="key = value setup file")
    p.add_argument("--mode", choices=scan.MODES, default="nondecoy")
    p.add_argument("--mu", type=_mu_arg, default="auto", help="auto | origin | <value> (default auto)")
    p.add_argument("--nu", type=float, default=scan.DEFAULT_NU, help="weak decoy intensity (default %(default)s)")
    p.add_argument("--f-ec", type=float, default=F_EC_CASCADE, help="error correction efficiency")
    p.add_argument("--q", type=float, default=0.5, help="basis sift factor (default %(default)s)")
    if distance_grid:
        p.add_argument("--dmin", type=float, default=0.0)
        p.add_argument("--dmax", type=float, help="default: 10 km past the cutoff")
        p.add_argument("--dstep", type=float, default=1.0)
        p.add_argument("--out", metavar="PATH", help="write CSV here instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(prog="qkdrate", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("privacy-compare", help="largest gap between the two privacy terms")
    p.add_argument("--step", type=float, default=1e-5, help="scan grid step in e")

    p = sub.add_parser("simulate", help="key rate versus distance as CSV")
    _add_setup_flags(p, distance_grid=True)
    p.add_argument("--scheme", choices=SCHEMES + ("both",), default="both")

    p = sub.add_parser("max-distance", help="secure cutoff distance")
    _add_setup_flags(p)
    p.add_argument("--scheme", choices=SCHEMES + ("both",), default="both")

    p = sub.add_parser("optimal-mu", help="rate-maximising signal intensity")
    _add_setup_flags(p)
    p.add_argument("--scheme", choices=SCHEMES, default="gllp")
    p.add_argument("--distance", type=float, required=True, help="fiber length in km")

    p = sub.add_parser("analyze", help="post-process a measured decoy-state run")
    p.add_argument("--data", required=True, metavar="PATH", help="raw counts file")
    p.add_argument("--override", type=_override_arg, action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--e1-source", choices=("signal", "decoy"), default="signal")
    p.add_argument("--f-ec", type=float, default=F_EC_CASCADE)
    p.add_argument("--machine", action="store_true", help="append a key = value block")
    return parser


def _setup(args):
    if args.setup_file:
        try:
            return channel.load_setup(args.setup_file)
        except (OSError, ValueError) as exc:
            raise _Failure("load_setup", exc) from exc
    return channel.get_setup(args.setup)


def _schemes(args):
    return SCHEMES if args.scheme == "both" else (args.scheme,)


def _cmd_privacy_compare(args, out):
    try:
        e, dev = pa_term_max_deviation(args.step)
    except QKDError as exc:
        raise _Failure("pa_term_max_deviation", exc) from exc
    out.write(f"max deviation {dev:.2%} at e = {e:.2%}\n")


def _cmd_simulate(args, out):
    setup = _setup(args)
    kw = dict(nu=args.nu, q=args.q, f_ec=args.f_ec)
    try:
        if args.dmax is None:
            grid = [d for d in scan.default_distances(setup, args.mode, args.mu, step=args.dstep, **kw)
                    if d >= args.dmin]
        else:
            n = int(round((args.dmax - args.dmin) / args.dstep))
            grid = [args.dmin + k * args.dstep for k in range(n + 1)]
        points = scan.sweep(setup, args.mode, args.mu, distances=grid, **kw)
    except QKDError as exc:
        raise _Failure("sweep", exc) from exc
    if args.out:
        with open(args.out, "w", newline="") as fh:
            scan.write_csv(points, fh, args.mode, _schemes(args))
    else:
        scan.write_csv(points, out, args.mode, _schemes(args))
    flagged = Counter(p.status for p in points if p.status != "ok")
    for status, n in sorted(flagged.items()):
        print(f"warning: {n} of {len(points)} points {status}, R reported as 0", file=sys.stderr)


def _cmd_max_distance(args, out):
    setup = _setup(args)
    for s in _schemes(args):
        try:
            d = scan.max_distance(setup, args.mode, s, args.mu, args.nu, args.q, args.f_ec)
            mu = scan.choose_mu(setup, d, args.mode, args.mu, s, args.nu, args.q, args.f_ec)
            point = scan.evaluate(setup, d, mu, args.mode, args.nu, args.q, args.f_ec)
        except QKDError as exc:
            raise _Failure("max_distance", exc) from exc
        out.write(f"{setup.name} {args.mode} {s}: {d:.2f} km (mu = {mu:.4g}, E_mu = {point.E_mu:.2%})\n")


def _cmd_optimal_mu(args, out):
    setup = _setup(args)
    try:
        mu = scan.optimal_mu(setup, args.distance, args.mode, args.scheme, args.nu, args.q, args.f_ec)
    except QKDError as exc:
        raise _Failure("optimal_mu", exc) from exc
    out.write(f"{mu:.6g}\n")


def _cmd_analyze(args, out):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            raw = experiment.load_raw_counts(args.data)
        except (OSError, ValueError) as exc:
            raise _Failure("load_raw_counts", exc) from exc
        try:
            report = experiment.analyze(raw, dict(args.override), args.e1_source, args.f_ec)
        except QKDError as exc:
            raise _Failure("analyze", exc) from exc
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    out.write(experiment.format_report(report, machine=args.machine))


_COMMANDS = {
    "privacy-compare": _cmd_privacy_compare,
    "simulate": _cmd_simulate,
    "max-distance": _cmd_max_distance,
    "optimal-mu": _cmd_optimal_mu,
    "analyze": _cmd_analyze,
}


def run(argv=None, out=None):
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        _COMMANDS[args.command](args, out)
    except _Failure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())
