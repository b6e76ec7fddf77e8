"""Command line: analyze one curve, sweep the family, verify a certificate.

Exit codes: 0 completed, 1 input error, 2 internal defect.
"""

from __future__ import annotations

import argparse
import sys

from .curve import CurveError
from .ellrank import DEFAULT_HEIGHT_BOUND
from .pipeline import (
    CertificateError,
    InputError,
    analyze,
    dumps,
    emit_certificate,
    load_certificate,
    make_family_curve,
    parse_coeffs,
    parse_family,
    search_family,
    verify,
)

EXIT_OK, EXIT_INPUT, EXIT_DEFECT = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with 2, which means "defect" here
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sectobs", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="certify one curve")
    src = a.add_mutually_exclusive_group(required=True)
    src.add_argument("--family", metavar="p,a", help="the curve Y^2 = 2(X^2+p)(X^2+2p)(X^2+a)")
    src.add_argument("--coeffs", metavar="f6,...,f0",
                     help="sextic coefficients, highest first (use --coeffs=-1,... for a negative f6)")
    a.add_argument("--height-bound", type=int, default=DEFAULT_HEIGHT_BOUND,
                   help="naive height bound for points on the elliptic quotients")
    a.add_argument("--out", metavar="FILE", help="write the certificate here instead of stdout")

    s = sub.add_parser("search", help="sweep the family C_{p,a}")
    s.add_argument("--pmax", type=int, required=True)
    s.add_argument("--amin", type=int, required=True)
    s.add_argument("--amax", type=int, required=True)
    s.add_argument("--jobs", type=int, default=1, help="worker processes")
    s.add_argument("--cache", metavar="DIR", help="certificate cache (default: $SECTOBS_CACHE or ~/.cache/sectobs)")
    s.add_argument("--no-cache", action="store_true", help="neither read nor write the cache")
    s.add_argument("--out", metavar="DIR", help="write one certificate per pair plus rows.json")
    s.add_argument("--height-bound", type=int, default=DEFAULT_HEIGHT_BOUND)

    v = sub.add_parser("verify", help="re-check every witness in a certificate")
    v.add_argument("file")
    return ap


def _analyze(args) -> int:
    if args.height_bound < 1:
        raise InputError("--height-bound must be positive")
    if args.family:
        p, a = parse_family(args.family)
        C, fam = make_family_curve(p, a), (p, a)
    else:
        C, fam = parse_coeffs(args.coeffs), None
    cert = analyze(C, fam, args.height_bound)
    if args.out:
        emit_certificate(cert, args.out)
        v = cert.verdicts
        print(f"{C.label or C.describe()}: status={v['status']} "
              f"obstruction_certified={v['obstruction_certified']} -> {args.out}")
    else:
        sys.stdout.write(dumps(cert.data))
    return EXIT_OK


def _search(args) -> int:
    if args.jobs < 1:
        raise InputError("--jobs must be positive")
    if args.height_bound < 1:
        raise InputError("--height-bound must be positive")
    rows = search_family(args.pmax, args.amin, args.amax, jobs=args.jobs, cache=args.cache,
                         out=args.out, height_bound=args.height_bound, use_cache=not args.no_cache)
    for r in rows:
        line = f"{r.p:>4} {r.a:>4}  {r.status:<20} {r.digest}"
        print(line + (f"  {r.reason}" if r.reason and r.status != "certified" else ""))
    cert = [f"({r.p},{r.a})" for r in rows if r.status == "certified"]
    print(f"certified: {len(cert)} {{{', '.join(cert)}}}")
    return EXIT_OK


def _verify(args) -> int:
    cert = load_certificate(args.file)
    rep = verify(cert)
    for f in rep.failures:
        print(f"FAIL {f}")
    state = "valid" if rep.ok else "INVALID"
    print(f"{args.file}: {state} ({rep.checks} checks, status={cert.status})")
    return EXIT_OK if rep.ok else EXIT_INPUT


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return {"analyze": _analyze, "search": _search, "verify": _verify}[args.cmd](args)
    except (InputError, CertificateError, CurveError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # anything else is a bug in the tool
        print(f"internal defect: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DEFECT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
