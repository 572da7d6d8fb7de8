"""Command-line front end: ``quadmod {elliptic,rect,sandwich,sweep,verify}``.

Tables go to ``--out`` (a path, or ``-`` for stdout) as CSV; diagnostics go
to stderr.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import logging
import math
import sys

from . import acceptance
from .elliptic import EllipticModulus, complete_E, complete_E_comp, complete_K, complete_K_comp
from .errors import DomainError
from .rectangle_moduli import asymptote_ext, psi, psi_inv, vz_bounds
from .sweep import format_number, run_sweep, write_csv

__all__ = ["main", "build_parser"]

log = logging.getLogger("quadmod")


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _table(path, header, rows):
    with _output(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([v if isinstance(v, str) else format_number(v) for v in r])


def cmd_elliptic(args) -> int:
    rows = []
    for v in args.values:
        m = EllipticModulus.from_comp(v) if args.complementary else EllipticModulus.from_k(v)
        rows.append([m.k, m.k_comp, complete_K(m), complete_E(m), complete_K_comp(m), complete_E_comp(m)])
    _table(args.out, ["k", "k_comp", "K", "E", "Kprime", "Eprime"], rows)
    return 0


def cmd_rect(args) -> int:
    rows = []
    for H in args.H:
        m = psi_inv(H)
        b = vz_bounds(H)
        asym = asymptote_ext(H) if H > 1 else None
        rows.append([H, m.k, m.k_comp, psi(m), b.lower, b.value, b.upper, asym])
    _table(args.out, ["H", "k", "k_comp", "psi_k", "vz_lower", "ext_modulus", "vz_upper", "asymptote"], rows)
    return 0


def cmd_sandwich(args) -> int:
    from .modulus_fd import make_quad, modulus_exterior, modulus_g1h
    from .slit_bounds import sandwich_check

    quad = make_quad(args.quad, args.alpha, args.height)
    M = args.M if args.M is not None else 1.1 * quad.max_height()
    fd = None
    if args.fd:
        fd = (modulus_exterior(quad, args.H, tol=args.tol), modulus_g1h(quad.alpha, quad.beta, M, args.H, tol=args.tol))
    rep = sandwich_check(quad, args.H, M, fd=fd, strict=False)
    _table(
        args.out,
        ["H", "M", "g2h_lower", "ext_fd", "g1h_upper", "upper_is_proxy", "asymptote", "ordered", "violations"],
        [[args.H, M, rep.lower, rep.ext_numeric, rep.upper, str(rep.upper_is_proxy), rep.asymptote, str(rep.ordered), "; ".join(rep.violations)]],
    )
    return 0 if rep.ordered else 1


def cmd_sweep(args) -> int:
    from .config import parse_config

    if args.config is None:
        raise DomainError("sweep needs --config")
    cfg = parse_config(args.config)
    rows = run_sweep(cfg, fd=args.fd, workers=args.workers)
    with _output(args.out) as fh:
        write_csv(rows, cfg.outputs, stream=fh)
    failed = sum(bool(r.errors) for r in rows)
    if failed:
        log.warning("%d of %d rows carry errors", failed, len(rows))
    return 0


def cmd_verify(args) -> int:
    results = acceptance.run_criteria(args.filter)
    with _output(args.out) as fh:
        for r in results:
            print(acceptance.format_result(r), file=fh)
        n_fail = sum(not r.passed for r in results)
        print(f"{len(results) - n_fail}/{len(results)} criteria passed", file=fh)
    return 0 if n_fail == 0 else 1


def _positive(s):
    v = float(s)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="-", help="output path, '-' for stdout (default)")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")

    p = argparse.ArgumentParser(prog="quadmod", description="Conformal moduli of stretched quadrilaterals.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("elliptic", parents=[common], help="complete elliptic integrals at given moduli")
    e.add_argument("values", nargs="+", type=_positive)
    e.add_argument("--complementary", action="store_true", help="treat values as k' instead of k")
    e.set_defaults(func=cmd_elliptic)

    r = sub.add_parser("rect", parents=[common], help="psi inverse, exterior modulus and bounds for a rectangle")
    r.add_argument("H", nargs="+", type=_positive)
    r.set_defaults(func=cmd_rect)

    s = sub.add_parser("sandwich", parents=[common], help="sandwich bounds for one quad and one H")
    s.add_argument("--quad", default="cosine")
    s.add_argument("--alpha", type=_positive, default=1.0)
    s.add_argument("--height", type=_positive, default=1.0)
    s.add_argument("--H", type=_positive, required=True)
    s.add_argument("--M", type=_positive, default=None, help="box half-height (default 1.1 max f)")
    s.add_argument("--tol", type=_positive, default=1e-2)
    s.add_argument("--fd", action=argparse.BooleanOptionalAction, default=True)
    s.set_defaults(func=cmd_sandwich)

    w = sub.add_parser("sweep", parents=[common], help="config-driven sweep over H")
    w.add_argument("--config", required=True)
    w.add_argument("--workers", type=int, default=1)
    w.add_argument("--fd", action=argparse.BooleanOptionalAction, default=False)
    w.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    v.add_argument("--filter", choices=acceptance.MODULES, default=None, help="only checks of this module")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (DomainError, OSError) as exc:
        print(f"quadmod: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
