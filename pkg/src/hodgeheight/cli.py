"""Command-line front end.

    hodgeheight validate FILE
    hodgeheight compute FILE --what {bigrading,delta,height,limit-height}
    hodgeheight scenario NAME [params]
    hodgeheight sweep FILE --z-start Z --z-end Z --count N

Exit codes: 0 success, 1 validation/assertion failure, 2 numerical tolerance
failure, 3 I/O or parse failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .config import Config, default_tol
from .errors import HodgeError, NoConvergence, NotAnMHS
from .height import OrientedMHS, height
from .limits import limit_height
from .schemas import (
    detect_kind,
    dumps,
    load,
    parse_mhs,
    parse_orbit,
    parse_oriented_mhs,
    parse_variation,
)
from .splitting import deligne_delta
from . import scenarios
from .variations import check_asymptotics, oriented_fiber

OK, FAIL, NUMERICAL, IOERR = 0, 1, 2, 3


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _fmt(x: float) -> str:
    return "%.17g" % float(x)


def cmd_validate(args) -> int:
    try:
        doc = load(args.path)
        H = parse_mhs(doc) if detect_kind(doc) == "mhs" else None
        if H is None:
            kind = detect_kind(doc)
            if kind == "orbit":
                orbit, _ = parse_orbit(doc)
                H = orbit.fiber(2j, args.tol)
            else:
                v = parse_variation(doc)
                H = v.limit_structure()
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return IOERR
    except HodgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAIL
    report = H.validate(args.tol)
    doc_out = {"ok": report.ok, "failures": report.failures}
    _emit(args, dumps(doc_out))
    return OK if report.ok else FAIL


def cmd_compute(args) -> int:
    try:
        doc = load(args.path)
        kind = detect_kind(doc)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return IOERR
    try:
        if args.what == "limit-height":
            if kind != "orbit":
                print("error: limit-height needs an orbit file", file=sys.stderr)
                return FAIL
            orbit, orient = parse_orbit(doc)
            if orient is None:
                print("error: orbit file has no orientation", file=sys.stderr)
                return FAIL
            value = limit_height(orbit, orient, args.tol)
            _emit(args, dumps({"limit_height": value}))
            return OK
        if kind == "orbit":
            orbit, orient = parse_orbit(doc)
            H = orbit.fiber(complex(args.z), args.tol)
            om = OrientedMHS(H, orient) if orient is not None else None
        elif kind == "variation":
            v = parse_variation(doc)
            z = complex(args.z)
            s = np.exp(2j * np.pi * z)
            om = oriented_fiber(v, [z] * len(v.nilpotents), [s] * len(v.nilpotents), args.tol)
            H = om.mhs
        else:
            H = parse_mhs(doc)
            om = None
            if "orientation" in doc:
                om = parse_oriented_mhs(doc)
        if args.what == "bigrading":
            B = H.bigrading(args.tol)
            comps = {f"{p},{q}": [[[x.real, x.imag] for x in row] for row in B.components[(p, q)].basis]
                     for (p, q) in B.keys}
            _emit(args, dumps({"components": comps}))
            return OK
        if args.what == "delta":
            spl = deligne_delta(H, args.tol)
            _emit(args, dumps({"delta": [[float(x) for x in row] for row in spl.delta],
                               "residual": spl.residual}))
            return OK
        if args.what == "height":
            if om is None:
                print("error: height needs an orientation", file=sys.stderr)
                return FAIL
            _emit(args, dumps({"height": height(om, args.tol)}))
            return OK
        print(f"error: unknown computation {args.what!r}", file=sys.stderr)
        return FAIL
    except NoConvergence as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL
    except HodgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAIL


def _scenario_rows(name: str, args) -> tuple[list[tuple[str, float, float]], bool]:
    """Rows of (label, computed, expected); second value reports overall pass."""
    tol = args.tol
    if name == "dilog":
        s = complex(args.s)
        r = scenarios.scenario_dilog(s, tol, precision_bits=args.precision)
        rows = [("height_general", r.height_general, r.expected),
                ("height_biextension", r.height_biextension, r.expected)]
        return rows, r.bigrading_ok and all(abs(c - e) <= 1e-9 for _, c, e in rows)
    if name == "orbit6iii":
        z = complex(args.z)
        r = scenarios.scenario_orbit6iii(z, tol)
        rows = [("fiber_height", r.fiber_height, r.expected_fiber),
                ("limit_height", r.limit_height, 0.0)]
        return rows, all(abs(c - e) <= 1e-9 for _, c, e in rows)
    if name == "family":
        t = complex(args.t)
        r = scenarios.scenario_family(t, tol, precision_bits=args.precision)
        rows = [("height", r.height, r.reduced_form),
                ("closed_form", r.closed_form, r.reduced_form)]
        ok = all(abs(c - e) <= 1e-9 for _, c, e in rows)
        for label, val in sorted(r.limit_values.items()):
            rows.append((f"limit[{label}]", val, 0.0))
            ok = ok and abs(val) < 1e-4
        return rows, ok
    if name == "dim0":
        r = scenarios.scenario_dim0(complex(args.a), complex(args.b), tol)
        rows = [("height", r.height, 0.0),
                ("delta1[0]", r.spec.delta1[0], r.spec.delta1[0]),
                ("delta1[1]", r.spec.delta1[1], r.spec.delta1[1])]
        return rows, r.roundtrip_ok and abs(r.height) <= 1e-9
    if name == "triangle":
        T = scenarios.TriangleData(
            a=tuple(complex(x) for x in args.a_coeffs),
            b=tuple(complex(x) for x in args.b_coeffs),
            c=tuple(complex(x) for x in args.c_coeffs),
            alpha=complex(args.alpha), beta=complex(args.beta))
        r = scenarios.scenario_triangle(T, tol)
        rows = [("ht_nine", r.ht_nine, r.ht_six),
                ("ht_six", r.ht_six, r.ht_nine),
                ("machinery_height", r.machinery_height, r.ht_nine)]
        return rows, r.consistent and r.roundtrip_ok and \
            abs(r.machinery_height - r.ht_nine) <= 1e-9
    raise HodgeError(f"unknown scenario {name!r}")


def cmd_scenario(args) -> int:
    try:
        rows, ok = _scenario_rows(args.name, args)
    except NoConvergence as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL
    except HodgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAIL
    if args.format == "json":
        doc = {"scenario": args.name, "pass": ok,
               "rows": [{"label": l, "computed": c, "expected": e} for l, c, e in rows]}
        _emit(args, dumps(doc))
    else:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["label", "computed", "expected"])
        for l, c, e in rows:
            writer.writerow([l, _fmt(c), _fmt(e)])
        _emit(args, buf.getvalue().rstrip("\n"))
    if not ok:
        print("scenario mismatch", file=sys.stderr)
    return OK if ok else FAIL


def cmd_sweep(args) -> int:
    try:
        doc = load(args.path)
        kind = detect_kind(doc)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return IOERR
    z0, z1 = complex(args.z_start), complex(args.z_end)
    count = int(args.count)
    params = np.linspace(0.0, 1.0, count)
    rows = []
    try:
        if kind == "orbit":
            orbit, orient = parse_orbit(doc)
            if orient is None:
                print("error: orbit file has no orientation", file=sys.stderr)
                return FAIL
            for t in params:
                z = z0 + (z1 - z0) * t
                h = height(OrientedMHS(orbit.fiber(z, args.tol), orient), args.tol)
                rows.append((z.imag, h, float("nan")))
        elif kind == "variation":
            v = parse_variation(doc)
            k = len(v.nilpotents)
            pts = []
            for t in params:
                z = z0 + (z1 - z0) * t
                s = np.exp(2j * np.pi * z)
                pts.append(([z] * k, [s] * k))
            limit_ok = v.limit_structure().validate(args.tol).ok
            from .mhs import is_hodge_tate
            if limit_ok and is_hodge_tate(v.limit_structure(), args.tol) and v.length >= 4:
                report = check_asymptotics(v, pts, args.tol)
                for (zz, ss), p in zip(pts, report.points):
                    h = height(oriented_fiber(v, zz, ss, args.tol), args.tol)
                    rows.append((complex(zz[0]).imag, h, p.identity_residual))
            else:
                for zz, ss in pts:
                    h = height(oriented_fiber(v, zz, ss, args.tol), args.tol)
                    rows.append((complex(zz[0]).imag, h, float("nan")))
        else:
            print("error: sweep needs an orbit or variation file", file=sys.stderr)
            return FAIL
    except NoConvergence as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL
    except NotAnMHS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAIL
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["param", "height", "identity_residual"])
    for p, h, r in rows:
        writer.writerow([_fmt(p), _fmt(h), "" if np.isnan(r) else _fmt(r)])
    _emit(args, buf.getvalue().rstrip("\n"))
    return OK


def _add_global_flags(ap: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    ap.add_argument("--tol", type=float, help="comparison tolerance",
                    **({"default": d} if suppress else {"default": None}))
    ap.add_argument("--precision", type=int, help="working precision in bits",
                    **({"default": d} if suppress else {"default": 53}))
    ap.add_argument("--seed", type=int, **({"default": d} if suppress else {"default": 0}))
    ap.add_argument("--format", choices=["json", "csv"],
                    **({"default": d} if suppress else {"default": "json"}))
    ap.add_argument("--out", help="write output to a file instead of stdout",
                    **({"default": d} if suppress else {"default": None}))


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted both before and after the subcommand; the
    # subcommand copies use SUPPRESS defaults so they only override when given
    common = argparse.ArgumentParser(add_help=False)
    _add_global_flags(common, suppress=True)

    ap = argparse.ArgumentParser(prog="hodgeheight",
                                 description="heights and splittings of mixed Hodge structures")
    _add_global_flags(ap, suppress=False)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a structure file", parents=[common])
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compute", help="bigrading, delta or heights from a file",
                       parents=[common])
    p.add_argument("path")
    p.add_argument("--what", required=True,
                   choices=["bigrading", "delta", "height", "limit-height"])
    p.add_argument("--z", default="2j", help="fiber parameter for orbit/variation files")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("scenario", help="run a named worked example", parents=[common])
    p.add_argument("name", choices=["dilog", "triangle", "family", "dim0", "orbit6iii"])
    p.add_argument("--s", default="0.5+0.5j")
    p.add_argument("--z", default="1j")
    p.add_argument("--t", default="-1j")
    p.add_argument("--a", dest="a", default="2")
    p.add_argument("--b", dest="b", default="3")
    p.add_argument("--a-coeffs", nargs=3, default=["1", "2j", "1"])
    p.add_argument("--b-coeffs", nargs=3, default=["1", "1", "2j"])
    p.add_argument("--c-coeffs", nargs=3, default=["2j", "1", "1"])
    p.add_argument("--alpha", default="1")
    p.add_argument("--beta", default="1")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("sweep", help="heights along a ray in z-space (CSV)",
                       parents=[common])
    p.add_argument("path")
    p.add_argument("--z-start", default="0.5j")
    p.add_argument("--z-end", default="5j")
    p.add_argument("--count", type=int, default=10)
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.tol is None:
        args.tol = default_tol()
    Config(tol=args.tol, precision_bits=args.precision, seed=args.seed,
           output_format=args.format)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
