"""Command-line interface.

Exit codes: 0 all checks pass, 1 a verification failed, 2 usage or parse error.
Every document is JSON, written atomically when --out is given.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from importlib import resources

from . import __version__
from .annulus_geometry import counts_along_order, render_b_svg
from .cyclotomic_order import check_coprime, enumerate_ev, odd_min
from .errors import ArtifactError, CalibrationError, UsageError
from .exact_linalg import ExactMatrix, charpoly, conjugacy_equivalent, det, is_invertible
from .laplace_formal import ElementaryInput, formal_doc
from .standard_stokes import (SUITE, MonodromyPair, assemble, calibrate, coprime_pairs,
                              monodromy_composition, monodromy_explicit, pair_label, run_suite)
from .stokes_combinatorics import DEFAULT_CONVENTIONS, ConventionSet, index_functions

ENV_CONVENTIONS = "STOKESDATA_CONVENTIONS"

# order of checks in a verification report
VERIFY_CHECKS = ("sigma_invertible", "opposedness", "filtered_splittings",
                 "multiplier_triangularity", "determinant_identity", "explicit_vs_composition",
                 "block_vs_direct", "spectral", "geometry_counts")


class VerificationFailed(Exception):
    pass


# ---------------------------------------------------------------------------
# io helpers
# ---------------------------------------------------------------------------

def dump(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(text: str, out: str | None) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"{path} is not valid JSON: {e}") from None


def read_matrix(path: str) -> ExactMatrix:
    m = ExactMatrix.from_doc(read_json(path))
    if not m.is_square():
        raise UsageError(f"T must be square, got {m.rows}x{m.cols}")
    return m


def packaged_conventions_path():
    return resources.files("stokesdata").joinpath("data/conventions.json")


def conventions_from_doc(doc) -> ConventionSet:
    if isinstance(doc, dict) and "status" in doc:
        if doc.get("status") != "unique" or not doc.get("pinned"):
            raise UsageError("conventions artifact does not hold a unique pinned assignment")
        return ConventionSet.from_doc(doc["pinned"])
    return ConventionSet.from_doc(doc)


def load_conventions(path: str | None = None, overrides=()) -> tuple[ConventionSet, str]:
    """Explicit path, else $STOKESDATA_CONVENTIONS, else the packaged artifact."""
    if path is None:
        path = os.environ.get(ENV_CONVENTIONS) or None
    if path is not None:
        conv, source = conventions_from_doc(read_json(path)), path
    else:
        res = packaged_conventions_path()
        if res.is_file():
            conv, source = conventions_from_doc(json.loads(res.read_text(encoding="utf-8"))), "packaged"
        else:
            conv, source = DEFAULT_CONVENTIONS, "builtin-default"
    if overrides:
        doc = conv.to_doc()
        doc.pop("reading", None)
        for item in overrides:
            if "=" not in item:
                raise UsageError(f"--set expects field=value, got {item!r}")
            k, v = item.split("=", 1)
            if k not in doc:
                raise UsageError(f"unknown convention field {k!r}")
            doc[k] = {"true": True, "false": False}.get(v.lower(), v) if k == "nat_contains_zero" else v
        conv = ConventionSet.from_doc(doc)
        source += " (overridden)"
    return conv, source


def _pq(args) -> tuple[int, int]:
    check_coprime(args.p, args.q)
    return args.p, args.q


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_order(args) -> int:
    p, q = _pq(args)
    conv, _ = load_conventions(args.conventions, args.set)
    tab = enumerate_ev(p, q)
    n = p + q
    zmin, kmin = odd_min(p, q)
    doc = tab.to_doc()
    doc["zeta_max_is_minus_one"] = n % 2 == 0 and tab.zeta_max == n // 2
    doc["odd_zeta_min"] = kmin
    doc["index_functions"] = index_functions(p, q, conv).to_doc()
    doc["conventions"] = conv.to_doc()
    emit(dump(doc), args.out)
    return 0


def _pair_from_file(path: str) -> MonodromyPair | None:
    T = read_matrix(path)
    if T.rows and not is_invertible(T):
        return None
    return MonodromyPair(T)


def cmd_stokes(args) -> int:
    p, q = _pq(args)
    conv, _ = load_conventions(args.conventions, args.set)
    pair = _pair_from_file(args.matrix)
    if pair is None:
        sys.stderr.write("error: T is singular\n")
        return 1
    data = assemble(p, q, pair, conv)
    emit(dump(data.to_doc()), args.out)
    return 0


def geometry_check(p: int, q: int) -> dict | None:
    """None if fine, else a witness."""
    ev = list(enumerate_ev(p, q).even_order)
    n = p + q
    for ell in range(2 * q):
        order, counts = counts_along_order(p, q, ell)
        want = ev if ell % 2 == 0 else ev[::-1]
        if order != want or counts != list(range(n)):
            return {"p": p, "q": q, "ell": ell, "order": order, "counts": counts}
    return None


def _verify_cases(cases, conv, geometry_bound: int):
    merged = {name: {"pass": True, "cases": 0, "first_failure": None} for name in VERIFY_CHECKS}
    for p, q, pair in cases:
        for res in run_suite(p, q, pair, conv, checks=SUITE):
            slot = merged[res.name]
            slot["cases"] += 1
            if not res.passed and slot["pass"]:
                slot["pass"] = False
                slot["first_failure"] = {"p": p, "q": q, "T": pair_label(pair), "witness": res.witness}
    geo = merged["geometry_counts"]
    for p, q in sorted({(p, q) for p, q, _ in cases}):
        if p + q > geometry_bound:
            continue
        geo["cases"] += 1
        wit = geometry_check(p, q)
        if wit and geo["pass"]:
            geo["pass"] = False
            geo["first_failure"] = wit
    return [{"name": k, "pass": v["pass"],
             "witness": {"cases": v["cases"], "first_failure": v["first_failure"]}}
            for k, v in merged.items()]


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    conv, source = load_conventions(args.conventions, args.set)
    if args.sweep is not None:
        pairs = [MonodromyPair.diagonal([2]), MonodromyPair.diagonal([2, 3])]
        cases = [(p, q, pr) for p, q in coprime_pairs(args.sweep) for pr in pairs]
        inputs = {"sweep": args.sweep, "T": [pair_label(pr) for pr in pairs]}
    else:
        if args.p is None or args.q is None or args.matrix is None:
            raise UsageError("verify needs --p, --q and --matrix, or --sweep")
        p, q = _pq(args)
        pair = _pair_from_file(args.matrix)
        if pair is None:
            raise VerificationFailed("T is singular")
        cases = [(p, q, pair)]
        inputs = {"p": p, "q": q, "T": pair_label(pair)}
    checks = _verify_cases(cases, conv, args.geometry_bound)
    ok = all(c["pass"] for c in checks)
    report = {"command": "verify", "inputs": inputs, "pinned_conventions": conv.to_doc(),
              "conventions_source": source, "checks": checks, "all_pass": ok}
    if args.timing:
        report["wall_time_s"] = round(time.perf_counter() - t0, 3)
    emit(dump(report), args.out)
    return 0 if ok else 1


def cmd_calibrate(args) -> int:
    rep = calibrate(args.sweep, workers=args.workers)
    doc = rep.to_doc()
    doc["sweep_bound"] = args.sweep
    if rep.status != "unique":
        sys.stdout.write(dump(doc))
        sys.stderr.write(f"error: calibration {rep.status}: {len(rep.survivors)} survivors\n")
        return 1
    emit(dump(doc), args.out)
    return 0


def cmd_plot(args) -> int:
    p, q = _pq(args)
    if args.resolution < 64:
        raise UsageError("resolution must be at least 64")
    svg = render_b_svg(p, q, args.zeta, args.ell, None, args.resolution)
    emit(svg, args.out)
    return 0


def cmd_formal(args) -> int:
    p, q = _pq(args)
    phi = complex(args.phi_re, args.phi_im)
    if phi.imag == 0 and phi.real == int(phi.real):
        phi = int(phi.real)
    emit(dump(formal_doc(ElementaryInput(p, q, phi))), args.out)
    return 0


def _matrix_doc(M: ExactMatrix) -> dict:
    return {"matrix": M.to_doc(), "charpoly": str(charpoly(M)),
            "charpoly_coefficients": charpoly(M).to_doc(), "det": str(det(M))}


def cmd_monodromy(args) -> int:
    p, q = _pq(args)
    conv, _ = load_conventions(args.conventions, args.set)
    pair = _pair_from_file(args.matrix)
    if pair is None:
        sys.stderr.write("error: T is singular\n")
        return 1
    doc = {"p": p, "q": q, "conventions": conv.to_doc()}
    comp = explicit = None
    if args.method in ("composition", "both"):
        comp = monodromy_composition(assemble(p, q, pair, conv))
        doc["composition"] = _matrix_doc(comp)
    if args.method in ("explicit", "both"):
        explicit = monodromy_explicit(p, q, pair, conv)
        doc["explicit"] = _matrix_doc(explicit)
        # the explicit formula is a 1/(p+q) turn; its (p+q)-th power is the full turn
        doc["explicit_full_turn"] = _matrix_doc(explicit ** (p + q))
    code = 0
    if comp is not None and explicit is not None:
        verdict = conjugacy_equivalent(comp, explicit ** (p + q))
        doc["conjugate"] = verdict
        code = 0 if verdict else 1
    emit(dump(doc), args.out)
    return code


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stokesdata", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, pq=True, pq_required=True, conventions=True):
        if pq:
            sp.add_argument("--p", type=int, required=pq_required)
            sp.add_argument("--q", type=int, required=pq_required)
        if conventions:
            sp.add_argument("--conventions", help=f"conventions artifact (default ${ENV_CONVENTIONS} "
                                                  "or the packaged calibration)")
            sp.add_argument("--set", action="append", default=[], metavar="FIELD=VALUE",
                            help="override one convention field")
        sp.add_argument("--out")

    sp = sub.add_parser("order", help="even/odd orders and index tables")
    common(sp)
    sp.set_defaults(func=cmd_order)

    sp = sub.add_parser("stokes", help="serialize the standard linear Stokes data")
    common(sp)
    sp.add_argument("--matrix", required=True, help="JSON matrix file for T")
    sp.set_defaults(func=cmd_stokes)

    sp = sub.add_parser("verify", help="run the verification suite")
    common(sp, pq_required=False)
    sp.add_argument("--matrix")
    sp.add_argument("--sweep", type=int, nargs="?", const=8, default=None,
                    help="all coprime p+q <= bound, T in {diag(2), diag(2,3)} (default 8)")
    sp.add_argument("--geometry-bound", type=int, default=9)
    sp.add_argument("--timing", action="store_true", help="include wall time in the report")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("calibrate", help="pin the conventions by exhaustive search")
    common(sp, pq=False, conventions=False)
    sp.add_argument("--sweep", type=int, default=10)
    sp.add_argument("--workers", type=int, default=None)
    sp.set_defaults(func=cmd_calibrate)

    sp = sub.add_parser("plot", help="SVG of a region B on the annulus")
    common(sp, conventions=False)
    sp.add_argument("--zeta", type=int, default=0)
    sp.add_argument("--ell", type=int, default=0)
    sp.add_argument("--resolution", type=int, default=128)
    sp.set_defaults(func=cmd_plot)

    sp = sub.add_parser("formal", help="formal Laplace invariants and the direction grid")
    common(sp, conventions=False)
    sp.add_argument("--phi-re", type=float, default=1.0)
    sp.add_argument("--phi-im", type=float, default=0.0)
    sp.set_defaults(func=cmd_formal)

    sp = sub.add_parser("monodromy", help="topological monodromy")
    common(sp)
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--method", choices=("explicit", "composition", "both"), default="both")
    sp.set_defaults(func=cmd_monodromy)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2
    try:
        return args.func(args)
    except VerificationFailed as e:
        sys.stderr.write(f"verification failed: {e}\n")
        return 1
    except CalibrationError as e:
        sys.stderr.write(f"error: {e}\n")
        return 1
    except (UsageError, ArtifactError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
