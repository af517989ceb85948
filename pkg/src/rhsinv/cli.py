"""Command-line interface: ``rhsinv <verb> ...``.

Exit status 0 on success, 1 on invalid input (message on stderr), 2 when an
internal consistency check fails.
"""

import argparse
import csv
import io
import random
import sys
from fractions import Fraction
from math import factorial, gcd
from pathlib import Path

from .errors import DomainError, IncompleteGridError, ValidationError
from .finitetype import (
    alternating_sum_sublinks,
    diagram_report,
    shift_sum_closed_form,
    shift_sum_uncorrected_form,
    surgery_shift_alternating_sum,
)
from .jones import JonesGrid, MilnorData, load_fixture, unknot_grid
from .numtheory import SurgeryCoeff, dedekind_sum, dedekind_sum_sawtooth
from .rt_numeric import residual_rows
from .serial import dumps, fmt_rational, loads
from .surgery import (
    SurgeryPresentation,
    delta_coefficients,
    denominator_bound_check,
    framing_correction,
    hoste_s1,
    integerize,
    lens_space_invariants,
    perturbative_invariants,
    presentation_from_json,
)


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgError(message)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror}") from None


def _load_presentation(path: str):
    doc = loads(_read_text(path), "<stdin>" if path == "-" else path)
    base = None if path == "-" else Path(path).resolve().parent
    return presentation_from_json(doc, base)


def _n_max(args_n, file_n, default=1):
    n = args_n if args_n is not None else file_n if file_n is not None else default
    if n < 1:
        raise DomainError("n_max must be >= 1")
    return n


def _invariants_doc(inv):
    n_max = inv.order
    return {
        "S": [fmt_rational(x) for x in inv.S.coeffs],
        "ord_h1": inv.ord_h1,
        "lambda_cw": fmt_rational(inv.lambda_cw),
        "S_int": [fmt_rational(integerize(inv, n).value) for n in range(1, n_max + 1)],
    }


# --------------------------------------------------------------------------
# verbs


def cmd_lens(args, out):
    inv = lens_space_invariants(args.p, args.q, args.n_max)
    out.write(dumps(_invariants_doc(inv)))


def cmd_surgery(args, out):
    sp, file_n = _load_presentation(args.file)
    n = _n_max(args.n_max, file_n)
    inv = perturbative_invariants(sp, n)
    doc = _invariants_doc(inv)
    doc["delta_fr"] = fmt_rational(framing_correction(sp))
    doc["delta"] = [fmt_rational(x) for x in delta_coefficients(sp, n)]
    out.write(dumps(doc))


def cmd_hoste(args, out):
    sp, _ = _load_presentation(args.file)
    s1 = hoste_s1(sp)
    doc = {"S1": fmt_rational(s1), "lambda_cw": fmt_rational(s1 / 6)}
    try:
        engine = perturbative_invariants(sp, 1).S[1]
    except (IncompleteGridError, ValidationError):
        engine = None
    if engine is not None:
        doc["engine_S1"] = fmt_rational(engine)
        doc["match"] = engine == s1
    out.write(dumps(doc))


def cmd_alt_sum(args, out):
    sp, file_n = _load_presentation(args.file)
    n = _n_max(args.n, file_n)
    out.write(dumps({"order": n, "alternating_sum": fmt_rational(alternating_sum_sublinks(sp, n))}))


def cmd_diagram_sum(args, out):
    sp, file_n = _load_presentation(args.file)
    n = _n_max(args.n, file_n)
    rep = diagram_report(sp, n)
    out.write(dumps({
        "order": rep.order,
        "alternating_sum": fmt_rational(rep.alternating_sum),
        "diagram_sum": fmt_rational(rep.diagram_sum),
        "diagrams": [{"vertices": [list(v) for v in d.vertices], "weight": w} for d, w in rep.diagrams],
        "match": rep.match,
    }))


def _grid_arg(spec: str, order: int) -> JonesGrid:
    if spec == "unknot":
        return unknot_grid(order)
    path = Path(spec)
    if path.suffix == ".json" or path.exists():
        return JonesGrid.from_json(loads(_read_text(spec), spec))
    return load_fixture(spec)


def cmd_shift_sum(args, out):
    grid = _grid_arg(args.fixture, max(args.n_prime, args.n))
    val = surgery_shift_alternating_sum(grid, args.p, args.q, args.n, args.n_prime, args.level)
    doc = {"n": args.n, "n_prime": args.n_prime, "level": args.level, "value": fmt_rational(val)}
    if args.n_prime == args.n and args.level == "delta":
        d = grid.get(args.n, 0, (args.n,))
        doc["closed_form"] = fmt_rational(Fraction((-1) ** args.n * factorial(2 * args.n + 1), args.p ** args.n) * d)
    elif args.n_prime == args.n:
        doc["closed_form"] = fmt_rational(shift_sum_closed_form(grid, args.p, args.n))
        doc["uncorrected_form"] = fmt_rational(shift_sum_uncorrected_form(grid, args.p, args.n))
        if args.n == 1 and args.level == "S":
            # at n = 1 the framing term also moves with q; for p = 1 it adds exactly 1
            d12 = grid.get(1, 0, (1,))
            fd = (framing_correction(SurgeryPresentation([(args.p, args.q + 1)], cls=grid.cls, jones=grid))
                  - framing_correction(SurgeryPresentation([(args.p, args.q - 1)], cls=grid.cls, jones=grid)))
            doc["framing_difference"] = fmt_rational(fd)
            doc["uncorrected_n1_rhs"] = fmt_rational(args.q - 6 * d12)
            doc["corrected_n1_rhs"] = fmt_rational(shift_sum_closed_form(grid, args.p, 1) + fd)
    out.write(dumps(doc))


def cmd_integerize(args, out):
    if args.lens:
        inv = lens_space_invariants(args.lens[0], args.lens[1], args.n)
    elif args.file:
        sp, _ = _load_presentation(args.file)
        inv = perturbative_invariants(sp, args.n)
    else:
        raise ValidationError("integerize needs a presentation file or --lens P Q")
    rep = integerize(inv, args.n)
    den = denominator_bound_check(inv, args.n)
    out.write(dumps({
        "n": args.n,
        "S_int": fmt_rational(rep.value),
        "integral": rep.integral,
        "denominator_primes": list(den.primes),
        "denominator_bound_ok": den.ok,
    }))


def _parse_slope(text: str) -> SurgeryCoeff:
    try:
        p, _, q = text.partition("/")
        return SurgeryCoeff(int(p), int(q) if q else 1)
    except ValueError:
        raise ValidationError(f"--surgery expects p/q, got {text!r}") from None


def cmd_rt_eval(args, out):
    if not args.surgery:
        raise ValidationError("rt-eval needs at least one --surgery p/q")
    surgeries = [_parse_slope(s) for s in args.surgery]
    if args.k_min < 3 or args.k_max < args.k_min or args.k_step < 1:
        raise DomainError("need 3 <= K-min <= K-max and K-step >= 1")
    fmt = f"{{:.{args.precision}g}}"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "K", "re_Z", "im_Z", "residual"])
    for k, K, re, im, res in residual_rows(surgeries, range(args.k_min, args.k_max + 1, args.k_step)):
        w.writerow([k, K, fmt.format(re), fmt.format(im), fmt.format(res)])
    out.write(buf.getvalue())


def _selfcheck():
    rng = random.Random(20240501)
    checks = {}
    ok = True
    for _ in range(100):
        p, q = rng.randint(1, 10 ** 6), rng.randint(1, 10 ** 6)
        if gcd(p, q) != 1:
            continue
        lhs = dedekind_sum(p, q) + dedekind_sum(q, p)
        ok &= lhs == Fraction(p * p + q * q + 1, 12 * p * q) - Fraction(1, 4)
    for q in range(1, 40):
        for p in range(-q, q + 1):
            if gcd(p, q) == 1:
                ok &= dedekind_sum(p, q) == dedekind_sum_sawtooth(p, q)
    checks["reciprocity"] = ok

    ok = True
    for p in range(1, 13):
        for q in range(1, max(p, 2)):
            if gcd(p, q) == 1:
                sp = SurgeryPresentation([(p, q)], cls="BL", jones=unknot_grid(6))
                ok &= perturbative_invariants(sp, 6) == lens_space_invariants(p, q, 6)
    checks["lens_two_path"] = ok

    ok = True
    bor = MilnorData(3, triples={(0, 1, 2): 1}, phi1_singles={0: 0, 1: 0, 2: 0})
    for qs in [(1, 1, 1), (2, -1, 3), (-3, -2, -1)]:
        sp = SurgeryPresentation([(1, q) for q in qs], milnor=bor)
        target = 12 * qs[0] * qs[1] * qs[2]
        ok &= perturbative_invariants(sp, 1).S[1] == target == hoste_s1(sp)
        ok &= alternating_sum_sublinks(sp, 1) == -target == diagram_report(sp, 1).diagram_sum
    checks["alternating_sum"] = ok
    return checks


def cmd_selfcheck(args, out):
    checks = _selfcheck()
    out.write(dumps({"checks": checks, "ok": all(checks.values())}))
    if not all(checks.values()):
        raise AssertionError(f"selfcheck failed: {[k for k, v in checks.items() if not v]}")


# --------------------------------------------------------------------------


def build_parser():
    ap = _Parser(prog="rhsinv", description="Perturbative invariants of rational homology spheres.")
    sub = ap.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("lens", help="closed-form invariants of L(p, q)")
    p.add_argument("-p", type=int, required=True)
    p.add_argument("-q", type=int, required=True)
    p.add_argument("--n-max", type=int, default=2)
    p.set_defaults(func=cmd_lens)

    p = sub.add_parser("surgery", help="invariants of a surgery presentation")
    p.add_argument("file", help="presentation JSON ('-' for stdin)")
    p.add_argument("--n-max", type=int)
    p.set_defaults(func=cmd_surgery)

    p = sub.add_parser("hoste", help="S_1 and lambda_CW from phi_1 data")
    p.add_argument("file")
    p.set_defaults(func=cmd_hoste)

    for verb, func in (("alt-sum", cmd_alt_sum), ("diagram-sum", cmd_diagram_sum)):
        p = sub.add_parser(verb)
        p.add_argument("file")
        p.add_argument("--n", type=int)
        p.set_defaults(func=func)

    p = sub.add_parser("shift-sum", help="alternating sum over shifts of q on a knot")
    p.add_argument("--fixture", default="unknot", help="unknot, trefoil, or a grid JSON path")
    p.add_argument("-p", type=int, required=True)
    p.add_argument("-q", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--n-prime", type=int)
    p.add_argument("--level", choices=("S", "delta"), default="S")
    p.set_defaults(func=cmd_shift_sum)

    p = sub.add_parser("integerize", help="integrality and denominator checks")
    p.add_argument("file", nargs="?")
    p.add_argument("--lens", type=int, nargs=2, metavar=("P", "Q"))
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_integerize)

    p = sub.add_parser("rt-eval", help="finite-K surgery sums on an unlink, as CSV")
    p.add_argument("--surgery", action="append", metavar="P/Q")
    p.add_argument("--K-min", dest="k_min", type=int, default=50)
    p.add_argument("--K-max", dest="k_max", type=int, default=400)
    p.add_argument("--K-step", dest="k_step", type=int, default=50)
    p.add_argument("--precision", type=int, default=12)
    p.set_defaults(func=cmd_rt_eval)

    p = sub.add_parser("selfcheck", help="reciprocity, two-path and alternating-sum suites")
    p.set_defaults(func=cmd_selfcheck)
    return ap


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "n_prime", "unset") is None:
            args.n_prime = args.n
        buf = io.StringIO()
        args.func(args, buf)
    except _ArgError as exc:
        stderr.write(f"rhsinv: {exc}\n")
        return 1
    except (ValidationError, DomainError, IncompleteGridError) as exc:
        stderr.write(f"rhsinv: error: {exc}\n")
        return 1
    except AssertionError as exc:
        stdout.write(buf.getvalue())
        stderr.write(f"rhsinv: internal check failed: {exc}\n")
        return 2
    stdout.write(buf.getvalue())
    return 0


def main():
    sys.exit(run())
