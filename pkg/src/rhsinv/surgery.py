"""Perturbative invariants of rational surgeries on knots and special links.

For a presentation of M' as surgery on an algebraically split link in M, the
trivial-connection contribution satisfies

    S(M') = S(M) + Delta_fr h + log(1 + sum_n Delta_n h^n),   h = i pi / K,

where ``Delta_fr`` collects Dedekind sums from the framing phase and the
``Delta_n`` are Gaussian moments of the shifted Jones grid.  Knots are the
N = 1 case of the same code path.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from pathlib import Path

from .errors import DegenerateSurgeryError, DomainError, IncompleteGridError, ValidationError
from .jones import (
    JonesGrid,
    MilnorData,
    SlopeClass,
    asl_low_order_grid,
    check_grid,
    conway_from_grid,
    empty_grid,
    load_fixture,
    remove_component,
    shift_grid,
    unlink_grid,
)
from .numtheory import SurgeryCoeff, dedekind_sum
from .serial import loads, parse_int, parse_rational
from .series import KSeries, series_log, sinhc_series, sphere_series

log = logging.getLogger(__name__)

__all__ = [
    "RHSInvariants",
    "SurgeryPresentation",
    "framing_correction",
    "delta_coefficients",
    "perturbative_invariants",
    "lens_space_invariants",
    "connected_sum",
    "hoste_s1",
    "hoste_lambda_cw",
    "integerize",
    "denominator_bound_check",
    "IntegerizeReport",
    "DenominatorReport",
    "presentation_from_json",
]


def _sign(x) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class RHSInvariants:
    """Perturbative invariants S_1..S_order (S[0] = 0) and |H_1(M; Z)|."""

    S: KSeries
    ord_h1: int = 1

    def __post_init__(self):
        if self.S[0] != 0:
            raise ValidationError("S must have zero constant term")
        if self.ord_h1 < 1:
            raise ValidationError("ord H_1 must be a positive integer")

    @classmethod
    def sphere(cls, order: int) -> "RHSInvariants":
        return cls(sphere_series(order), 1)

    @property
    def order(self) -> int:
        return self.S.order

    @property
    def lambda_cw(self) -> Fraction:
        """Casson-Walker invariant, S_1 / 6."""
        if self.order < 1:
            raise DomainError("lambda_CW needs order >= 1")
        return self.S[1] / 6

    def truncate(self, order: int) -> "RHSInvariants":
        return RHSInvariants(self.S.truncate(order), self.ord_h1)


# --------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class SurgeryPresentation:
    """Rational surgery on an algebraically split link in a base manifold.

    ``jones`` may be omitted when ``milnor`` carries the phi_1 data, in which
    case the order-1 grid is built from it.  ``base`` defaults to S^3.
    """

    coeffs: tuple
    framings: tuple = None
    cls: SlopeClass = SlopeClass.ASL
    jones: JonesGrid = None
    milnor: MilnorData = None
    linking: tuple = None
    base: RHSInvariants = None

    def __post_init__(self):
        coeffs = tuple(c if isinstance(c, SurgeryCoeff) else SurgeryCoeff(*c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        N = len(coeffs)
        framings = tuple(self.framings) if self.framings is not None else (0,) * N
        if len(framings) != N:
            raise ValidationError(f"{len(framings)} framings for {N} components")
        object.__setattr__(self, "framings", tuple(int(x) for x in framings))
        object.__setattr__(self, "cls", SlopeClass.parse(self.cls))

        if self.linking is not None:
            lk = tuple(tuple(int(x) for x in row) for row in self.linking)
            if len(lk) != N or any(len(row) != N for row in lk):
                raise ValidationError(f"linking matrix must be {N}x{N}")
            for i in range(N):
                if lk[i][i] != self.framings[i]:
                    raise ValidationError(
                        f"linking[{i}][{i}] = {lk[i][i]} disagrees with framing {self.framings[i]}")
                for j in range(N):
                    if i != j and lk[i][j] != 0:
                        raise ValidationError(
                            f"linking[{i}][{j}] = {lk[i][j]}: algebraically split links need zero linking numbers")
        for j, P in enumerate(self.denominators):
            if P == 0:
                raise DegenerateSurgeryError(
                    f"component {j}: p + q*l = 0, the result is not a rational homology sphere")

        if self.milnor is not None:
            if self.milnor.N != N:
                raise ValidationError(f"Milnor data has N = {self.milnor.N}, presentation has {N}")
            self.milnor.validate(self.cls)
        if self.jones is not None:
            if self.jones.N != N:
                raise ValidationError(f"Jones grid has N = {self.jones.N}, presentation has {N}")
            check_grid(self.jones, self.cls)

    @property
    def N(self) -> int:
        return len(self.coeffs)

    @property
    def denominators(self):
        """P_j = p_j + q_j l_jj."""
        return tuple(c.p + c.q * l for c, l in zip(self.coeffs, self.framings))

    @property
    def x(self):
        """x_j = q_j / (p_j + q_j l_jj)."""
        return tuple(Fraction(c.q, P) for c, P in zip(self.coeffs, self.denominators))

    def base_invariants(self, order: int) -> RHSInvariants:
        if self.base is None:
            return RHSInvariants.sphere(order)
        if self.base.order < order:
            raise DomainError(f"base invariants known to order {self.base.order}, need {order}")
        return self.base.truncate(order)

    def grid(self) -> JonesGrid:
        if self.jones is not None:
            return self.jones
        if self.N == 0:
            return empty_grid(64)
        if self.milnor is None:
            raise ValidationError("presentation carries neither a Jones grid nor phi_1 data")
        return asl_low_order_grid(self.milnor, 1, self.cls)

    def sublink(self, keep) -> "SurgeryPresentation":
        """Surgery on the components ``keep`` only (others removed from the link)."""
        keep = sorted(keep)
        if any(not 0 <= j < self.N for j in keep):
            raise DomainError(f"sublink indices {keep} out of range")
        g = self.jones
        if g is not None:
            for j in reversed(range(self.N)):
                if j not in keep:
                    g = remove_component(g, j)
        return SurgeryPresentation(
            coeffs=[self.coeffs[j] for j in keep],
            framings=[self.framings[j] for j in keep],
            cls=self.cls,
            jones=g,
            milnor=None if self.milnor is None else self.milnor.restrict(keep),
            base=self.base,
        )

    def permuted(self, perm) -> "SurgeryPresentation":
        """Same presentation with components listed in the order ``perm``."""
        perm = list(perm)
        if sorted(perm) != list(range(self.N)):
            raise DomainError(f"{perm} is not a permutation of range({self.N})")
        g = self.jones
        if g is not None:
            g = JonesGrid(g.N, g.cls, g.order,
                          {(m, n, tuple(mu[j] for j in perm)): v for (m, n, mu), v in g.entries.items()})
        return SurgeryPresentation(
            coeffs=[self.coeffs[j] for j in perm],
            framings=[self.framings[j] for j in perm],
            cls=self.cls,
            jones=g,
            milnor=None if self.milnor is None else self.milnor.restrict(perm),
            base=self.base,
        )


# --------------------------------------------------------------------------
# the engine


def framing_correction(sp: SurgeryPresentation) -> Fraction:
    """Delta_fr = 1/2 sum_j [12 s(p,q) - c_j - 1/(q P) + 3 sign(c_j)],  c_j = p/q + l."""
    total = Fraction(0)
    for c, l, P in zip(sp.coeffs, sp.framings, sp.denominators):
        cj = Fraction(c.p, c.q) + l
        total += 12 * dedekind_sum(c.p, c.q) - cj - Fraction(1, c.q * P) + 3 * _sign(cj)
    return total / 2


def _missing_cells(sigma, have, need):
    cells = []
    for k in range(have + 1, need + 1):
        m_max = math.floor(k / (1 - sigma))
        cells.extend((m, k - m) for m in range(m_max + 1))
    return cells


def _delta_from_shifted(shifted: JonesGrid, x, n_max: int):
    """Delta_0..Delta_{n_max} from a shifted grid and the x_j = q_j/P_j."""
    out = [Fraction(0)] * (n_max + 1)
    for (m, n, multi), v in shifted.entries.items():
        k = m + n
        if k > n_max:
            continue
        term = v * Fraction((-1) ** m, 2 ** m)
        for mj, xj in zip(multi, x):
            if mj:
                term *= Fraction(factorial(2 * mj), factorial(mj)) * xj ** mj
        out[k] += term
    return out


def delta_coefficients(sp: SurgeryPresentation, n_max: int):
    """Delta_1..Delta_{n_max} (as a list, index 0 holds Delta_0 = 1)."""
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    g = sp.grid()
    if g.order < n_max:
        missing = _missing_cells(sp.cls.sigma, g.order, n_max)
        raise IncompleteGridError(
            f"grid known to order {g.order}, order {n_max} needs cells (m, n) = {missing}", missing)
    shifted = shift_grid(g.truncated(n_max), sp.denominators)
    out = _delta_from_shifted(shifted, sp.x, n_max)
    if out[0] != 1:
        raise ValidationError(f"shifted grid has Delta_0 = {out[0]}, expected 1")
    return out


def perturbative_invariants(sp: SurgeryPresentation, n_max: int) -> RHSInvariants:
    base = sp.base_invariants(n_max)
    delta = delta_coefficients(sp, n_max)
    S = base.S + series_log(KSeries(delta, n_max))
    if n_max >= 1:
        c = list(S.coeffs)
        c[1] += framing_correction(sp)
        S = KSeries(c, n_max)
    ord_h1 = base.ord_h1
    for P in sp.denominators:
        ord_h1 *= abs(P)
    return RHSInvariants(S, ord_h1)


def lens_space_invariants(p: int, q: int, n_max: int) -> RHSInvariants:
    """Closed form: S_1 = -6 s(q, p), the rest from log(sinh(h/|p|)/(h/|p|))."""
    if p == 0:
        raise DegenerateSurgeryError("L(0, q) is not a rational homology sphere")
    if math.gcd(p, q) != 1:
        raise DomainError(f"L({p}, {q}) needs coprime parameters")
    S = series_log(sinhc_series(n_max, Fraction(1, abs(p))))
    if n_max >= 1:
        c = list(S.coeffs)
        c[1] = -6 * dedekind_sum(q, p)
        S = KSeries(c, n_max)
    return RHSInvariants(S, abs(p))


def connected_sum(a: RHSInvariants, b: RHSInvariants) -> RHSInvariants:
    if a.order != b.order:
        log.warning("connected sum of orders %d and %d truncated to %d",
                    a.order, b.order, min(a.order, b.order))
    order = min(a.order, b.order)
    S = a.S.truncate(order) + b.S.truncate(order) - sphere_series(order)
    return RHSInvariants(S, a.ord_h1 * b.ord_h1)


def _phi1_data(sp: SurgeryPresentation) -> MilnorData:
    if sp.milnor is not None and sp.milnor.has_singles():
        return sp.milnor
    if sp.N == 0:
        return MilnorData(0)
    if sp.N == 1 and sp.jones is not None and sp.jones.order >= 1:
        phi1 = conway_from_grid(sp.jones)[1]
        return MilnorData(1, phi1_singles={0: phi1})
    raise ValidationError("hoste_s1 needs phi_1 values for every component")


def hoste_s1(sp: SurgeryPresentation) -> Fraction:
    """S_1(M') from phi_1 of the sublinks of length 1, 2 and 3."""
    m = _phi1_data(sp)
    c = [1 / x for x in sp.x]  # p_j/q_j + l_jj
    total = Fraction(0)
    N = sp.N
    for j in range(N):
        total += (m.phi1_single(j) - Fraction(1, 24)) / c[j]
    for i in range(N):
        for j in range(i + 1, N):
            total += m.phi1_pair(i, j) / (c[i] * c[j])
            for k in range(j + 1, N):
                total += m.phi1_triple(i, j, k) / (c[i] * c[j] * c[k])
    return sp.base_invariants(1).S[1] + framing_correction(sp) + 12 * total


def hoste_lambda_cw(sp: SurgeryPresentation) -> Fraction:
    return hoste_s1(sp) / 6


# --------------------------------------------------------------------------
# arithmetic reports


@dataclass(frozen=True)
class IntegerizeReport:
    n: int
    value: Fraction
    integral: bool

    @property
    def integer(self):
        return self.value.numerator if self.integral else None


def integerize(inv: RHSInvariants, n: int) -> IntegerizeReport:
    """2^{3n} n! (2n)! (9n)! |H_1|^n S_n, flagged when not an integer."""
    if not 1 <= n <= inv.order:
        raise DomainError(f"n = {n} outside 1..{inv.order}")
    v = (2 ** (3 * n) * factorial(n) * factorial(2 * n) * factorial(9 * n)
         * inv.ord_h1 ** n * inv.S[n])
    return IntegerizeReport(n, v, v.denominator == 1)


@dataclass(frozen=True)
class DenominatorReport:
    n: int
    value: Fraction
    primes: tuple
    residual: int
    ok: bool


def _primes_upto(b):
    return [p for p in range(2, b + 1) if all(p % d for d in range(2, math.isqrt(p) + 1))]


def denominator_bound_check(inv: RHSInvariants, n: int) -> DenominatorReport:
    """Every prime dividing the denominator of |H_1|^n S_n is at most 2n."""
    if not 1 <= n <= inv.order:
        raise DomainError(f"n = {n} outside 1..{inv.order}")
    v = inv.ord_h1 ** n * inv.S[n]
    den = v.denominator
    found = []
    for p in _primes_upto(2 * n):
        if den % p == 0:
            found.append(p)
            while den % p == 0:
                den //= p
    return DenominatorReport(n, v, tuple(found), den, den == 1)


# --------------------------------------------------------------------------
# JSON presentations


def _grid_from_spec(spec, where, base_dir, N):
    if isinstance(spec, dict):
        try:
            return JonesGrid.from_json(spec)
        except ValidationError as exc:
            raise ValidationError(f"{where}: {exc}") from None
    if not isinstance(spec, str):
        raise ValidationError(f"{where}: expected a path, a fixture name or an inline grid")
    if spec == "unlink":
        return unlink_grid(N, 8)
    path = Path(spec)
    if not path.is_absolute() and base_dir is not None:
        path = Path(base_dir) / path
    if path.suffix == ".json" or path.exists():
        try:
            text = path.read_text()
        except OSError as exc:
            raise ValidationError(f"{where}: cannot read {path}: {exc.strerror}") from None
        try:
            return JonesGrid.from_json(loads(text, str(path)))
        except ValidationError as exc:
            raise ValidationError(f"{where}: {exc}") from None
    try:
        return load_fixture(spec)
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def _index_rows(rows, arity, where, value=parse_int):
    if not isinstance(rows, list):
        raise ValidationError(f"{where}: expected a list")
    out = {}
    for r, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != arity + 1:
            raise ValidationError(f"{where}[{r}]: expected [{', '.join(['i', 'j', 'k'][:arity])}, value]")
        idx = tuple(parse_int(x, f"{where}[{r}]") for x in row[:arity])
        out[idx] = value(row[arity], f"{where}[{r}]")
    return out


def presentation_from_json(doc, base_dir=None):
    """Parse a presentation document; returns (presentation, n_max or None)."""
    if not isinstance(doc, dict):
        raise ValidationError("presentation must be a JSON object")
    comps = doc.get("components")
    if not isinstance(comps, list):
        raise ValidationError("components: expected a list of {p, q, framing}")
    coeffs, framings = [], []
    for j, c in enumerate(comps):
        if not isinstance(c, dict):
            raise ValidationError(f"components[{j}]: expected an object")
        for key in ("p", "q"):
            if key not in c:
                raise ValidationError(f"components[{j}]: missing field {key!r}")
        p = parse_int(c["p"], f"components[{j}].p")
        q = parse_int(c["q"], f"components[{j}].q")
        try:
            coeffs.append(SurgeryCoeff(p, q))
        except DomainError as exc:
            raise type(exc)(f"components[{j}]: {exc}") from None
        framings.append(parse_int(c.get("framing", 0), f"components[{j}].framing"))
    N = len(coeffs)
    cls = SlopeClass.parse(doc.get("class", "ASL"))

    milnor = None
    if "milnor" in doc or "phi1" in doc:
        mil = doc.get("milnor", {})
        phi = doc.get("phi1", {})
        if not isinstance(mil, dict) or not isinstance(phi, dict):
            raise ValidationError("milnor / phi1: expected objects")
        singles = phi.get("singles")
        if singles is None:
            singles_map = {}
        elif isinstance(singles, list) and len(singles) == N:
            singles_map = {j: parse_rational(v, f"phi1.singles[{j}]") for j, v in enumerate(singles)}
        else:
            raise ValidationError(f"phi1.singles: expected a list of {N} rationals")
        milnor = MilnorData(
            N,
            triples=_index_rows(mil.get("triples", []), 3, "milnor.triples"),
            quartic_pairs=_index_rows(mil.get("quartic_pairs", []), 2, "milnor.quartic_pairs"),
            phi1_singles=singles_map,
            phi1_pairs=_index_rows(phi.get("pairs", []), 2, "phi1.pairs", parse_rational),
            phi1_triples=_index_rows(phi.get("triples", []), 3, "phi1.triples", parse_rational),
        )

    jones = None
    if doc.get("jones_fixture") is not None:
        jones = _grid_from_spec(doc["jones_fixture"], "jones_fixture", base_dir, N)

    n_max = doc.get("n_max")
    if n_max is not None:
        n_max = parse_int(n_max, "n_max")
    sp = SurgeryPresentation(
        coeffs=coeffs,
        framings=framings,
        cls=cls,
        jones=jones,
        milnor=milnor,
        linking=doc.get("linking"),
    )
    return sp, n_max
