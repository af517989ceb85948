"""Expansion grids of trivial-connection colored Jones polynomials.

A grid stores the coefficients ``d[(m, n, multi)]`` of

    J_{K a_1, ..., K a_N} = K^N (prod a_j) sum d^{(m,n)}_{multi} prod (i pi a_j)^{2 m_j} h^n,

with ``h = i pi / K``, ``sum(multi) == m``.  The shifted polynomial of the
surgery formula has the same shape without the ``K^N prod a_j`` prefactor.

Grids are truncated to the window ``m + n <= order``; entries outside it never
reach an invariant of order ``<= order`` and are dropped on construction.
Component indices are 0-based everywhere.
"""

import enum
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from math import comb, factorial

from .errors import DegenerateSurgeryError, DomainError, ValidationError
from .series import KSeries, sinhc_series

__all__ = [
    "SlopeClass",
    "JonesGrid",
    "ShiftedJonesGrid",
    "MilnorData",
    "SlopeReport",
    "unknot_grid",
    "unlink_grid",
    "empty_grid",
    "load_fixture",
    "alexander_diagonal",
    "conway_from_grid",
    "shift_grid",
    "remove_component",
    "asl_low_order_grid",
    "validate_slope",
    "check_grid",
]


class SlopeClass(enum.Enum):
    """Special link classes and their slope index sigma (entries obey n >= -sigma m)."""

    ASL = "ASL"
    SASL = "SASL"
    BL = "BL"

    @property
    def sigma(self) -> Fraction:
        return {"ASL": Fraction(2, 3), "SASL": Fraction(1, 2), "BL": Fraction(0)}[self.value]

    def admits(self, m: int, n: int) -> bool:
        return n >= -self.sigma * m

    @classmethod
    def parse(cls, tag) -> "SlopeClass":
        if isinstance(tag, cls):
            return tag
        try:
            return cls(str(tag).upper())
        except ValueError:
            raise ValidationError(f"unknown link class {tag!r}; expected ASL, SASL or BL") from None

    def weaker(self, other: "SlopeClass") -> "SlopeClass":
        """The class with the larger slope index (what a split union belongs to)."""
        return self if self.sigma >= other.sigma else other


def _parse_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise ValidationError(f"expected a rational, got {v!r}")
    if isinstance(v, (int, str)):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"malformed rational {v!r}") from None
    raise ValidationError(f"expected an integer or 'num/den' string, got {v!r}")


class JonesGrid:
    """Coefficient table d^{(m,n)}_{m_1..m_N} of a special link's Jones expansion."""

    def __init__(self, N: int, cls, order: int, entries):
        if N < 0:
            raise DomainError("component count must be >= 0")
        if order < 0:
            raise DomainError("grid order must be >= 0")
        self.N = N
        self.cls = SlopeClass.parse(cls)
        self.order = order
        e = {}
        for key, v in dict(entries).items():
            m, n, multi = key
            multi = tuple(multi)
            if len(multi) != N:
                raise ValidationError(f"entry {key}: multi-index has {len(multi)} parts, N = {N}")
            if any(x < 0 for x in multi) or sum(multi) != m:
                raise ValidationError(f"entry {key}: multi-index must be >= 0 and sum to m")
            if m + n > order:
                continue
            v = Fraction(v)
            if v:
                e[(m, n, multi)] = e.get((m, n, multi), Fraction(0)) + v
        self._e = {k: v for k, v in e.items() if v}

    # -- access ---------------------------------------------------------
    def get(self, m, n, multi) -> Fraction:
        return self._e.get((m, n, tuple(multi)), Fraction(0))

    def items(self):
        return sorted(self._e.items())

    @property
    def entries(self):
        return dict(self._e)

    def column(self, m, n):
        """{multi: value} for one (m, n) cell."""
        return {k[2]: v for k, v in self._e.items() if k[0] == m and k[1] == n}

    def __eq__(self, other):
        if not isinstance(other, JonesGrid):
            return NotImplemented
        return (self.N, self.cls, self.order, self._e) == (other.N, other.cls, other.order, other._e)

    def __repr__(self):
        return f"JonesGrid(N={self.N}, cls={self.cls.value}, order={self.order}, entries={len(self._e)})"

    # -- constructions ----------------------------------------------------
    def truncated(self, order: int) -> "JonesGrid":
        if order > self.order:
            raise DomainError(f"grid of order {self.order} cannot be extended to {order}")
        return JonesGrid(self.N, self.cls, order, self._e)

    def split_union(self, other: "JonesGrid") -> "JonesGrid":
        """Grid of the split union: J factorises, so the grids multiply."""
        order = min(self.order, other.order)
        out = {}
        for (m1, n1, a), x in self._e.items():
            for (m2, n2, b), y in other._e.items():
                m, n = m1 + m2, n1 + n2
                if m + n <= order:
                    key = (m, n, a + b)
                    out[key] = out.get(key, Fraction(0)) + x * y
        return JonesGrid(self.N + other.N, self.cls.weaker(other.cls), order, out)

    def total_at_color_one(self) -> KSeries:
        """J with every color set to 1, as a series in h (must be 1)."""
        c = [Fraction(0)] * (self.order + 1)
        for (m, n, _), v in self._e.items():
            if n + 2 * m <= self.order:
                c[n + 2 * m] += v
        return KSeries(c, self.order)

    # -- serialisation ------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "N": self.N,
            "class": self.cls.value,
            "order": self.order,
            "entries": [
                {"m": m, "n": n, "multi": list(multi), "value": str(v)}
                for (m, n, multi), v in self.items()
            ],
        }

    @classmethod
    def from_json(cls, doc) -> "JonesGrid":
        if not isinstance(doc, dict):
            raise ValidationError("grid document must be a JSON object")
        missing = [k for k in ("N", "class", "order", "entries") if k not in doc]
        if missing:
            raise ValidationError(f"grid document lacks field(s): {', '.join(missing)}")
        entries = {}
        for i, ent in enumerate(doc["entries"]):
            try:
                key = (int(ent["m"]), int(ent["n"]), tuple(int(x) for x in ent["multi"]))
                value = _parse_fraction(ent["value"])
            except (KeyError, TypeError) as exc:
                raise ValidationError(f"grid entries[{i}]: malformed entry ({exc})") from None
            except ValidationError as exc:
                raise ValidationError(f"grid entries[{i}].value: {exc}") from None
            entries[key] = entries.get(key, Fraction(0)) + value
        return cls(int(doc["N"]), SlopeClass.parse(doc["class"]), int(doc["order"]), entries)


class ShiftedJonesGrid(JonesGrid):
    """Grid of the even, shifted polynomial; remembers the shift denominators."""

    def __init__(self, N, cls, order, entries, denominators):
        super().__init__(N, cls, order, entries)
        self.denominators = tuple(denominators)

    def __repr__(self):
        return (f"ShiftedJonesGrid(N={self.N}, cls={self.cls.value}, order={self.order}, "
                f"denominators={self.denominators})")


@dataclass(frozen=True)
class SlopeReport:
    ok: bool
    sigma: Fraction
    violations: tuple = ()

    def message(self) -> str:
        if self.ok:
            return "slope bound satisfied"
        bad = ", ".join(f"(m={m}, n={n}, multi={list(multi)})" for m, n, multi in self.violations)
        return f"entries violate n >= -{self.sigma}*m: {bad}"


def validate_slope(g: JonesGrid, cls=None) -> SlopeReport:
    """Report every entry of ``g`` below the slope line of its class (or of ``cls``)."""
    cls = g.cls if cls is None else SlopeClass.parse(cls)
    bad = tuple(k for k in sorted(g.entries) if not cls.admits(k[0], k[1]))
    return SlopeReport(not bad, cls.sigma, bad)


def check_grid(g: JonesGrid, cls=None) -> None:
    """Raise ValidationError unless ``g`` obeys its slope bound and normalisation."""
    rep = validate_slope(g, cls)
    if not rep.ok:
        raise ValidationError(rep.message())
    zero = (0,) * g.N
    if g.get(0, 0, zero) != 1:
        raise ValidationError(f"grid normalisation d(0,0) = {g.get(0, 0, zero)}, expected 1")
    if g.order >= 1 and g.get(0, 1, zero) != 0:
        raise ValidationError(f"grid has d(0,1) = {g.get(0, 1, zero)}, expected 0")


# --------------------------------------------------------------------------
# concrete grids


def _hcsch_coeffs(order):
    """Coefficients of h/sinh(h) = (pi/K)/sin(pi/K)."""
    return sinhc_series(order).inverse().coeffs


def unknot_grid(order: int) -> JonesGrid:
    """J_{Ka} = sin(pi a)/sin(pi/K): d_{m,n} = [h^n](h/sinh h) / (2m+1)!."""
    if order < 0:
        raise DomainError("order must be >= 0")
    c = _hcsch_coeffs(order)
    entries = {}
    for m in range(order + 1):
        for n in range(order + 1 - m):
            if c[n]:
                entries[(m, n, (m,))] = c[n] / factorial(2 * m + 1)
    return JonesGrid(1, SlopeClass.BL, order, entries)


def empty_grid(order: int) -> JonesGrid:
    return JonesGrid(0, SlopeClass.BL, order, {(0, 0, ()): 1})


def unlink_grid(N: int, order: int) -> JonesGrid:
    g = empty_grid(order)
    for _ in range(N):
        g = g.split_union(unknot_grid(order))
    return g


def load_fixture(name: str, order=None) -> JonesGrid:
    """A grid shipped with the package (``trefoil``) or built in (``unknot``)."""
    if name == "unknot":
        return unknot_grid(order if order is not None else 6)
    try:
        text = resources.files("rhsinv").joinpath(f"data/{name}.json").read_text()
    except FileNotFoundError:
        raise ValidationError(f"no built-in grid fixture named {name!r}") from None
    g = JonesGrid.from_json(json.loads(text))
    return g if order is None else g.truncated(order)


def alexander_diagonal(g: JonesGrid) -> KSeries:
    """sum_n d_{n,0} U^n with U = (i pi a)^2, i.e. sin(pi a) / (pi a Delta_A).

    Only defined for knots (N = 1) with homologically trivial framing data.
    """
    if g.N != 1:
        raise DomainError("the Alexander diagonal is defined for knots (N = 1)")
    return KSeries([g.get(n, 0, (n,)) for n in range(g.order + 1)], g.order)


def conway_from_grid(g: JonesGrid) -> KSeries:
    """Alexander polynomial as a series in z^2, z = -2i sin(pi a).

    Uses Delta_A = (sinh u/u) / D(u^2) with u = i pi a and z^2 = 4 sinh^2 u.
    The coefficient of z^2 is phi_1 of the knot.
    """
    diag = alexander_diagonal(g)
    n = diag.order
    delta_u = sinhc_series(2 * n).coeffs[::2]  # sinh(u)/u in powers of U = u^2
    delta_u = KSeries(delta_u, n) / diag
    # z^2 = 4 sinh^2 u = sum_{k>=1} 2 (4U)^k / (2k)!
    w_of_u = KSeries([0] + [Fraction(2 * 4 ** k, factorial(2 * k)) for k in range(1, n + 1)], n)
    if n == 0:
        return delta_u
    return delta_u.compose(w_of_u.revert())


# --------------------------------------------------------------------------
# Milnor data


def _sorted_key(idx):
    """Sorted index tuple and the sign of the sorting permutation."""
    idx = tuple(idx)
    if len(set(idx)) != len(idx):
        return None, 0
    sign = 1
    lst = list(idx)
    for i in range(len(lst)):
        for j in range(len(lst) - 1 - i):
            if lst[j] > lst[j + 1]:
                lst[j], lst[j + 1] = lst[j + 1], lst[j]
                sign = -sign
    return tuple(lst), sign


@dataclass
class MilnorData:
    """Low-order link data: triple/quartic Milnor numbers and Hoste's phi_1 values.

    ``triples`` maps sorted (i, j, k) to mu_ijk (antisymmetric in its indices),
    ``quartic_pairs`` maps sorted (i, j) to mu_iijj.  The phi_1 maps hold the
    leading Conway coefficients of 1-, 2- and 3-component sublinks; missing pair
    and triple values are derived from the Milnor numbers.
    """

    N: int
    triples: dict = field(default_factory=dict)
    quartic_pairs: dict = field(default_factory=dict)
    phi1_singles: dict = field(default_factory=dict)
    phi1_pairs: dict = field(default_factory=dict)
    phi1_triples: dict = field(default_factory=dict)

    def __post_init__(self):
        self.triples = self._norm(self.triples, 3, int)
        self.quartic_pairs = self._norm(self.quartic_pairs, 2, int)
        self.phi1_pairs = self._norm(self.phi1_pairs, 2, Fraction)
        self.phi1_triples = self._norm(self.phi1_triples, 3, Fraction)
        singles = {}
        for j, v in dict(self.phi1_singles).items():
            self._check_index(j)
            singles[int(j)] = Fraction(v)
        self.phi1_singles = singles

    def _check_index(self, j):
        if not 0 <= j < self.N:
            raise ValidationError(f"component index {j} out of range for N = {self.N}")

    def _norm(self, raw, arity, kind):
        out = {}
        for key, v in dict(raw).items():
            key = tuple(key)
            if len(key) != arity:
                raise ValidationError(f"index {key} should have {arity} parts")
            for j in key:
                self._check_index(j)
            skey, sign = _sorted_key(key)
            if skey is None:
                raise ValidationError(f"index {key} repeats a component")
            v = kind(v)
            if arity == 3 and kind is int:
                v *= sign  # mu is antisymmetric
            if v:
                out[skey] = v
        return out

    # accessors ------------------------------------------------------------
    def mu(self, i, j, k) -> int:
        skey, sign = _sorted_key((i, j, k))
        if skey is None:
            return 0
        return sign * self.triples.get(skey, 0)

    def phi1_single(self, j) -> Fraction:
        return self.phi1_singles.get(j, Fraction(0))

    def phi1_pair(self, i, j) -> Fraction:
        key = tuple(sorted((i, j)))
        if key in self.phi1_pairs:
            return self.phi1_pairs[key]
        return Fraction(self.quartic_pairs.get(key, 0))

    def phi1_triple(self, i, j, k) -> Fraction:
        key = tuple(sorted((i, j, k)))
        if key in self.phi1_triples:
            return self.phi1_triples[key]
        return Fraction(self.triples.get(key, 0) ** 2)

    def has_singles(self) -> bool:
        return len(self.phi1_singles) == self.N or self.N == 0

    def validate(self, cls=None) -> None:
        """Cross-check phi_1 against Milnor numbers and the link class."""
        for key, v in self.phi1_pairs.items():
            if key in self.quartic_pairs and self.quartic_pairs[key] != v:
                raise ValidationError(
                    f"phi1 pair {list(key)} = {v} disagrees with mu_iijj = {self.quartic_pairs[key]}")
        for key, v in self.phi1_triples.items():
            if key in self.triples and self.triples[key] ** 2 != v:
                raise ValidationError(
                    f"phi1 triple {list(key)} = {v} disagrees with mu_ijk^2 = {self.triples[key] ** 2}")
        if cls is None:
            return
        cls = SlopeClass.parse(cls)
        if cls in (SlopeClass.SASL, SlopeClass.BL):
            if self.triples or self.phi1_triples:
                raise ValidationError(f"{cls.value} links have vanishing triple Milnor numbers")
        if cls is SlopeClass.BL:
            if self.quartic_pairs or self.phi1_pairs:
                raise ValidationError("boundary links have vanishing Milnor numbers")

    def restrict(self, keep) -> "MilnorData":
        """Data of the sublink on components ``keep`` (re-indexed 0..len-1)."""
        keep = list(keep)
        pos = {c: i for i, c in enumerate(keep)}

        def sub(d):
            return {tuple(pos[c] for c in k): v for k, v in d.items() if all(c in pos for c in k)}

        return MilnorData(
            N=len(keep),
            triples=sub(self.triples),
            quartic_pairs=sub(self.quartic_pairs),
            phi1_singles={pos[c]: v for c, v in self.phi1_singles.items() if c in pos},
            phi1_pairs=sub(self.phi1_pairs),
            phi1_triples=sub(self.phi1_triples),
        )


def asl_low_order_grid(m: MilnorData, order: int = 1, cls=SlopeClass.ASL) -> JonesGrid:
    """Order-1 grid from phi_1 data of 1-, 2- and 3-component sublinks.

    Builds the d-entries whose shifts give

        dt_{1,0}  = -12 sum_j (phi_1(L_j) - 1/24) a_j^2,
        dt_{2,-1} =  12 sum_{i<j} phi_1(L_i, L_j) a_i^2 a_j^2,
        dt_{3,-2} = -12 sum_{i<j<k} phi_1(L_i, L_j, L_k) a_i^2 a_j^2 a_k^2,

    (the shift multiplies these cells by 3, 9 and 27) plus d_{0,0} = 1.
    Nothing beyond the order-1 window is determined by this data.
    """
    cls = SlopeClass.parse(cls)
    if order != 1:
        raise DomainError(
            f"low-order Milnor data determines only the order-1 window (requested {order})")
    if not m.has_singles():
        raise ValidationError("phi1 singles must be given for every component")
    m.validate(cls)
    N = m.N
    e = {(0, 0, (0,) * N): Fraction(1)}

    def unit(*idx):
        v = [0] * N
        for i in idx:
            v[i] += 1
        return tuple(v)

    for j in range(N):
        e[(1, 0, unit(j))] = -12 * (m.phi1_single(j) - Fraction(1, 24)) / 3
    for i, j in itertools.combinations(range(N), 2):
        v = m.phi1_pair(i, j)
        if v:
            e[(2, -1, unit(i, j))] = 12 * v / 9
    for i, j, k in itertools.combinations(range(N), 3):
        v = m.phi1_triple(i, j, k)
        if v:
            e[(3, -2, unit(i, j, k))] = -12 * v / 27
    g = JonesGrid(N, cls, order, e)
    check_grid(g)
    return g


# --------------------------------------------------------------------------
# operations


def shift_grid(g: JonesGrid, denominators) -> ShiftedJonesGrid:
    """Even part of the shifted polynomial, one denominator P_j = p_j + q_j l_jj per component.

    For each component the odd function a F(a^2) is replaced by
    (P/2) K [F(a + e) - F(a - e)] with e = 1/(K P), i.e. a^{2m+1} ->
    sum_l C(2m+1, 2l+1) P^{-2l} a^{2(m-l)} K^{-2l}; each unit of shift turns
    two powers of i pi a into two powers of h.  A denominator of ``None`` leaves
    that component untouched.
    """
    dens = list(denominators)
    if len(dens) != g.N:
        raise DomainError(f"need {g.N} denominators, got {len(dens)}")
    for d in dens:
        if d is not None and d == 0:
            raise DegenerateSurgeryError("shift denominator p + q l vanishes")
    inv_sq = [None if d is None else Fraction(1, d * d) for d in dens]
    out = {}
    for (m, n, multi), v in g.entries.items():
        ranges = [range(1) if inv_sq[j] is None else range(multi[j] + 1) for j in range(g.N)]
        for ls in itertools.product(*ranges):
            L = sum(ls)
            if m + n + L > g.order:
                continue
            c = v
            for j, l in enumerate(ls):
                if inv_sq[j] is not None:
                    c *= comb(2 * multi[j] + 1, 2 * l + 1) * inv_sq[j] ** l
            key = (m - L, n + 2 * L, tuple(a - b for a, b in zip(multi, ls)))
            out[key] = out.get(key, Fraction(0)) + c
    return ShiftedJonesGrid(g.N, g.cls, g.order, out, dens)


def remove_component(g: JonesGrid, j: int) -> JonesGrid:
    """Drop component ``j`` by setting its color to 1 (a_j = 1/K).

    a_j^{2 m_j} becomes K^{-2 m_j}, so (m, n) -> (m - m_j, n + 2 m_j).
    """
    if not 0 <= j < g.N:
        raise DomainError(f"component {j} out of range for N = {g.N}")
    out = {}
    for (m, n, multi), v in g.entries.items():
        mj = multi[j]
        key = (m - mj, n + 2 * mj, multi[:j] + multi[j + 1:])
        out[key] = out.get(key, Fraction(0)) + v
    return JonesGrid(g.N - 1, g.cls, g.order, out)
