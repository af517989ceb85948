"""Finite-type structure of the perturbative invariants.

Two kinds of alternating sums: over sublinks of a surgery presentation, and
over shifts q -> q + sum(mu_j) of a knot's surgery coefficient.  The sublink
sum of S_n on a 3n-component algebraically split link is also computed
diagrammatically, from trivalent graphs whose vertices carry triple Milnor
numbers and whose weights are epsilon-tensor contractions.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import DegenerateSurgeryError, DomainError, ValidationError
from .jones import JonesGrid, MilnorData, SlopeClass, shift_grid
from .numtheory import SurgeryCoeff
from .surgery import SurgeryPresentation, _delta_from_shifted, perturbative_invariants

__all__ = [
    "SublinkMask",
    "alternating_sum_sublinks",
    "surgery_shift_alternating_sum",
    "shift_sum_closed_form",
    "shift_sum_uncorrected_form",
    "Diagram",
    "enumerate_diagrams",
    "diagram_weight",
    "diagram_sum",
    "DiagramReport",
    "diagram_report",
]


# --------------------------------------------------------------------------
# sublinks


@dataclass(frozen=True)
class SublinkMask:
    """Subset of the components of an N-component link, as a bitmask."""

    N: int
    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < (1 << self.N):
            raise DomainError(f"mask {self.bits:b} does not fit {self.N} components")

    @property
    def members(self):
        return tuple(j for j in range(self.N) if self.bits >> j & 1)

    def __len__(self):
        return bin(self.bits).count("1")

    @classmethod
    def all(cls, N):
        return [cls(N, b) for b in range(1 << N)]


def alternating_sum_sublinks(sp: SurgeryPresentation, n: int) -> Fraction:
    """sum over sublinks L' of (-1)^{#L'} S_n(surgery on L'); L' = {} gives S_n(M)."""
    if n < 1:
        raise DomainError("n must be >= 1")
    total = Fraction(0)
    for mask in SublinkMask.all(sp.N):
        S = perturbative_invariants(sp.sublink(mask.members), n).S[n]
        total += -S if len(mask) % 2 else S
    return total


# --------------------------------------------------------------------------
# shifts of the surgery coefficient


def surgery_shift_alternating_sum(grid: JonesGrid, p: int, q: int, n: int, n_prime: int,
                                  level: str = "S") -> Fraction:
    """sum over mu in {+-1}^n of (prod mu) X_{n'}(surgery (p, q + sum mu) on the knot).

    ``level`` selects X = S (the invariants themselves) or X = Delta (the
    Gaussian moments before the logarithm and framing correction).
    """
    if grid.N != 1:
        raise DomainError("shift sums are defined for knots (N = 1)")
    if n < 1 or n_prime < 1:
        raise DomainError("n and n' must be >= 1")
    if level not in ("S", "delta"):
        raise DomainError(f"level must be 'S' or 'delta', not {level!r}")
    if grid.order < n_prime:
        raise DomainError(f"grid of order {grid.order} cannot give order {n_prime}")
    if p == 0:
        raise DegenerateSurgeryError("p = 0 is not a rational homology sphere")
    shifted = shift_grid(grid.truncated(n_prime), [p]) if level == "delta" else None
    total = Fraction(0)
    for mu in itertools.product((1, -1), repeat=n):
        qq = q + sum(mu)
        if qq == 0:
            raise DegenerateSurgeryError(f"shifted surgery ({p}, {qq}) is degenerate")
        sign = 1
        for x in mu:
            sign *= x
        if level == "delta":
            val = _delta_from_shifted(shifted, [Fraction(qq, p)], n_prime)[n_prime]
        else:
            sp = SurgeryPresentation([SurgeryCoeff(p, qq)], cls=grid.cls, jones=grid)
            val = perturbative_invariants(sp, n_prime).S[n_prime]
        total += sign * val
    return total


def _partitions(n):
    """Multiplicity vectors (m_1..m_n) with sum j m_j = n."""
    def rec(j, left):
        if j > n:
            if left == 0:
                yield ()
            return
        for mj in range(left // j + 1):
            for rest in rec(j + 1, left - j * mj):
                yield (mj,) + rest
    return list(rec(1, n))


def _diag(grid, j):
    return grid.get(j, 0, (j,))


def shift_sum_closed_form(grid: JonesGrid, p: int, n: int) -> Fraction:
    """Top-degree part of the n-fold shift sum of log(1 + sum Delta_k h^k) at order n.

    Equals the S-level sum for n >= 2 (and for n = 1 up to the framing term):

        -sum_{m} (-1)^{|m|} (|m|-1)! n! / prod(m_j! j!^{m_j}) prod A_j^{m_j},
        A_j = (-1)^j (2j+1)! D_{j,2j} / p^j,   D_{j,2j} = d_{j,0}.
    """
    total = Fraction(0)
    for ms in _partitions(n):
        r = sum(ms)
        term = Fraction(-(-1) ** r * factorial(r - 1) * factorial(n))
        for j, mj in enumerate(ms, start=1):
            A = Fraction((-1) ** j * factorial(2 * j + 1), p ** j) * _diag(grid, j)
            term *= A ** mj / (factorial(mj) * factorial(j) ** mj)
        total += term
    return total


def shift_sum_uncorrected_form(grid: JonesGrid, p: int, n: int) -> Fraction:
    """The closed form without the n!/prod j!^{m_j} factor and with m_j! inside
    the power.  Kept for comparison only; it disagrees
    with the direct sum from n = 2 on."""
    total = Fraction(0)
    for ms in _partitions(n):
        r = sum(ms)
        term = Fraction(-(-1) ** r * factorial(r - 1))
        for j, mj in enumerate(ms, start=1):
            base = Fraction((-1) ** j * factorial(2 * j + 1), factorial(mj) * p ** j) * _diag(grid, j)
            term *= base ** mj
        total += term
    return total


# --------------------------------------------------------------------------
# diagrams


@dataclass(frozen=True)
class Diagram:
    """A vacuum graph whose edges are link components.

    Each vertex is the tuple of edge labels at its slots, in slot order: three
    labels for a triple Milnor vertex (weighted by epsilon), or four labels
    (i, j, i, j) for a quartic vertex mu_iijj (weighted by
    delta_{s0 s2} delta_{s1 s3} - delta_{s0 s3} delta_{s1 s2}).  Every label
    occupies exactly two slots.
    """

    vertices: tuple
    edges: tuple

    def __post_init__(self):
        verts = tuple(tuple(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(set(self.edges)) != len(self.edges):
            raise ValidationError("each component may label at most one edge")
        for v in verts:
            if len(v) not in (3, 4):
                raise ValidationError(f"vertex {v} must have 3 or 4 slots")
            if len(v) == 3 and len(set(v)) != 3:
                raise ValidationError(f"trivalent vertex {v} repeats a label")
        slots = {}
        for vi, v in enumerate(verts):
            for s in v:
                slots.setdefault(s, []).append(vi)
        for e in self.edges:
            if len(slots.get(e, [])) != 2:
                raise ValidationError(f"edge {e} meets {len(slots.get(e, []))} slots, expected 2")
        dangling = set(slots) - set(self.edges)
        if dangling:
            raise ValidationError(f"dangling index: labels {sorted(dangling)} are not edges")
        if not self._connected():
            raise ValidationError("diagram is not connected")
        if self._bridges():
            raise ValidationError(f"diagram has bridge edges {self._bridges()} (not 1PI)")

    def _ends(self):
        ends = {}
        for vi, v in enumerate(self.vertices):
            for s in v:
                ends.setdefault(s, []).append(vi)
        return ends

    def _connected(self, skip=None):
        V = len(self.vertices)
        if V == 0:
            return True
        adj = {i: set() for i in range(V)}
        for e, (a, b) in self._ends().items():
            if e != skip:
                adj[a].add(b)
                adj[b].add(a)
        seen, stack = {0}, [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == V

    def _bridges(self):
        return tuple(e for e in self.edges if not self._connected(skip=e))

    @property
    def loops(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    @property
    def is_theta(self) -> bool:
        return len(self.vertices) == 2 and all(len(v) == 3 for v in self.vertices)


def _eps(a, b, c):
    return (a - b) * (b - c) * (c - a) // 2


def _quartic(a, b, c, d):
    return (a == c) * (b == d) - (a == d) * (b == c)


def diagram_weight(d: Diagram) -> int:
    """Full index contraction over {0, 1, 2}, brute force over edge colorings."""
    edges = d.edges
    pos = {e: i for i, e in enumerate(edges)}
    total = 0
    for colors in itertools.product(range(3), repeat=len(edges)):
        w = 1
        for v in d.vertices:
            idx = [colors[pos[s]] for s in v]
            w *= _eps(*idx) if len(v) == 3 else _quartic(*idx)
            if w == 0:
                break
        total += w
    return total


def _multiset_search(items, size):
    """Multisets of ``size`` items (label tuples) in which every label appears 0 or 2 times."""
    out = []

    def rec(start, chosen, counts):
        if len(chosen) == size:
            if all(c in (0, 2) for c in counts.values()):
                out.append(tuple(chosen))
            return
        for i in range(start, len(items)):
            lab = items[i]
            new = dict(counts)
            ok = True
            for s in lab:
                new[s] = new.get(s, 0) + 1
                if new[s] > 2:
                    ok = False
            if ok:
                rec(i, chosen + [lab], new)

    rec(0, [], {})
    return out


def enumerate_diagrams(milnor: MilnorData, n: int):
    """Connected 1PI trivalent diagrams with n + 1 loops built from nonzero mu_ijk."""
    if n < 1:
        raise DomainError("n must be >= 1")
    triples = sorted(milnor.triples)
    found = set()
    for combo in _multiset_search(triples, 2 * n):
        labels = sorted({s for v in combo for s in v})
        if len(labels) != 3 * n:
            continue
        try:
            found.add(Diagram(combo, labels))
        except ValidationError:
            continue
    return found


def _quartic_diagrams(milnor: MilnorData):
    return {Diagram([(i, j, i, j)], [i, j]) for (i, j) in sorted(milnor.quartic_pairs)}


def _vertex_value(milnor, v):
    if len(v) == 3:
        return milnor.mu(*v)
    return milnor.quartic_pairs.get(tuple(sorted(v[:2])), 0)


def diagram_sum(sp: SurgeryPresentation, n: int):
    """Diagrammatic S~_n; returns (value, [(diagram, weight), ...]).

    Trivalent case (N = 3n):  (-4)^n / (1 + delta_{n1}) prod x_j sum W prod mu.
    Quartic case (SASL, n = 1, N = 2):  2 x_1 x_2 sum W mu_iijj.
    """
    if sp.milnor is None:
        raise DomainError("diagram_sum needs Milnor data")
    x = sp.x
    px = Fraction(1)
    for xj in x:
        px *= xj
    if sp.cls is SlopeClass.SASL and n == 1 and sp.N == 2:
        diagrams = sorted(_quartic_diagrams(sp.milnor), key=lambda d: d.vertices)
        terms = [(d, diagram_weight(d)) for d in diagrams]
        s = sum((w * _vertex_value(sp.milnor, d.vertices[0]) for d, w in terms), 0)
        return 2 * px * s, terms
    if sp.N != 3 * n:
        raise DomainError(f"diagram_sum at order {n} needs {3 * n} components, got {sp.N}")
    diagrams = sorted(enumerate_diagrams(sp.milnor, n), key=lambda d: d.vertices)
    terms = [(d, diagram_weight(d)) for d in diagrams]
    s = 0
    for d, w in terms:
        prod = 1
        for v in d.vertices:
            prod *= _vertex_value(sp.milnor, v)
        s += w * prod
    sym = Fraction(1, 2) if n == 1 else Fraction(1)
    return Fraction((-4) ** n) * sym * px * s, terms


@dataclass(frozen=True)
class DiagramReport:
    order: int
    alternating_sum: Fraction
    diagram_sum: Fraction
    diagrams: tuple

    @property
    def match(self) -> bool:
        return self.alternating_sum == self.diagram_sum


def diagram_report(sp: SurgeryPresentation, n: int) -> DiagramReport:
    value, terms = diagram_sum(sp, n)
    alt = alternating_sum_sublinks(sp, n)
    return DiagramReport(n, alt, value, tuple(terms))
