"""Exact number-theoretic primitives for surgery kinematics.

Dedekind sums, the Rademacher function of an SL(2,Z) surgery matrix and the
signature of a rational symmetric matrix.  Everything is exact; no floating
point enters.

Sign conventions for a negative denominator follow the cotangent sum taken
literally over ``j = 1 .. |q|-1`` with the ``1/(4q)`` prefactor keeping its
sign, which gives ``s(p, -q) = -s(p, q)`` and ``s(-p, -q) = s(p, q)``.  With
this choice the reciprocity law carries a ``sign(pq)`` term and a slope
``(p, q)`` and its negative ``(-p, -q)`` give identical framing data.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import floor, gcd

from .errors import DomainError, NotRHSError

__all__ = [
    "SurgeryCoeff",
    "SL2Matrix",
    "sawtooth",
    "dedekind_sum",
    "dedekind_sum_sawtooth",
    "rademacher_phi",
    "complete_surgery_matrix",
    "total_linking_matrix",
    "signature",
]

# below this denominator the direct sawtooth sum is cheaper than recursion
_SAWTOOTH_CUTOFF = 24


@dataclass(frozen=True)
class SurgeryCoeff:
    """A rational surgery slope ``p/q`` with coprime integers, ``q != 0``."""

    p: int
    q: int

    def __post_init__(self):
        if self.q == 0:
            raise DomainError("q = 0 is not a surgery")
        if gcd(self.p, self.q) != 1:
            raise DomainError(f"surgery coefficients ({self.p}, {self.q}) are not coprime")

    @property
    def slope(self) -> Fraction:
        return Fraction(self.p, self.q)


@dataclass(frozen=True)
class SL2Matrix:
    """The matrix ``((p, r), (q, s))`` with ``p*s - q*r = 1``."""

    p: int
    r: int
    q: int
    s: int

    def __post_init__(self):
        if self.p * self.s - self.q * self.r != 1:
            raise DomainError(f"det{self.rows()} != 1")

    def rows(self):
        return ((self.p, self.r), (self.q, self.s))

    def shifted(self, k: int = 1) -> "SL2Matrix":
        """The other completion ``(r + k p, s + k q)`` of the same first column."""
        return SL2Matrix(self.p, self.r + k * self.p, self.q, self.s + k * self.q)


def sawtooth(x: Fraction) -> Fraction:
    """((x)) = x - floor(x) - 1/2 off the integers, 0 on them."""
    x = Fraction(x)
    if x.denominator == 1:
        return Fraction(0)
    return x - floor(x) - Fraction(1, 2)


def _check_pair(p: int, q: int) -> None:
    if q == 0:
        raise DomainError("Dedekind sum s(p, 0) is undefined")
    if gcd(p, q) != 1:
        raise DomainError(f"Dedekind sum needs coprime arguments, got ({p}, {q})")


def dedekind_sum_sawtooth(p: int, q: int) -> Fraction:
    """Direct O(|q|) evaluation  s(p,q) = sign(q) * sum_j ((j/|q|)) ((pj/|q|))."""
    _check_pair(p, q)
    n = abs(q)
    # ((j/n)) = (2j - n) / 2n for 0 < j < n; p j is never 0 mod n since gcd(p, n) = 1
    acc = sum((2 * j - n) * (2 * (p * j % n) - n) for j in range(1, n))
    total = Fraction(acc, 4 * n * n)
    return total if q > 0 else -total


def dedekind_sum(p: int, q: int) -> Fraction:
    """Exact Dedekind sum s(p, q).

    Small denominators use the sawtooth sum; larger ones run the reciprocity
    law as a Euclidean recursion, O(log q) steps.

    >>> dedekind_sum(1, 3)
    Fraction(1, 18)
    >>> dedekind_sum(5, 7)
    Fraction(-1, 14)
    """
    _check_pair(p, q)
    sign = 1
    if q < 0:
        q, sign = -q, -sign
    if p < 0:
        p, sign = -p, -sign
    if q <= _SAWTOOTH_CUTOFF:
        return sign * dedekind_sum_sawtooth(p, q)

    total = Fraction(0)
    flip = 1
    p %= q
    while p != 0:
        # s(p,q) = (p^2 + q^2 + 1)/(12pq) - 1/4 - s(q mod p, p)
        total += flip * (Fraction(p * p + q * q + 1, 12 * p * q) - Fraction(1, 4))
        flip = -flip
        p, q = q % p, p
    return sign * total


def rademacher_phi(m: SL2Matrix) -> Fraction:
    """Phi(U) = (p + s)/q - 12 s(p, q); undefined (rejected) for q = 0."""
    if m.q == 0:
        raise DomainError("Rademacher function is not defined for q = 0")
    return Fraction(m.p + m.s, m.q) - 12 * dedekind_sum(m.p, m.q)


def complete_surgery_matrix(c: SurgeryCoeff) -> SL2Matrix:
    """Canonical completion of ``(p, q)`` to an SL(2,Z) matrix.

    ``s`` is the representative of ``p^{-1} mod |q|`` in ``[0, |q|)`` and
    ``r = (p s - 1)/q``.  Every other completion is ``shifted(k)`` of this one.
    """
    n = abs(c.q)
    s = 0 if n == 1 else pow(c.p, -1, n)
    r, rem = divmod(c.p * s - 1, c.q)
    assert rem == 0
    return SL2Matrix(c.p, r, c.q, s)


def total_linking_matrix(coeffs, linking):
    """L_tot[i][j] = l_ij + (p_j/q_j) delta_ij, as a tuple of Fraction rows."""
    n = len(coeffs)
    rows = []
    for i in range(n):
        if len(linking[i]) != n:
            raise DomainError("linking matrix is not square")
        row = []
        for j in range(n):
            if linking[i][j] != linking[j][i]:
                raise DomainError("linking matrix is not symmetric")
            v = Fraction(linking[i][j])
            if i == j:
                v += coeffs[i].slope
            row.append(v)
        rows.append(tuple(row))
    return tuple(rows)


def signature(m) -> int:
    """Signature of a nondegenerate symmetric rational matrix.

    Computed by symmetric Gaussian elimination (congruence), so the result is
    exact.  A singular matrix means the surgery is not a rational homology
    sphere and raises NotRHSError.
    """
    a = [[Fraction(x) for x in row] for row in m]
    n = len(a)
    for i in range(n):
        if len(a[i]) != n or any(a[i][j] != a[j][i] for j in range(n)):
            raise DomainError("signature needs a symmetric square matrix")

    pos = neg = 0
    live = list(range(n))
    while live:
        piv = next((i for i in live if a[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in live for j in live if i != j and a[i][j] != 0), None)
            if pair is None:
                raise NotRHSError("total linking matrix is singular")
            i, j = pair
            # row/col i += row/col j makes a[i][i] = 2 a[i][j] + a[j][j] nonzero
            # for one of the two signs
            t = 1 if 2 * a[i][j] + a[j][j] != 0 else -1
            for k in range(n):
                a[i][k] += t * a[j][k]
            for k in range(n):
                a[k][i] += t * a[k][j]
            piv = i
        d = a[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        live.remove(piv)
        for i in live:
            f = a[i][piv] / d
            if f:
                for k in live:
                    a[i][k] -= f * a[piv][k]
        for i in live:
            a[i][piv] = a[piv][i] = Fraction(0)
    return pos - neg
