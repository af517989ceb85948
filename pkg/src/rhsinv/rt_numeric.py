"""Finite-K Reshetikhin-Turaev surgery sums for surgeries on unlinks.

Double precision throughout; every sum has at most K|q| unit-modulus terms and
is accumulated with ``math.fsum`` on real and imaginary parts separately.
"""

import cmath
import math
from dataclasses import dataclass
from statistics import linear_regression

from .errors import DomainError
from .numtheory import (
    SL2Matrix,
    SurgeryCoeff,
    complete_surgery_matrix,
    dedekind_sum,
    rademacher_phi,
    signature,
    total_linking_matrix,
)

__all__ = [
    "RTLevel",
    "ComplexValue",
    "u_tilde",
    "u_hat",
    "z_sphere",
    "rt_unknot_surgery",
    "z_trivial_lens",
    "z_trivial_unknot_surgery",
    "residual_rows",
    "fit_decay_exponent",
]

ComplexValue = complex


@dataclass(frozen=True)
class RTLevel:
    """Level k of the SU(2) theory; K = k + 2."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise DomainError(f"level k = {self.k} must be >= 1 (K >= 3)")

    @property
    def K(self) -> int:
        return self.k + 2

    @classmethod
    def from_K(cls, K: int) -> "RTLevel":
        return cls(K - 2)


def _csum(terms) -> complex:
    terms = list(terms)
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def _finite(z: complex) -> complex:
    if not cmath.isfinite(z):
        raise ArithmeticError(f"non-finite result {z}")
    return z


def _check_color(name, v, K):
    if not 1 <= v <= K - 1:
        raise DomainError(f"color {name} = {v} outside 1..{K - 1}")


def _sgn(x) -> int:
    return 1 if x > 0 else -1


def u_tilde(m: SL2Matrix, alpha: int, beta: int, level: RTLevel) -> complex:
    """Matrix element of the SL(2, Z) representation on level-k characters."""
    K = level.K
    _check_color("alpha", alpha, K)
    _check_color("beta", beta, K)
    p, q, s = m.p, m.q, m.s
    if q == 0:
        raise DomainError("u_tilde needs q != 0")
    pre = 1j * _sgn(q) / math.sqrt(2 * K * abs(q)) * cmath.exp(-1j * math.pi / 4 * float(rademacher_phi(m)))
    terms = []
    for n in range(abs(q)):
        for mu in (1, -1):
            x = 2 * K * n + mu * beta
            # reduce the exponent mod 4Kq before converting to float
            e = (p * alpha * alpha - 2 * alpha * x + s * x * x) % (4 * K * abs(q))
            terms.append(mu * cmath.exp(1j * math.pi * float(e) / (2 * K * q)))
    return _finite(pre * _csum(terms))


def u_hat(c: SurgeryCoeff, alpha: int, beta: int, level: RTLevel, m: SL2Matrix = None) -> complex:
    """u_tilde with only the n = 0 term kept, in closed form."""
    K = level.K
    _check_color("alpha", alpha, K)
    _check_color("beta", beta, K)
    m = complete_surgery_matrix(c) if m is None else m
    if (m.p, m.q) != (c.p, c.q):
        raise DomainError("completion does not match the surgery coefficients")
    p, q, s = m.p, m.q, m.s
    val = (math.sqrt(2 / (K * abs(q))) * _sgn(q)
           * cmath.exp(-1j * math.pi / 4 * float(rademacher_phi(m)))
           * math.sin(math.pi * alpha * beta / (K * q))
           * cmath.exp(1j * math.pi / (2 * K * q) * (p * alpha * alpha + s * beta * beta)))
    return _finite(val)


def z_sphere(level: RTLevel) -> float:
    K = level.K
    return math.sqrt(2 / K) * math.sin(math.pi / K)


def rt_unknot_surgery(surgeries, level: RTLevel, completions=None) -> complex:
    """Z(M'; k) for rational surgeries on the components of a split unlink.

    ``completions`` optionally fixes the SL(2, Z) matrix used for each
    component; the result does not depend on that choice.
    """
    K = level.K
    surgeries = [c if isinstance(c, SurgeryCoeff) else SurgeryCoeff(*c) for c in surgeries]
    if completions is None:
        completions = [complete_surgery_matrix(c) for c in surgeries]
    if len(completions) != len(surgeries):
        raise DomainError("one completion per surgery is needed")
    N = len(surgeries)
    zero = [[0] * N for _ in range(N)]
    sig = signature(total_linking_matrix(surgeries, zero)) if N else 0
    phis = 0.0
    z = complex(z_sphere(level))
    s1 = math.sin(math.pi / K)
    for c, m in zip(surgeries, completions):
        if (m.p, m.q) != (c.p, c.q):
            raise DomainError(f"completion {m.rows()} does not start with ({c.p}, {c.q})")
        phis += float(rademacher_phi(m))
        z *= _csum(math.sin(math.pi * a / K) / s1 * u_tilde(m, a, 1, level) for a in range(1, K))
    phase = math.pi / 4 * (K - 2) / K * (phis - 3 * sig)
    return _finite(cmath.exp(1j * phase) * z)


def z_trivial_lens(p: int, q: int, level: RTLevel) -> complex:
    """Trivial-connection part for L(p, q), from the closed-form series resummed."""
    K = level.K
    if p == 0:
        raise DomainError("L(0, q) is not a rational homology sphere")
    x = math.pi / (K * abs(p))
    return math.sqrt(2 / (K * abs(p))) * math.sin(x) * cmath.exp(-6j * math.pi * float(dedekind_sum(q, p)) / K)


def z_trivial_unknot_surgery(surgeries, level: RTLevel) -> complex:
    """Z^(tr) of surgery (p_j, q_j) on a split unlink: connected sum of lens spaces.

    Surgery (p, q) on the unknot gives L(p, -r) for the completion ((p, r), (q, s));
    its trivial-connection part depends only on q^{-1} mod p via s(q, p).
    """
    z = complex(1.0)
    zs = z_sphere(level)
    for c in surgeries:
        c = c if isinstance(c, SurgeryCoeff) else SurgeryCoeff(*c)
        z *= z_trivial_lens(c.p, c.q, level) / zs
    return z * zs


def residual_rows(surgeries, Ks):
    """Rows (k, K, re Z, im Z, |Z - Z^(tr)|) for a sweep over K."""
    rows = []
    for K in Ks:
        lv = RTLevel.from_K(K)
        z = rt_unknot_surgery(surgeries, lv)
        rows.append((lv.k, K, z.real, z.imag, abs(z - z_trivial_unknot_surgery(surgeries, lv))))
    return rows


def fit_decay_exponent(Ks, values) -> float:
    """Least-squares slope of log|value| against log K."""
    if len(Ks) != len(values) or len(Ks) < 2:
        raise DomainError("need at least two (K, value) pairs")
    slope, _ = linear_regression([math.log(k) for k in Ks], [math.log(abs(v)) for v in values])
    return slope
