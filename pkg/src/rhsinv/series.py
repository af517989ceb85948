"""Truncated power series in h = i*pi/K and the stationary-phase engine.

All invariants are carried as ``KSeries``: rational coefficients of powers of
``h``, truncated at an explicit order.  Because ``h`` already absorbs the
``i`` and ``pi``, coefficients stay rational.  The one-variable stationary
phase engine works with raw powers of ``1/K``, where factors of ``i`` do show
up; it uses ``GaussianRational``.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import DomainError

log = logging.getLogger(__name__)

__all__ = [
    "KSeries",
    "GaussianRational",
    "EvGrid",
    "series_log",
    "series_exp",
    "sphere_series",
    "sinhc_series",
    "stationary_phase_delta",
    "ev_grid_from_phase",
]


class KSeries:
    """Sum_{n=0}^{order} c_n h^n with Fraction coefficients, truncated at ``order``."""

    __slots__ = ("_c",)

    def __init__(self, coeffs, order=None):
        c = [Fraction(x) for x in coeffs]
        if order is None:
            order = len(c) - 1
        if order < 0:
            raise DomainError("truncation order must be >= 0")
        c = c[: order + 1]
        c.extend([Fraction(0)] * (order + 1 - len(c)))
        self._c = tuple(c)

    @classmethod
    def zero(cls, order):
        return cls([], order)

    @classmethod
    def one(cls, order):
        return cls([1], order)

    @classmethod
    def h(cls, order):
        return cls([0, 1], order)

    @property
    def order(self) -> int:
        return len(self._c) - 1

    @property
    def coeffs(self):
        return self._c

    def __getitem__(self, n):
        return self._c[n]

    def __len__(self):
        return len(self._c)

    def __iter__(self):
        return iter(self._c)

    def __eq__(self, other):
        if isinstance(other, KSeries):
            return self._c == other._c
        return NotImplemented

    def __hash__(self):
        return hash(self._c)

    def __repr__(self):
        terms = ", ".join(str(c) for c in self._c)
        return f"KSeries([{terms}])"

    def truncate(self, order):
        if order > self.order:
            raise DomainError(f"cannot extend a series of order {self.order} to {order}")
        return KSeries(self._c, order)

    def _align(self, other):
        if not isinstance(other, KSeries):
            other = KSeries([other], self.order)
            return self, other
        if other.order != self.order:
            n = min(self.order, other.order)
            log.warning("mixing series of orders %d and %d; truncating to %d",
                        self.order, other.order, n)
            return self.truncate(n), other.truncate(n)
        return self, other

    def __add__(self, other):
        a, b = self._align(other)
        return KSeries([x + y for x, y in zip(a._c, b._c)])

    __radd__ = __add__

    def __neg__(self):
        return KSeries([-x for x in self._c])

    def __sub__(self, other):
        a, b = self._align(other)
        return KSeries([x - y for x, y in zip(a._c, b._c)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, KSeries):
            other = Fraction(other)
            return KSeries([x * other for x in self._c])
        a, b = self._align(other)
        n = a.order
        out = [Fraction(0)] * (n + 1)
        for i, x in enumerate(a._c):
            if x:
                for j in range(n + 1 - i):
                    out[i + j] += x * b._c[j]
        return KSeries(out)

    __rmul__ = __mul__

    def inverse(self):
        c0 = self._c[0]
        if c0 == 0:
            raise DomainError("series with zero constant term has no inverse")
        n = self.order
        out = [Fraction(0)] * (n + 1)
        out[0] = 1 / c0
        for k in range(1, n + 1):
            acc = sum((self._c[j] * out[k - j] for j in range(1, k + 1)), Fraction(0))
            out[k] = -acc / c0
        return KSeries(out)

    def __truediv__(self, other):
        if isinstance(other, KSeries):
            return self * other.inverse()
        return self * (1 / Fraction(other))

    def derivative(self):
        """d/dh, losing one order of precision."""
        return KSeries([k * c for k, c in enumerate(self._c)][1:], max(self.order - 1, 0))

    def exp(self):
        return series_exp(self)

    def log(self):
        return series_log(self)

    def compose(self, inner: "KSeries") -> "KSeries":
        """self(inner(h)); ``inner`` must have zero constant term."""
        if inner[0] != 0:
            raise DomainError("inner series of a composition must vanish at h = 0")
        a, b = self._align(inner)
        out = KSeries.zero(a.order)
        power = KSeries.one(a.order)
        for c in a._c:
            if c:
                out = out + power * c
            power = power * b
        return out

    def revert(self) -> "KSeries":
        """Compositional inverse; needs c0 = 0 and c1 != 0."""
        if self._c[0] != 0 or self.order < 1 or self._c[1] == 0:
            raise DomainError("series reversion needs c0 = 0 and c1 != 0")
        n = self.order
        # fixed point  g = (h - (f(g) - c1 g)) / c1, one order per sweep
        rest = KSeries([0, 0] + list(self._c[2:]), n)
        g = KSeries([0, 1 / self._c[1]], n)
        ident = KSeries.h(n)
        for _ in range(n):
            g = (ident - rest.compose(g)) / self._c[1]
        return g


def series_exp(s: KSeries) -> KSeries:
    """exp of a series with zero constant term (recurrence n e_n = sum k s_k e_{n-k})."""
    if s[0] != 0:
        raise DomainError("exp needs a series with zero constant term")
    n = s.order
    e = [Fraction(0)] * (n + 1)
    e[0] = Fraction(1)
    for k in range(1, n + 1):
        e[k] = sum((j * s[j] * e[k - j] for j in range(1, k + 1)), Fraction(0)) / k
    return KSeries(e)


def series_log(s: KSeries) -> KSeries:
    """log of a series with constant term 1."""
    if s[0] != 1:
        raise DomainError(f"log needs constant term 1, got {s[0]}")
    n = s.order
    out = [Fraction(0)] * (n + 1)
    for k in range(1, n + 1):
        acc = k * s[k] - sum((j * out[j] * s[k - j] for j in range(1, k)), Fraction(0))
        out[k] = acc / k
    return KSeries(out)


def sinhc_series(order: int, scale=Fraction(1)) -> KSeries:
    """sinh(c h)/(c h) as a series in h."""
    scale = Fraction(scale)
    c = [Fraction(0)] * (order + 1)
    for k in range(0, order // 2 + 1):
        c[2 * k] = scale ** (2 * k) / factorial(2 * k + 1)
    return KSeries(c)


def sphere_series(n_max: int) -> KSeries:
    """Sum_n S_n(S^3) h^n = log((K/pi) sin(pi/K)) = log(sinh(h)/h)."""
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    return series_log(sinhc_series(n_max))


@dataclass(frozen=True)
class GaussianRational:
    """re + i*im with Fraction parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        return cls(Fraction(x), Fraction(0))

    def __add__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.coerce(other)
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return self * GaussianRational(o.re / den, -o.im / den)

    def __pow__(self, k: int):
        out = GaussianRational(1)
        base = self
        if k < 0:
            base, k = GaussianRational(1) / base, -k
        for _ in range(k):
            out = out * base
        return out

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self):
        return self.im == 0

    def real_part(self) -> Fraction:
        """The value as a Fraction; asserts the imaginary part vanishes."""
        assert self.im == 0, f"expected a real value, got {self}"
        return self.re

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"


I = GaussianRational(0, 1)


class EvGrid:
    """Coefficients d_{m,n} of G_ev = sum d_{m,n} a^{2m} K^{-n}.

    Every stored entry must satisfy n >= -(2/3) m.
    """

    def __init__(self, entries):
        self._e = {}
        for (m, n), v in dict(entries).items():
            if m < 0:
                raise DomainError(f"negative a-degree in entry ({m}, {n})")
            if 3 * n < -2 * m:
                raise DomainError(f"entry ({m}, {n}) violates n >= -2m/3")
            v = GaussianRational.coerce(v)
            if v:
                self._e[(m, n)] = v

    @property
    def entries(self):
        return dict(self._e)

    def get(self, m, n):
        return self._e.get((m, n), GaussianRational(0))

    def __repr__(self):
        return f"EvGrid({self._e!r})"


def stationary_phase_delta(fpp, grid: EvGrid, n_max: int):
    """Coefficients Delta_0..Delta_{n_max} of the stationary-phase series.

    For I(K) = int e^{iK f(a)} g(a, K) da around a = 0,

        I(K) = e^{iK f(0)} e^{i pi sign(f'')/4} sqrt(2 pi / (K |f''|)) sum_n Delta_n K^{-n},
        Delta_n = sum_{m=0}^{3n} (2m)!/m! (i / (2 f''))^m d_{m, n-m}.
    """
    fpp = Fraction(fpp)
    if fpp == 0:
        raise DomainError("degenerate phase: f''(0) = 0")
    unit = I / (2 * fpp)
    out = []
    for n in range(n_max + 1):
        acc = GaussianRational(0)
        for m in range(0, 3 * n + 1):
            d = grid.get(m, n - m)
            if d:
                acc = acc + d * (unit ** m) * Fraction(factorial(2 * m), factorial(m))
        out.append(acc)
    return out


def _poly_mul(a, b, limit2):
    """Multiply {(a_deg, kpow): coeff} dicts, dropping weight a_deg/2 + kpow above limit."""
    out = {}
    for (da, ka), x in a.items():
        for (db, kb), y in b.items():
            d, k = da + db, ka + kb
            if d + 2 * k > limit2:
                continue
            out[(d, k)] = out.get((d, k), GaussianRational(0)) + x * y
    return out


def ev_grid_from_phase(f_coeffs, g_coeffs, n_max: int) -> EvGrid:
    """Build the even-part grid of G = exp(iK (f - f(0) - f'' a^2/2)) g.

    ``f_coeffs[k]`` is the coefficient of a^k in f; entries k < 3 are ignored.
    ``g_coeffs`` maps (k, j) to the coefficient of a^k K^{-j} (j >= 0).
    Entries with m + n > n_max cannot reach Delta_{n_max} and are dropped.
    """
    limit2 = 2 * n_max  # weights doubled: a^d K^{-k} weighs d/2 + k
    cubic = {}
    for k, c in enumerate(f_coeffs):
        if k >= 3 and c:
            # iK c a^k  ->  kpow = -1
            cubic[(k, -1)] = I * Fraction(c)
    g = {}
    for (k, j), c in dict(g_coeffs).items():
        if j < 0:
            raise DomainError("g may only contain non-positive powers of K")
        if k + 2 * j <= limit2:
            g[(k, j)] = GaussianRational.coerce(c)

    # exp(cubic): every cubic term has positive weight, so the sum is finite
    expo = {(0, 0): GaussianRational(1)}
    term = {(0, 0): GaussianRational(1)}  # cubic**j, without the 1/j!
    j = 0
    while True:
        j += 1
        term = _poly_mul(term, cubic, limit2)
        if not term:
            break
        for key, v in term.items():
            expo[key] = expo.get(key, GaussianRational(0)) + v * Fraction(1, factorial(j))
    G = _poly_mul(expo, g, limit2)
    entries = {}
    for (d, k), v in G.items():
        if d % 2 == 0 and v:
            entries[(d // 2, k)] = v
    return EvGrid(entries)
